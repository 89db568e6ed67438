"""Seeded random valid gluing data.

Each datum is a direct sum of Tate-twisted nilpotent blocks wired to the
vanishing side in one of three ways, conjugated by a random bi-filtered
unipotent automorphism and then by a random unimodular change of basis.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .blocks import NilpBlock
from .filtration import IncreasingFiltration
from .gluing import GluingDatum, PsiPiece, direct_sum_gluing, tate_twist_gluing
from .linalg import Matrix, Subspace, inverse
from .mhm import MHSModel


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    max_dim: int = 5
    eigen_denominators: tuple = (1, 2, 3, 4, 5, 6)
    max_weight_span: int = 3
    case_count: int = 1
    max_eigenvalues: int = 3

    def __post_init__(self):
        if self.max_dim < 0 or self.case_count < 0 or self.max_weight_span < 0 or self.max_eigenvalues < 1:
            raise ValueError("generator bounds must be nonnegative")
        if not self.eigen_denominators or any(d < 1 for d in self.eigen_denominators):
            raise ValueError("eigen_denominators must be positive integers")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def _alpha_pool(denominators) -> list[Fraction]:
    pool = {Fraction(0)}
    for d in denominators:
        for j in range(1, d):
            pool.add(Fraction(-j, d))
    return sorted(pool)


def _coordinate_degrees(f: IncreasingFiltration) -> list[int]:
    """Degree of each basis vector for a filtration by coordinate subspaces."""
    out = []
    for i in range(f.ambient_dim):
        e = [0] * f.ambient_dim
        e[i] = 1
        out.append(next(p for p in f.indices if f.step(p).contains_vector(e)))
    return out


def _bifiltered_unipotent(rng: random.Random, mhs: MHSModel) -> Matrix:
    """I + E with E_ij != 0 only where e_i sits no higher than e_j in both F and W."""
    n = mhs.dim
    fd, wd = _coordinate_degrees(mhs.F), _coordinate_degrees(mhs.W)
    order = sorted(range(n), key=lambda i: (fd[i], wd[i], i))
    rank_of = {i: k for k, i in enumerate(order)}
    rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if rank_of[i] < rank_of[j] and fd[i] <= fd[j] and wd[i] <= wd[j] and rng.random() < 0.5:
                rows[i][j] = Fraction(rng.randint(-2, 2))
    return Matrix.from_rows(rows, n)


def _unimodular(rng: random.Random, n: int) -> Matrix:
    m = Matrix.identity(n)
    for _ in range(2 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        rows = m.to_rows()
        c = rng.choice((-1, 1))
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
        m = Matrix.from_rows(rows, n)
    return m


def _conjugate(g: GluingDatum, maps: dict, phi_map: Matrix) -> GluingDatum:
    psi = {}
    for a, p in g.psi.items():
        A = maps[a]
        Ai = inverse(A)
        psi[a] = PsiPiece(MHSModel.make(p.mhs.F.transport(A), p.mhs.W.transport(A)), A @ p.N @ Ai)
    phi = MHSModel.make(g.phi.F.transport(phi_map), g.phi.W.transport(phi_map))
    A0 = maps.get(Fraction(0), Matrix.identity(0))
    return GluingDatum(psi, phi, phi_map @ g.c @ inverse(A0), A0 @ g.v @ inverse(phi_map))


def _junction(kind: str, r: int) -> GluingDatum:
    """A nilpotent block at alpha = 0 together with vanishing data making v c = -N."""
    b = NilpBlock(r)
    N = b.N
    if kind == "a":    # phi = psi_0(-1), c = -N, v = id
        return GluingDatum({Fraction(0): b.piece}, b.mhs.twisted(-1), -N, Matrix.identity(r))
    if kind == "b":    # phi = psi_0, c = id, v = -N
        return GluingDatum({Fraction(0): b.piece}, b.mhs, Matrix.identity(r), -N)
    if kind == "c":    # phi = Im N inside psi_0(-1), c = -N, v = inclusion
        sub = Subspace.coordinate(r, range(r - 1))
        twisted = b.mhs.twisted(-1)
        phi = MHSModel.make(twisted.F.restrict(sub), twisted.W.restrict(sub))
        c = (-N).submatrix(range(r - 1), range(r))
        v = Matrix.from_rows([[int(i == j) for j in range(r - 1)] for i in range(r)], r - 1)
        return GluingDatum({Fraction(0): b.piece}, phi if r > 1 else None, c, v)
    raise ValueError(kind)


def _twists(rng: random.Random, span: int) -> int:
    return rng.randint(-(span // 2), span - span // 2)


def random_datum(rng: random.Random, cfg: GeneratorConfig) -> GluingDatum:
    if cfg.max_dim == 0:
        return GluingDatum.zero()
    pool = _alpha_pool(cfg.eigen_denominators)
    alphas = rng.sample(pool, min(len(pool), rng.randint(1, cfg.max_eigenvalues)))
    # the unipotent part is where c and v live, so favour it
    if Fraction(0) not in alphas and rng.random() < 0.6:
        alphas[0] = Fraction(0)
    budget = rng.randint(1, cfg.max_dim)
    parts = []
    while budget > 0:
        a = Fraction(0) if not parts and Fraction(0) in alphas else rng.choice(alphas)
        if a != 0:
            r = rng.randint(1, budget)
            parts.append(tate_twist_gluing(GluingDatum({a: NilpBlock(r).piece}), _twists(rng, cfg.max_weight_span)))
            budget -= r
            continue
        kind = rng.choice("aabbccde")
        if kind == "e":    # vanishing part only, c = v = 0
            one = MHSModel.make(IncreasingFiltration.trivial(1), IncreasingFiltration.trivial(1))
            parts.append(tate_twist_gluing(GluingDatum({}, one), _twists(rng, cfg.max_weight_span)))
            budget -= 1
            continue
        if kind == "d":    # nearby part only at alpha = 0 requires N = 0
            kind, r = "c", 1
        else:
            # a and b cost 2r dimensions, c costs 2r - 1
            top = (budget + 1) // 2 if kind == "c" else budget // 2
            if top < 1:
                continue
            r = rng.randint(1, top)
        parts.append(tate_twist_gluing(_junction(kind, r), _twists(rng, cfg.max_weight_span)))
        budget -= 2 * r - 1 if kind == "c" else 2 * r
    g = direct_sum_gluing(*parts)
    maps = {a: _bifiltered_unipotent(rng, p.mhs) for a, p in g.psi.items()}
    g = _conjugate(g, maps, _bifiltered_unipotent(rng, g.phi))
    maps = {a: _unimodular(rng, p.dim) for a, p in g.psi.items()}
    return _conjugate(g, maps, _unimodular(rng, g.phi.dim))


def case_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}/{index}")


def generate_random(cfg: GeneratorConfig) -> list[GluingDatum]:
    return [random_datum(case_rng(cfg.seed, i), cfg) for i in range(cfg.case_count)]
