"""Semisimple and nilpotent building blocks and the kernel/cokernel construction over C*.

A C*-module is modelled by its components M^alpha, alpha in (-1, 0], with
t d_t - alpha acting as N and the module filtrations (F, W) on each.  The
tensor-and-kernel construction below builds such a module from nearby-cycle
data and is compared against the direct recipe (M_alpha, N, F, W shifted by 1).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Mapping

from .errors import EigenvalueDenominatorMismatch, InvalidGluing
from .filtration import (
    IncreasingFiltration, filtered_iso, tensor_filtration,
)
from .gluing import GluingDatum, PsiPiece, gluing_mismatch, validate_psi_side
from .linalg import (
    Matrix, Subspace, image, image_of, induce, inverse, kernel, kron, nilpotency_index, rank, solve,
)
from .mhm import MHSModel

VARIANTS = ("kk", "kc", "ck", "cc")


# blocks

@dataclass(frozen=True)
class NilpBlock:
    """V_r: N e_i = e_{i-1}, F_i = span(e_{r-i}, ..., e_r), W_{-2i} = W_{-2i+1} = span(e_1, ..., e_{r-i})."""
    r: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be positive")

    @property
    def N(self) -> Matrix:
        return Matrix.jordan(self.r)

    @property
    def F(self) -> IncreasingFiltration:
        r = self.r
        # 0-based: F_i is spanned by e_{r-i-1}, ..., e_{r-1}
        return IncreasingFiltration.from_steps(r, {i: Subspace.coordinate(r, range(r - i - 1, r)) for i in range(r)})

    @property
    def W(self) -> IncreasingFiltration:
        r = self.r
        steps = {}
        for i in range(r):
            s = Subspace.coordinate(r, range(r - i))
            steps[-2 * i] = s
            steps[-2 * i + 1] = s
        return IncreasingFiltration.from_steps(r, steps)

    @property
    def center(self) -> int:
        return -(self.r - 1)

    @property
    def mhs(self) -> MHSModel:
        return MHSModel.make(self.F, self.W)

    @property
    def piece(self) -> PsiPiece:
        return PsiPiece(self.mhs, self.N)


@dataclass(frozen=True)
class SemiBlock:
    """V_{m,1}: one line at each alpha in {0, -1/m, ..., -(m-1)/m}, F jump at 0.

    As a module on C* it is pure of weight 1; on nearby cycles this is weight 0.
    """
    m: int
    weight: int = 1

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")

    @property
    def alphas(self) -> list[Fraction]:
        return [Fraction(-k, self.m) for k in range(self.m)]

    @property
    def index(self) -> dict[Fraction, int]:
        return {a: k for k, a in enumerate(self.alphas)}

    @property
    def mhs(self) -> MHSModel:
        """Model of a single eigenline."""
        return MHSModel.make(IncreasingFiltration.trivial(1), IncreasingFiltration.trivial(1, self.weight - 1))

    @property
    def space(self) -> MHSModel:
        """Model of the whole m-dimensional space."""
        return MHSModel.make(IncreasingFiltration.trivial(self.m),
                             IncreasingFiltration.trivial(self.m, self.weight - 1))


def make_blocks(r: int, m: int) -> tuple[GluingDatum, GluingDatum]:
    """(L_r, S_m) as data without vanishing part."""
    L = GluingDatum({Fraction(0): NilpBlock(r).piece})
    s = SemiBlock(m)
    S = GluingDatum({a: PsiPiece(s.mhs, Matrix.zeros(1, 1)) for a in s.alphas})
    return L, S


@dataclass(frozen=True)
class BlockMorphism:
    matrix: Matrix
    f_shift: int = 0
    w_shift: int = 0
    source_twist: int = 0
    target_twist: int = 0


def block_morphism(kind: str, *args: int) -> BlockMorphism:
    """S_incl(m, a): V_{m,1} -> V_{am,1}; L_proj(r, l): V_{r+l} -> V_r; L_twist_incl(r, l): V_r -> V_{r+l}(-l)."""
    if kind == "S_incl":
        m, a = args
        src, tgt = SemiBlock(m), SemiBlock(a * m)
        cols = []
        for al in src.alphas:
            e = [0] * tgt.m
            e[tgt.index[al]] = 1
            cols.append(e)
        return BlockMorphism(Matrix.from_columns(cols, tgt.m))
    if kind == "L_proj":
        r, l = args
        rows = [[1 if j == i + l else 0 for j in range(r + l)] for i in range(r)]
        return BlockMorphism(Matrix.from_rows(rows, r + l))
    if kind == "L_twist_incl":
        r, l = args
        rows = [[1 if i == j else 0 for j in range(r)] for i in range(r + l)]
        return BlockMorphism(Matrix.from_rows(rows, r), target_twist=-l)
    raise ValueError(f"unknown block morphism {kind!r}")


# filtered spaces with N, as sub and quotient objects of an ambient one

def _sub(piece: PsiPiece, sub: Subspace) -> PsiPiece:
    N = induce(piece.N, sub, sub, "restrict")
    return PsiPiece(MHSModel.make(piece.mhs.F.restrict(sub), piece.mhs.W.restrict(sub)), N)


def _quot(piece: PsiPiece, sub: Subspace) -> PsiPiece:
    N = induce(piece.N, sub, sub, "descend")
    return PsiPiece(MHSModel.make(piece.mhs.F.descend(sub), piece.mhs.W.descend(sub)), N)


def _twist(piece: PsiPiece, l: int) -> PsiPiece:
    return PsiPiece(piece.mhs.twisted(l), piece.N)


def _lift(sub: Subspace) -> Matrix:
    """Columns: the standard lifts of the quotient basis of Q^n / sub."""
    return Subspace.coordinate(sub.ambient_dim, sub.complement_indices()).basis


@dataclass(frozen=True)
class Stage:
    """One step of the construction: a filtered space with N and its map onto the direct model.

    Kernel stages keep the inclusion into their ambient space, cokernel stages
    the quotient map and the standard lift back.
    """
    piece: PsiPiece
    to_direct: Matrix
    embed: Matrix | None = None
    project: Matrix | None = None
    lift: Matrix | None = None


def _tensor(alpha_piece: PsiPiece, r: int) -> PsiPiece:
    """M_alpha (x) V_r with module weights, N acting through the V_r factor."""
    v = NilpBlock(r)
    F = tensor_filtration(alpha_piece.mhs.F, v.F)
    # module weight: W_k = sum of W_a M (x) W_{b-1} V_r over a + b = k
    W = tensor_filtration(alpha_piece.mhs.W, v.W).shifted(1)
    N = kron(Matrix.identity(alpha_piece.dim), v.N)
    return PsiPiece(MHSModel.make(F, W), N)


def _difference(alpha_piece: PsiPiece, r: int) -> Matrix:
    """N (x) 1 - 1 (x) N on M_alpha (x) V_r."""
    n = alpha_piece.dim
    return kron(alpha_piece.N, Matrix.identity(r)) - kron(Matrix.identity(n), Matrix.jordan(r))


def _unit(r: int, j: int) -> Matrix:
    return Matrix.from_columns([[1 if i == j else 0 for i in range(r)]], r)


def _in_basis(sub: Subspace, m: Matrix) -> Matrix | None:
    cols = [sub.coords(c) for c in m.columns()]
    if any(c is None for c in cols):
        return None
    return Matrix.from_columns(cols, sub.dim)


@lru_cache(maxsize=512)
def n_stage(alpha_piece: PsiPiece, r: int, kind: str) -> Stage:
    """Kernel (twisted by -(r-1)) or cokernel of N (x) 1 - 1 (x) N, with its map onto M_alpha.

    Once N^r = 0 the kernel is {sum_j N^(j-1) m (x) e_j} and the cokernel map is
    m (x) e_j -> N^(r-j) m; both identify the stage with M_alpha.
    """
    n, N = alpha_piece.dim, alpha_piece.N
    amb = _tensor(alpha_piece, r)
    D = _difference(alpha_piece, r)
    powers = [Matrix.identity(n)]
    for _ in range(r):
        powers.append(powers[-1] @ N)
    if kind == "k":
        sub = kernel(D)
        piece = _twist(_sub(amb, sub), -(r - 1))
        from_direct = Matrix.zeros(n * r, n)
        for j in range(r):
            from_direct = from_direct + kron(powers[j], _unit(r, j))
        coords = _in_basis(sub, from_direct)
        if coords is None or sub.dim != n:
            return Stage(piece, Matrix.zeros(n, sub.dim), embed=sub.basis)
        return Stage(piece, inverse(coords), embed=sub.basis)
    if kind == "c":
        im = image(D)
        piece = _quot(amb, im)
        collapse = Matrix.zeros(n, n * r)
        for j in range(r):
            collapse = collapse + kron(powers[r - 1 - j], _unit(r, j).T)
        lift = _lift(im)
        return Stage(piece, collapse @ lift, project=im.quotient_map(), lift=lift)
    raise ValueError("kind must be 'k' or 'c'")


def _selection(alphas: list[Fraction], m: int) -> dict[Fraction, int]:
    idx = {}
    for a in alphas:
        k = -a * m
        if k.denominator != 1:
            raise EigenvalueDenominatorMismatch(f"alpha={a} is not a multiple of 1/{m}")
        idx[a] = int(k)
    return idx


def t_stage(stage: Stage, alpha: Fraction, m: int, kind: str) -> Stage:
    """Tensor with V_{m,1} and take kernel or cokernel of T_s (x) 1 - 1 (x) T.

    On the (alpha, alpha') block the map is the scalar e(alpha) - e(alpha'); only
    whether it vanishes matters, so it is stored as 0 on the matching line and 1 elsewhere.
    """
    k = _selection([alpha], m)[alpha]
    d = stage.piece.dim
    semi = SemiBlock(m)
    T = kron(Matrix.identity(d), Matrix.diag([0 if j == k else 1 for j in range(m)]))
    amb = PsiPiece(
        MHSModel.make(tensor_filtration(stage.piece.mhs.F, semi.space.F),
                      tensor_filtration(stage.piece.mhs.W, semi.space.W)),
        kron(stage.piece.N, Matrix.identity(m)))
    if kind == "k":
        sub = kernel(T)
        coords = _in_basis(sub, kron(Matrix.identity(d), _unit(m, k)))
        return Stage(_sub(amb, sub), stage.to_direct @ inverse(coords), embed=sub.basis)
    if kind == "c":
        im = image(T)
        lift = _lift(im)
        proj = kron(Matrix.identity(d), _unit(m, k).T)
        return Stage(_quot(amb, im), stage.to_direct @ proj @ lift, project=im.quotient_map(), lift=lift)
    raise ValueError("kind must be 'k' or 'c'")


@dataclass(frozen=True)
class CStarModule:
    """Components alpha in (-1, 0] with N and module filtrations."""
    pieces: Mapping[Fraction, PsiPiece]

    def __post_init__(self):
        object.__setattr__(self, "pieces", {a: p for a, p in sorted(self.pieces.items()) if p.dim})


@dataclass(frozen=True)
class Construction:
    module: CStarModule
    to_direct: dict
    stages: dict


def required_m(g: GluingDatum) -> int:
    return lcm(1, *[a.denominator for a in g.psi])


def required_r(g: GluingDatum) -> int:
    return max([1] + [nilpotency_index(p.N) for p in g.psi.values()])


def tensor_construction(g: GluingDatum, r: int, m: int, variant: str = "cc") -> Construction:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    problems = validate_psi_side(g)
    if problems:
        raise InvalidGluing("; ".join(problems))
    _selection(list(g.psi), m)
    pieces, maps, stages = {}, {}, {}
    for a, p in g.psi.items():
        first = n_stage(p, r, variant[0])
        st = t_stage(first, a, m, variant[1])
        pieces[a], maps[a], stages[a] = st.piece, st.to_direct, (first, st)
    return Construction(CStarModule(pieces), maps, stages)


def direct_construction(g: GluingDatum) -> CStarModule:
    """(M_alpha, N, F, W_{k-1}) on each component."""
    return CStarModule({a: PsiPiece(MHSModel.make(p.mhs.F, p.mhs.W.shifted(1)), p.N) for a, p in g.psi.items()})


def psi_of(x: CStarModule) -> GluingDatum:
    return GluingDatum({a: PsiPiece(MHSModel.make(p.mhs.F, p.mhs.W.shifted(-1)), p.N) for a, p in x.pieces.items()})


def tate_twist_cstar(x: CStarModule, l: int) -> CStarModule:
    return CStarModule({a: _twist(p, l) for a, p in x.pieces.items()})


@dataclass(frozen=True)
class Comparison:
    ok: bool
    witness: dict = field(default_factory=dict)
    failure: str = ""

    def __bool__(self):
        return self.ok


def piece_iso_failure(f: Matrix, a: PsiPiece, b: PsiPiece) -> str | None:
    """Why f: a -> b is not an N-equivariant bi-filtered isomorphism, or None."""
    if a.dim != b.dim or f.shape != (b.dim, a.dim):
        return f"dimensions {a.dim} and {b.dim} differ"
    if rank(f) != a.dim:
        return "map is not bijective"
    if f @ a.N != b.N @ f:
        return "map does not commute with N"
    for label in ("F", "W"):
        fa, fb = getattr(a.mhs, label), getattr(b.mhs, label)
        if not filtered_iso(f, fa, fb):
            for p in sorted(set(fa.indices) | set(fb.indices)):
                if image_of(f, fa.step(p)) != fb.step(p):
                    return f"{label}_{p} is not carried onto {label}_{p}"
            return f"{label} is not preserved"
    return None


def compare_with_direct(g: GluingDatum, r: int | None = None, m: int | None = None,
                        variant: str = "cc") -> Comparison:
    r = required_r(g) if r is None else r
    m = required_m(g) if m is None else m
    built = tensor_construction(g, r, m, variant)
    direct = direct_construction(g)
    if set(built.module.pieces) != set(direct.pieces):
        return Comparison(False, failure="component sets differ")
    for a, p in direct.pieces.items():
        why = piece_iso_failure(built.to_direct[a], built.module.pieces[a], p)
        if why:
            return Comparison(False, failure=f"alpha={a}: {why}")
    back = psi_of(direct)
    diff = gluing_mismatch(back, GluingDatum(g.psi))
    if diff:
        return Comparison(False, failure=f"psi does not return the input: {diff}")
    return Comparison(True, dict(built.to_direct))


# stabilization in r

def _connecting(alpha_piece: PsiPiece, r: int, l: int, kind: str) -> Matrix:
    """ker_{r+l} -> ker_r(-l) (kind 'k') or coker_r -> coker_{r+l}(-l) (kind 'c')."""
    ident = Matrix.identity(alpha_piece.dim)
    if kind == "k":
        big, small = n_stage(alpha_piece, r + l, "k"), n_stage(alpha_piece, r, "k")
        f = kron(ident, block_morphism("L_proj", r, l).matrix)
        return _in_basis(Subspace.column_span(small.embed), f @ big.embed)
    small, big = n_stage(alpha_piece, r, "c"), n_stage(alpha_piece, r + l, "c")
    f = kron(ident, block_morphism("L_twist_incl", r, l).matrix)
    return big.project @ f @ small.lift


def ker_step(alpha_piece: PsiPiece, r: int) -> Matrix | None:
    """ker_r -> ker_{r+1} induced by e_j -> e_j."""
    a, b = n_stage(alpha_piece, r, "k"), n_stage(alpha_piece, r + 1, "k")
    f = kron(Matrix.identity(alpha_piece.dim), block_morphism("L_twist_incl", r, 1).matrix)
    return _in_basis(Subspace.column_span(b.embed), f @ a.embed)


def coker_step(alpha_piece: PsiPiece, r: int) -> Matrix:
    """coker_{r+1} -> coker_r induced by e_j -> e_{j-1}."""
    a, b = n_stage(alpha_piece, r + 1, "c"), n_stage(alpha_piece, r, "c")
    f = kron(Matrix.identity(alpha_piece.dim), block_morphism("L_proj", r, 1).matrix)
    return b.project @ f @ a.lift


def snake(top_right: Matrix, bottom_left: Matrix, middle: Matrix,
          ker_right: Matrix, coker_left: Matrix) -> Matrix | None:
    """Connecting map ker(right vertical) -> coker(left vertical) of a map of short exact sequences.

    top_right is the surjection onto the top-right object, bottom_left the
    injection of the bottom-left one, middle the middle vertical arrow.
    ker_right has columns spanning the kernel of the right vertical and
    coker_left is the quotient map onto the cokernel of the left vertical.
    """
    lift = solve(top_right, ker_right)
    if lift is None:
        return None
    back = solve(bottom_left, middle @ lift)
    if back is None:
        return None
    return coker_left @ back


def connecting_ker_to_coker(alpha_piece: PsiPiece, r: int, l: int) -> Matrix | None:
    """ker_l -> coker_r from 0 -> V_r -> V_{r+l} -> V_l -> 0 tensored with M_alpha.

    Written in the kernel and cokernel bases; once N^l = 0 it is m -> -m in direct coordinates.
    """
    ident = Matrix.identity(alpha_piece.dim)
    top_right = kron(ident, block_morphism("L_proj", l, r).matrix)
    bottom_left = kron(ident, block_morphism("L_twist_incl", r, l).matrix)
    kl, cr = n_stage(alpha_piece, l, "k"), n_stage(alpha_piece, r, "c")
    return snake(top_right, bottom_left, _difference(alpha_piece, r + l), kl.embed, cr.project)


def _bifiltered_iso(f: Matrix | None, a: PsiPiece, b: PsiPiece) -> bool:
    return f is not None and piece_iso_failure(f, a, b) is None


@dataclass(frozen=True)
class StabilizationReport:
    ok: bool
    l0: int
    stable_from: int | None
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def stabilization_check(g: GluingDatum, r_max: int | None = None) -> StabilizationReport:
    """From r = l0 on: ker_r -> ker_{r+1}, coker_{r+1} -> coker_r and ker_r -> coker_r are
    bi-filtered isomorphisms, and the connecting maps with l >= l0 vanish."""
    l0 = required_r(g)
    r_max = l0 + 1 if r_max is None else r_max
    fails, stable = [], {}
    for r in range(1, r_max + 1):
        ok = True
        for a, p in g.psi.items():
            kr, kr1 = n_stage(p, r, "k"), n_stage(p, r + 1, "k")
            cr, cr1 = n_stage(p, r, "c"), n_stage(p, r + 1, "c")
            iso = (_bifiltered_iso(ker_step(p, r), kr.piece, kr1.piece)
                   and _bifiltered_iso(coker_step(p, r), cr1.piece, cr.piece)
                   and _bifiltered_iso(connecting_ker_to_coker(p, r, r), kr.piece, cr.piece))
            ok = ok and iso
            if r >= l0:
                if not iso:
                    fails.append(f"r={r}, alpha={a}: stabilization maps are not isomorphisms")
                for kind in ("k", "c"):
                    c = _connecting(p, r, l0, kind)
                    if c is None or not c.is_zero():
                        fails.append(f"r={r}, l={l0}, alpha={a}: connecting map ({kind}) is nonzero")
        stable[r] = ok
    stable_from = None
    for r in range(r_max, 0, -1):
        if not stable[r]:
            break
        stable_from = r
    return StabilizationReport(not fails and stable_from == l0, l0, stable_from, fails)


def variants_agree(g: GluingDatum, r: int | None = None, m: int | None = None) -> Comparison:
    """All four variants, mapped to the direct model, give isomorphic bi-filtered objects."""
    r = required_r(g) if r is None else r
    m = required_m(g) if m is None else m
    for v in VARIANTS:
        c = compare_with_direct(g, r, m, v)
        if not c:
            return Comparison(False, failure=f"{v}: {c.failure}")
    return Comparison(True)


def m_independence(g: GluingDatum, r: int | None = None, m: int | None = None, a: int = 2) -> Comparison:
    """The map induced by S_incl(m, a) is a bi-filtered isomorphism from the m to the a*m construction."""
    r = required_r(g) if r is None else r
    m = required_m(g) if m is None else m
    inc = block_morphism("S_incl", m, a).matrix
    for variant in VARIANTS:
        x, y = tensor_construction(g, r, m, variant), tensor_construction(g, r, a * m, variant)
        for al, (first, sx) in x.stages.items():
            sy = y.stages[al][1]
            big = kron(Matrix.identity(first.piece.dim), inc)
            if variant[1] == "k":
                f = _in_basis(Subspace.column_span(sy.embed), big @ sx.embed)
            else:
                f = sy.project @ big @ sx.lift
            if not _bifiltered_iso(f, sx.piece, sy.piece):
                return Comparison(False, failure=f"{variant}, alpha={al}: induced map is not an isomorphism")
            if y.to_direct[al] @ f != x.to_direct[al]:
                return Comparison(False, failure=f"{variant}, alpha={al}: induced map is not natural")
    return Comparison(True)
