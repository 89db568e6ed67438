"""Gluing data (nearby side, vanishing side, c, v) and the two functors between them and modules."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .dmod import MINUS_ONE, ZERO, CoreData, CoreMorphism, morphism_violations
from .errors import InvalidGluing, InvalidMMHM
from .filtration import IncreasingFiltration, direct_sum_filtration, filtered_iso
from .linalg import Matrix, block_diag
from .mhm import (
    MHSModel, MHSMorphismModel, MonodromicMHM, n_violations, phi_model, psi_model, validate_mmhm,
)


@dataclass(frozen=True)
class PsiPiece:
    mhs: MHSModel
    N: Matrix

    @property
    def dim(self) -> int:
        return self.mhs.dim


@dataclass(frozen=True)
class GluingDatum:
    """((psi, N), phi, c, v) with psi graded by alpha in (-1, 0].

    phi=None marks an object without vanishing data; it is normalised to the
    zero MHS with empty c and v, i.e. extension by zero.
    """
    psi: Mapping[Fraction, PsiPiece]
    phi: MHSModel | None = None
    c: Matrix | None = None
    v: Matrix | None = None
    psi_only: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.phi is None and self.c is None and self.v is None:
            object.__setattr__(self, "psi_only", True)
        psi = {Fraction(a): p for a, p in sorted(self.psi.items(), key=lambda kv: Fraction(kv[0])) if p.dim}
        object.__setattr__(self, "psi", psi)
        phi = self.phi if self.phi is not None else MHSModel.zero()
        object.__setattr__(self, "phi", phi)
        n0 = self.psi_dim(ZERO)
        if self.c is None:
            object.__setattr__(self, "c", Matrix.zeros(phi.dim, n0))
        if self.v is None:
            object.__setattr__(self, "v", Matrix.zeros(n0, phi.dim))

    def psi_dim(self, a) -> int:
        p = self.psi.get(Fraction(a))
        return p.dim if p else 0

    def N(self, a) -> Matrix:
        p = self.psi.get(Fraction(a))
        return p.N if p else Matrix.zeros(0, 0)

    def psi_mhs(self, a) -> MHSModel:
        p = self.psi.get(Fraction(a))
        return p.mhs if p else MHSModel.zero()

    @property
    def total_dim(self) -> int:
        return sum(p.dim for p in self.psi.values()) + self.phi.dim

    @classmethod
    def zero(cls) -> "GluingDatum":
        return cls({})


C_SHIFT = (0, 0)
V_SHIFT = (1, -2)


def validate_psi_side(g: GluingDatum) -> list[str]:
    """Conditions on the nearby part alone: the data of an object over C*."""
    out = []
    for a, p in g.psi.items():
        if not (-1 < a <= 0):
            out.append(f"psi component alpha={a} outside (-1, 0]")
        if p.N.shape != (p.dim, p.dim):
            out.append(f"N at alpha={a} has shape {p.N.shape}")
            continue
        out += n_violations(p.N, p.mhs, f"N at alpha={a}")
    return out


def validate_gluing(g: GluingDatum) -> list[str]:
    out = validate_psi_side(g)
    n0, nphi = g.psi_dim(ZERO), g.phi.dim
    if g.c.shape != (nphi, n0):
        out.append(f"c has shape {g.c.shape}, expected {(nphi, n0)}")
    if g.v.shape != (n0, nphi):
        out.append(f"v has shape {g.v.shape}, expected {(n0, nphi)}")
    if out:
        return out
    psi0 = g.psi_mhs(ZERO)
    out += MHSMorphismModel(g.c, *C_SHIFT).violations(psi0, g.phi, "c")
    out += MHSMorphismModel(g.v, *V_SHIFT).violations(g.phi, psi0, "v")
    if g.v @ g.c != -g.N(ZERO):
        out.append("v·c ≠ −N_0")
    return out


def is_valid_gluing(g: GluingDatum) -> bool:
    return not validate_gluing(g)


def validate_datum(g: GluingDatum) -> list[str]:
    """validate_gluing, or only the nearby-side conditions for an object without vanishing data."""
    return validate_psi_side(g) if g.psi_only else validate_gluing(g)


def functor_G(g: GluingDatum) -> MonodromicMHM:
    """Glue: M^alpha = psi_alpha, M^-1 = phi, u = -c, w = v, N_-1 = u w."""
    problems = validate_gluing(g)
    if problems:
        raise InvalidGluing("; ".join(problems))
    comps = {a: p.N for a, p in g.psi.items()}
    u, w = -g.c, g.v
    comps[MINUS_ONE] = u @ w
    F = {a: p.mhs.F for a, p in g.psi.items()}
    W = {a: p.mhs.W.shifted(1) for a, p in g.psi.items()}
    F[MINUS_ONE] = g.phi.F.shifted(1)
    W[MINUS_ONE] = g.phi.W
    return MonodromicMHM(CoreData(comps, u, w), F, W)


def functor_F(m: MonodromicMHM) -> GluingDatum:
    """Take cycles: psi_alpha for alpha in (-1, 0], phi at -1, c = can = -u, v = var = w."""
    problems = validate_mmhm(m)
    if problems:
        raise InvalidMMHM("; ".join(problems))
    core = m.core
    psi = {a: PsiPiece(psi_model(m, a), core.N(a)) for a in core.alphas if a != MINUS_ONE}
    return GluingDatum(psi, phi_model(m), -core.u, core.w)


def tate_twist_gluing(g: GluingDatum, l: int) -> GluingDatum:
    psi = {a: PsiPiece(p.mhs.twisted(l), p.N) for a, p in g.psi.items()}
    if g.psi_only:
        return GluingDatum(psi)
    return GluingDatum(psi, g.phi.twisted(l), g.c, g.v)


def direct_sum_gluing(*gs: GluingDatum) -> GluingDatum:
    def mhs_sum(ms):
        return MHSModel.make(direct_sum_filtration(*[x.F for x in ms]),
                             direct_sum_filtration(*[x.W for x in ms]))

    alphas = sorted({a for g in gs for a in g.psi})
    psi = {}
    for a in alphas:
        psi[a] = PsiPiece(mhs_sum([g.psi_mhs(a) for g in gs]), block_diag(*[g.N(a) for g in gs]))
    return GluingDatum(psi, mhs_sum([g.phi for g in gs]),
                       block_diag(*[g.c for g in gs]), block_diag(*[g.v for g in gs]))


# comparisons

def first_filtration_mismatch(a: IncreasingFiltration, b: IncreasingFiltration) -> int | None:
    if a.ambient_dim != b.ambient_dim:
        return a.lowest if a.lowest is not None else 0
    for p in sorted(set(a.indices) | set(b.indices)):
        if a.step(p) != b.step(p):
            return p
    return None


def gluing_mismatch(g: GluingDatum, h: GluingDatum) -> str | None:
    """First difference between two data, or None when they are equal."""
    for a in sorted(set(g.psi) | set(h.psi)):
        if g.psi_dim(a) != h.psi_dim(a):
            return f"psi dimension differs at alpha={a}"
        if g.N(a) != h.N(a):
            return f"N differs at alpha={a}"
        for label in ("F", "W"):
            p = first_filtration_mismatch(getattr(g.psi_mhs(a), label), getattr(h.psi_mhs(a), label))
            if p is not None:
                return f"{label} on psi differs at alpha={a}, index {p}"
    if g.phi.dim != h.phi.dim:
        return "phi dimension differs"
    for label in ("F", "W"):
        p = first_filtration_mismatch(getattr(g.phi, label), getattr(h.phi, label))
        if p is not None:
            return f"{label} on phi differs at index {p}"
    if g.c != h.c:
        return "c differs"
    if g.v != h.v:
        return "v differs"
    return None


@dataclass(frozen=True)
class RoundTrip:
    ok: bool
    witness: dict = field(default_factory=dict)
    failure: str = ""

    def __bool__(self):
        return self.ok


def _mmhm_witness(m: MonodromicMHM, n: MonodromicMHM) -> RoundTrip:
    """Check that identity matrices give a bi-filtered isomorphism m -> n."""
    if m.core.alphas != n.core.alphas:
        return RoundTrip(False, failure="component sets differ")
    witness = {}
    for a in m.core.alphas:
        if m.core.dim(a) != n.core.dim(a):
            return RoundTrip(False, failure=f"dimension differs at alpha={a}")
        if m.core.N(a) != n.core.N(a):
            return RoundTrip(False, failure=f"N differs at alpha={a}")
        one = Matrix.identity(m.core.dim(a))
        for label in ("F", "W"):
            fa, fb = getattr(m.pair(a), label), getattr(n.pair(a), label)
            if not filtered_iso(one, fa, fb):
                return RoundTrip(False, failure=f"{label} differs at alpha={a}, index {first_filtration_mismatch(fa, fb)}")
        witness[a] = one
    if m.core.u != n.core.u or m.core.w != n.core.w:
        return RoundTrip(False, failure="u or w differs")
    return RoundTrip(True, witness)


def roundtrip_check(x: GluingDatum | MonodromicMHM) -> RoundTrip:
    """F(G(g)) = g on the nose, and G(F(G(g))) = G(g) with identity witnesses.

    For a module m the roles swap: G(F(m)) is compared with m.
    """
    try:
        if isinstance(x, GluingDatum):
            m = functor_G(x)
            back = functor_F(m)
            diff = gluing_mismatch(x, back)
            if diff:
                return RoundTrip(False, failure=f"F∘G: {diff}")
            return _mmhm_witness(m, functor_G(back))
        back = functor_G(functor_F(x))
        return _mmhm_witness(x, back)
    except (InvalidGluing, InvalidMMHM) as e:
        return RoundTrip(False, failure=str(e))


# morphisms

@dataclass(frozen=True)
class GluingMorphism:
    source: GluingDatum
    target: GluingDatum
    psi: Mapping[Fraction, Matrix]
    phi: Matrix

    def at(self, a) -> Matrix:
        a = Fraction(a)
        if a in self.psi:
            return self.psi[a]
        return Matrix.zeros(self.target.psi_dim(a), self.source.psi_dim(a))


def gluing_morphism_violations(f: GluingMorphism) -> list[str]:
    out = []
    s, t = f.source, f.target
    for a in sorted(set(s.psi) | set(t.psi)):
        m = f.at(a)
        if m.shape != (t.psi_dim(a), s.psi_dim(a)):
            out.append(f"map at alpha={a} has the wrong shape")
            continue
        if m @ s.N(a) != t.N(a) @ m:
            out.append(f"does not commute with N at alpha={a}")
        out += MHSMorphismModel(m).violations(s.psi_mhs(a), t.psi_mhs(a), f"map at alpha={a}")
    if f.phi.shape != (t.phi.dim, s.phi.dim):
        return out + ["phi map has the wrong shape"]
    out += MHSMorphismModel(f.phi).violations(s.phi, t.phi, "phi map")
    if out:
        return out
    if f.phi @ s.c != t.c @ f.at(ZERO):
        out.append("does not commute with c")
    if f.at(ZERO) @ s.v != t.v @ f.phi:
        out.append("does not commute with v")
    return out


def functor_G_morphism(f: GluingMorphism) -> CoreMorphism:
    maps = {a: f.at(a) for a in f.source.psi}
    maps[MINUS_ONE] = f.phi
    return CoreMorphism(functor_G(f.source).core, functor_G(f.target).core, maps)


def morphism_roundtrip(f: GluingMorphism) -> list[str]:
    """G(f) is a core morphism; with identity witnesses on both ends it must equal f componentwise."""
    g = functor_G_morphism(f)
    out = morphism_violations(g)
    for a in f.source.psi:
        if g.at(a) != f.at(a):
            out.append(f"G(f) differs from f at alpha={a}")
    if g.at(MINUS_ONE) != f.phi:
        out.append("G(f) differs from f on phi")
    return out
