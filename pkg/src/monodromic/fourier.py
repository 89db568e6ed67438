"""Fourier-Laplace transform of monodromic modules (tau -> -d_t, d_tau -> t)."""
from __future__ import annotations

from dataclasses import dataclass, field

from .dmod import (
    MINUS_ONE, ZERO, CoreData, CoreMorphism, WindowModule, core_from_window, expand, is_integral,
    require_valid, sign_isomorphism, window_violations,
)
from .errors import InvalidCore, WindowTooSmall
from .gluing import GluingDatum, PsiPiece, first_filtration_mismatch, functor_F, functor_G
from .linalg import Matrix
from .mhm import MonodromicMHM

# The alternative normalisation puts the twist on the new nearby side instead
# of the new vanishing side.  Only the default is implemented.
NORMALIZATIONS = ("vanishing-twist",)


def fourier_gluing(g: GluingDatum) -> GluingDatum:
    """((phi + psi_{!=1}, N' = can var + N), psi_1(-1), -var, can) with psi_alpha moved to -alpha-1."""
    psi = {}
    for a, p in g.psi.items():
        if a != ZERO:
            psi[-a - 1] = p
    if g.phi.dim:
        psi[ZERO] = PsiPiece(g.phi, g.c @ g.v)
    return GluingDatum(psi, g.psi_mhs(ZERO).twisted(-1), -g.v, g.c)


def fourier(m: MonodromicMHM, normalization: str = "vanishing-twist") -> MonodromicMHM:
    if normalization not in NORMALIZATIONS:
        raise NotImplementedError(f"normalization {normalization!r} is not implemented")
    return functor_G(fourier_gluing(functor_F(m)))


def fourier_core(core: CoreData) -> CoreData:
    """Underlying core of the transform: components relabelled, u' = w, w' = -u."""
    require_valid(core)
    comps = {}
    for a, n in core.components.items():
        if not is_integral(a):
            comps[-a - 1] = n
    u, w = core.w, -core.u
    if core.dim(MINUS_ONE):
        comps[ZERO] = w @ u
    if core.dim(ZERO):
        comps[MINUS_ONE] = u @ w
    return CoreData(comps, u, w)


def fourier_window(win: WindowModule) -> WindowModule:
    """(FM)^beta = M^{-beta-1}, new t_beta = -d_{-beta-1}, new d_beta = t_{-beta-1}."""
    lo, hi = win.window
    if lo != -1 - hi:
        raise WindowTooSmall("the transform needs a window symmetric about -1/2")
    graded, t_maps, d_maps, euler = {}, {}, {}, {}
    for b in win.betas:
        nb = -b - 1
        n = win.dim(b)
        graded[nb] = n
        euler[nb] = -win.euler[b] - Matrix.identity(n)
        if b in win.d_maps:
            t_maps[nb] = -win.d_maps[b]
        if b in win.t_maps:
            d_maps[nb] = win.t_maps[b]
    return WindowModule((lo, hi), dict(sorted(graded.items())), t_maps, d_maps, euler)


def fourier_window_oracle(core: CoreData, K: int = 2) -> CoreData:
    if K < 1:
        raise WindowTooSmall("window must contain [-2, 1]")
    win = fourier_window(expand(core, K))
    problems = window_violations(win)
    if problems:
        raise InvalidCore("transformed window is not a module: " + "; ".join(problems))
    return core_from_window(win)


def fourier_agreement(core: CoreData, K: int = 2) -> CoreMorphism | None:
    """Isomorphism between the gluing-level and window-level transforms (they differ by signs of N)."""
    return sign_isomorphism(fourier_window_oracle(core, K), fourier_core(core))


def sign_twisted(core: CoreData) -> CoreData:
    return CoreData(dict(core.components), -core.u, -core.w)


def hodge_shift_violations(m: MonodromicMHM, fm: MonodromicMHM) -> list[str]:
    """F_p (FM)^0 = F_{p+1} M^-1, F_p (FM)^a = F_p M^{-a-1} for a in [-1, 0), and dims pair up."""
    out = []
    alphas = sorted(set(m.core.alphas) | {-a - 1 for a in m.core.alphas})
    for a in alphas:
        src = -a - 1 if a != ZERO else MINUS_ONE
        if fm.core.dim(a) != m.core.dim(-a - 1):
            out.append(f"dim (FM)^{a} ≠ dim M^{-a - 1}")
            continue
        expected = m.pair(src).F.shifted(-1) if a == ZERO else m.pair(src).F
        p = first_filtration_mismatch(fm.pair(a).F, expected)
        if p is not None:
            out.append(f"F_{p} (FM)^{a} does not match M^{src}")
    return out


@dataclass(frozen=True)
class DoubleFourierReport:
    core_matches: bool
    witness: CoreMorphism | None
    filtration_notes: list = field(default_factory=list)


def double_fourier_check(m: MonodromicMHM) -> DoubleFourierReport:
    """Core of F(F(m)) against m with u, w negated; filtration differences are only listed."""
    ffm = fourier(fourier(m))
    target = sign_twisted(m.core)
    matches = ffm.core == target
    witness = sign_isomorphism(m.core, ffm.core)
    notes = []
    for a in m.core.alphas:
        for label in ("F", "W"):
            p = first_filtration_mismatch(getattr(m.pair(a), label), getattr(ffm.pair(a), label))
            if p is not None:
                notes.append(f"{label} at alpha={a} first differs at index {p}")
    return DoubleFourierReport(matches and witness is not None, witness, notes)
