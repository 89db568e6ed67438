"""Rational-split models of mixed Hodge structures and monodromic mixed Hodge modules.

A Hodge filtration here is a filtration of the rational space; complex
conjugation and opposedness are not modelled.  Polarizability is carried
as a flag set by the constructors and never checked against a form.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .dmod import MINUS_ONE, ZERO, CoreData, WindowModule, expand, is_integral, validate
from .errors import InvalidCore
from .filtration import (
    FiltrationPair, IncreasingFiltration, check_relative_monodromy, check_strict,
    direct_sum_filtration, is_filtered, shift_twist,
)
from .linalg import Matrix, Subspace, block_diag, contains, image_of, is_nilpotent, maps_into


@dataclass(frozen=True)
class MHSModel:
    pair: FiltrationPair
    twist: int = 0

    @classmethod
    def make(cls, F: IncreasingFiltration, W: IncreasingFiltration, twist: int = 0) -> "MHSModel":
        return cls(FiltrationPair(F, W), twist)

    @classmethod
    def zero(cls) -> "MHSModel":
        z = IncreasingFiltration.trivial(0)
        return cls.make(z, z)

    @property
    def F(self) -> IncreasingFiltration:
        return self.pair.F

    @property
    def W(self) -> IncreasingFiltration:
        return self.pair.W

    @property
    def dim(self) -> int:
        return self.pair.dim

    def twisted(self, l: int) -> "MHSModel":
        return MHSModel(shift_twist(self.pair, l), self.twist + l)


@dataclass(frozen=True)
class MHSMorphismModel:
    matrix: Matrix
    f_shift: int = 0
    w_shift: int = 0

    def violations(self, src: MHSModel, tgt: MHSModel, name: str = "map") -> list[str]:
        m = self.matrix
        if m.shape != (tgt.dim, src.dim):
            return [f"{name} has shape {m.shape}, expected {(tgt.dim, src.dim)}"]
        out = []
        for label, fs, ft, s in (("F", src.F, tgt.F, self.f_shift), ("W", src.W, tgt.W, self.w_shift)):
            if not is_filtered(m, fs, ft, s):
                out.append(f"{name} does not map {label}_p into {label}_(p{s:+d})")
            elif not check_strict(m, fs, ft, s):
                out.append(f"{name} is not strict for {label}")
        return out


def n_violations(N: Matrix, mhs: MHSModel, name: str) -> list[str]:
    """N must be a nilpotent strict morphism to the (-1) twist: F shift +1, W shift -2."""
    out = MHSMorphismModel(N, 1, -2).violations(mhs, mhs, name)
    if not is_nilpotent(N):
        out.append(f"{name} is not nilpotent")
    return out


@dataclass(frozen=True)
class MonodromicMHM:
    """Core data with Hodge and weight filtrations on each M^alpha, alpha in [-1, 0].

    W here is the module weight filtration; the nearby-cycle weight is
    W_k psi = W_{k+1} M^alpha and the vanishing-cycle weight is W_k phi = W_k M^-1.
    """
    core: CoreData
    F: Mapping[Fraction, IncreasingFiltration]
    W: Mapping[Fraction, IncreasingFiltration]
    polarizable: bool = True

    def __post_init__(self):
        object.__setattr__(self, "F", {a: f for a, f in sorted(self.F.items()) if f.ambient_dim})
        object.__setattr__(self, "W", {a: f for a, f in sorted(self.W.items()) if f.ambient_dim})

    def pair(self, a) -> FiltrationPair:
        a = Fraction(a)
        n = self.core.dim(a)
        z = IncreasingFiltration.trivial(n)
        return FiltrationPair(self.F.get(a, z), self.W.get(a, z))

    @classmethod
    def zero(cls) -> "MonodromicMHM":
        return cls(CoreData({}), {}, {})


def psi_model(m: MonodromicMHM, a) -> MHSModel:
    """Nearby-cycle MHS at alpha in (-1, 0]: F unchanged, W_k psi = W_{k+1} M."""
    p = m.pair(a)
    return MHSModel.make(p.F, p.W.shifted(-1))


def phi_model(m: MonodromicMHM) -> MHSModel:
    """Vanishing-cycle MHS: F_p phi = F_{p+1} M^-1, W unchanged."""
    p = m.pair(MINUS_ONE)
    return MHSModel.make(p.F.shifted(-1), p.W)


def gr_w_induced_n(N: Matrix, W: IncreasingFiltration) -> list[int]:
    """Indices k where N induces a nonzero map on Gr^W_k."""
    bad = []
    for k in W.indices:
        # the induced map on W_k / W_{k-1} vanishes iff N W_k lies in W_{k-1}
        if not maps_into(N, W.step(k), W.step(k - 1)):
            bad.append(k)
    return bad


def validate_mmhm(m: MonodromicMHM) -> list[str]:
    out = list(validate(m.core))
    core = m.core
    for a in set(m.F) | set(m.W):
        if a not in core.components:
            out.append(f"filtration given at alpha={a} where M^alpha = 0")
    for a in core.alphas:
        for label, fs in (("F", m.F), ("W", m.W)):
            if a not in fs:
                out.append(f"missing {label} at alpha={a}")
            elif fs[a].ambient_dim != core.dim(a):
                out.append(f"{label} at alpha={a} lives on the wrong space")
    if out:
        return out
    for a in core.alphas:
        p = m.pair(a)
        N = core.N(a)
        for i in p.F.indices:
            if not maps_into(N, p.F.step(i), p.F.step(i + 1)):
                out.append(f"N F_p ⊄ F_(p+1) at alpha={a}, p={i}")
                break
        for k in sorted(set(p.W.indices) | {i + 1 for i in p.W.indices}):
            if not maps_into(N, p.W.step(k), p.W.step(k - 2)):
                out.append(f"N W_k ⊄ W_(k−2) at alpha={a}, k={k}")
                break
        if gr_w_induced_n(N, p.W):
            out.append(f"induced N on Gr^W is nonzero at alpha={a}")
        mhs = phi_model(m) if a == MINUS_ONE else psi_model(m, a)
        name = "N_phi" if a == MINUS_ONE else f"N at alpha={a}"
        for v in MHSMorphismModel(N, 1, -2).violations(mhs, mhs, name):
            if "strict" in v:
                out.append(v)
        chk = check_relative_monodromy(N, mhs.W, mhs.W)
        if not chk.ok:
            out.append(f"relative monodromy fails on {'phi' if a == MINUS_ONE else f'psi at alpha={a}'}: "
                       f"{chk.message}")
    psi0, phi = psi_model(m, ZERO), phi_model(m)
    out += MHSMorphismModel(-core.u, 0, 0).violations(psi0, phi, "can")
    out += MHSMorphismModel(core.w, 1, -2).violations(phi, psi0, "var")
    return out


def is_valid_mmhm(m: MonodromicMHM) -> bool:
    return not validate_mmhm(m)


def tate_twist_mmhm(m: MonodromicMHM, l: int) -> MonodromicMHM:
    return MonodromicMHM(
        m.core,
        {a: f.shifted(l) for a, f in m.F.items()},
        {a: f.shifted(-2 * l) for a, f in m.W.items()},
        m.polarizable,
    )


# filtered windows

@dataclass(frozen=True)
class FilteredWindow:
    module: WindowModule
    F: dict

    def step(self, b, p) -> Subspace:
        return self.F[Fraction(b)].step(p)


def _composite(maps: dict, start: Fraction, steps: int, direction: int, dim_of) -> Matrix:
    m = Matrix.identity(dim_of(start))
    b = start
    for _ in range(steps):
        m = maps[b] @ m
        b += direction
    return m


def propagate_filtration(m: MonodromicMHM, K: int) -> FilteredWindow:
    """F on every M^beta of the window: F_p M^{a+l} = t^l F_p M^a and F_p M^{a-l} = d^l F_{p-l} M^a."""
    problems = validate(m.core)
    if problems:
        raise InvalidCore("; ".join(problems))
    win = expand(m.core, K)
    out = {}
    for b in win.betas:
        if is_integral(b):
            a = ZERO if b >= 0 else MINUS_ONE
        else:
            a = b - b.__ceil__()
        base = m.pair(a).F
        n = win.dim(b)
        if n == 0:
            out[b] = IncreasingFiltration.trivial(0)
            continue
        if b >= a:
            t = _composite(win.t_maps, a, int(b - a), 1, win.dim)
            out[b] = IncreasingFiltration.from_steps(n, {i: image_of(t, s) for i, s in base.jumps})
        else:
            l = int(a - b)
            d = _composite(win.d_maps, a, l, -1, win.dim)
            out[b] = IncreasingFiltration.from_steps(n, {i + l: image_of(d, s) for i, s in base.jumps})
    return FilteredWindow(win, out)


def _relevant_indices(fw: FilteredWindow) -> list[int]:
    idx = {i for f in fw.F.values() for i in f.indices}
    if not idx:
        return []
    return list(range(min(idx) - 2, max(idx) + 3))


def specializability_violations(fw: FilteredWindow) -> list[str]:
    """Filtered D-module conditions and the two surjectivity conditions on the window."""
    win = fw.module
    out = []
    ps = _relevant_indices(fw)
    for b in win.betas:
        for p in ps:
            src = fw.step(b, p)
            if b in win.t_maps:
                img = image_of(win.t_maps[b], src)
                tgt = fw.step(b + 1, p)
                if not contains(tgt, img):
                    out.append(f"t F_p M^{b} ⊄ F_p M^{b + 1} at p={p}")
                elif b > -1 and img != tgt:
                    out.append(f"t: F_p Gr^{b} -> F_p Gr^{b + 1} not onto at p={p}")
            if b in win.d_maps:
                img = image_of(win.d_maps[b], src)
                tgt = fw.step(b - 1, p + 1)
                if not contains(tgt, img):
                    out.append(f"d_t F_p M^{b} ⊄ F_(p+1) M^{b - 1} at p={p}")
                elif b < 0 and img != tgt:
                    out.append(f"d_t: F_p Gr^{b} -> F_(p+1) Gr^{b - 1} not onto at p={p}")
    return out


def decomposition_violations(m: MonodromicMHM, fw: FilteredWindow) -> list[str]:
    """Check F_p M^{a+l} = t^l F_p M^a and F_p M^{a-l} = d^l F_{p-l} M^a with the window maps."""
    win = fw.module
    out = []
    ps = _relevant_indices(fw)
    lo, hi = win.window
    for a in m.core.alphas:
        base = m.pair(a).F
        if a > -1:
            l = 0
            while a + l <= hi:
                t = _composite(win.t_maps, a, l, 1, win.dim)
                for p in ps:
                    if image_of(t, base.step(p)) != fw.step(a + l, p):
                        out.append(f"F_p M^({a}+{l}) ≠ t^{l} F_p M^{a} at p={p}")
                l += 1
        if a < 0:
            l = 0
            while a - l >= lo:
                d = _composite(win.d_maps, a, l, -1, win.dim)
                for p in ps:
                    if image_of(d, base.step(p - l)) != fw.step(a - l, p):
                        out.append(f"F_p M^({a}-{l}) ≠ d^{l} F_(p-{l}) M^{a} at p={p}")
                l += 1
    return out


def direct_sum_mmhm(*ms: MonodromicMHM) -> MonodromicMHM:
    alphas = sorted({a for m in ms for a in m.core.alphas})
    comps, F, W = {}, {}, {}
    for a in alphas:
        comps[a] = block_diag(*[m.core.N(a) for m in ms])
        F[a] = direct_sum_filtration(*[m.pair(a).F for m in ms])
        W[a] = direct_sum_filtration(*[m.pair(a).W for m in ms])
    u = block_diag(*[m.core.u for m in ms])
    w = block_diag(*[m.core.w for m in ms])
    return MonodromicMHM(CoreData(comps, u, w), F, W, all(m.polarizable for m in ms))
