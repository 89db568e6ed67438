"""Monodromic D-modules on the line over a point.

A module is stored by its core: the components M^alpha for alpha in
[-1, 0], the nilpotent parts N_alpha of t d_t - alpha, and the junction
maps u = d_t: M^0 -> M^-1 and w = t: M^-1 -> M^0.  Everything else
(windows of the full module, cycles, duals) is computed from the core.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import sympy

from .errors import InvalidCore, IrrationalEigenvalue, NotAMorphism, WindowTooSmall
from .linalg import (
    Matrix, Subspace, block_diag, contains, image_of, induce, intersect, is_nilpotent,
    kernel, rank, sign_twist_witness, subspace_sum,
)

ZERO = Fraction(0)
MINUS_ONE = Fraction(-1)


def is_integral(a: Fraction) -> bool:
    return a.denominator == 1


def in_core_range(a: Fraction) -> bool:
    return MINUS_ONE <= a <= ZERO


@dataclass(frozen=True)
class CoreData:
    components: Mapping[Fraction, Matrix]
    u: Matrix = None
    w: Matrix = None

    def __post_init__(self):
        comps = {}
        for a, n in self.components.items():
            a = Fraction(a)
            if not n.is_square:
                raise InvalidCore(f"N at alpha={a} is not square")
            if n.rows:
                comps[a] = n
        object.__setattr__(self, "components", dict(sorted(comps.items())))
        d0, d1 = self.dim(ZERO), self.dim(MINUS_ONE)
        if self.u is None:
            object.__setattr__(self, "u", Matrix.zeros(d1, d0))
        if self.w is None:
            object.__setattr__(self, "w", Matrix.zeros(d0, d1))
        if self.u.shape != (d1, d0):
            raise InvalidCore(f"u has shape {self.u.shape}, expected {(d1, d0)}")
        if self.w.shape != (d0, d1):
            raise InvalidCore(f"w has shape {self.w.shape}, expected {(d0, d1)}")

    def dim(self, a) -> int:
        n = self.components.get(Fraction(a))
        return n.rows if n is not None else 0

    def N(self, a) -> Matrix:
        a = Fraction(a)
        return self.components.get(a, Matrix.zeros(0, 0))

    @property
    def alphas(self) -> list[Fraction]:
        return list(self.components)

    @property
    def total_dim(self) -> int:
        return sum(n.rows for n in self.components.values())

    @classmethod
    def empty(cls) -> "CoreData":
        return cls({})


def validate(core: CoreData) -> list[str]:
    """Named violations; an empty list means the core is valid."""
    out = []
    for a, n in core.components.items():
        if not in_core_range(a):
            out.append(f"alpha {a} outside [-1, 0]")
        if not is_nilpotent(n):
            out.append(f"NotNilpotent: N at alpha={a}")
    u, w = core.u, core.w
    if w @ u != core.N(ZERO):
        out.append("w·u ≠ N_0")
    if u @ w != core.N(MINUS_ONE):
        out.append("u·w ≠ N_-1")
    if not is_nilpotent(u @ w):
        out.append("NotNilpotent: u·w")
    if not is_nilpotent(w @ u):
        out.append("NotNilpotent: w·u")
    return out


def require_valid(core: CoreData) -> None:
    problems = validate(core)
    if problems:
        raise InvalidCore("; ".join(problems))


# windows

@dataclass(frozen=True)
class WindowModule:
    """The components M^beta for beta in a closed window, with t, d_t and t d_t."""
    window: tuple
    graded: dict
    t_maps: dict
    d_maps: dict
    euler: dict

    def dim(self, b) -> int:
        return self.graded.get(Fraction(b), 0)

    @property
    def betas(self) -> list[Fraction]:
        return sorted(self.graded)


def _window_betas(core: CoreData, lo: Fraction, hi: Fraction) -> dict[Fraction, list[Fraction]]:
    """Window indices grouped by class representative in (-1, 0]."""
    reps = set()
    for a in core.alphas:
        reps.add(ZERO if is_integral(a) else a)
    out = {}
    for r in sorted(reps):
        first = r + (lo - r).__ceil__()
        bs, b = [], first
        while b <= hi:
            bs.append(b)
            b += 1
        out[r] = bs
    return out


def expand(core: CoreData, K: int) -> WindowModule:
    """Materialize M^beta for beta in [-1-K, K]."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    require_valid(core)
    lo, hi = Fraction(-1 - K), Fraction(K)
    graded, t_maps, d_maps, euler = {}, {}, {}, {}
    for rep, betas in _window_betas(core, lo, hi).items():
        for b in betas:
            if is_integral(rep):
                src = ZERO if b >= 0 else MINUS_ONE
            else:
                src = rep
            n = core.N(src)
            dim = n.rows
            graded[b] = dim
            euler[b] = n + Matrix.identity(dim).scale(b)
            if b + 1 <= hi:
                if is_integral(rep) and b == -1:
                    t_maps[b] = core.w
                elif b >= src:
                    t_maps[b] = Matrix.identity(dim)
                else:
                    t_maps[b] = n + Matrix.identity(dim).scale(b + 1)
            if b - 1 >= lo:
                if is_integral(rep) and b == 0:
                    d_maps[b] = core.u
                elif b <= src:
                    d_maps[b] = Matrix.identity(dim)
                else:
                    d_maps[b] = n + Matrix.identity(dim).scale(b)
    return WindowModule((lo, hi), graded, t_maps, d_maps, euler)


def window_violations(win: WindowModule) -> list[str]:
    out = []
    for b in win.betas:
        n = win.dim(b)
        if b in win.t_maps and b != -1:
            t = win.t_maps[b]
            if not (t.is_square and rank(t) == n):
                out.append(f"t not invertible at beta={b}")
        if b in win.d_maps and b != 0:
            d = win.d_maps[b]
            if not (d.is_square and rank(d) == n):
                out.append(f"d_t not invertible at beta={b}")
        if b in win.t_maps and b in win.d_maps and (b + 1) in win.d_maps and (b - 1) in win.t_maps:
            comm = win.d_maps[b + 1] @ win.t_maps[b] - win.t_maps[b - 1] @ win.d_maps[b]
            if comm != Matrix.identity(n):
                out.append(f"[d_t, t] is not the identity at beta={b}")
        e = win.euler[b]
        if not is_nilpotent(e - Matrix.identity(n).scale(b)):
            out.append(f"t d_t - beta not nilpotent at beta={b}")
        if b in win.d_maps and (b - 1) in win.t_maps:
            if win.t_maps[b - 1] @ win.d_maps[b] != e:
                out.append(f"t d_t does not match t·d_t at beta={b}")
    return out


def core_from_window(win: WindowModule) -> CoreData:
    """Read back the core: components at beta in [-1, 0], u = d at 0, w = t at -1."""
    comps = {}
    for b in win.betas:
        if in_core_range(b):
            comps[b] = win.euler[b] - Matrix.identity(win.dim(b)).scale(b)
    u = win.d_maps.get(ZERO)
    w = win.t_maps.get(MINUS_ONE)
    return CoreData(comps, u, w)


# eigenvalues

def _char_poly(m: Matrix) -> list[Fraction]:
    """Coefficients c_0..c_n of det(x - m) by Faddeev-LeVerrier."""
    n = m.rows
    coeffs = [Fraction(1)]
    mk = Matrix.zeros(n, n)
    ident = Matrix.identity(n)
    c = Fraction(1)
    for k in range(1, n + 1):
        mk = m @ (mk + ident.scale(c))
        c = -sum(mk[i, i] for i in range(n)) / k
        coeffs.append(c)
    return list(reversed(coeffs))


def _rational_roots(coeffs: list[Fraction]) -> dict[Fraction, int]:
    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], x,
                      domain="QQ")
    out = {}
    for factor, mult in poly.factor_list()[1]:
        if factor.degree() == 1:
            a, b = factor.all_coeffs()
            root = -b / a
            out[Fraction(int(root.p), int(root.q))] = mult
    return out


def _coupled_blocks(m: Matrix) -> list[list[int]]:
    """Connected components of the graph with an edge i-j whenever m[i,j] != 0."""
    n = m.rows
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(n):
            if m[i, j]:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def eigen_decompose(tdt: Matrix) -> dict[Fraction, Subspace]:
    """Generalized eigenspaces of a square matrix with rational eigenvalues."""
    if not tdt.is_square:
        raise ValueError("eigen_decompose needs a square matrix")
    n = tdt.rows
    pieces: dict[Fraction, list] = {}
    for idx in _coupled_blocks(tdt):
        sub = tdt.submatrix(idx, idx)
        roots = _rational_roots(_char_poly(sub))
        if sum(roots.values()) != len(idx):
            raise IrrationalEigenvalue(f"characteristic polynomial of block {idx} has non-rational roots")
        for lam, mult in roots.items():
            shifted = sub - Matrix.identity(len(idx)).scale(lam)
            for v in kernel(shifted.power(mult)).vectors():
                full = [ZERO] * n
                for i, x in zip(idx, v):
                    full[i] = x
                pieces.setdefault(lam, []).append(full)
    return {lam: Subspace.span(vs, n) for lam, vs in sorted(pieces.items())}


# V-filtration

def v_filtration(win: WindowModule, gamma) -> dict[Fraction, Subspace]:
    """V^gamma as a graded subspace: the whole of M^beta for beta >= gamma, else zero."""
    gamma = Fraction(gamma)
    return {b: Subspace.full(win.dim(b)) if b >= gamma else Subspace.zero(win.dim(b))
            for b in win.betas}


def v_graded_dims(win: WindowModule, gamma) -> int:
    gamma = Fraction(gamma)
    return win.dim(gamma) if gamma in win.graded else 0


@dataclass
class _Total:
    offsets: dict
    n: int
    T: Matrix
    D: Matrix
    theta: Matrix
    t_reach: Subspace


def _assemble(win: WindowModule) -> _Total:
    offsets, n = {}, 0
    for b in win.betas:
        offsets[b] = n
        n += win.dim(b)
    tf = [[ZERO] * n for _ in range(n)]
    df = [[ZERO] * n for _ in range(n)]
    reach = []
    for b in win.betas:
        o = offsets[b]
        if b in win.t_maps:
            t, o2 = win.t_maps[b], offsets[b + 1]
            for i in range(t.rows):
                for j in range(t.cols):
                    tf[o2 + i][o + j] = t[i, j]
            reach.extend(range(o2, o2 + win.dim(b + 1)))
        if b in win.d_maps:
            d, o2 = win.d_maps[b], offsets[b - 1]
            for i in range(d.rows):
                for j in range(d.cols):
                    df[o2 + i][o + j] = d[i, j]
    theta = block_diag(*[win.euler[b] for b in win.betas]) if n else Matrix.zeros(0, 0)
    return _Total(offsets, n, Matrix.from_rows(tf, n), Matrix.from_rows(df, n), theta,
                  Subspace.coordinate(n, reach))


@dataclass(frozen=True)
class VOracleResult:
    steps: dict
    searched: int
    pruned: int


def v_filtration_oracle(win: WindowModule) -> VOracleResult:
    """Search for the filtration satisfying the Kashiwara-Malgrange axioms inside the window.

    Works on the total space with t, d_t, t d_t as plain matrices and never
    looks at the grading of the window.  A t d_t-stable step is the sum of its
    parts in the generalized eigenspaces, and the condition on Gr forces each
    part to be all or nothing, so candidate steps are sums of eigenspaces.
    """
    lo, hi = win.window
    if lo > -2 or hi < 1:
        raise WindowTooSmall(f"window {lo}..{hi} must contain [-2, 1]")
    tot = _assemble(win)
    n = tot.n
    eig = eigen_decompose(tot.theta)
    gammas = sorted(eig, reverse=True)
    found, searched, pruned = [], 0, 0

    def step_at(steps, g):
        keys = [k for k in steps if k >= g]
        return steps[min(keys)] if keys else Subspace.zero(n)

    def step_above(steps, g):
        keys = [k for k in steps if k > g]
        return steps[min(keys)] if keys else Subspace.zero(n)

    def axioms(steps) -> bool:
        if step_at(steps, lo) != Subspace.full(n):
            return False
        for g in gammas:
            v = steps[g]
            if not contains(v, image_of(tot.theta, v)):
                return False
            above = step_above(steps, g)
            shifted = tot.theta - Matrix.identity(n).scale(g)
            if not contains(above, image_of(shifted.power(n), v)):
                return False
            if not contains(step_at(steps, g + 1), image_of(tot.T, v)):
                return False
            if not contains(step_at(steps, g - 1), image_of(tot.D, v)):
                return False
            if g > -1 and image_of(tot.T, v) != intersect(step_at(steps, g + 1), tot.t_reach):
                return False
        return True

    def search(i, current, steps):
        nonlocal searched, pruned
        if i == len(gammas):
            searched += 1
            if axioms(steps):
                found.append(dict(steps))
            return
        g = gammas[i]
        added = subspace_sum(current, eig[g])
        search(i + 1, added, {**steps, g: added})
        # leaving E_g out: later steps only add E_h with h < g, so the
        # bottom step could never be the whole window
        pruned += 1

    search(0, Subspace.zero(n), {})
    if len(found) != 1:
        raise WindowTooSmall(f"window does not single out one filtration ({len(found)} found)")
    steps = found[0]
    graded = {}
    for g, s in steps.items():
        graded[g] = {b: Subspace.span(
            [v[tot.offsets[b]:tot.offsets[b] + win.dim(b)] for v in intersect(
                s, Subspace.coordinate(n, range(tot.offsets[b], tot.offsets[b] + win.dim(b)))).vectors()],
            win.dim(b)) for b in win.betas}
    return VOracleResult(graded, searched, pruned)


def v_oracle_matches(win: WindowModule) -> bool:
    res = v_filtration_oracle(win)
    for g, graded in res.steps.items():
        if graded != v_filtration(win, g):
            return False
    return True


# cycles

@dataclass(frozen=True)
class Cycles:
    psi: dict
    phi: Matrix
    can: Matrix
    var: Matrix


def cycles(core: CoreData) -> Cycles:
    require_valid(core)
    psi = {a: n for a, n in core.components.items() if a > -1}
    return Cycles(psi, core.N(MINUS_ONE), -core.u, core.w)


# duality

def dual(core: CoreData) -> CoreData:
    """Componentwise transpose: M^alpha -> (M^{-1-alpha})^* off the integers, t' = -u^T, d' = w^T."""
    require_valid(core)
    comps = {}
    for a, n in core.components.items():
        if is_integral(a):
            continue
        comps[-1 - a] = n.T
    u_new = core.w.T
    w_new = -core.u.T
    if core.dim(ZERO):
        comps[ZERO] = w_new @ u_new
    if core.dim(MINUS_ONE):
        comps[MINUS_ONE] = u_new @ w_new
    return CoreData(comps, u_new, w_new)


def graded_dual_window(win: WindowModule) -> WindowModule:
    """Graded linear dual: D^beta = (M^{-1-beta})^*, t' = t^T, d' = -d^T."""
    lo, hi = win.window
    if lo != -1 - hi:
        raise WindowTooSmall("graded dual needs a window symmetric about -1/2")
    graded, t_maps, d_maps, euler = {}, {}, {}, {}
    for b in win.betas:
        nb = -1 - b
        graded[nb] = win.dim(b)
        euler[nb] = -(win.euler[b] + Matrix.identity(win.dim(b))).T
    for b in win.betas:
        nb = -1 - b
        if (b - 1) in win.t_maps:
            t_maps[nb] = win.t_maps[b - 1].T
        if (b + 1) in win.d_maps:
            d_maps[nb] = -win.d_maps[b + 1].T
    return WindowModule((lo, hi), dict(sorted(graded.items())), t_maps, d_maps, euler)


def swap_junction(core: CoreData) -> CoreData:
    """Exchange the roles of M^0 and M^-1 (and of u and w)."""
    comps = dict(core.components)
    n0, n1 = comps.pop(ZERO, None), comps.pop(MINUS_ONE, None)
    if n1 is not None:
        comps[ZERO] = n1
    if n0 is not None:
        comps[MINUS_ONE] = n0
    return CoreData(comps, core.w, core.u)


def dual_window_oracle(core: CoreData, K: int = 2) -> CoreData:
    """Dual computed by transposing an expanded window.

    The graded dual puts (M^-1)^* at beta = 0 and (M^0)^* at beta = -1, so
    the junction roles are exchanged back before comparing.
    """
    win = graded_dual_window(expand(core, K))
    problems = window_violations(win)
    if problems:
        raise InvalidCore("transposed window is not a module: " + "; ".join(problems))
    return swap_junction(core_from_window(win))


# morphisms

@dataclass(frozen=True)
class CoreMorphism:
    source: CoreData
    target: CoreData
    maps: Mapping[Fraction, Matrix] = field(default_factory=dict)

    def at(self, a) -> Matrix:
        a = Fraction(a)
        m = self.maps.get(a)
        if m is None:
            return Matrix.zeros(self.target.dim(a), self.source.dim(a))
        return m


def morphism_violations(f: CoreMorphism) -> list[str]:
    out = []
    alphas = set(f.source.alphas) | set(f.target.alphas) | set(f.maps)
    for a in sorted(alphas):
        m = f.at(a)
        if m.shape != (f.target.dim(a), f.source.dim(a)):
            out.append(f"map at alpha={a} has shape {m.shape}")
            continue
        if m @ f.source.N(a) != f.target.N(a) @ m:
            out.append(f"map does not commute with N at alpha={a}")
    if not out:
        f0, f1 = f.at(ZERO), f.at(MINUS_ONE)
        if f1 @ f.source.u != f.target.u @ f0:
            out.append("map does not commute with u")
        if f0 @ f.source.w != f.target.w @ f1:
            out.append("map does not commute with w")
    return out


def is_isomorphism(f: CoreMorphism) -> bool:
    if morphism_violations(f):
        return False
    for a in set(f.source.alphas) | set(f.target.alphas):
        m = f.at(a)
        if not m.is_square or rank(m) != m.rows:
            return False
    return True


def compose(g: CoreMorphism, f: CoreMorphism) -> CoreMorphism:
    maps = {a: g.at(a) @ f.at(a) for a in set(f.source.alphas) | set(g.target.alphas)}
    return CoreMorphism(f.source, g.target, maps)


def identity_morphism(core: CoreData) -> CoreMorphism:
    return CoreMorphism(core, core, {a: Matrix.identity(core.dim(a)) for a in core.alphas})


def ker_coker(f: CoreMorphism, which: str) -> CoreData:
    problems = morphism_violations(f)
    if problems:
        raise NotAMorphism("; ".join(problems))
    src, tgt = f.source, f.target
    alphas = sorted(set(src.alphas) | set(tgt.alphas) | {ZERO, MINUS_ONE})
    if which == "kernel":
        subs = {a: kernel(f.at(a)) for a in alphas}
        comps = {a: induce(src.N(a), subs[a], subs[a], "restrict") for a in alphas}
        u = induce(src.u, subs[ZERO], subs[MINUS_ONE], "restrict")
        w = induce(src.w, subs[MINUS_ONE], subs[ZERO], "restrict")
    elif which == "image":
        subs = {a: Subspace.column_span(f.at(a)) for a in alphas}
        comps = {a: induce(tgt.N(a), subs[a], subs[a], "restrict") for a in alphas}
        u = induce(tgt.u, subs[ZERO], subs[MINUS_ONE], "restrict")
        w = induce(tgt.w, subs[MINUS_ONE], subs[ZERO], "restrict")
    elif which == "cokernel":
        subs = {a: Subspace.column_span(f.at(a)) for a in alphas}
        comps = {a: induce(tgt.N(a), subs[a], subs[a], "descend") for a in alphas}
        u = induce(tgt.u, subs[ZERO], subs[MINUS_ONE], "descend")
        w = induce(tgt.w, subs[MINUS_ONE], subs[ZERO], "descend")
    else:
        raise ValueError(f"unknown choice {which!r}")
    return CoreData(comps, u, w)


# restriction to t = 1

@dataclass(frozen=True)
class RestrictionToOne:
    dim: int
    summands: tuple  # (alpha, N_alpha) per alpha in (-1, 0]


def restrict_to_one(core: CoreData) -> RestrictionToOne:
    require_valid(core)
    summands = tuple((a, n) for a, n in core.components.items() if a > -1)
    return RestrictionToOne(sum(n.rows for _, n in summands), summands)


# isomorphisms differing by signs

def sign_isomorphism(a: CoreData, b: CoreData) -> CoreMorphism | None:
    """An isomorphism a -> b when b differs from a only by signs of N (off the
    integers) and of u, w; None otherwise."""
    if a.alphas != b.alphas or any(a.dim(x) != b.dim(x) for x in a.alphas):
        return None
    maps = {}
    for x in a.alphas:
        if is_integral(x):
            continue
        na, nb = a.N(x), b.N(x)
        if na == nb:
            maps[x] = Matrix.identity(na.rows)
        elif na == -nb:
            maps[x] = sign_twist_witness(na, [list(range(na.rows))], [-1])
        else:
            return None
    d0, d1 = a.dim(ZERO), a.dim(MINUS_ONE)
    if d0 or d1:
        eps = []
        for ma, mb in ((a.u, b.u), (a.w, b.w)):
            if ma == mb:
                eps.append(1)
            elif ma == -mb:
                eps.append(-1)
            else:
                return None
        # z acts on M^0 + M^-1 by (x0, x1) -> (w x1, u x0)
        z = block_diag(Matrix.zeros(d0, d0), Matrix.zeros(d1, d1))
        rows = z.to_rows()
        for i in range(d1):
            for j in range(d0):
                rows[d0 + i][j] = a.u[i, j]
        for i in range(d0):
            for j in range(d1):
                rows[i][d0 + j] = a.w[i, j]
        z = Matrix.from_rows(rows, d0 + d1)
        s = sign_twist_witness(z, [list(range(d0)), list(range(d0, d0 + d1))], eps)
        if d0:
            maps[ZERO] = s.submatrix(range(d0), range(d0))
        if d1:
            maps[MINUS_ONE] = s.submatrix(range(d0, d0 + d1), range(d0, d0 + d1))
    f = CoreMorphism(a, b, maps)
    return f if is_isomorphism(f) else None
