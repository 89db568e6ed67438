"""Increasing filtrations on Q^n stored as jump lists."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .linalg import (
    Matrix, Subquotient, Subspace, contains, image_of, induced_on_subquotients, intersect,
    kernel, kron_vec, maps_into, nilpotency_index, rank, subspace_sum,
)
from .errors import NotPreserved


@dataclass(frozen=True)
class IncreasingFiltration:
    """F_p = step of the largest jump index <= p, zero below the first jump.

    The last step is always the whole space.  On the zero space the jump
    list is empty.
    """
    ambient_dim: int
    jumps: tuple

    def __post_init__(self):
        prev_index, prev_dim = None, 0
        for index, step in self.jumps:
            if not isinstance(index, int):
                raise TypeError("filtration indices must be integers")
            if step.ambient_dim != self.ambient_dim:
                raise ValueError("step in the wrong ambient space")
            if prev_index is not None and index <= prev_index:
                raise ValueError("jump indices must increase")
            if step.dim <= prev_dim:
                raise ValueError("steps must strictly increase")
            prev_index, prev_dim = index, step.dim
        if self.ambient_dim and (not self.jumps or not self.jumps[-1][1].is_full):
            raise ValueError("filtration is not exhaustive")

    @classmethod
    def from_steps(cls, n: int, steps: Mapping[int, Subspace]) -> "IncreasingFiltration":
        """Build from any nested family indexed by integers; the top step is forced full."""
        jumps = []
        items = sorted(steps.items())
        for i, (index, step) in enumerate(items):
            if i + 1 < len(items) and not contains(items[i + 1][1], step):
                raise ValueError("steps are not nested")
            if step.dim > (jumps[-1][1].dim if jumps else 0):
                jumps.append((index, step))
        if n and (not jumps or not jumps[-1][1].is_full):
            raise ValueError("filtration is not exhaustive")
        return cls(n, tuple(jumps))

    @classmethod
    def trivial(cls, n: int, index: int = 0) -> "IncreasingFiltration":
        return cls(n, ((index, Subspace.full(n)),) if n else ())

    @classmethod
    def from_degrees(cls, degrees: Sequence[int]) -> "IncreasingFiltration":
        """e_i sits in F_p exactly when degrees[i] <= p."""
        n = len(degrees)
        steps = {}
        for p in sorted(set(degrees)):
            steps[p] = Subspace.coordinate(n, [i for i, d in enumerate(degrees) if d <= p])
        return cls.from_steps(n, steps)

    def step(self, p: int) -> Subspace:
        current = Subspace.zero(self.ambient_dim)
        for index, s in self.jumps:
            if index > p:
                break
            current = s
        return current

    @property
    def indices(self) -> list[int]:
        return [i for i, _ in self.jumps]

    @property
    def lowest(self) -> int | None:
        return self.jumps[0][0] if self.jumps else None

    @property
    def highest(self) -> int | None:
        return self.jumps[-1][0] if self.jumps else None

    def shifted(self, d: int) -> "IncreasingFiltration":
        """G_p = F_{p-d}: every jump moves up by d."""
        return IncreasingFiltration(self.ambient_dim, tuple((i + d, s) for i, s in self.jumps))

    def transport(self, p: Matrix) -> "IncreasingFiltration":
        """Image under an invertible change of coordinates p."""
        return IncreasingFiltration(self.ambient_dim, tuple((i, image_of(p, s)) for i, s in self.jumps))

    def restrict(self, sub: Subspace) -> "IncreasingFiltration":
        """Induced filtration on sub, written in the coordinates of sub's basis."""
        steps = {}
        for i, s in self.jumps:
            meet = intersect(s, sub)
            steps[i] = Subspace.span([sub.coords(v) for v in meet.vectors()], sub.dim)
        return IncreasingFiltration.from_steps(sub.dim, steps)

    def descend(self, sub: Subspace) -> "IncreasingFiltration":
        """Image filtration on Q^n / sub in its pivot-completion basis."""
        q = sub.quotient_map()
        m = q.rows
        steps = {i: image_of(q, s) for i, s in self.jumps}
        return IncreasingFiltration.from_steps(m, steps)

    def pushforward(self, f: Matrix) -> "IncreasingFiltration":
        """Image filtration of a surjection f."""
        if rank(f) != f.rows:
            raise ValueError("pushforward needs a surjective map")
        return IncreasingFiltration.from_steps(f.rows, {i: image_of(f, s) for i, s in self.jumps})


@dataclass(frozen=True)
class FiltrationPair:
    F: IncreasingFiltration
    W: IncreasingFiltration

    def __post_init__(self):
        if self.F.ambient_dim != self.W.ambient_dim:
            raise ValueError("F and W live on different spaces")

    @property
    def dim(self) -> int:
        return self.F.ambient_dim


def graded_dims(f: IncreasingFiltration) -> dict[int, int]:
    out, prev = {}, 0
    for i, s in f.jumps:
        out[i] = s.dim - prev
        prev = s.dim
    return out


def shift_twist(pair: FiltrationPair, l: int) -> FiltrationPair:
    """Tate twist (l): F_p -> F_{p-l}, W_k -> W_{k+2l}."""
    return FiltrationPair(pair.F.shifted(l), pair.W.shifted(-2 * l))


def tensor_filtration(a: IncreasingFiltration, b: IncreasingFiltration) -> IncreasingFiltration:
    """step_p = sum over s + t = p of a_s (x) b_t, with e_i (x) f_j at i * dim_b + j."""
    n = a.ambient_dim * b.ambient_dim
    pieces = {}
    for s, sa in a.jumps:
        for t, sb in b.jumps:
            vecs = [kron_vec(x, y) for x in sa.vectors() for y in sb.vectors()]
            pieces.setdefault(s + t, []).extend(vecs)
    # the partial sums are nested by construction, so skip the nesting check
    jumps, acc = [], []
    for p in sorted(pieces):
        acc = acc + pieces[p]
        step = Subspace.span(acc, n)
        if step.dim > (jumps[-1][1].dim if jumps else 0):
            jumps.append((p, step))
    return IncreasingFiltration(n, tuple(jumps))


def direct_sum_filtration(*fs: IncreasingFiltration) -> IncreasingFiltration:
    n = sum(f.ambient_dim for f in fs)
    idx = sorted({i for f in fs for i in f.indices})
    steps = {}
    for p in idx:
        vecs, off = [], 0
        for f in fs:
            for v in f.step(p).vectors():
                vecs.append((0,) * off + tuple(v) + (0,) * (n - off - f.ambient_dim))
            off += f.ambient_dim
        steps[p] = Subspace.span(vecs, n)
    return IncreasingFiltration.from_steps(n, steps)


def monodromy_weight_filtration(N: Matrix, center: int) -> IncreasingFiltration:
    """W_{center+k} = sum over j >= max(k, 0) of Ker N^{j+1} cap Im N^{j-k}."""
    n = N.rows
    idx = nilpotency_index(N)
    if n == 0:
        return IncreasingFiltration.trivial(0)
    powers = [Matrix.identity(n)]
    for _ in range(2 * idx + 2):
        powers.append(powers[-1] @ N)
    ker = [kernel(p) for p in powers]
    im = [Subspace.column_span(p) for p in powers]
    steps = {}
    for k in range(-idx, idx + 1):
        parts = []
        for j in range(max(k, 0), idx + 1):
            if j - k >= len(im) or j + 1 >= len(ker):
                continue
            parts.append(intersect(ker[j + 1], im[j - k]))
        steps[center + k] = subspace_sum(*parts, n=n)
    return IncreasingFiltration.from_steps(n, steps)


@dataclass(frozen=True)
class MonodromyCheck:
    ok: bool
    failure: tuple | None = None
    message: str = ""

    def __bool__(self):
        return self.ok


def gr_gr(W: IncreasingFiltration, L: IncreasingFiltration, j: int, k: int) -> Subquotient:
    """Gr^W_j Gr^L_k as a subquotient of the ambient space."""
    lk, lk1 = L.step(k), L.step(k - 1)
    top = subspace_sum(intersect(W.step(j), lk), lk1)
    bottom = subspace_sum(intersect(W.step(j - 1), lk), lk1)
    return Subquotient(top, bottom)


def check_relative_monodromy(N: Matrix, L: IncreasingFiltration, W: IncreasingFiltration) -> MonodromyCheck:
    """Check N W_k in W_{k-2} and N^l: Gr^W_{k+l} Gr^L_k -> Gr^W_{k-l} Gr^L_k bijective."""
    idx = nilpotency_index(N)
    n = N.rows
    if n == 0:
        return MonodromyCheck(True)
    lo = min(L.lowest, W.lowest) - 2 * idx - 2
    hi = max(L.highest, W.highest) + 2 * idx + 2
    for k in range(lo, hi + 1):
        if not maps_into(N, L.step(k), L.step(k)):
            return MonodromyCheck(False, (k, 0), f"N L_{k} is not contained in L_{k}")
    for k in range(lo, hi + 1):
        if not maps_into(N, W.step(k), W.step(k - 2)):
            return MonodromyCheck(False, (k, 1), f"N W_{k} is not contained in W_{k - 2}")
    powers = [Matrix.identity(n)]
    for _ in range(idx):
        powers.append(powers[-1] @ N)
    for k in range(L.lowest, L.highest + 1):
        if L.step(k).dim == L.step(k - 1).dim:
            continue
        for l in range(idx + 1):
            src = gr_gr(W, L, k + l, k)
            tgt = gr_gr(W, L, k - l, k)
            try:
                m = induced_on_subquotients(powers[l], src, tgt)
            except NotPreserved:
                return MonodromyCheck(False, (k, l), f"N^{l} does not induce a map on Gr^L_{k}")
            if src.dim != tgt.dim or rank(m) != src.dim:
                return MonodromyCheck(
                    False, (k, l),
                    f"N^{l}: Gr^W_{k + l} Gr^L_{k} (dim {src.dim}) -> Gr^W_{k - l} Gr^L_{k} "
                    f"(dim {tgt.dim}) is not bijective")
    return MonodromyCheck(True)


def is_filtered(f: Matrix, F_src: IncreasingFiltration, F_tgt: IncreasingFiltration, shift: int = 0) -> bool:
    """f(F_src,p) contained in F_tgt,(p+shift) for all p."""
    for p in F_src.indices:
        if not maps_into(f, F_src.step(p), F_tgt.step(p + shift)):
            return False
    return True


def check_strict(f: Matrix, F_src: IncreasingFiltration, F_tgt: IncreasingFiltration, shift: int = 0) -> bool:
    """f(F_src,p) = Im f cap F_tgt,(p+shift) for all p."""
    if f.cols != F_src.ambient_dim or f.rows != F_tgt.ambient_dim:
        raise ValueError("map shape does not match the filtrations")
    im = Subspace.column_span(f)
    candidates = set(F_src.indices) | {i - shift for i in F_tgt.indices}
    for p in sorted(candidates):
        if image_of(f, F_src.step(p)) != intersect(im, F_tgt.step(p + shift)):
            return False
    return True


def filtered_iso(f: Matrix, F_src: IncreasingFiltration, F_tgt: IncreasingFiltration, shift: int = 0) -> bool:
    """f bijective with f(F_src,p) = F_tgt,(p+shift) for all p."""
    return f.is_square and rank(f) == f.rows and check_strict(f, F_src, F_tgt, shift)
