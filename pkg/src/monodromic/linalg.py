"""Exact linear algebra over the rationals.

Matrices are immutable and stored row-major.  Subspaces of Q^n are stored
by a basis in reduced column echelon form, so two equal subspaces carry
identical bases and equality is a plain structural comparison.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import AmbientMismatch, NotNilpotent, NotPreserved

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted")
    return Fraction(x)


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix shape")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(f"expected {self.rows * self.cols} entries, got {len(self.entries)}")

    # construction

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        flat = []
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            flat.extend(frac(x) for x in r)
        return cls(len(rows), ncols, tuple(flat))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int) -> "Matrix":
        columns = [list(c) for c in columns]
        flat = [frac(columns[j][i]) for i in range(nrows) for j in range(len(columns))]
        return cls(nrows, len(columns), tuple(flat))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, (ZERO,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls.diag([ONE] * n)

    @classmethod
    def diag(cls, values: Sequence) -> "Matrix":
        n = len(values)
        flat = [ZERO] * (n * n)
        for i, x in enumerate(values):
            flat[i * n + i] = frac(x)
        return cls(n, n, tuple(flat))

    @classmethod
    def jordan(cls, n: int) -> "Matrix":
        """Nilpotent block with ones on the superdiagonal, so e_i -> e_{i-1}."""
        flat = [ZERO] * (n * n)
        for i in range(n - 1):
            flat[i * n + i + 1] = ONE
        return cls(n, n, tuple(flat))

    # access

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def column(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return not any(self.entries)

    # arithmetic

    @property
    def T(self) -> "Matrix":
        r, c, e = self.rows, self.cols, self.entries
        return Matrix(c, r, tuple(e[i * c + j] for j in range(c) for i in range(r)))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        n, k, m = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        out = [ZERO] * (n * m)
        for i in range(n):
            base = i * m
            for l in range(k):
                x = a[i * k + l]
                if not x:
                    continue
                brow = l * m
                for j in range(m):
                    y = b[brow + j]
                    if y:
                        out[base + j] += x * y
        return Matrix(n, m, tuple(out))

    def apply(self, v: Sequence) -> tuple:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        c, e = self.cols, self.entries
        out = []
        for i in range(self.rows):
            s = ZERO
            for j in range(c):
                x = e[i * c + j]
                if x and v[j]:
                    s += x * v[j]
            out.append(s)
        return tuple(out)

    def _check_same(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(self.rows, self.cols, tuple(x + y for x, y in zip(self.entries, other.entries)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(self.rows, self.cols, tuple(x - y for x, y in zip(self.entries, other.entries)))

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def scale(self, s) -> "Matrix":
        s = frac(s)
        return Matrix(self.rows, self.cols, tuple(s * x for x in self.entries))

    def __rmul__(self, s) -> "Matrix":
        return self.scale(s)

    def power(self, k: int) -> "Matrix":
        if not self.is_square:
            raise ValueError("power of a non-square matrix")
        result = Matrix.identity(self.rows)
        base = self
        while k > 0:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Matrix":
        return Matrix(len(row_idx), len(col_idx),
                      tuple(self[i, j] for i in row_idx for j in col_idx))

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in self.row(i)) for i in range(self.rows))
        return f"Matrix({self.rows}x{self.cols}: [{body}])"


def hstack(*ms: Matrix, rows: int | None = None) -> Matrix:
    if not ms:
        return Matrix.zeros(rows or 0, 0)
    n = ms[0].rows
    if any(m.rows != n for m in ms):
        raise ValueError("hstack row mismatch")
    flat = []
    for i in range(n):
        for m in ms:
            flat.extend(m.row(i))
    return Matrix(n, sum(m.cols for m in ms), tuple(flat))


def vstack(*ms: Matrix, cols: int | None = None) -> Matrix:
    if not ms:
        return Matrix.zeros(0, cols or 0)
    c = ms[0].cols
    if any(m.cols != c for m in ms):
        raise ValueError("vstack column mismatch")
    return Matrix(sum(m.rows for m in ms), c, tuple(x for m in ms for x in m.entries))


def block_diag(*ms: Matrix) -> Matrix:
    r = sum(m.rows for m in ms)
    c = sum(m.cols for m in ms)
    flat = [ZERO] * (r * c)
    i0 = j0 = 0
    for m in ms:
        for i in range(m.rows):
            for j in range(m.cols):
                flat[(i0 + i) * c + j0 + j] = m[i, j]
        i0 += m.rows
        j0 += m.cols
    return Matrix(r, c, tuple(flat))


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product; basis vector e_i (x) f_j sits at index i * dim_b + j."""
    r, c = a.rows * b.rows, a.cols * b.cols
    flat = [ZERO] * (r * c)
    for i in range(a.rows):
        for j in range(a.cols):
            x = a[i, j]
            if not x:
                continue
            for k in range(b.rows):
                for l in range(b.cols):
                    y = b[k, l]
                    if y:
                        flat[(i * b.rows + k) * c + j * b.cols + l] = x * y
    return Matrix(r, c, tuple(flat))


def kron_vec(x: Sequence, y: Sequence) -> tuple:
    return tuple(a * b for a in x for b in y)


# elimination

def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Row reduce in place; returns the nonzero rows and pivot columns."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pr = rows[r]
        inv = 1 / pr[c]
        if inv != 1:
            for j in range(c, ncols):
                if pr[j]:
                    pr[j] *= inv
        nz = [j for j in range(c, ncols) if pr[j]]
        for i in range(len(rows)):
            if i != r:
                f = rows[i][c]
                if f:
                    ri = rows[i]
                    for j in nz:
                        ri[j] -= f * pr[j]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(m: Matrix) -> int:
    return len(_rref(m.to_rows(), m.cols)[1])


def reduced_echelon(m: Matrix) -> Matrix:
    """Reduced column echelon form: a basis of the column span, one column per rank."""
    rows, _ = _rref(m.T.to_rows(), m.rows)
    return Matrix.from_columns(rows, m.rows)


def solve(a: Matrix, b: Matrix) -> Matrix | None:
    """Some X with a @ X = b, or None when no solution exists."""
    if a.rows != b.rows:
        raise ValueError("solve shape mismatch")
    aug = [list(a.row(i)) + list(b.row(i)) for i in range(a.rows)]
    rows, pivots = _rref(aug, a.cols + b.cols)
    if any(p >= a.cols for p in pivots):
        return None
    x = [[ZERO] * b.cols for _ in range(a.cols)]
    for r, p in zip(rows, pivots):
        x[p] = r[a.cols:]
    return Matrix.from_rows(x, b.cols)


def inverse(m: Matrix) -> Matrix:
    if not m.is_square:
        raise ValueError("inverse of a non-square matrix")
    x = solve(m, Matrix.identity(m.rows))
    if x is None or rank(m) != m.rows:
        raise ValueError("matrix is singular")
    return x


def nilpotency_index(m: Matrix) -> int:
    """Smallest l >= 0 with m^l = 0."""
    if not m.is_square:
        raise ValueError("nilpotency index of a non-square matrix")
    n = m.rows
    p = Matrix.identity(n)
    for l in range(n + 1):
        if p.is_zero():
            return l
        p = p @ m
    raise NotNilpotent(f"matrix is not nilpotent: {m!r}")


def is_nilpotent(m: Matrix) -> bool:
    try:
        nilpotency_index(m)
    except NotNilpotent:
        return False
    return True


# subspaces

@dataclass(frozen=True)
class Subspace:
    ambient_dim: int
    basis: Matrix

    @classmethod
    def span(cls, vectors: Iterable[Sequence], n: int) -> "Subspace":
        vectors = [list(v) for v in vectors]
        rows, _ = _rref([[frac(x) for x in v] for v in vectors], n)
        return cls(n, Matrix.from_columns(rows, n))

    @classmethod
    def column_span(cls, m: Matrix) -> "Subspace":
        return cls(m.rows, reduced_echelon(m))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, Matrix.zeros(n, 0))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, Matrix.identity(n))

    @classmethod
    def coordinate(cls, n: int, indices: Iterable[int]) -> "Subspace":
        idx = sorted(set(indices))
        flat = [ZERO] * (n * len(idx))
        for j, i in enumerate(idx):
            flat[i * len(idx) + j] = ONE
        return cls(n, Matrix(n, len(idx), tuple(flat)))

    @property
    def dim(self) -> int:
        return self.basis.cols

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def vectors(self) -> list[tuple]:
        return self.basis.columns()

    @cached_property
    def pivots(self) -> tuple:
        out = []
        for v in self.vectors():
            out.append(next(i for i, x in enumerate(v) if x))
        return tuple(out)

    def coords(self, v: Sequence) -> tuple | None:
        """Coordinates of v in this basis, or None if v is not in the subspace."""
        if len(v) != self.ambient_dim:
            raise AmbientMismatch(f"vector of length {len(v)} in Q^{self.ambient_dim}")
        c = tuple(frac(v[p]) for p in self.pivots)
        # reduce v by the echelon basis; it lies in the span iff nothing is left
        rest = [frac(x) for x in v]
        for j, cj in enumerate(c):
            if cj:
                for i, b in self._columns[j]:
                    rest[i] -= cj * b
        return None if any(rest) else c

    @cached_property
    def _columns(self) -> list:
        return [[(i, x) for i, x in enumerate(col) if x] for col in self.vectors()]

    def contains_vector(self, v: Sequence) -> bool:
        return self.coords(v) is not None

    def quotient_map(self) -> Matrix:
        """Coordinates on Q^n / self, in the basis of images of e_i, i not a pivot."""
        piv = self.pivots
        rest = [i for i in range(self.ambient_dim) if i not in set(piv)]
        n = self.ambient_dim
        rows = []
        for i in rest:
            row = [ZERO] * n
            row[i] = ONE
            for j, p in enumerate(piv):
                x = self.basis[i, j]
                if x:
                    row[p] -= x
            rows.append(row)
        return Matrix.from_rows(rows, n)

    def complement_indices(self) -> list[int]:
        piv = set(self.pivots)
        return [i for i in range(self.ambient_dim) if i not in piv]

    def __repr__(self):
        return f"Subspace(dim {self.dim} in Q^{self.ambient_dim}: {[list(map(str, v)) for v in self.vectors()]})"


def kernel(m: Matrix) -> Subspace:
    rows, pivots = _rref(m.to_rows(), m.cols)
    free = [j for j in range(m.cols) if j not in set(pivots)]
    vecs = []
    for f in free:
        v = [ZERO] * m.cols
        v[f] = ONE
        for r, p in zip(rows, pivots):
            v[p] = -r[f]
        vecs.append(v)
    return Subspace.span(vecs, m.cols)


def image(m: Matrix) -> Subspace:
    return Subspace.column_span(m)


def kernel_image(m: Matrix) -> tuple[Subspace, Subspace]:
    return kernel(m), image(m)


def _same_ambient(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise AmbientMismatch(f"ambient dimensions {a.ambient_dim} and {b.ambient_dim}")


def subspace_sum(*subs: Subspace, n: int | None = None) -> Subspace:
    if not subs:
        return Subspace.zero(n or 0)
    for s in subs[1:]:
        _same_ambient(subs[0], s)
    return Subspace.span([v for s in subs for v in s.vectors()], subs[0].ambient_dim)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _same_ambient(a, b)
    if a.is_zero or b.is_zero:
        return Subspace.zero(a.ambient_dim)
    if a.is_full:
        return b
    if b.is_full:
        return a
    k = kernel(hstack(a.basis, -b.basis))
    ya = k.basis.submatrix(range(a.dim), range(k.dim))
    return Subspace.column_span(a.basis @ ya)


def contains(a: Subspace, b: Subspace) -> bool:
    """True when b is a subspace of a."""
    _same_ambient(a, b)
    if b.dim > a.dim:
        return False
    return all(a.contains_vector(v) for v in b.vectors())


def lattice(a: Subspace, b: Subspace, op: str):
    if op == "sum":
        return subspace_sum(a, b)
    if op == "intersect":
        return intersect(a, b)
    if op == "contains":
        return contains(a, b)
    raise ValueError(f"unknown lattice op {op!r}")


def image_of(f: Matrix, s: Subspace) -> Subspace:
    if f.cols != s.ambient_dim:
        raise AmbientMismatch("map source does not match subspace ambient")
    return Subspace.column_span(f @ s.basis)


def preimage(f: Matrix, s: Subspace) -> Subspace:
    if f.rows != s.ambient_dim:
        raise AmbientMismatch("map target does not match subspace ambient")
    return kernel(s.quotient_map() @ f)


def maps_into(f: Matrix, src: Subspace, tgt: Subspace) -> bool:
    return contains(tgt, image_of(f, src))


def induce(f: Matrix, src_sub: Subspace, tgt_sub: Subspace, mode: str) -> Matrix:
    """Matrix of f restricted to src_sub -> tgt_sub, or of the map on quotients."""
    if f.cols != src_sub.ambient_dim or f.rows != tgt_sub.ambient_dim:
        raise AmbientMismatch("map shape does not match subspaces")
    images = (f @ src_sub.basis).columns()
    coords = [tgt_sub.coords(v) for v in images]
    if any(c is None for c in coords):
        raise NotPreserved("image of the source subspace leaves the target subspace")
    if mode == "restrict":
        return Matrix.from_columns(coords, tgt_sub.dim)
    if mode == "descend":
        lift = Subspace.coordinate(src_sub.ambient_dim, src_sub.complement_indices()).basis
        return tgt_sub.quotient_map() @ f @ lift
    raise ValueError(f"unknown induce mode {mode!r}")


@dataclass(frozen=True)
class Subquotient:
    """top / bottom for subspaces bottom <= top of Q^n."""
    top: Subspace
    bottom: Subspace

    def __post_init__(self):
        _same_ambient(self.top, self.bottom)
        if not contains(self.top, self.bottom):
            raise NotPreserved("bottom is not contained in top")

    @property
    def dim(self) -> int:
        return self.top.dim - self.bottom.dim

    def _bottom_in_top(self) -> Subspace:
        return Subspace.span([self.top.coords(v) for v in self.bottom.vectors()], self.top.dim)

    def coords(self, v: Sequence) -> tuple:
        c = self.top.coords(v)
        if c is None:
            raise NotPreserved("vector is not in the top space")
        return self._bottom_in_top().quotient_map().apply(c)

    def lifts(self) -> list[tuple]:
        inner = self._bottom_in_top()
        return [self.top.basis.apply(e) for e in
                Subspace.coordinate(self.top.dim, inner.complement_indices()).vectors()]


def induced_on_subquotients(f: Matrix, a: Subquotient, b: Subquotient) -> Matrix:
    if not (maps_into(f, a.top, b.top) and maps_into(f, a.bottom, b.bottom)):
        raise NotPreserved("map does not respect the subquotients")
    cols = [b.coords(f.apply(v)) for v in a.lifts()]
    return Matrix.from_columns(cols, b.dim)


# chain bases of nilpotent operators

def chain_basis(z: Matrix, blocks: Sequence[Sequence[int]] | None = None) -> list[list[tuple]]:
    """Jordan chains [x, zx, ..., z^{k-1}x] forming a basis.

    With `blocks` (a partition of the coordinates such that z sends each
    block into one block) every chain vector lies in a single block.
    """
    n = z.rows
    if blocks is None:
        blocks = [list(range(n))]
    idx = nilpotency_index(z)
    coord = [Subspace.coordinate(n, b) for b in blocks]
    ker = [Subspace.zero(n)]
    p = Matrix.identity(n)
    for _ in range(idx):
        p = p @ z
        ker.append(kernel(p))
    chains = []
    for k in range(idx, 0, -1):
        upper = ker[k + 1] if k + 1 <= idx else ker[idx]
        q = subspace_sum(ker[k - 1], image_of(z, upper))
        for c in coord:
            kb = intersect(ker[k], c)
            span = intersect(q, c)
            for v in kb.vectors():
                if span.contains_vector(v):
                    continue
                span = subspace_sum(span, Subspace.span([v], n))
                chain = [v]
                for _ in range(k - 1):
                    chain.append(z.apply(chain[-1]))
                chains.append(chain)
    return chains


def sign_twist_witness(z: Matrix, blocks: Sequence[Sequence[int]], eps: Sequence[int]) -> Matrix:
    """Invertible S with S z = z' S, where z' negates z on the blocks with eps = -1.

    S is diagonal in a block-homogeneous chain basis with entries +-1.
    """
    n = z.rows
    where = {}
    for b, idx in enumerate(blocks):
        for i in idx:
            where[i] = b
    chains = chain_basis(z, blocks)
    cols, signs = [], []
    for chain in chains:
        s = 1
        for v in chain:
            cols.append(v)
            signs.append(s)
            b = where[next(i for i, x in enumerate(v) if x)]
            s *= eps[b]
    p = Matrix.from_columns(cols, n)
    return p @ Matrix.diag(signs) @ inverse(p)


def twist_blocks(z: Matrix, blocks: Sequence[Sequence[int]], eps: Sequence[int]) -> Matrix:
    """z with its columns in block b multiplied by eps[b]."""
    scale = [1] * z.cols
    for b, idx in enumerate(blocks):
        for i in idx:
            scale[i] = eps[b]
    return z @ Matrix.diag(scale)
