from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import matrices, square_matrices
from monodromic.errors import AmbientMismatch, NotNilpotent, NotPreserved
from monodromic.linalg import (
    Matrix, Subspace, contains, image, induce, intersect, inverse, kernel, kernel_image, kron, lattice,
    nilpotency_index, preimage, rank, reduced_echelon, solve, subspace_sum,
)

e1, e2 = [1, 0], [0, 1]
J2 = Matrix.jordan(2)


def to_sympy(m: Matrix) -> sympy.Matrix:
    return sympy.Matrix(m.rows, m.cols, [sympy.Rational(x.numerator, x.denominator) for x in m.entries])


def from_sympy(m) -> Matrix:
    return Matrix.from_rows([[Fraction(int(x.p), int(x.q)) for x in m.row(i)] for i in range(m.rows)], m.cols)


# worked examples

def test_echelon_identity_is_fixed():
    assert reduced_echelon(Matrix.identity(3)) == Matrix.identity(3)


def test_echelon_rank_one():
    m = Matrix.from_rows([[2, 4], [1, 2]])
    assert reduced_echelon(m) == Matrix.from_rows([[1], [Fraction(1, 2)]])


def test_echelon_of_zero_has_no_columns():
    assert reduced_echelon(Matrix.zeros(3, 2)).shape == (3, 0)


def test_kernel_image_of_zero_map():
    k, i = kernel_image(Matrix.zeros(3, 3))
    assert k.is_full and i.is_zero


def test_kernel_image_of_jordan_block():
    k, i = kernel_image(J2)
    assert k == Subspace.span([e1], 2) == i


def test_kernel_image_of_invertible():
    k, i = kernel_image(Matrix.from_rows([[1, 2], [3, 4]]))
    assert k.is_zero and i.is_full


def test_lattice_examples():
    a, b = Subspace.span([e1], 2), Subspace.span([e2], 2)
    assert lattice(a, b, "sum").is_full
    assert lattice(Subspace.span([[1, 1]], 2), a, "intersect").is_zero
    assert lattice(Subspace.full(2), Subspace.span([[3, -1]], 2), "contains")
    with pytest.raises(ValueError):
        lattice(a, b, "meet")


def test_induce_examples():
    s = Subspace.span([[1, 1, 0]], 3)
    assert induce(Matrix.identity(3), s, s, "restrict") == Matrix.identity(1)
    first = Subspace.span([e1], 2)
    assert induce(J2, first, first, "descend") == Matrix.zeros(1, 1)
    second = Subspace.span([e2], 2)
    with pytest.raises(NotPreserved):
        induce(J2, second, second, "restrict")


def test_nilpotency_index_examples():
    assert nilpotency_index(Matrix.zeros(3, 3)) == 1
    assert nilpotency_index(Matrix.jordan(3)) == 3
    with pytest.raises(NotNilpotent):
        nilpotency_index(Matrix.identity(2))


def test_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        intersect(Subspace.full(2), Subspace.full(3))


def test_floats_are_refused():
    with pytest.raises(TypeError):
        Matrix.from_rows([[0.5]])


# sympy is the oracle for the properties below

@given(matrices())
def test_rank_matches_sympy(m):
    assert rank(m) == to_sympy(m).rank()


@given(matrices())
def test_column_span_is_sympy_rref_of_transpose(m):
    rref, piv = to_sympy(m.T).rref()
    expected = from_sympy(rref[: len(piv), :]).T if piv else Matrix.zeros(m.rows, 0)
    assert image(m).basis == expected


@given(matrices())
def test_kernel_dimension_and_vectors(m):
    k = kernel(m)
    assert k.dim == m.cols - to_sympy(m).rank()
    assert (m @ k.basis).is_zero()


@given(square_matrices())
def test_inverse_matches_sympy(m):
    s = to_sympy(m)
    if m.rows and s.det() != 0:
        assert inverse(m) == from_sympy(s.inv())
        assert m @ inverse(m) == Matrix.identity(m.rows)


@given(matrices(rows=3), matrices(rows=3, cols=2))
def test_solve_solutions_solve(a, b):
    x = solve(a, b)
    consistent = to_sympy(a).rank() == to_sympy(a).row_join(to_sympy(b)).rank()
    assert (x is not None) == consistent
    if x is not None:
        assert a @ x == b


@given(matrices(rows=3), matrices(rows=3))
def test_modular_law_dimensions(a, b):
    sa, sb = image(a), image(b)
    assert subspace_sum(sa, sb).dim + intersect(sa, sb).dim == sa.dim + sb.dim
    assert contains(subspace_sum(sa, sb), sa) and contains(sa, intersect(sa, sb))


@given(matrices(rows=3, cols=3), matrices(rows=3))
def test_preimage(f, b):
    s = image(b)
    p = preimage(f, s)
    assert contains(s, image(f @ p.basis))
    assert p.dim == kernel(f).dim + intersect(s, image(f)).dim


@given(st.integers(1, 3), st.integers(1, 3))
def test_kron_of_identities(a, b):
    assert kron(Matrix.identity(a), Matrix.identity(b)) == Matrix.identity(a * b)


@given(matrices(max_dim=3), matrices(max_dim=3))
def test_kron_matches_sympy(a, b):
    from sympy.physics.quantum import TensorProduct
    if a.rows and a.cols and b.rows and b.cols:
        assert kron(a, b) == from_sympy(TensorProduct(to_sympy(a), to_sympy(b)))


@given(matrices(rows=4))
def test_equal_subspaces_have_identical_bases(m):
    # the echelon basis is canonical, so a change of spanning set changes nothing
    s = image(m)
    doubled = Subspace.span([[2 * x for x in v] for v in s.vectors()] + list(s.vectors()), 4)
    assert doubled == s
