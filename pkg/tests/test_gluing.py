from fractions import Fraction

import pytest
from hypothesis import given

from conftest import gluing_data
from monodromic.blocks import NilpBlock
from monodromic.errors import InvalidGluing, InvalidMMHM
from monodromic.filtration import IncreasingFiltration
from monodromic.gluing import (
    GluingDatum, GluingMorphism, PsiPiece, direct_sum_gluing, functor_F, functor_G, gluing_mismatch,
    gluing_morphism_violations, morphism_roundtrip, roundtrip_check, tate_twist_gluing, validate_datum,
    validate_gluing,
)
from monodromic.linalg import Matrix
from monodromic.mhm import MHSModel, MonodromicMHM

half, third = Fraction(-1, 2), Fraction(-1, 3)
ONE = MHSModel.make(IncreasingFiltration.trivial(1), IncreasingFiltration.trivial(1))
zero1 = Matrix.zeros(1, 1)


def structure_sheaf():
    return GluingDatum({0: PsiPiece(ONE, zero1)}, MHSModel.zero(), Matrix.zeros(0, 1), Matrix.zeros(1, 0))


def delta():
    return GluingDatum({}, ONE)


def open_extension():
    return GluingDatum({0: PsiPiece(ONE, zero1)}, ONE, Matrix.identity(1), zero1)


def test_jordan_at_zero_needs_vanishing_data():
    g = GluingDatum({0: NilpBlock(2).piece}, MHSModel.zero(), Matrix.zeros(0, 2), Matrix.zeros(2, 0))
    assert "v·c ≠ −N_0" in validate_gluing(g)


def test_jordan_off_zero_is_valid():
    assert validate_gluing(GluingDatum({half: NilpBlock(2).piece})) == []


def test_zero_datum_is_valid():
    assert validate_gluing(GluingDatum.zero()) == []


def test_shape_errors():
    g = GluingDatum({0: PsiPiece(ONE, zero1)}, ONE, Matrix.zeros(2, 1), zero1)
    assert any(p.startswith("c has shape") for p in validate_gluing(g))


def test_v_must_respect_its_shift():
    # v has F-shift +1, W-shift -2; identity with no twist on phi breaks W
    g = GluingDatum({0: PsiPiece(ONE, zero1)}, ONE, zero1, Matrix.identity(1))
    assert validate_gluing(g)
    fixed = GluingDatum({0: PsiPiece(ONE, zero1)}, ONE.twisted(-1), zero1, Matrix.identity(1))
    assert validate_gluing(fixed) == []


def test_alpha_outside_range():
    g = GluingDatum({Fraction(1, 2): PsiPiece(ONE, zero1)})
    assert any("outside (-1, 0]" in p for p in validate_gluing(g))


def test_structure_sheaf():
    m = functor_G(structure_sheaf())
    assert m.core.alphas == [0] and m.core.dim(0) == 1
    assert m.pair(0).F.indices == [0] and m.pair(0).W.indices == [1]


def test_delta_module_moves_f_up_by_one():
    m = functor_G(delta())
    assert m.core.alphas == [-1]
    assert m.pair(-1).F.indices == [1] and m.pair(-1).W.indices == [0]


def test_open_extension_cycles():
    m = functor_G(open_extension())
    assert m.core.u == -Matrix.identity(1) and m.core.w.is_zero()
    back = functor_F(m)
    assert back.c == Matrix.identity(1) and back.v.is_zero()


@pytest.mark.parametrize("g", [structure_sheaf(), delta(), open_extension(), GluingDatum.zero()])
def test_examples_round_trip_exactly(g):
    assert gluing_mismatch(functor_F(functor_G(g)), g) is None
    assert roundtrip_check(g)


def test_structure_sheaf_and_delta_from_modules():
    s = functor_F(functor_G(structure_sheaf()))
    assert s.psi_dim(0) == 1 and s.phi.dim == 0
    d = functor_F(functor_G(delta()))
    assert d.psi == {} and d.phi.dim == 1


def test_jordan_at_minus_one_third():
    g = GluingDatum({third: NilpBlock(3).piece})
    r = roundtrip_check(g)
    assert r and all(w == Matrix.identity(3) for w in r.witness.values())


def test_invalid_inputs_are_refused():
    bad = GluingDatum({0: NilpBlock(2).piece}, MHSModel.zero(), Matrix.zeros(0, 2), Matrix.zeros(2, 0))
    with pytest.raises(InvalidGluing):
        functor_G(bad)
    assert not roundtrip_check(bad)
    with pytest.raises(InvalidMMHM):
        functor_F(MonodromicMHM(functor_G(structure_sheaf()).core, {}, {}))


def test_roundtrip_on_a_module():
    m = functor_G(GluingDatum({half: NilpBlock(2).piece}))
    assert roundtrip_check(m)


@given(gluing_data(max_dim=5))
def test_round_trip_on_random_data(g):
    assert validate_gluing(g) == []
    assert gluing_mismatch(functor_F(functor_G(g)), g) is None
    assert roundtrip_check(g)
    assert roundtrip_check(functor_G(g))


def test_psi_only_marker():
    g = GluingDatum({0: NilpBlock(2).piece})
    assert g.psi_only
    # no vanishing data at all: only the nearby-side conditions apply
    assert validate_datum(g) == []
    assert validate_gluing(g)
    assert tate_twist_gluing(g, 2).psi_only
    assert not structure_sheaf().psi_only


def test_twist_of_gluing():
    g = open_extension()
    assert tate_twist_gluing(tate_twist_gluing(g, 3), -3) == g
    assert validate_gluing(tate_twist_gluing(g, 2)) == []


def test_direct_sum_is_valid():
    g = direct_sum_gluing(structure_sheaf(), delta(), GluingDatum({half: NilpBlock(2).piece}))
    assert validate_gluing(g) == [] and g.total_dim == 4


def identity_morphism(g):
    return GluingMorphism(g, g, {a: Matrix.identity(p.dim) for a, p in g.psi.items()}, Matrix.identity(g.phi.dim))


@given(gluing_data(max_dim=4))
def test_identity_morphism_round_trip(g):
    f = identity_morphism(g)
    assert gluing_morphism_violations(f) == []
    assert morphism_roundtrip(f) == []


def test_scalar_morphism_round_trip():
    g = open_extension()
    f = GluingMorphism(g, g, {0: Matrix.diag([3])}, Matrix.diag([3]))
    assert gluing_morphism_violations(f) == [] and morphism_roundtrip(f) == []


def test_non_commuting_morphism():
    g = open_extension()
    f = GluingMorphism(g, g, {0: Matrix.diag([1])}, Matrix.diag([2]))
    assert "does not commute with c" in gluing_morphism_violations(f)


def test_map_into_the_open_extension():
    # delta -> open extension: identity on phi, nothing on psi
    f = GluingMorphism(delta(), open_extension(), {}, Matrix.identity(1))
    assert gluing_morphism_violations(f) == [] and morphism_roundtrip(f) == []
    # the other way round c does not commute
    back = GluingMorphism(open_extension(), delta(), {}, Matrix.identity(1))
    assert "does not commute with c" in gluing_morphism_violations(back)


def _block_rows(n, m, first):
    """[I 0] (first) or [0 I] onto one summand of Q^n + Q^m."""
    k = n if first else m
    off = 0 if first else n
    return Matrix.from_rows([[int(j == i + off) for j in range(n + m)] for i in range(k)], n + m)


@given(gluing_data(max_dim=3), gluing_data(max_dim=3))
def test_projections_and_inclusions_of_sums(g, h):
    s = direct_sum_gluing(g, h)
    for first, part in ((True, g), (False, h)):
        proj = {a: _block_rows(g.psi_dim(a), h.psi_dim(a), first) for a in s.psi}
        pphi = _block_rows(g.phi.dim, h.phi.dim, first)
        f = GluingMorphism(s, part, proj, pphi)
        assert gluing_morphism_violations(f) == [] and morphism_roundtrip(f) == []
        inc = GluingMorphism(part, s, {a: m.T for a, m in proj.items()}, pphi.T)
        assert gluing_morphism_violations(inc) == [] and morphism_roundtrip(inc) == []
