from fractions import Fraction

import pytest
from hypothesis import given

from conftest import cores, gluing_data
from monodromic.blocks import NilpBlock
from monodromic.dmod import CoreData, WindowModule, expand, sign_isomorphism, window_violations
from monodromic.errors import WindowTooSmall
from monodromic.filtration import IncreasingFiltration
from monodromic.fourier import (
    double_fourier_check, fourier, fourier_agreement, fourier_core, fourier_gluing, fourier_window,
    fourier_window_oracle, hodge_shift_violations, sign_twisted,
)
from monodromic.gluing import GluingDatum, PsiPiece, functor_G, validate_gluing
from monodromic.linalg import Matrix
from monodromic.mhm import MHSModel, MonodromicMHM, validate_mmhm

half = Fraction(-1, 2)
ONE = MHSModel.make(IncreasingFiltration.trivial(1), IncreasingFiltration.trivial(1))
zero1 = Matrix.zeros(1, 1)


def line():
    return functor_G(GluingDatum({half: PsiPiece(ONE, zero1)}))


def structure_sheaf():
    return functor_G(GluingDatum({0: PsiPiece(ONE, zero1)}))


def delta():
    return functor_G(GluingDatum({}, ONE))


def test_self_paired_line_is_fixed():
    fm = fourier(line())
    assert fm.core.alphas == [half]
    assert fm.pair(half).F.indices == [0]


def test_structure_sheaf_goes_to_delta():
    m = structure_sheaf()
    fm = fourier(m)
    assert fm.core.alphas == [-1]
    # F_p (FM)^-1 = F_p M^0: jump at 0
    assert fm.pair(-1).F.indices == m.pair(0).F.indices == [0]


def test_delta_goes_to_structure_sheaf():
    m = delta()
    fm = fourier(m)
    assert fm.core.alphas == [0]
    # F_p (FM)^0 = F_{p+1} M^-1
    assert fm.pair(0).F == m.pair(-1).F.shifted(-1)


def test_gluing_level_swap():
    g = GluingDatum({0: NilpBlock(2).piece}, NilpBlock(2).mhs.twisted(-1), -NilpBlock(2).N, Matrix.identity(2))
    f = fourier_gluing(g)
    assert validate_gluing(f) == []
    assert f.c == -g.v and f.v == g.c
    assert f.N(0) == g.c @ g.v


def test_window_regrading_of_the_line():
    core = line().core
    win = expand(core, 1)
    fw = fourier_window(win)
    assert fw.graded == win.graded
    assert not window_violations(fw)


def test_window_of_structure_sheaf_moves_below_minus_one():
    fw = fourier_window(expand(structure_sheaf().core, 1))
    assert {b: n for b, n in fw.graded.items() if n} == {-2: 1, -1: 1}


def test_window_must_be_symmetric():
    win = expand(line().core, 1)
    lopsided = WindowModule((win.window[0], win.window[1] + 1), win.graded, win.t_maps, win.d_maps, win.euler)
    with pytest.raises(WindowTooSmall):
        fourier_window(lopsided)
    with pytest.raises(WindowTooSmall):
        fourier_window_oracle(line().core, 0)


def test_double_window_transform_negates_t():
    core = CoreData({0: zero1, -1: zero1}, -Matrix.identity(1), zero1)
    win = expand(core, 2)
    back = fourier_window(fourier_window(win))
    assert back.graded == win.graded
    for b, t in win.t_maps.items():
        assert back.t_maps[b] == -t
    assert back.d_maps == {b: -d for b, d in win.d_maps.items()}


@pytest.mark.parametrize("m", [delta(), line(), MonodromicMHM.zero(), structure_sheaf()])
def test_double_transform_examples(m):
    rep = double_fourier_check(m)
    assert rep.core_matches


def test_core_transform_of_the_open_extension():
    core = CoreData({0: zero1, -1: zero1}, -Matrix.identity(1), zero1)
    f = fourier_core(core)
    assert f.u == zero1 and f.w == Matrix.identity(1)
    assert fourier_agreement(core) is not None


def test_other_normalization_is_not_implemented():
    with pytest.raises(NotImplementedError):
        fourier(line(), "nearby-twist")


@given(gluing_data(max_dim=5))
def test_transform_of_random_modules(g):
    m = functor_G(g)
    fm = fourier(m)
    assert validate_mmhm(fm) == []
    assert hodge_shift_violations(m, fm) == []
    for a in fm.core.alphas:
        assert fm.core.dim(a) == m.core.dim(-a - 1)
    assert fm.core == fourier_core(m.core)
    assert fourier_agreement(m.core) is not None
    rep = double_fourier_check(m)
    assert rep.core_matches and fourier(fourier(m)).core == sign_twisted(m.core)


@given(cores())
def test_window_oracle_on_random_cores(core):
    assert sign_isomorphism(fourier_window_oracle(core), fourier_core(core)) is not None
