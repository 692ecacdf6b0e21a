import numpy as np
import pytest
from numpy.testing import assert_allclose

from whichslit.config import config
from whichslit.exceptions import DegenerateScreenError, DimensionError, InputError
from whichslit.services.screen import ScreenModel, build_screen


def test_four_dimensional_fourier_cross_terms():
    screen = build_screen(4)
    assert screen.n_bins == 4
    assert_allclose(screen.cross_terms(), [0.25, -0.25, 0.25, -0.25], atol=1e-15)


def test_two_dimensional_fourier_cross_terms():
    assert_allclose(build_screen(2).cross_terms(), [0.5, -0.5], atol=1e-15)


@pytest.mark.parametrize("dim1", [2, 4, 6, 8])
def test_bin_projectors_resolve_identity(dim1):
    screen = build_screen(dim1)
    total = sum(screen.projectors())
    assert_allclose(total, np.eye(dim1), atol=1e-14)
    for J in screen.projectors():
        assert_allclose(J @ J, J, atol=1e-14)


def test_wider_bins_merge_projectors():
    screen = build_screen(6, n_bins=2)
    assert screen.bins == ((0, 1, 2), (3, 4, 5))
    assert_allclose(screen.cross_terms(), [1 / 6, -1 / 6], atol=1e-15)
    fine = build_screen(6)
    assert_allclose(screen.J(1), fine.J(3) + fine.J(4) + fine.J(5), atol=1e-14)


def test_even_width_bins_cancel_the_cross_term():
    with pytest.raises(DegenerateScreenError):
        build_screen(8, n_bins=4)


def test_lifted_projector_is_cached():
    screen = build_screen(4)
    first = screen.F(0, 3)
    assert first.shape == (12, 12)
    assert screen.F(0, 3) is first
    assert build_screen(4).F(0, 3) is first
    assert_allclose(first, np.kron(screen.J(0), np.eye(3)), atol=1e-15)


def test_screen_projectors_are_read_only():
    screen = build_screen(4)
    for matrix in (screen.J(1), screen.F(1, 2), screen.propagator):
        assert not matrix.flags.writeable
        with pytest.raises(ValueError):
            matrix[0, 0] = 0.0
    assert "_bin_projectors" not in repr(screen)


def test_identity_propagator_shows_no_cross_term():
    with pytest.raises(DegenerateScreenError):
        build_screen(4, kind="identity")


def test_single_bin_is_degenerate():
    with pytest.raises(DegenerateScreenError):
        build_screen(2, n_bins=1)


def test_threshold_comes_from_config():
    config.config["services"]["screen"]["cross_term_threshold"] = 0.3
    with pytest.raises(DegenerateScreenError):
        build_screen(4)
    assert build_screen(2).n_bins == 2


@pytest.mark.parametrize("dim1", [0, 3, 5])
def test_odd_dimension_is_rejected(dim1):
    with pytest.raises(DimensionError):
        build_screen(dim1)


def test_bins_must_divide_dimension():
    with pytest.raises(InputError):
        build_screen(6, n_bins=4)


def test_unknown_kind():
    with pytest.raises(InputError):
        build_screen(4, kind="fresnel")


def test_model_validation():
    with pytest.raises(InputError):
        ScreenModel(dim1=2, propagator=np.array([[1.0, 1.0], [0.0, 1.0]]), bins=((0,), (1,)))
    with pytest.raises(InputError):
        ScreenModel(dim1=2, propagator=np.eye(2), bins=((0,),))
    with pytest.raises(DimensionError):
        ScreenModel(dim1=3, propagator=np.eye(2), bins=((0,), (1,), (2,)))
