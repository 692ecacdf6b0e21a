"""Tests of the block layout, state assembly and lifted operators."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from whichslit.exceptions import DimensionError, IncompatibleStateError, InputError, ZeroStateError
from whichslit.operators.algebra import commutator, frobenius, is_projector
from whichslit.operators.layout import (
    BlockState,
    CavityDecomposition,
    SlitLayout,
    assemble_state,
    compatibility_report,
    expected_images,
    h2_vector,
    permute_cavities,
)
from whichslit.operators.lifting import lift_operators


def test_slit_projector_and_swap():
    layout = SlitLayout(3)
    assert layout.dim1 == 6
    assert_allclose(np.diag(layout.L).real, [1, 1, 1, 0, 0, 0])
    swap = layout.slit_swap
    assert_allclose(swap @ swap, np.eye(6))
    assert_allclose(swap @ layout.L @ swap, np.eye(6) - layout.L)


def test_decomposition_blocks():
    decomp = CavityDecomposition(2, 1, 0, 3)
    assert decomp.dim2 == 6
    assert decomp.block("A") == slice(0, 2)
    assert decomp.block("C") == slice(3, 3)
    assert decomp.block("D") == slice(3, 6)
    total = sum(decomp.projector(name) for name in "ABCD")
    assert_allclose(total, np.eye(6))
    assert is_projector(decomp.S)
    assert is_projector(decomp.R)
    assert frobenius(commutator(decomp.S, decomp.R)) == 0.0


@pytest.mark.parametrize("ranks", [(0, 0, 0, 0), (-1, 1, 1, 1)])
def test_decomposition_rejects_bad_ranks(ranks):
    with pytest.raises(InputError):
        CavityDecomposition(*ranks)


def test_assemble_state_normalizes_and_exposes_blocks():
    decomp = CavityDecomposition(1, 1, 1, 1)
    psi = assemble_state([h2_vector(decomp, a=3.0)], [h2_vector(decomp, d=4.0)], decomp)
    assert_allclose(np.linalg.norm(psi.vector), 1.0)
    assert_allclose(psi.x[0], [0.6, 0, 0, 0])
    assert_allclose(psi.y[0], [0, 0, 0, 0.8])
    assert_allclose(psi.component("y", 0, "D"), [0.8])
    assert psi.dim == 8
    with pytest.raises(ValueError):
        psi.vector[0] = 1.0


def test_assemble_state_errors():
    decomp = CavityDecomposition(1, 1, 1, 1)
    with pytest.raises(DimensionError):
        assemble_state([h2_vector(decomp, a=1.0)], [], decomp)
    with pytest.raises(DimensionError):
        assemble_state([[1.0, 0.0]], [[0.0, 1.0]], decomp)
    with pytest.raises(ZeroStateError):
        assemble_state([np.zeros(4)], [np.zeros(4)], decomp)
    with pytest.raises(DimensionError):
        h2_vector(decomp, a=[1.0, 2.0])


def test_compatibility_check():
    decomp = CavityDecomposition(1, 1, 1, 1)
    bad_x = [h2_vector(decomp, a=1.0, c=1.0)]
    good_y = [h2_vector(decomp, d=1.0)]
    with pytest.raises(IncompatibleStateError):
        assemble_state(bad_x, good_y, decomp, strict=True)
    psi = assemble_state(bad_x, good_y, decomp)
    report = compatibility_report(psi)
    assert not report.holds
    assert_allclose(report.residual, 1 / np.sqrt(3))
    with pytest.raises(IncompatibleStateError):
        expected_images(psi)


def test_expected_images_match_lifted_projectors(sym_instance):
    psi = sym_instance.psi
    images = expected_images(psi)
    ops = sym_instance.operators
    assert_allclose(ops.E @ psi.vector, images.e_image, atol=1e-15)
    assert_allclose(ops.T @ psi.vector, images.e_image, atol=1e-15)
    assert_allclose(ops.G @ psi.vector, images.g_image, atol=1e-14)


def test_lifted_operators_are_projectors(quarter_instance):
    ops = quarter_instance.operators
    for op in (ops.E, ops.T, ops.Y, ops.G, ops.E_c, ops.T_c):
        assert is_projector(op)
    assert frobenius(commutator(ops.T, ops.Y)) == 0.0


def test_lift_operators_checks_shapes():
    layout = SlitLayout(2)
    decomp = CavityDecomposition(1, 1, 1, 1)
    with pytest.raises(DimensionError):
        lift_operators(layout, decomp, K=np.eye(3))
    with pytest.raises(DimensionError):
        lift_operators(layout, decomp, detector=np.eye(2))
    ops = lift_operators(layout, decomp)
    assert ops.G is None and ops.G_c is None


def test_permute_cavities_is_an_involution_for_the_mirror_order(quarter_instance):
    psi = quarter_instance.psi
    once = permute_cavities(psi, ("C", "D", "A", "B"), swap_slits=True)
    twice = permute_cavities(once, ("C", "D", "A", "B"), swap_slits=True)
    assert twice.decomp == psi.decomp
    assert_allclose(twice.vector, psi.vector)
    # slit-1 components of the image are the old slit-2 components, moved from C, D to A, B
    assert_allclose(once.x[2][:2], psi.y[2][2:])


def test_block_state_requires_normalization():
    with pytest.raises(InputError):
        BlockState(SlitLayout(1), CavityDecomposition(1, 0, 0, 0), np.array([1.0, 1.0]))
    psi = BlockState.normalized(SlitLayout(1), CavityDecomposition(1, 0, 0, 0), [1.0, 1.0])
    assert_allclose(psi.vector, [2 ** -0.5, 2 ** -0.5])
