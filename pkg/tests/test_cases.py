"""Tests of the case labels."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whichslit.analysis.cases import classify_case
from whichslit.analysis.families import mirror_instance, related_pair_state, three_state
from whichslit.exceptions import IncompatibleStateError, PreconditionError
from whichslit.operators.layout import CavityDecomposition, assemble_state, h2_vector

nonzero_complex = st.complex_numbers(min_magnitude=0.1, max_magnitude=10.0, allow_nan=False, allow_infinity=False)


def test_symmetric_state_is_case_b(sym_instance):
    label = classify_case(sym_instance.psi)
    assert label.label == "b"
    assert label.mu == pytest.approx(1.0)
    assert label.lam == pytest.approx(1.0)


def test_mirrored_state_is_case_c(sym_instance):
    assert classify_case(mirror_instance(sym_instance).psi).label == "c"


def test_three_state_pattern_is_case_d(quarter_instance):
    label = classify_case(quarter_instance.psi)
    assert label.label == "d"
    assert label.to_dict()["mu"] == [1.0, 0.0]


def test_two_state_case_d():
    d = CavityDecomposition(1, 1, 1, 1)
    x = [h2_vector(d, a=1.0, b=1.0)] * 2
    y = [h2_vector(d, c=1.0, d=1.0)] * 2
    assert classify_case(assemble_state(x, y, d)).label == "d"


def test_independent_pairs_are_case_a():
    d = CavityDecomposition(1, 2, 1, 2)
    x = [h2_vector(d, b=[1.0, 0.0]), h2_vector(d, b=[0.0, 1.0]), h2_vector(d, a=1.0)]
    y = [h2_vector(d, d=[1.0, 0.0]), h2_vector(d, d=[0.0, 1.0]), h2_vector(d, c=1.0)]
    label = classify_case(assemble_state(x, y, d))
    assert label.label == "a"
    assert label.mu == "independent"
    assert label.lam == "independent"


def test_mixed_independence_in_three_states():
    d = CavityDecomposition(1, 2, 1, 2)
    x = [h2_vector(d, b=[1.0, 0.0]), h2_vector(d, b=[2.0, 0.0]), h2_vector(d, a=1.0)]
    y = [h2_vector(d, d=[1.0, 0.0]), h2_vector(d, d=[0.0, 1.0]), h2_vector(d, c=1.0)]
    assert classify_case(assemble_state(x, y, d)).label == "b"


@settings(deadline=None, max_examples=40)
@given(nonzero_complex, nonzero_complex, nonzero_complex, nonzero_complex)
def test_labels_ignore_rescaling(b1, delta1, a3, gamma3):
    assert classify_case(three_state(b1=b1, a3=a3, delta1=delta1, gamma3=gamma3)).label == "d"
    assert classify_case(related_pair_state(delta1, b1, a3, gamma3)).label == "b"


def test_preconditions():
    d = CavityDecomposition(1, 1, 1, 1)
    single = assemble_state([h2_vector(d, a=1.0)], [h2_vector(d, d=1.0)], d)
    with pytest.raises(PreconditionError):
        classify_case(single)
    broken = assemble_state([h2_vector(d, c=1.0)] * 2, [h2_vector(d, d=1.0)] * 2, d)
    with pytest.raises(IncompatibleStateError):
        classify_case(broken)
