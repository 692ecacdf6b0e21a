import numpy as np
import pytest
from numpy.testing import assert_array_equal
from scipy.stats import chisquare

from whichslit.analysis.families import INFERENCE_MAP
from whichslit.exceptions import InputError
from whichslit.services.sampler import sample_runs
from whichslit.services.screen import build_screen


@pytest.fixture
def sec6_screen():
    return build_screen(6)


def test_single_run_has_an_inferred_label(sec6, sec6_screen):
    result = sample_runs(sec6.instance, sec6_screen, 1, seed=3)
    assert result.n == 1
    assert result.counts.sum() == 1
    (label,) = result.labels()
    assert label in INFERENCE_MAP.values()
    assert result.seed == 3


def test_same_seed_same_draws(sec6, sec6_screen):
    first = sample_runs(sec6.instance, sec6_screen, 5000, seed=11)
    second = sample_runs(sec6.instance, sec6_screen, 5000, seed=11)
    assert_array_equal(first.cavity_idx, second.cavity_idx)
    assert_array_equal(first.bin_idx, second.bin_idx)
    other = sample_runs(sec6.instance, sec6_screen, 5000, seed=12)
    assert not np.array_equal(first.cavity_idx, other.cavity_idx)


def test_draws_do_not_depend_on_worker_count(sec6, sec6_screen):
    serial = sample_runs(sec6.instance, sec6_screen, 10_000, seed=5, workers=1, chunk_size=999)
    threaded = sample_runs(sec6.instance, sec6_screen, 10_000, seed=5, workers=4, chunk_size=999)
    assert_array_equal(serial.counts, threaded.counts)
    assert_array_equal(serial.bin_idx, threaded.bin_idx)


def test_zero_probability_cells_are_never_drawn(sec6, sec6_screen):
    result = sample_runs(sec6.instance, sec6_screen, 20_000, seed=1)
    empty = result.joint.probabilities <= 1e-15
    assert empty.any()
    assert result.counts[empty].sum() == 0


def test_seed_defaults_to_config(sec6, sec6_screen):
    assert sample_runs(sec6.instance, sec6_screen, 10).seed == 7


@pytest.mark.parametrize("kwargs", [{"n": 0}, {"n": -3}, {"n": 10, "workers": 0}, {"n": 10, "chunk_size": 0}])
def test_invalid_arguments(sec6, sec6_screen, kwargs):
    with pytest.raises(InputError):
        sample_runs(sec6.instance, sec6_screen, **kwargs)


@pytest.mark.slow
def test_frequencies_converge(sec6, sec6_screen):
    result = sample_runs(sec6.instance, sec6_screen, 1_000_000, seed=2024, workers=4)
    joint = result.joint
    assert np.max(np.abs(result.cavity_frequencies - joint.cavity_marginal)) < 0.005
    assert np.max(np.abs(result.screen_frequencies - joint.screen_marginal)) < 0.005


@pytest.mark.slow
def test_counts_pass_chi_square(sec6, sec6_screen):
    failures = 0
    for seed in range(20):
        result = sample_runs(sec6.instance, sec6_screen, 100_000, seed=seed)
        probabilities = result.joint.probabilities.ravel()
        mask = probabilities > 1e-12
        expected = probabilities[mask] / probabilities[mask].sum() * result.n
        observed = result.counts.ravel()[mask]
        if chisquare(observed, expected).pvalue < 0.01:
            failures += 1
    assert failures <= 1
