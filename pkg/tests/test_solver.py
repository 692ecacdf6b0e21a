import numpy as np
import pytest
from numpy.testing import assert_allclose

from whichslit.analysis.checker import Correlation, check_problem, classify_correlation
from whichslit.analysis.families import dim6_matrix, fit_dim6, related_pair_state, three_state
from whichslit.analysis.solver import (
    ConstraintSubspace,
    SolverOptions,
    build_constraint_subspace,
    find_projector,
    projector_gradient,
    projector_objective,
    search_solutions,
)
from whichslit.exceptions import DimensionError, EmptySubspaceError, IncompatibleStateError, InputError
from whichslit.operators.layout import CavityDecomposition, assemble_state, h2_vector

UNIT = CavityDecomposition(1, 1, 1, 1)


def _one_state(seed=0):
    rng = np.random.default_rng(seed)
    a, b, c, d = rng.normal(size=4) + 1j * rng.normal(size=4)
    return assemble_state([h2_vector(UNIT, a=a, b=b)], [h2_vector(UNIT, c=c, d=d)], UNIT)


def _accepted_only_state():
    x = [h2_vector(UNIT, a=1.0), h2_vector(UNIT, a=0.5)]
    y = [h2_vector(UNIT, c=1.0), h2_vector(UNIT, c=2.0j)]
    return assemble_state(x, y, UNIT)


def test_three_state_subspace_contains_the_family():
    subspace = build_constraint_subspace(three_state())
    for p, theta in [(0.25, 0.0), (0.1, 1.0), (0.4, -2.0)]:
        assert subspace.membership_residual(dim6_matrix(p, theta)) < 1e-12
    assert subspace.constraint_residual < 1e-12


def test_subspace_members_are_hermitian_solutions():
    psi = three_state()
    subspace = build_constraint_subspace(psi)
    coords = np.random.default_rng(1).normal(size=subspace.dimension)
    K = subspace.point(coords)
    assert_allclose(K, K.conj().T, atol=1e-12)
    assert_allclose(K @ psi.matrix, psi.matrix @ psi.decomp.R, atol=1e-12)


def test_identity_solves_a_state_inside_the_accepted_cavities():
    subspace = build_constraint_subspace(_accepted_only_state())
    assert subspace.membership_residual(np.eye(4)) < 1e-12


def test_one_state_has_no_hermitian_solution():
    with pytest.raises(EmptySubspaceError) as excinfo:
        build_constraint_subspace(_one_state())
    assert excinfo.value.residual > 1e-3


def test_incompatible_state_is_rejected():
    psi = assemble_state([h2_vector(UNIT, c=1.0)], [h2_vector(UNIT, a=1.0)], UNIT)
    with pytest.raises(IncompatibleStateError):
        build_constraint_subspace(psi)
    with pytest.raises(IncompatibleStateError):
        search_solutions(psi)


def test_subspace_shape_validation():
    with pytest.raises(DimensionError):
        ConstraintSubspace(offset=np.zeros((2, 2)), basis=np.zeros((1, 3, 3)))
    with pytest.raises(DimensionError):
        ConstraintSubspace(offset=np.zeros((2, 2)), basis=np.zeros((1, 2, 2)), labels=("a", "b"))


@pytest.mark.parametrize("rank_target", [None, 3])
def test_gradient_matches_finite_differences(rank_target):
    subspace = build_constraint_subspace(three_state())
    coords = np.random.default_rng(2).normal(scale=0.5, size=subspace.dimension)
    analytic = projector_gradient(subspace, coords, rank_target, 0.7)
    step = 1e-6
    numeric = np.array(
        [
            (
                projector_objective(subspace, coords + step * e, rank_target, 0.7)
                - projector_objective(subspace, coords - step * e, rank_target, 0.7)
            )
            / (2 * step)
            for e in np.eye(subspace.dimension)
        ]
    )
    assert np.linalg.norm(analytic - numeric) <= 1e-5 * np.linalg.norm(numeric)


def test_descent_history_is_monotone():
    subspace = build_constraint_subspace(three_state())
    search = find_projector(subspace, SolverOptions(restarts=5, rank_target=3, seed=4))
    for record in search.restarts:
        assert all(later <= earlier for earlier, later in zip(record.history, record.history[1:]))


def test_search_does_not_depend_on_workers():
    subspace = build_constraint_subspace(three_state())
    serial = find_projector(subspace, SolverOptions(restarts=8, seed=11, workers=1))
    threaded = find_projector(subspace, SolverOptions(restarts=8, seed=11, workers=4))
    assert [r.residual for r in serial.restarts] == [r.residual for r in threaded.restarts]
    assert len(serial.solutions) == len(threaded.solutions)
    for a, b in zip(serial.solutions, threaded.solutions):
        assert_allclose(a, b)


def test_impossible_rank_gives_no_solutions():
    report = search_solutions(three_state(), opts=SolverOptions(restarts=10, rank_target=6, seed=0))
    assert report.instances == []
    assert not report.found
    assert report.best_residual > 0


def test_independent_pair_gives_no_solutions():
    x = [h2_vector(UNIT, a=1.0, b=1.0), h2_vector(UNIT, a=1.0, b=-2.0)]
    y = [h2_vector(UNIT, c=1.0, d=1.0j), h2_vector(UNIT, c=3.0, d=1.0)]
    report = search_solutions(assemble_state(x, y, UNIT), opts=SolverOptions(restarts=20, seed=0))
    assert not report.found


def test_degenerate_state_is_reported():
    report = search_solutions(_accepted_only_state(), opts=SolverOptions(restarts=5))
    assert report.rejected_reason.startswith("DegenerateStateError")
    assert report.instances == []
    assert report.subspace_dimension is None


def test_one_state_report_names_the_empty_subspace():
    report = search_solutions(_one_state(3), opts=SolverOptions(restarts=5))
    assert report.rejected_reason.startswith("EmptySubspaceError")
    assert report.best_residual > 1e-3


def test_solutions_pass_the_checker():
    psi = related_pair_state(1.0, 1.0, 1.0, 1.0)
    report = search_solutions(psi, opts=SolverOptions(restarts=30, rank_target=2, seed=5))
    for instance in report.instances:
        assert check_problem(instance).verdict


@pytest.mark.slow
def test_three_state_search_recovers_the_family():
    report = search_solutions(three_state(), opts=SolverOptions(restarts=200, rank_target=3, seed=0))
    assert report.found
    distances = [fit_dim6(instance.K)[2] for instance in report.instances]
    assert min(distances) < 1e-6
    assert any(classify_correlation(instance).kind is Correlation.UNCORRELATED for instance in report.instances)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"restarts": 0},
        {"max_iterations": 0},
        {"workers": 0},
        {"tolerance": 0.0},
        {"tolerance": 1e-3, "dedup_distance": 1e-6},
        {"rank_target": -1},
    ],
)
def test_solver_options_validation(kwargs):
    with pytest.raises(InputError):
        SolverOptions(**kwargs)


def test_options_from_config_apply_overrides():
    opts = SolverOptions.from_config(restarts=3, seed=None)
    assert opts.restarts == 3
    assert opts.seed == 0
    assert opts.to_dict()["restarts"] == 3
