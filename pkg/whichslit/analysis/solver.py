"""
Numerical search for projectors K solving the constraint problem for a fixed state.

For a detector-compatible Ψ the condition GΨ = YΨ is linear in K: writing Ψ as the
dim1 × dim2 coefficient matrix M, it reads ``K M = M R``. Together with Hermiticity this
cuts out an affine subspace ``K = K0 + Σ c_t B_t`` with real coordinates. Idempotence is
then imposed by a damped Gauss-Newton (Levenberg-Marquardt) descent on ``‖K² − K‖²_F``
from seeded random starts, optionally with a rank penalty ``|tr K − r|²``.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space
from sklearn.cluster import DBSCAN

from whichslit.analysis.checker import ProblemInstance, check_problem
from whichslit.config import config
from whichslit.exceptions import (
    DimensionError,
    EmptySubspaceError,
    IncompatibleStateError,
    InputError,
)
from whichslit.operators.algebra import frobenius, hermitian_basis
from whichslit.operators.layout import BlockState, CavityDecomposition, SlitLayout, expected_images, compatibility_report

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverOptions:
    """Search settings. Unset fields come from the ``solver`` config section."""

    restarts: int = 200
    max_iterations: int = 300
    tolerance: float = 1e-10
    rank_target: Optional[int] = None
    dedup_distance: float = 1e-6
    seed: int = 0
    rank_penalty: float = 1.0
    start_scale: float = 0.5
    workers: int = 1

    def __post_init__(self):
        for name in ("restarts", "max_iterations", "workers"):
            if int(getattr(self, name)) < 1:
                raise InputError(f"solver option {name} must be positive")
        if not 0 < self.tolerance < self.dedup_distance:
            raise InputError("solver tolerance must be positive and below the dedup distance")
        if self.rank_target is not None and self.rank_target < 0:
            raise InputError("rank target must be non-negative")

    @classmethod
    def from_config(cls, **overrides) -> "SolverOptions":
        settings = config.get_service_config("solver")
        known = set(cls.__dataclass_fields__)
        values = {key: value for key, value in settings.items() if key in known}
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class ConstraintSubspace:
    """
    Affine set ``offset + span_R(basis)`` of Hermitian dim1 × dim1 matrices.

    Attributes:
        offset: Particular solution.
        basis: Array of shape (k, dim1, dim1) of Hermitian directions.
        constraint_residual: Residual of the linear system at the offset.
        labels: Optional names of the coordinates.
    """

    offset: np.ndarray
    basis: np.ndarray
    constraint_residual: float = 0.0
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=np.complex128)
        n = self.offset.shape[0]
        if basis.size == 0:
            basis = np.zeros((0, n, n), dtype=np.complex128)
        if basis.ndim != 3 or basis.shape[1:] != (n, n):
            raise DimensionError(f"basis must have shape (k, {n}, {n}), got {basis.shape}")
        if self.labels is not None and len(self.labels) != basis.shape[0]:
            raise DimensionError("one label per basis element is required")
        object.__setattr__(self, "basis", basis)

    @property
    def dim1(self) -> int:
        return self.offset.shape[0]

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    def point(self, coords: Sequence[float]) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.dimension,):
            raise DimensionError(f"expected {self.dimension} coordinates, got shape {coords.shape}")
        return self.offset + np.tensordot(coords, self.basis, axes=1)

    def _real_design(self) -> np.ndarray:
        flat = self.basis.reshape(self.dimension, -1)
        return np.concatenate([flat.real, flat.imag], axis=1).T

    def coordinates(self, K) -> np.ndarray:
        """Least-squares coordinates of the point of the subspace nearest to ``K``."""
        if self.dimension == 0:
            return np.zeros(0)
        delta = (np.asarray(K, dtype=np.complex128) - self.offset).ravel()
        target = np.concatenate([delta.real, delta.imag])
        coords, *_ = np.linalg.lstsq(self._real_design(), target, rcond=None)
        return coords

    def membership_residual(self, K) -> float:
        """Frobenius distance from ``K`` to the subspace."""
        return frobenius(np.asarray(K, dtype=np.complex128) - self.point(self.coordinates(K)))


def build_constraint_subspace(psi: BlockState, layout: Optional[SlitLayout] = None) -> ConstraintSubspace:
    """
    Parametrize every Hermitian K with ``(K ⊗ 1)Ψ = (1 ⊗ R)Ψ``.

    Args:
        psi: Detector-compatible block state.
        layout: Optional layout; must agree with ``psi.layout``.

    Raises:
        IncompatibleStateError: ``psi`` is not detector-compatible.
        EmptySubspaceError: No Hermitian K satisfies the linear constraints; the error
            carries the least-squares residual.
    """
    if layout is not None and layout != psi.layout:
        raise DimensionError(f"layout m={layout.m} does not match the state (m={psi.layout.m})")
    report = compatibility_report(psi)
    if not report.holds:
        raise IncompatibleStateError("constraint subspace needs a detector-compatible state", residual=report.residual)

    n = psi.layout.dim1
    M = psi.matrix
    target = (M @ psi.decomp.R).ravel()
    hermitian = hermitian_basis(n)

    images = np.einsum("tij,jk->tik", hermitian, M).reshape(n * n, -1)
    system = np.concatenate([images.real, images.imag], axis=1).T
    rhs = np.concatenate([target.real, target.imag])

    coords, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    residual = float(np.linalg.norm(system @ coords - rhs))
    if residual > config.tolerance("subspace_feasibility"):
        raise EmptySubspaceError(
            f"no Hermitian K satisfies the detector constraints (residual {residual:.3e})",
            residual=residual,
        )

    directions = null_space(system)
    offset = np.tensordot(coords, hermitian, axes=1)
    basis = np.tensordot(directions.T, hermitian, axes=1)
    logger.info("constraint subspace for dim1=%d has dimension %d", n, basis.shape[0])
    return ConstraintSubspace(offset=offset, basis=basis, constraint_residual=residual)


def _residuals(
    subspace: ConstraintSubspace,
    coords: np.ndarray,
    rank_target: Optional[int],
    weight: float,
) -> Tuple[np.ndarray, np.ndarray]:
    K = subspace.point(coords)
    basis = subspace.basis
    defect = K @ K - K
    d_defect = (
        np.einsum("tij,jl->til", basis, K) + np.einsum("ij,tjl->til", K, basis) - basis
    ).reshape(subspace.dimension, -1)

    residuals = [defect.real.ravel(), defect.imag.ravel()]
    jacobian = [d_defect.real.T, d_defect.imag.T]
    if rank_target is not None:
        scale = np.sqrt(weight)
        residuals.append(np.array([scale * (np.trace(K).real - rank_target)]))
        jacobian.append(scale * np.einsum("tii->t", basis).real[np.newaxis, :])
    return np.concatenate(residuals), np.vstack(jacobian)


def projector_objective(
    subspace: ConstraintSubspace,
    coords,
    rank_target: Optional[int] = None,
    weight: float = 1.0,
) -> float:
    """``‖K² − K‖²_F + weight·|tr K − rank_target|²`` at ``coords``."""
    residuals, _ = _residuals(subspace, np.asarray(coords, dtype=float), rank_target, weight)
    return float(residuals @ residuals)


def projector_gradient(
    subspace: ConstraintSubspace,
    coords,
    rank_target: Optional[int] = None,
    weight: float = 1.0,
) -> np.ndarray:
    """Analytic gradient of ``projector_objective``."""
    residuals, jacobian = _residuals(subspace, np.asarray(coords, dtype=float), rank_target, weight)
    return 2.0 * jacobian.T @ residuals


@dataclass(frozen=True)
class RestartRecord:
    """Outcome of one descent. ``history`` holds the objective norm after each accepted step."""

    index: int
    converged: bool
    residual: float
    iterations: int
    coords: np.ndarray = field(repr=False)
    history: Tuple[float, ...] = field(default=(), repr=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "converged": self.converged,
            "residual": self.residual,
            "iterations": self.iterations,
        }


def _descend(subspace: ConstraintSubspace, index: int, opts: SolverOptions) -> RestartRecord:
    rng = np.random.default_rng(np.random.SeedSequence([opts.seed, index]))
    coords = rng.normal(scale=opts.start_scale, size=subspace.dimension)
    residuals, jacobian = _residuals(subspace, coords, opts.rank_target, opts.rank_penalty)
    cost = float(residuals @ residuals)
    history = [np.sqrt(cost)]
    damping = 1e-3
    target = 1e-3 * opts.tolerance
    identity = np.eye(subspace.dimension)
    iterations = 0

    while iterations < opts.max_iterations and np.sqrt(cost) > target:
        iterations += 1
        accepted = False
        while damping < 1e12:
            design = np.vstack([jacobian, np.sqrt(damping) * identity])
            rhs = np.concatenate([-residuals, np.zeros(subspace.dimension)])
            step, *_ = np.linalg.lstsq(design, rhs, rcond=None)
            trial = coords + step
            trial_residuals, trial_jacobian = _residuals(subspace, trial, opts.rank_target, opts.rank_penalty)
            trial_cost = float(trial_residuals @ trial_residuals)
            if trial_cost < cost:
                coords, residuals, jacobian, cost = trial, trial_residuals, trial_jacobian, trial_cost
                damping = max(damping / 3.0, 1e-15)
                accepted = True
                break
            damping *= 4.0
        if not accepted or np.linalg.norm(step) <= 1e-15 * (1.0 + np.linalg.norm(coords)):
            break
        history.append(np.sqrt(cost))

    K = subspace.point(coords)
    idempotence = frobenius(K @ K - K)
    converged = idempotence <= opts.tolerance
    if converged and opts.rank_target is not None:
        converged = abs(np.trace(K).real - opts.rank_target) <= config.tolerance("trace_integrality")
    logger.debug("restart %d: %d iterations, idempotence residual %.3e", index, iterations, idempotence)
    return RestartRecord(
        index=index,
        converged=converged,
        residual=idempotence,
        iterations=iterations,
        coords=coords,
        history=tuple(history),
    )


def _deduplicate(candidates: List[Tuple[float, np.ndarray]], distance: float) -> List[np.ndarray]:
    """Cluster matrices at Frobenius ``distance`` and keep the best member of each cluster."""
    if not candidates:
        return []
    features = np.array([np.concatenate([K.real.ravel(), K.imag.ravel()]) for _, K in candidates])
    labels = DBSCAN(eps=distance, min_samples=1).fit(features).labels_
    best: Dict[int, Tuple[float, np.ndarray]] = {}
    order: List[int] = []
    for label, (residual, K) in zip(labels, candidates):
        if label not in best:
            order.append(label)
            best[label] = (residual, K)
        elif residual < best[label][0]:
            best[label] = (residual, K)
    return [best[label][1] for label in order]


@dataclass(frozen=True)
class ProjectorSearch:
    solutions: List[np.ndarray]
    restarts: List[RestartRecord]

    @property
    def best_residual(self) -> float:
        return min((record.residual for record in self.restarts), default=float("inf"))


def find_projector(subspace: ConstraintSubspace, opts: Optional[SolverOptions] = None) -> ProjectorSearch:
    """
    Search the subspace for orthogonal projectors.

    Each restart descends from a Gaussian start drawn from a generator seeded by
    ``(opts.seed, restart index)``, so results do not depend on ``opts.workers``.

    Returns:
        A ``ProjectorSearch`` with the deduplicated solutions (in order of first
        discovery) and one record per restart.
    """
    opts = opts or SolverOptions.from_config()

    if subspace.dimension == 0:
        K = subspace.offset
        residual = frobenius(K @ K - K)
        ok = residual <= opts.tolerance and (
            opts.rank_target is None or abs(np.trace(K).real - opts.rank_target) <= config.tolerance("trace_integrality")
        )
        record = RestartRecord(index=0, converged=ok, residual=residual, iterations=0, coords=np.zeros(0))
        return ProjectorSearch(solutions=[K] if ok else [], restarts=[record])

    indices = range(opts.restarts)
    if opts.workers > 1:
        with ThreadPoolExecutor(max_workers=opts.workers) as pool:
            records = list(pool.map(lambda i: _descend(subspace, i, opts), indices))
    else:
        records = [_descend(subspace, i, opts) for i in indices]

    candidates = [(r.residual, subspace.point(r.coords)) for r in records if r.converged]
    solutions = _deduplicate(candidates, opts.dedup_distance)
    logger.info(
        "%d of %d restarts converged, %d distinct projectors", len(candidates), len(records), len(solutions)
    )
    return ProjectorSearch(solutions=solutions, restarts=records)


@dataclass(frozen=True)
class SolverReport:
    """Outcome of ``search_solutions``; an empty ``instances`` list is a valid answer."""

    options: SolverOptions
    subspace_dimension: Optional[int]
    restarts: List[RestartRecord]
    instances: List[ProblemInstance]
    best_residual: float
    rejected_reason: Optional[str] = None
    discarded: Dict[str, int] = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return bool(self.instances)


def degeneracy_reason(psi: BlockState) -> Optional[str]:
    """Describe why C5 cannot hold for ``psi``, or return None."""
    images = expected_images(psi)
    nonzero = config.tolerance("nonzero")
    vector = psi.vector
    sides = {
        "EΨ = 0": images.e_image,
        "EΨ = Ψ": vector - images.e_image,
        "GΨ = 0": images.g_image,
        "GΨ = Ψ": vector - images.g_image,
    }
    for description, part in sides.items():
        if np.linalg.norm(part) <= nonzero:
            return f"DegenerateStateError: {description} for every admissible K"
    return None


def search_solutions(
    psi: BlockState,
    layout: Optional[SlitLayout] = None,
    decomp: Optional[CavityDecomposition] = None,
    opts: Optional[SolverOptions] = None,
) -> SolverReport:
    """
    Full pipeline: constraint subspace, projector search, and checker filter.

    Every returned instance has passed ``check_problem`` independently of the solver's
    own acceptance test.

    Raises:
        IncompatibleStateError: ``psi`` is not detector-compatible.
    """
    opts = opts or SolverOptions.from_config()
    if decomp is not None and decomp != psi.decomp:
        raise DimensionError("decomposition does not match the state")
    report = compatibility_report(psi)
    if not report.holds:
        raise IncompatibleStateError("search needs a detector-compatible state", residual=report.residual)

    reason = degeneracy_reason(psi)
    if reason:
        logger.info("state rejected before search: %s", reason)
        return SolverReport(opts, None, [], [], float("inf"), rejected_reason=reason)

    try:
        subspace = build_constraint_subspace(psi, layout)
    except EmptySubspaceError as e:
        return SolverReport(opts, None, [], [], float(e.residual), rejected_reason=f"EmptySubspaceError: {e}")

    search = find_projector(subspace, opts)
    instances = []
    discarded: Dict[str, int] = {}
    for K in search.solutions:
        instance = ProblemInstance(psi=psi, K=K, family="search", params={"seed": opts.seed})
        verdict = check_problem(instance)
        if verdict.verdict:
            instances.append(instance)
        else:
            logger.debug("discarding projector failing %s", ", ".join(verdict.failed()))
            for name in verdict.failed():
                discarded[name] = discarded.get(name, 0) + 1
    logger.info("search kept %d of %d projectors", len(instances), len(search.solutions))
    return SolverReport(
        options=opts,
        subspace_dimension=subspace.dimension,
        restarts=search.restarts,
        instances=instances,
        best_residual=subspace.constraint_residual + search.best_residual,
        discarded=discarded,
    )
