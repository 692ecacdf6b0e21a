"""
Constraint checker for the non-disturbing detection problem.

A ``ProblemInstance`` bundles a block state Ψ with a candidate projector K on H1 (and,
rarely, a detector that replaces R = A + C). ``check_problem`` evaluates the five
conditions:

* C1  K is a projector and [L, K] ≠ 0
* C2  [S, R] = 0
* C3  TΨ = EΨ
* C4  YΨ = GΨ
* C5  0 ≠ EΨ ≠ Ψ and 0 ≠ GΨ ≠ Ψ
"""

import enum
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Any, Dict, Optional, Union

import numpy as np

from whichslit.config import config
from whichslit.exceptions import (
    DimensionError,
    NonCommutingError,
    PreconditionError,
    ZeroDenominatorError,
)
from whichslit.operators.algebra import as_square, as_vector, commutator, frobenius, is_projector
from whichslit.operators.layout import BlockState, CavityDecomposition, SlitLayout
from whichslit.operators.lifting import LiftedOperators, lift_operators

if TYPE_CHECKING:
    from whichslit.services.screen import ScreenModel

logger = logging.getLogger(__name__)

CONDITIONS = ("C1", "C2", "C3", "C4", "C5")


@dataclass(frozen=True)
class ProblemInstance:
    """
    A candidate solution: state, optional K, optional detector override and provenance.

    Attributes:
        psi: The normalized block state.
        K: dim1 × dim1 candidate projector, or None for which-slit-only instances.
        detector: dim2 × dim2 matrix replacing R = A + C when the detector is not built
            from the cavity decomposition.
        family: Provenance tag (family name, ``"search"``, ``"mirror"`` ...).
        params: Parameters that produced the instance.
    """

    psi: BlockState
    K: Optional[np.ndarray] = None
    detector: Optional[np.ndarray] = None
    family: str = "custom"
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for name, dim in (("K", self.psi.layout.dim1), ("detector", self.psi.decomp.dim2)):
            value = getattr(self, name)
            if value is None:
                continue
            matrix = as_square(value, name).copy()
            if matrix.shape[0] != dim:
                raise DimensionError(f"{name} must be {dim}×{dim}, got {matrix.shape}")
            matrix.flags.writeable = False
            object.__setattr__(self, name, matrix)

    @property
    def layout(self) -> SlitLayout:
        return self.psi.layout

    @property
    def decomp(self) -> CavityDecomposition:
        return self.psi.decomp

    @cached_property
    def operators(self) -> LiftedOperators:
        return lift_operators(self.layout, self.decomp, self.K, self.detector)

    @property
    def R(self) -> np.ndarray:
        return self.decomp.R if self.detector is None else self.detector


@dataclass(frozen=True)
class ConditionResult:
    passed: bool
    residual: float
    detail: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"pass": self.passed, "residual": self.residual}
        if self.detail:
            data["detail"] = dict(self.detail)
        return data


@dataclass(frozen=True)
class CheckReport:
    """Per-condition results; the verdict passes iff all five conditions pass."""

    conditions: Dict[str, ConditionResult]

    @property
    def verdict(self) -> bool:
        return all(self.conditions[name].passed for name in CONDITIONS)

    def __getitem__(self, name: str) -> ConditionResult:
        return self.conditions[name]

    def failed(self):
        return [name for name in CONDITIONS if not self.conditions[name].passed]

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {name: self.conditions[name].to_dict() for name in CONDITIONS}
        data["verdict"] = self.verdict
        return data


def check_problem(
    instance: ProblemInstance,
    tol: Optional[float] = None,
    nonzero: Optional[float] = None,
) -> CheckReport:
    """
    Evaluate C1–C5 on ``instance``.

    Args:
        instance: Instance with K present.
        tol: Equality tolerance for C2–C4 (configured ``equality`` when None).
        nonzero: Threshold above which C1 and C5 quantities count as nonzero.

    Returns:
        A ``CheckReport``. A K that is not a projector fails C1, and the C1 detail
        carries its hermiticity and idempotence residuals.

    Raises:
        PreconditionError: K is absent.
    """
    if instance.K is None:
        raise PreconditionError("check_problem needs an instance with K")
    tol = config.tolerance("equality") if tol is None else tol
    nonzero = config.tolerance("nonzero") if nonzero is None else nonzero

    ops = instance.operators
    psi = instance.psi.vector
    K = instance.K

    projector = is_projector(K)
    incompatibility = frobenius(commutator(instance.layout.L, K))
    c1 = ConditionResult(
        passed=bool(projector) and incompatibility > nonzero,
        residual=incompatibility,
        detail={
            "hermiticity": projector.hermiticity_residual,
            "idempotence": projector.idempotence_residual,
        },
    )
    if not projector:
        logger.info(
            "K is not a projector (idempotence residual %.3e)", projector.idempotence_residual
        )

    c2_residual = frobenius(commutator(instance.decomp.S, instance.R))
    c2 = ConditionResult(passed=c2_residual <= tol, residual=c2_residual)

    e_psi = ops.E @ psi
    g_psi = ops.G @ psi
    c3_residual = float(np.linalg.norm(ops.T @ psi - e_psi))
    c4_residual = float(np.linalg.norm(ops.Y @ psi - g_psi))
    c3 = ConditionResult(passed=c3_residual <= tol, residual=c3_residual)
    c4 = ConditionResult(passed=c4_residual <= tol, residual=c4_residual)

    margins = {
        "E_psi": float(np.linalg.norm(e_psi)),
        "E_c_psi": float(np.linalg.norm(psi - e_psi)),
        "G_psi": float(np.linalg.norm(g_psi)),
        "G_c_psi": float(np.linalg.norm(psi - g_psi)),
    }
    c5_residual = min(margins.values())
    c5 = ConditionResult(passed=c5_residual > nonzero, residual=c5_residual, detail=margins)

    return CheckReport(conditions={"C1": c1, "C2": c2, "C3": c3, "C4": c4, "C5": c5})


def _state_vector(psi: Union[BlockState, np.ndarray]) -> np.ndarray:
    if isinstance(psi, BlockState):
        return psi.vector
    return as_vector(psi, "state")


def _expectation(op: np.ndarray, psi: np.ndarray) -> float:
    return float(np.real(np.vdot(psi, op @ psi)))


def conditional_probability(X, C, psi, tol: Optional[float] = None) -> float:
    """
    ``p(X | C) = ⟨Ψ|XCΨ⟩ / ⟨Ψ|CΨ⟩`` for commuting projectors X and C.

    Raises:
        NonCommutingError: ``‖[X, C]‖_F`` exceeds the commutation tolerance.
        ZeroDenominatorError: ``⟨Ψ|CΨ⟩`` vanishes.
    """
    tol = config.tolerance("commutation") if tol is None else tol
    X = as_square(X, "X")
    C = as_square(C, "C")
    vector = _state_vector(psi)
    if X.shape[0] != vector.size:
        raise DimensionError(f"operators are {X.shape[0]}-dimensional, state has {vector.size} entries")
    gap = frobenius(commutator(X, C))
    if gap > tol:
        raise NonCommutingError(f"conditional probability needs commuting projectors, ‖[X,C]‖ = {gap:.3e}", residual=gap)
    denominator = _expectation(C, vector)
    if denominator <= np.finfo(float).eps:
        raise ZeroDenominatorError("conditioning event has probability zero", residual=denominator)
    return float(np.real(np.vdot(vector, X @ (C @ vector)))) / denominator


class Correlation(str, enum.Enum):
    DIRECT = "Direct"
    T_IMPLIES_Y = "TImpliesY"
    Y_IMPLIES_T = "YImpliesT"
    ANTICORRELATED = "Anticorrelated"
    UNCORRELATED = "Uncorrelated"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class CorrelationClass:
    kind: Correlation
    p_t_given_y: Optional[float]
    p_y_given_t: Optional[float]

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "p_T_given_Y": self.p_t_given_y, "p_Y_given_T": self.p_y_given_t}


def classify_correlation(instance: ProblemInstance, tol: Optional[float] = None) -> CorrelationClass:
    """
    Classify how the two detector outcomes T and Y are correlated on Ψ.

    The outcome is ``Degenerate`` when either detector fires with probability 0 or 1.
    Otherwise the classes are tested in order: ``Direct`` (TΨ = YΨ), ``TImpliesY``
    (YTΨ = TΨ), ``YImpliesT`` (TYΨ = YΨ), ``Anticorrelated`` (TYΨ = 0), and finally
    ``Uncorrelated``, where both conditionals lie strictly inside (0, 1).

    Raises:
        PreconditionError: C2, C3 or C4 fails on ``instance``.
    """
    tol = config.tolerance("equality") if tol is None else tol
    report = check_problem(instance, tol=tol)
    broken = [name for name in ("C2", "C3", "C4") if not report[name].passed]
    if broken:
        raise PreconditionError(f"classification needs C2–C4, failing: {', '.join(broken)}")

    ops = instance.operators
    psi = instance.psi.vector
    t_psi = ops.T @ psi
    y_psi = ops.Y @ psi
    ty_psi = ops.T @ y_psi

    p_t = float(np.vdot(t_psi, t_psi).real)
    p_y = float(np.vdot(y_psi, y_psi).real)
    p_ty = float(np.vdot(ty_psi, ty_psi).real)
    p_y_given_t = p_ty / p_t if p_t > np.finfo(float).eps else None
    p_t_given_y = p_ty / p_y if p_y > np.finfo(float).eps else None

    nonzero = config.tolerance("nonzero")
    if min(p_t, p_y, 1.0 - p_t, 1.0 - p_y) <= nonzero:
        kind = Correlation.DEGENERATE
    elif np.linalg.norm(t_psi - y_psi) <= tol:
        kind = Correlation.DIRECT
    elif np.linalg.norm(t_psi - ty_psi) <= tol:
        kind = Correlation.T_IMPLIES_Y
    elif np.linalg.norm(y_psi - ty_psi) <= tol:
        kind = Correlation.Y_IMPLIES_T
    elif np.linalg.norm(ty_psi) <= tol:
        kind = Correlation.ANTICORRELATED
    else:
        kind = Correlation.UNCORRELATED
    return CorrelationClass(kind=kind, p_t_given_y=p_t_given_y, p_y_given_t=p_y_given_t)


@dataclass(frozen=True)
class NondisturbanceReport:
    passed: bool
    screen_commutator: float
    detector_commutator: float
    image_residual: float


def verify_nondisturbing(
    Y,
    G,
    screen: "ScreenModel",
    psi,
    tol: Optional[float] = None,
) -> NondisturbanceReport:
    """
    Check that Y is a non-disturbing detector of G for Ψ.

    Condition (i) is ``[Y, F(Δ)] = 0`` for every screen bin; condition (ii) is
    ``[Y, G] = 0`` together with ``YΨ = GΨ``.

    Raises:
        DimensionError: Operators, screen and state disagree on dimensions.
    """
    tol = config.tolerance("equality") if tol is None else tol
    Y = as_square(Y, "Y")
    G = as_square(G, "G")
    vector = _state_vector(psi)
    dim = vector.size
    if Y.shape[0] != dim or G.shape[0] != dim or dim % screen.dim1:
        raise DimensionError("detector, property, screen and state dimensions disagree")
    dim2 = dim // screen.dim1

    screen_gap = max(frobenius(commutator(Y, screen.F(index, dim2))) for index in range(screen.n_bins))
    detector_gap = frobenius(commutator(Y, G))
    image_gap = float(np.linalg.norm(Y @ vector - G @ vector))
    return NondisturbanceReport(
        passed=max(screen_gap, detector_gap, image_gap) <= tol,
        screen_commutator=screen_gap,
        detector_commutator=detector_gap,
        image_residual=image_gap,
    )
