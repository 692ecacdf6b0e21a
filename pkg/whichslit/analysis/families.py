"""
Named instances and closed-form solution families.

Every builder returns a ``ProblemInstance`` whose ``family`` field records its provenance
and whose ``params`` record the parameters used. Free state amplitudes default to equal
moduli with zero phase and are normalized; each builder accepts overrides.

Families:

* ``dim4-sym``      two states per slit, λ = μ = 1, K parametrized by (q, θ), rank 2
* ``dim4-mu0``      two states per slit, μ = 0, K completed by an idempotence solve
* ``dim4-general``  two states per slit, general λ, μ, K found by the projector search
* ``dim6``          three states per slit, K parametrized by (p, θ), rank 3
* ``esw``           one state per slit, two-level detector (the which-way eraser setup)
* ``sec6``          three states per slit with one-dimensional cavities A, B, C, D
"""

import enum
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import block_diag
from scipy.optimize import least_squares

from whichslit.analysis.checker import ProblemInstance, check_problem
from whichslit.analysis.solver import ConstraintSubspace, SolverOptions, SolverReport, find_projector, search_solutions
from whichslit.config import config
from whichslit.exceptions import IncompatibleStateError, InputError, NoCompletionError, ParameterRangeError
from whichslit.operators.algebra import frobenius, is_projector, ket_projector, projector_rank
from whichslit.operators.layout import (
    CAVITIES,
    BlockState,
    CavityDecomposition,
    SlitLayout,
    assemble_state,
    compatibility_report,
    h2_vector,
    permute_cavities,
)

logger = logging.getLogger(__name__)

UNIT_CAVITIES = CavityDecomposition(1, 1, 1, 1)

# What a cavity click reveals about a run of a solved instance.
INFERENCE_MAP: Dict[str, Tuple[str, str]] = {
    "A": ("slit 1", "G"),
    "B": ("slit 1", "G'"),
    "C": ("slit 2", "G"),
    "D": ("slit 2", "G'"),
}


class FamilyTag(str, enum.Enum):
    DIM4_SYM = "dim4-sym"
    DIM4_MU0 = "dim4-mu0"
    DIM4_GENERAL = "dim4-general"
    DIM6 = "dim6"
    ESW = "esw"
    SEC6 = "sec6"


@dataclass(frozen=True)
class FamilyParams:
    """Parameters of a family member; ``validate`` enforces the admissible ranges."""

    family: FamilyTag
    lam: complex = 1.0
    mu: complex = 1.0
    p: Optional[float] = None
    q: Optional[float] = None
    theta: float = 0.0
    amplitudes: Dict[str, complex] = field(default_factory=dict)

    def validate(self) -> "FamilyParams":
        if self.family is FamilyTag.DIM4_SYM and not (self.q is not None and 0.0 < self.q < 0.5):
            raise ParameterRangeError(f"q must lie in (0, 1/2), got {self.q!r}")
        if self.family is FamilyTag.DIM6 and not (self.p is not None and 0.0 < self.p < 0.5):
            raise ParameterRangeError(f"p must lie in (0, 1/2), got {self.p!r}")
        if self.family is FamilyTag.DIM4_MU0:
            if not (self.p is not None and 0.0 < self.p < 1.0):
                raise ParameterRangeError(f"p must lie in (0, 1), got {self.p!r}")
            if self.lam == 0:
                raise ParameterRangeError("lambda must be nonzero")
        if self.family is FamilyTag.DIM4_GENERAL and (self.lam == 0 or self.mu == 0):
            raise ParameterRangeError("lambda and mu must be nonzero")
        if not np.isfinite(self.theta):
            raise ParameterRangeError("theta must be finite")
        return self

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "family": self.family.value,
            "lambda": [complex(self.lam).real, complex(self.lam).imag],
            "mu": [complex(self.mu).real, complex(self.mu).imag],
            "theta": self.theta,
        }
        if self.p is not None:
            data["p"] = self.p
        if self.q is not None:
            data["q"] = self.q
        if self.amplitudes:
            data["amplitudes"] = {k: [complex(v).real, complex(v).imag] for k, v in self.amplitudes.items()}
        return data


def _pick(overrides: Optional[Dict[str, complex]], defaults: Dict[str, complex]) -> Dict[str, complex]:
    values = dict(defaults)
    for key, value in (overrides or {}).items():
        if key not in defaults:
            raise InputError(f"unknown amplitude {key!r}; expected one of {sorted(defaults)}")
        values[key] = complex(value)
    return values


# ---------------------------------------------------------------------------
# Two states per slit
# ---------------------------------------------------------------------------

def related_pair_state(lam: complex, mu: complex, a1: complex, delta1: complex) -> BlockState:
    """x_1 = a_1 on A, x_2 = μ a_1 on A, y_1 = δ_1 on D, y_2 = λ δ_1 on D (normalized)."""
    d = UNIT_CAVITIES
    x = [h2_vector(d, a=a1), h2_vector(d, a=mu * a1)]
    y = [h2_vector(d, d=delta1), h2_vector(d, d=lam * delta1)]
    return assemble_state(x, y, d, strict=True)


def dim4_sym_matrix(q: float, theta: float) -> np.ndarray:
    """Rank-2 projector with p = 1 − q and u = e^{iθ}√((1/2 − q)q)."""
    u = np.exp(1j * theta) * np.sqrt((0.5 - q) * q)
    uc = np.conj(u)
    p = 1.0 - q
    return np.array(
        [
            [p, q, -u, u],
            [q, p, u, -u],
            [-uc, uc, q, -q],
            [uc, -uc, -q, q],
        ],
        dtype=np.complex128,
    )


def family_dim4_sym(
    q: float,
    theta: float = 0.0,
    amplitudes: Optional[Dict[str, complex]] = None,
) -> ProblemInstance:
    """
    Symmetric two-state family, λ = μ = 1.

    Args:
        q: Parameter in (0, 1/2).
        theta: Phase of the slit-crossing block.
        amplitudes: Overrides for ``a1`` and ``delta1`` (default 1/2 each).
    """
    values = _pick(amplitudes, {"a1": 0.5, "delta1": 0.5})
    params = FamilyParams(FamilyTag.DIM4_SYM, q=q, theta=theta, amplitudes=values).validate()
    psi = related_pair_state(1.0, 1.0, values["a1"], values["delta1"])
    return ProblemInstance(psi=psi, K=dim4_sym_matrix(q, theta), family=params.family.value, params=params.to_dict())


def mu0_pattern(lam: complex, p: float, q: float, u: complex) -> np.ndarray:
    """Hermitian pattern for μ = 0: e_1 is fixed and the rest couples through (p, q, u)."""
    lc = np.conj(lam)
    uc = np.conj(u)
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, p, -lam * u, u],
            [0.0, -lc * uc, abs(lam) ** 2 * q, -lc * q],
            [0.0, uc, -lam * q, q],
        ],
        dtype=np.complex128,
    )


def printed_mu0_constants(lam: complex, p: float, theta: float) -> Tuple[complex, float]:
    """The (u, q) pair u = e^{iθ}√((p − p²)/(1 + |λ|²)), q = 1/(1 + |λ|²)."""
    norm = 1.0 + abs(lam) ** 2
    return np.exp(1j * theta) * np.sqrt((p - p * p) / norm), 1.0 / norm


def audit_mu0_printed_constants(lam: complex, p_grid: Sequence[float], theta: float = 0.0) -> List[float]:
    """Idempotence residual ``‖K² − K‖_F`` of the μ = 0 pattern at the printed constants."""
    residuals = []
    for p in p_grid:
        u, q = printed_mu0_constants(lam, p, theta)
        K = mu0_pattern(lam, p, q, u)
        residuals.append(frobenius(K @ K - K))
    return residuals


def solve_mu0_completion(lam: complex, p: float, theta: float) -> Tuple[float, complex]:
    """
    Find (q, u) with u = |u| e^{iθ} making the μ = 0 pattern a rank-2 projector.

    The residual vector stacks the real and imaginary parts of ``K² − K`` and the trace
    defect ``tr K − 2``; several bounded starts are tried and the best fit is verified
    by direct multiplication.

    Raises:
        NoCompletionError: The best fit misses idempotence tolerance.
    """
    phase = np.exp(1j * theta)
    norm = 1.0 + abs(lam) ** 2

    def residuals(x):
        K = mu0_pattern(lam, p, x[0], x[1] * phase)
        defect = K @ K - K
        return np.concatenate([defect.real.ravel(), defect.imag.ravel(), [np.trace(K).real - 2.0]])

    best: Optional[Tuple[float, float, float]] = None
    for q0 in (0.25, 0.5, 0.75):
        for r0 in (0.1, 0.4):
            fit = least_squares(
                residuals,
                x0=[q0 / norm, r0 / np.sqrt(norm)],
                bounds=([0.0, 0.0], [1.0, 1.0]),
                xtol=1e-15,
                ftol=1e-15,
                gtol=1e-15,
            )
            q, r = fit.x
            K = mu0_pattern(lam, p, q, r * phase)
            residual = frobenius(K @ K - K)
            if best is None or residual < best[0]:
                best = (residual, q, r)

    residual, q, r = best
    if residual > config.tolerance("idempotence"):
        raise NoCompletionError(f"no idempotent completion for lambda={lam}, p={p} (best residual {residual:.3e})", residual=residual)
    logger.debug("mu=0 completion: q=%.15g |u|=%.15g residual %.3e", q, r, residual)
    return float(q), complex(r * phase)


def family_dim4_mu0(
    lam: complex,
    p: float,
    theta: float = 0.0,
    amplitudes: Optional[Dict[str, complex]] = None,
) -> ProblemInstance:
    """
    Two-state family with x_2 = 0 (μ = 0) and y_2 = λ y_1.

    The completion (q, u) comes from ``solve_mu0_completion``; the printed constants
    are only used by ``audit_mu0_printed_constants``.
    """
    values = _pick(amplitudes, {"a1": 1.0, "delta1": 1.0})
    params = FamilyParams(FamilyTag.DIM4_MU0, lam=lam, mu=0.0, p=p, theta=theta, amplitudes=values).validate()
    q, u = solve_mu0_completion(lam, p, theta)
    K = mu0_pattern(lam, p, q, u)
    rank = projector_rank(K)
    if rank != 2:
        raise NoCompletionError(f"completion has rank {rank}, expected 2")
    psi = related_pair_state(lam, 0.0, values["a1"], values["delta1"])
    data = params.to_dict()
    data.update({"q": q, "u": [u.real, u.imag]})
    return ProblemInstance(psi=psi, K=K, family=params.family.value, params=data)


def ansatz_subspace_dim4(lam: complex, mu: complex) -> ConstraintSubspace:
    """
    The general Hermitian two-state ansatz as an affine subspace in (p, q, Re u, Im u).

    P = [[1 − |μ|²(1 − p), μ̄(1 − p)], [μ(1 − p), p]], Q = q[[|λ|², −λ̄], [−λ, 1]] and
    U = [[−λu, u], [λu/μ̄, −u/μ̄]], V = U†. The second row of U is divided by μ̄ so that
    V annihilates (1, μ) for complex μ.
    """
    if lam == 0 or mu == 0:
        raise ParameterRangeError("lambda and mu must be nonzero")
    lc, mc = np.conj(lam), np.conj(mu)

    offset = np.zeros((4, 4), dtype=np.complex128)
    offset[:2, :2] = [[1.0 - abs(mu) ** 2, mc], [mu, 0.0]]

    d_p = np.zeros((4, 4), dtype=np.complex128)
    d_p[:2, :2] = [[abs(mu) ** 2, -mc], [-mu, 1.0]]

    d_q = np.zeros((4, 4), dtype=np.complex128)
    d_q[2:, 2:] = [[abs(lam) ** 2, -lc], [-lam, 1.0]]

    unit = np.array([[-lam, 1.0], [lam / mc, -1.0 / mc]], dtype=np.complex128)
    directions = [d_p, d_q]
    for factor in (1.0, 1j):
        d_u = np.zeros((4, 4), dtype=np.complex128)
        d_u[:2, 2:] = factor * unit
        d_u[2:, :2] = np.conj(factor * unit).T
        directions.append(d_u)

    return ConstraintSubspace(offset=offset, basis=np.array(directions), labels=("p", "q", "re_u", "im_u"))


def family_dim4_general(
    lam: complex,
    mu: complex,
    seed: Optional[int] = None,
    amplitudes: Optional[Dict[str, complex]] = None,
    opts: Optional[SolverOptions] = None,
) -> ProblemInstance:
    """
    Two-state family for general nonzero λ, μ, solved numerically on the ansatz.

    Raises:
        NoCompletionError: No searched projector passes the checker.
    """
    values = _pick(amplitudes, {"a1": 1.0, "delta1": 1.0})
    params = FamilyParams(FamilyTag.DIM4_GENERAL, lam=lam, mu=mu, amplitudes=values).validate()
    psi = related_pair_state(lam, mu, values["a1"], values["delta1"])
    opts = opts or SolverOptions.from_config(rank_target=2, seed=seed)

    search = find_projector(ansatz_subspace_dim4(lam, mu), opts)
    for K in search.solutions:
        instance = ProblemInstance(psi=psi, K=K, family=params.family.value, params={**params.to_dict(), "seed": opts.seed})
        if check_problem(instance).verdict:
            return instance
    raise NoCompletionError(
        f"no verified projector for lambda={lam}, mu={mu} after {opts.restarts} restarts",
        residual=search.best_residual,
    )


def fit_dim4_sym(K) -> Tuple[float, float, float]:
    """Nearest symmetric-family member: returns (q, θ, Frobenius distance)."""
    K = np.asarray(K, dtype=np.complex128)
    q = float(np.clip(K[2, 2].real, 1e-300, 0.5 - 1e-16))
    theta = float(np.angle(K[0, 3]))
    return q, theta, frobenius(K - dim4_sym_matrix(q, theta))


# ---------------------------------------------------------------------------
# Three states per slit
# ---------------------------------------------------------------------------

def three_state(
    b1: complex = 1.0,
    a3: complex = 1.0,
    delta1: complex = 1.0,
    gamma3: complex = 1.0,
    mu: complex = 1.0,
    lam: complex = 1.0,
    decomp: CavityDecomposition = UNIT_CAVITIES,
) -> BlockState:
    """
    x = (b_1 on B, μ b_1 on B, a_3 on A), y = (δ_1 on D, λ δ_1 on D, γ_3 on C).

    With the defaults every component has weight 1/6 after normalization.
    """
    d = decomp
    x = [h2_vector(d, b=b1), h2_vector(d, b=mu * b1), h2_vector(d, a=a3)]
    y = [h2_vector(d, d=delta1), h2_vector(d, d=lam * delta1), h2_vector(d, c=gamma3)]
    return assemble_state(x, y, d, strict=True)


def dim6_matrix(p: float, theta: float) -> np.ndarray:
    """Rank-3 projector: e_3 and r_3 fixed, a rank-one block on (e_1 − e_2, r_1 − r_2)."""
    w = np.exp(1j * theta) * np.sqrt(p * (0.5 - p))
    core = np.array([[p, w], [np.conj(w), 0.5 - p]], dtype=np.complex128)
    pair = np.array([[1.0, -1.0], [-1.0, 1.0]])
    K = np.zeros((6, 6), dtype=np.complex128)
    blocks = ((0, 1), (3, 4))
    for i, rows in enumerate(blocks):
        for j, cols in enumerate(blocks):
            K[np.ix_(rows, cols)] = core[i, j] * pair
    K[2, 2] = 1.0
    K[5, 5] = 1.0
    return K


def family_dim6(
    p: float,
    theta: float = 0.0,
    amplitudes: Optional[Dict[str, complex]] = None,
) -> ProblemInstance:
    """
    Three-state family with λ = μ = 1.

    Args:
        p: Parameter in (0, 1/2); p = 1/4 with θ = 0 gives entries in {±1/4, 0, 1}.
        theta: Phase of the slit-crossing block.
        amplitudes: Overrides for ``b1``, ``a3``, ``delta1``, ``gamma3``.
    """
    values = _pick(amplitudes, {"b1": 1.0, "a3": 1.0, "delta1": 1.0, "gamma3": 1.0})
    params = FamilyParams(FamilyTag.DIM6, p=p, theta=theta, amplitudes=values).validate()
    psi = three_state(values["b1"], values["a3"], values["delta1"], values["gamma3"])
    return ProblemInstance(psi=psi, K=dim6_matrix(p, theta), family=params.family.value, params=params.to_dict())


def fit_dim6(K) -> Tuple[float, float, float]:
    """Nearest three-state family member: returns (p, θ, Frobenius distance)."""
    K = np.asarray(K, dtype=np.complex128)
    p = float(np.clip(K[0, 0].real, 0.0, 0.5))
    theta = float(np.angle(K[0, 3]))
    return p, theta, frobenius(K - dim6_matrix(p, theta))


# ---------------------------------------------------------------------------
# Eraser setup and the ideal apparatus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EswSetup:
    """
    One state per slit and a two-level detector whose basis is (|1⟩, |0⟩).

    ``instance`` carries no K. ``erasure_instance`` uses K = |ψ₊⟩⟨ψ₊| with the detector
    |+⟩⟨+| in place of R, which breaks [S, R] = 0.
    """

    psi: BlockState
    E: np.ndarray
    T: np.ndarray
    Eplus: np.ndarray
    Tplus: np.ndarray
    instance: ProblemInstance
    erasure_instance: ProblemInstance


def esw_instance() -> EswSetup:
    decomp = CavityDecomposition(1, 0, 0, 1)
    layout = SlitLayout(1)
    psi = assemble_state([h2_vector(decomp, a=1.0)], [h2_vector(decomp, d=1.0)], decomp, strict=True)

    plus_h1 = ket_projector([1.0, 1.0])
    plus_h2 = ket_projector([1.0, 1.0])
    eye = np.eye(2, dtype=np.complex128)
    instance = ProblemInstance(psi=psi, family=FamilyTag.ESW.value)
    erasure = ProblemInstance(psi=psi, K=plus_h1, detector=plus_h2, family=FamilyTag.ESW.value, params={"detector": "plus"})
    return EswSetup(
        psi=psi,
        E=np.kron(layout.L, eye),
        T=np.kron(eye, decomp.S),
        Eplus=np.kron(plus_h1, eye),
        Tplus=np.kron(eye, plus_h2),
        instance=instance,
        erasure_instance=erasure,
    )


@dataclass(frozen=True)
class Sec6Setup:
    instance: ProblemInstance
    inference: Dict[str, Tuple[str, str]]


def slit1_relabeling() -> np.ndarray:
    """
    Reflection of the slit-1 block exchanging (e_1 + e_2)/√2 with e_3.

    It fixes e_1 − e_2 and the whole slit-2 block, so it commutes with L.
    """
    s = np.array([1.0, 1.0, 0.0]) / np.sqrt(2.0)
    e3 = np.array([0.0, 0.0, 1.0])
    w = s - e3
    reflection = np.eye(3) - 2.0 * np.outer(w, w) / (w @ w)
    return block_diag(reflection, np.eye(3)).astype(np.complex128)


def sec6_instance() -> Sec6Setup:
    """
    Three localized states per slit, each cavity one-dimensional, equal weights 1/6.

    Slit 1: two states on A and one on B. Slit 2: two states on D and one on C. K is the
    p = 1/4 three-state projector conjugated by ``slit1_relabeling``.
    """
    d = UNIT_CAVITIES
    x = [h2_vector(d, a=1.0), h2_vector(d, a=1.0), h2_vector(d, b=1.0)]
    y = [h2_vector(d, d=1.0), h2_vector(d, d=1.0), h2_vector(d, c=1.0)]
    psi = assemble_state(x, y, d, strict=True)
    W = slit1_relabeling()
    K = W @ dim6_matrix(0.25, 0.0) @ W.conj().T
    instance = ProblemInstance(psi=psi, K=K, family=FamilyTag.SEC6.value, params={"p": 0.25, "theta": 0.0})
    return Sec6Setup(instance=instance, inference=dict(INFERENCE_MAP))


# ---------------------------------------------------------------------------
# Slit exchange
# ---------------------------------------------------------------------------

MIRROR_ORDER = ("C", "D", "A", "B")


def mirror_instance(instance: ProblemInstance) -> ProblemInstance:
    """
    Exchange the slits and relabel cavities A↔C, B↔D.

    R = A + C is preserved and S becomes 1 − S, so a solution maps to a solution; a
    case-(b) state becomes case (c). Applying the map twice gives back the input.
    """
    psi = permute_cavities(instance.psi, MIRROR_ORDER, swap_slits=True)
    swap = instance.layout.slit_swap
    K = None if instance.K is None else swap @ instance.K @ swap
    detector = None
    if instance.detector is not None:
        old = instance.decomp
        columns = np.concatenate([np.arange(old.dim2)[old.block(name)] for name in MIRROR_ORDER])
        detector = instance.detector[np.ix_(columns, columns)]
    family = instance.family[: -len("-mirror")] if instance.family.endswith("-mirror") else f"{instance.family}-mirror"
    return ProblemInstance(psi=psi, K=K, detector=detector, family=family, params=dict(instance.params))


# ---------------------------------------------------------------------------
# One state per slit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InfeasibilityCertificate:
    """
    Evidence that no solution exists with one state per slit.

    ``exact_infeasible`` comes from the algebraic argument; the stochastic fields come
    from running the full search on random detector-compatible states. ``best_residual``
    is taken over the full-support trials only; ``outcomes`` counts how every searched
    state ended and ``failed_conditions`` which conditions rejected the projectors found.
    """

    exact_infeasible: bool
    exact_steps: List[str]
    trials: int
    seed: int
    solutions_found: int
    best_residual: float
    rejected_trials: int
    sparse_trials: int = 0
    outcomes: Dict[str, int] = field(default_factory=dict)
    failed_conditions: Dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "exact_infeasible": self.exact_infeasible,
            "exact_steps": list(self.exact_steps),
            "trials": self.trials,
            "seed": self.seed,
            "solutions_found": self.solutions_found,
            "best_residual": self.best_residual,
            "rejected_trials": self.rejected_trials,
            "sparse_trials": self.sparse_trials,
            "outcomes": dict(self.outcomes),
            "failed_conditions": dict(self.failed_conditions),
        }


def _exact_one_state_argument() -> Tuple[bool, List[str]]:
    """
    With K = [[p, u], [ū, q]] and u ≠ 0, the off-diagonal part of K M = M R reads
    u γ = u δ = 0 and ū a = ū b = 0. Its coefficient matrix in (a, b, γ, δ) has full
    rank for every u ≠ 0, so the only admissible state is zero.
    """
    decomp = UNIT_CAVITIES
    R = decomp.R
    unknowns = (("x", "A"), ("x", "B"), ("y", "C"), ("y", "D"))
    ranks = []
    for u in (1.0, 1j, 0.3 * np.exp(0.25j * np.pi), -2.0 + 0.5j):
        K = np.array([[0.5, u], [np.conj(u), 0.5]], dtype=np.complex128)
        columns = []
        for side, cavity in unknowns:
            M = np.zeros((2, decomp.dim2), dtype=np.complex128)
            M[0 if side == "x" else 1, decomp.block(cavity)] = 1.0
            defect = K @ M - M @ R
            off_block = np.concatenate([defect[0, [2, 3]], defect[1, [0, 1]]])
            columns.append(off_block)
        ranks.append(np.linalg.matrix_rank(np.array(columns).T))
    infeasible = all(rank == len(unknowns) for rank in ranks)
    steps = [
        "slit-crossing block of K is nonzero (u ≠ 0) because [L, K] ≠ 0",
        "u γ = 0 and u δ = 0 force the slit-2 detector components to vanish",
        "ū a = 0 and ū b = 0 force the slit-1 detector components to vanish",
        "the state is therefore zero" if infeasible else "the linear system is singular for some u",
    ]
    return infeasible, steps


# Cavities left empty in sparse trials. (B, D) puts Ψ inside Y's range and (A, C) outside
# it, so GΨ is pinned to Ψ or 0; (B, C) and (A, D) force K = L and K = 1 − L.
SPARSE_PATTERNS: Tuple[Tuple[str, str], ...] = (("B", "D"), ("A", "C"), ("B", "C"), ("A", "D"))


def random_compatible_state(rng: np.random.Generator, empty: Sequence[str] = ()) -> BlockState:
    """
    One state per slit with moduli in [0.5, 1] and uniform phases.

    Components in the cavities listed in ``empty`` are set to zero; all others are nonzero.
    """
    moduli = rng.uniform(0.5, 1.0, size=4)
    phases = np.exp(2j * np.pi * rng.random(4))
    a, b, gamma, delta = (0.0 if cavity in empty else z for cavity, z in zip(CAVITIES, moduli * phases))
    d = UNIT_CAVITIES
    return assemble_state([h2_vector(d, a=a, b=b)], [h2_vector(d, c=gamma, d=delta)], d, strict=True)


def _outcome(report: SolverReport) -> str:
    if report.instances:
        return "solution"
    reason = report.rejected_reason or ""
    if reason.startswith("DegenerateStateError"):
        return "degenerate"
    if reason.startswith("EmptySubspaceError"):
        return "empty_subspace"
    return "checker_rejected" if report.discarded else "no_projector"


def dim2_infeasibility(
    trials: int,
    seed: int,
    states: Optional[Sequence[BlockState]] = None,
    opts: Optional[SolverOptions] = None,
    sparse_fraction: float = 0.25,
) -> InfeasibilityCertificate:
    """
    Certify that one state per slit admits no solution.

    Args:
        trials: Number of random states searched.
        seed: Seed of the state generator (the solver uses it too).
        states: Extra explicit states to search; incompatible ones are counted as
            rejected and not searched.
        opts: Solver options.
        sparse_fraction: Share of the trials drawn with one empty cavity per slit,
            cycling through ``SPARSE_PATTERNS``.
    """
    if trials < 1:
        raise InputError("trials must be at least 1")
    if not 0.0 <= sparse_fraction <= 1.0:
        raise ParameterRangeError(f"sparse_fraction must lie in [0, 1], got {sparse_fraction}")
    exact, steps = _exact_one_state_argument()
    opts = opts or SolverOptions.from_config(seed=seed)
    rng = np.random.default_rng(seed)

    n_sparse = int(sparse_fraction * trials)
    candidates = [
        (True, random_compatible_state(rng, SPARSE_PATTERNS[i % len(SPARSE_PATTERNS)]))
        for i in range(n_sparse)
    ]
    candidates += [(False, random_compatible_state(rng)) for _ in range(trials - n_sparse)]
    rejected = 0
    for state in states or ():
        if state.layout.m != 1 or not compatibility_report(state).holds:
            rejected += 1
            continue
        candidates.append((False, state))

    found = 0
    best = float("inf")
    outcomes: Dict[str, int] = {}
    failed: Dict[str, int] = {}
    for sparse, state in candidates:
        report = search_solutions(state, opts=opts)
        found += len(report.instances)
        if not sparse:
            best = min(best, report.best_residual)
        outcome = _outcome(report)
        outcomes[outcome] = outcomes.get(outcome, 0) + 1
        for name, count in report.discarded.items():
            failed[name] = failed.get(name, 0) + count
    logger.info(
        "one-state search: %d states (%d sparse), %d solutions, best residual %.3e",
        len(candidates), n_sparse, found, best,
    )
    return InfeasibilityCertificate(
        exact_infeasible=exact,
        exact_steps=steps,
        trials=trials,
        seed=seed,
        solutions_found=found,
        best_residual=best,
        rejected_trials=rejected,
        sparse_trials=n_sparse,
        outcomes=outcomes,
        failed_conditions=failed,
    )


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

def build_family(name: str, **params) -> ProblemInstance:
    """
    Build a family member by CLI name.

    Recognized keyword arguments: ``q``, ``p``, ``theta``, ``lam``, ``mu``, ``seed`` and
    ``amplitudes``; each family picks the ones it uses.
    """
    theta = params.get("theta") or 0.0
    amplitudes = params.get("amplitudes")
    builders: Dict[str, Callable[[], ProblemInstance]] = {
        FamilyTag.DIM4_SYM.value: lambda: family_dim4_sym(_required(params, "q"), theta, amplitudes),
        FamilyTag.DIM4_MU0.value: lambda: family_dim4_mu0(params.get("lam", 1.0), _required(params, "p"), theta, amplitudes),
        FamilyTag.DIM4_GENERAL.value: lambda: family_dim4_general(
            params.get("lam", 1.0), params.get("mu", 1.0), params.get("seed"), amplitudes
        ),
        FamilyTag.DIM6.value: lambda: family_dim6(_required(params, "p"), theta, amplitudes),
        FamilyTag.ESW.value: lambda: esw_instance().instance,
        FamilyTag.SEC6.value: lambda: sec6_instance().instance,
    }
    if name not in builders:
        raise InputError(f"unknown family {name!r}; choose from {', '.join(builders)}")
    return builders[name]()


def _required(params: Dict[str, Any], key: str) -> float:
    if params.get(key) is None:
        raise InputError(f"parameter --{key} is required for this family")
    return float(params[key])
