"""
Screen statistics: quantum prediction, classical mixture, interference terms and the
joint cavity × bin table.

States may be passed as ``BlockState`` or as flat product-space vectors. Operators E and
Z are product-space projectors. All per-bin results are ``numpy`` arrays of length
``screen.n_bins``.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from whichslit.config import config
from whichslit.exceptions import DegenerateSplitError, DimensionError, NonCommutingError
from whichslit.operators.algebra import as_square, as_vector, commutator, frobenius
from whichslit.operators.layout import CAVITIES, BlockState
from whichslit.services.screen import ScreenModel

logger = logging.getLogger(__name__)

StateLike = Union[BlockState, np.ndarray]


def _vector(psi: StateLike) -> np.ndarray:
    return psi.vector if isinstance(psi, BlockState) else as_vector(psi, "state")


def _dim2(screen: ScreenModel, vector: np.ndarray) -> int:
    if vector.size % screen.dim1:
        raise DimensionError(f"state of size {vector.size} does not factor over a screen of dimension {screen.dim1}")
    return vector.size // screen.dim1


def _bin_expectations(left: np.ndarray, op: Optional[np.ndarray], right: np.ndarray, screen: ScreenModel) -> np.ndarray:
    """``⟨left| op F(Δ) right⟩`` for every bin (op = identity when None)."""
    dim2 = _dim2(screen, right)
    bra = left if op is None else op.conj().T @ left
    return np.array([np.vdot(bra, screen.F(index, dim2) @ right) for index in range(screen.n_bins)])


def _check_selector(Z, screen: ScreenModel, dim: int) -> np.ndarray:
    Z = as_square(Z, "selector")
    if Z.shape[0] != dim:
        raise DimensionError(f"selector must be {dim}×{dim}, got {Z.shape}")
    dim2 = dim // screen.dim1
    tol = config.tolerance("commutation")
    gap = max(frobenius(commutator(Z, screen.F(index, dim2))) for index in range(screen.n_bins))
    if gap > tol:
        raise NonCommutingError(f"selector does not commute with the screen (‖[Z, F]‖ = {gap:.3e})", residual=gap)
    return Z


@dataclass(frozen=True)
class SplitState:
    """Ψ₁ = EΨ and Ψ₂ = E′Ψ with their weights π(1), π(2)."""

    psi1: np.ndarray
    psi2: np.ndarray
    pi1: float
    pi2: float

    @property
    def degenerate(self) -> bool:
        eps = np.finfo(float).eps
        return self.pi1 <= eps or self.pi2 <= eps


def split_state(psi: StateLike, E) -> SplitState:
    vector = _vector(psi)
    E = as_square(E, "E")
    if E.shape[0] != vector.size:
        raise DimensionError(f"E must be {vector.size}×{vector.size}, got {E.shape}")
    psi1 = E @ vector
    psi2 = vector - psi1
    return SplitState(psi1, psi2, float(np.vdot(psi1, psi1).real), float(np.vdot(psi2, psi2).real))


def screen_distribution(psi: StateLike, screen: ScreenModel) -> np.ndarray:
    """Quantum prediction ``⟨Ψ|F(Δ)Ψ⟩``."""
    vector = _vector(psi)
    return _bin_expectations(vector, None, vector, screen).real


def selected_distribution(psi: StateLike, Z, screen: ScreenModel) -> np.ndarray:
    """
    Joint probability ``⟨Ψ|ZF(Δ)Ψ⟩`` of landing in Δ with the selector Z firing.

    Raises:
        NonCommutingError: Z fails to commute with some F(Δ).
    """
    vector = _vector(psi)
    Z = _check_selector(Z, screen, vector.size)
    return _bin_expectations(vector, Z, vector, screen).real


def classical_distribution(psi: StateLike, E, screen: ScreenModel, Z=None) -> np.ndarray:
    """
    Mixture of the two slit branches, ``Σ_i ⟨Ψ_i|Z F(Δ) Ψ_i⟩``.

    With Z absent this is the distribution an observer would predict if the particle
    went through a definite slit with probabilities π(1), π(2).
    """
    split = split_state(psi, E)
    Z = None if Z is None else _check_selector(Z, screen, split.psi1.size)
    total = _bin_expectations(split.psi1, Z, split.psi1, screen) + _bin_expectations(split.psi2, Z, split.psi2, screen)
    return total.real


def interference_term(psi: StateLike, E, screen: ScreenModel, Z=None) -> np.ndarray:
    """
    Per-bin cross term ``2 Re⟨Ψ₁|Z F(Δ) Ψ₂⟩`` between the two slit branches.

    Raises:
        NonCommutingError: Z fails to commute with some F(Δ).
    """
    split = split_state(psi, E)
    Z = None if Z is None else _check_selector(Z, screen, split.psi1.size)
    return 2.0 * _bin_expectations(split.psi1, Z, split.psi2, screen).real


def conditional_screen(
    psi: StateLike,
    E,
    screen: ScreenModel,
    allow_degenerate: bool = False,
) -> Tuple[Optional[np.ndarray], Optional[np.ndarray]]:
    """
    Screen distributions conditioned on each slit, ``⟨Ψ_i|F(Δ)Ψ_i⟩ / π(i)``.

    Args:
        allow_degenerate: Return None for a branch of zero weight instead of raising.

    Raises:
        DegenerateSplitError: A branch has zero weight and ``allow_degenerate`` is off.
    """
    split = split_state(psi, E)
    if split.degenerate and not allow_degenerate:
        raise DegenerateSplitError(f"slit split is trivial (pi(1) = {split.pi1:.3e})", residual=min(split.pi1, split.pi2))

    eps = np.finfo(float).eps
    given = []
    for branch, weight in ((split.psi1, split.pi1), (split.psi2, split.pi2)):
        if weight <= eps:
            given.append(None)
        else:
            given.append(_bin_expectations(branch, None, branch, screen).real / weight)
    return given[0], given[1]


@dataclass(frozen=True)
class JointDistribution:
    """
    ``P(cavity, Δ) = ⟨Ψ|(1 ⊗ Π_cavity) F(Δ) Ψ⟩`` with rows in cavity order A, B, C, D.
    """

    probabilities: np.ndarray
    cavities: Tuple[str, ...] = CAVITIES

    @property
    def cavity_marginal(self) -> np.ndarray:
        return self.probabilities.sum(axis=1)

    @property
    def screen_marginal(self) -> np.ndarray:
        return self.probabilities.sum(axis=0)


def joint_outcome_distribution(source, screen: ScreenModel) -> JointDistribution:
    """
    Joint distribution of the cavity that clicks and the bin that is hit.

    ``source`` is a ``ProblemInstance`` or a bare ``BlockState``.

    Computed on the coefficient matrix M as ``Σ_k (M† J(Δ) M)_kk`` over the cavity block.
    """
    psi: BlockState = getattr(source, "psi", source)
    if psi.layout.dim1 != screen.dim1:
        raise DimensionError(f"state has dim1={psi.layout.dim1}, screen has {screen.dim1}")
    M = psi.matrix
    table = np.zeros((len(CAVITIES), screen.n_bins))
    for index in range(screen.n_bins):
        weights = np.einsum("ik,ij,jk->k", M.conj(), screen.J(index), M).real
        for row, cavity in enumerate(CAVITIES):
            table[row, index] = weights[psi.decomp.block(cavity)].sum()
    return JointDistribution(probabilities=table)
