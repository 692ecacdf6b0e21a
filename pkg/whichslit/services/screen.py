"""
Discretized detection screen.

The screen is a unitary propagator U on H1 followed by a partition of the post-propagation
basis into bins Δ. Each bin has the H1 projector ``J(Δ) = U† P_Δ U`` and the product-space
projector ``F(Δ) = J(Δ) ⊗ 1``. Any unitary with [L, J] ≠ 0 is admissible; the default
propagator is the unitary discrete Fourier matrix.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import dft

from whichslit.config import config
from whichslit.exceptions import DegenerateScreenError, DimensionError, InputError
from whichslit.operators.algebra import as_square, check_dimension, frobenius, tensor_product

logger = logging.getLogger(__name__)

SCREEN_KINDS = ("dft", "identity")


@dataclass(frozen=True)
class ScreenModel:
    """
    Propagator and bin partition on H1.

    Attributes:
        dim1: Dimension of H1.
        propagator: Unitary dim1 × dim1 matrix.
        bins: Disjoint index tuples covering ``range(dim1)``.
        kind: Name of the propagator family.
    """

    dim1: int
    propagator: np.ndarray = field(repr=False)
    bins: Tuple[Tuple[int, ...], ...]
    kind: str = "dft"
    _bin_projectors: Tuple[np.ndarray, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        U = as_square(self.propagator, "propagator")
        if U.shape[0] != self.dim1:
            raise DimensionError(f"propagator must be {self.dim1}×{self.dim1}, got {U.shape}")
        gap = frobenius(U.conj().T @ U - np.eye(self.dim1))
        if gap > config.tolerance("hermiticity"):
            raise InputError(f"propagator is not unitary (residual {gap:.3e})", residual=gap)
        covered = sorted(index for group in self.bins for index in group)
        if covered != list(range(self.dim1)) or any(len(group) == 0 for group in self.bins):
            raise InputError("screen bins must partition the propagated basis into non-empty sets")
        U = U.copy()
        U.flags.writeable = False
        object.__setattr__(self, "propagator", U)
        object.__setattr__(self, "_bin_projectors", tuple(_bin_projector(U, group) for group in self.bins))

    @property
    def n_bins(self) -> int:
        return len(self.bins)

    def J(self, index: int) -> np.ndarray:
        """H1 projector of bin ``index`` (read-only)."""
        return self._bin_projectors[index]

    def F(self, index: int, dim2: int) -> np.ndarray:
        """Product-space projector ``J ⊗ 1`` of bin ``index`` on H1 ⊗ C^dim2."""
        J = self.J(index)
        return _lift(J.tobytes(), self.dim1, dim2)

    def projectors(self) -> List[np.ndarray]:
        return [self.J(index) for index in range(self.n_bins)]

    def cross_terms(self, first: int = 0, second: Optional[int] = None) -> np.ndarray:
        """Per-bin ``Re⟨e_first|J(Δ) e_second⟩``; ``second`` defaults to the first slit-2 state."""
        second = self.dim1 // 2 if second is None else second
        return np.array([self.J(index)[first, second].real for index in range(self.n_bins)])


def _bin_projector(U: np.ndarray, group: Tuple[int, ...]) -> np.ndarray:
    rows = U[list(group)]
    J = rows.conj().T @ rows
    J.flags.writeable = False
    return J


@lru_cache(maxsize=256)
def _lift(projector: bytes, dim1: int, dim2: int) -> np.ndarray:
    """``J ⊗ 1`` for the H1 projector serialized in ``projector``; shared and read-only."""
    J = np.frombuffer(projector, dtype=np.complex128).reshape(dim1, dim1)
    lifted = tensor_product(J, np.eye(dim2))
    lifted.flags.writeable = False
    return lifted


def _propagator(kind: str, dim1: int) -> np.ndarray:
    if kind == "dft":
        return dft(dim1, scale="sqrtn")
    if kind == "identity":
        return np.eye(dim1, dtype=np.complex128)
    raise InputError(f"unknown screen kind {kind!r}; choose from {', '.join(SCREEN_KINDS)}")


def build_screen(dim1: int, kind: Optional[str] = None, n_bins: Optional[int] = None) -> ScreenModel:
    """
    Build and validate a screen.

    Args:
        dim1: Dimension of H1; must be even.
        kind: Propagator family, ``"dft"`` (default from config) or ``"identity"``.
        n_bins: Number of contiguous, equally sized bins; singletons when None.

    Raises:
        InputError: ``n_bins`` does not divide ``dim1``.
        DegenerateScreenError: No bin shows a visible cross term between e_1 and r_1.
    """
    settings = config.get_service_config("screen")
    kind = kind or settings.get("kind", "dft")
    if dim1 < 2 or dim1 % 2:
        raise DimensionError(f"screen needs an even H1 dimension, got {dim1}")
    check_dimension(dim1, "screen")
    n_bins = dim1 if n_bins is None else int(n_bins)
    if n_bins < 1 or dim1 % n_bins:
        raise InputError(f"{n_bins} bins do not divide dimension {dim1}")
    width = dim1 // n_bins
    bins = tuple(tuple(range(start, start + width)) for start in range(0, dim1, width))

    screen = ScreenModel(dim1=dim1, propagator=_propagator(kind, dim1), bins=bins, kind=kind)
    threshold = float(settings.get("cross_term_threshold", 1e-3))
    visible = float(np.max(np.abs(screen.cross_terms())))
    if visible <= threshold:
        raise DegenerateScreenError(
            f"{kind} screen with {n_bins} bins shows no cross term above {threshold:g} (max {visible:.3e})",
            residual=visible,
        )
    logger.debug("built %s screen: dim1=%d, %d bins, max cross term %.3e", kind, dim1, n_bins, visible)
    return screen
