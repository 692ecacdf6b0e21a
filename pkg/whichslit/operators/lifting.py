"""Lift factor operators L, K, S, R to the product space."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from whichslit.exceptions import DimensionError
from whichslit.operators.algebra import as_square, tensor_product
from whichslit.operators.layout import CavityDecomposition, SlitLayout


@dataclass(frozen=True)
class LiftedOperators:
    """
    Product-space projectors of the constraint problem.

    ``E = L⊗1`` (which slit), ``T = 1⊗S`` (WS detector), ``Y = 1⊗R`` (K detector) and
    ``G = K⊗1`` (the incompatible property). ``*_c`` are the complements ``1 − X``.
    ``G`` and ``G_c`` are None for instances without K.
    """

    E: np.ndarray
    E_c: np.ndarray
    T: np.ndarray
    T_c: np.ndarray
    Y: np.ndarray
    Y_c: np.ndarray
    G: Optional[np.ndarray] = None
    G_c: Optional[np.ndarray] = None


def lift_operators(
    layout: SlitLayout,
    decomp: CavityDecomposition,
    K=None,
    detector=None,
) -> LiftedOperators:
    """
    Build E, T, Y, G and their complements.

    Args:
        layout: Slit layout supplying L.
        decomp: Cavity decomposition supplying S = A + B and R = A + C.
        K: Optional dim1 × dim1 projector.
        detector: Optional dim2 × dim2 matrix replacing R, for detectors that are not
            built from the decomposition.

    Raises:
        DimensionError: K or the detector override has the wrong size.
    """
    eye1 = np.eye(layout.dim1, dtype=np.complex128)
    eye2 = np.eye(decomp.dim2, dtype=np.complex128)
    identity = np.eye(layout.dim1 * decomp.dim2, dtype=np.complex128)

    R = decomp.R
    if detector is not None:
        R = as_square(detector, "detector")
        if R.shape[0] != decomp.dim2:
            raise DimensionError(f"detector must be {decomp.dim2}×{decomp.dim2}, got {R.shape}")

    E = tensor_product(layout.L, eye2)
    T = tensor_product(eye1, decomp.S)
    Y = tensor_product(eye1, R)

    G = G_c = None
    if K is not None:
        K = as_square(K, "K")
        if K.shape[0] != layout.dim1:
            raise DimensionError(f"K must be {layout.dim1}×{layout.dim1}, got {K.shape}")
        G = tensor_product(K, eye2)
        G_c = identity - G

    return LiftedOperators(
        E=E, E_c=identity - E, T=T, T_c=identity - T, Y=Y, Y_c=identity - Y, G=G, G_c=G_c
    )
