"""
Dense complex linear algebra used by every other module.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``. The helpers here
validate shape and finiteness, enforce the configured dimension guard, and provide the
handful of operator-level primitives the constraint problem is written in.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from whichslit.config import config
from whichslit.exceptions import (
    DimensionError,
    DimensionOverflowError,
    InputError,
    NonIntegralTraceError,
    NotAProjectorError,
    ZeroStateError,
)

logger = logging.getLogger(__name__)


def as_matrix(data, name: str = "matrix") -> np.ndarray:
    """
    Convert ``data`` into a finite 2-D complex array.

    Args:
        data: Anything ``numpy.asarray`` accepts.
        name: Label used in error messages.

    Returns:
        A ``complex128`` array of shape (rows, cols).
    """
    matrix = np.asarray(data, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] == 0 or matrix.shape[1] == 0:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise InputError(f"{name} has non-finite entries")
    check_dimension(max(matrix.shape), name)
    return matrix


def as_vector(data, name: str = "vector") -> np.ndarray:
    """Convert ``data`` into a finite 1-D complex array."""
    vector = np.asarray(data, dtype=np.complex128)
    if vector.ndim != 1 or vector.size == 0:
        raise DimensionError(f"{name} must be a non-empty 1-D array, got shape {vector.shape}")
    if not np.all(np.isfinite(vector)):
        raise InputError(f"{name} has non-finite entries")
    check_dimension(vector.size, name)
    return vector


def as_square(data, name: str = "matrix") -> np.ndarray:
    matrix = as_matrix(data, name)
    if matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {matrix.shape}")
    return matrix


def check_dimension(size: int, name: str = "operand"):
    """Raise ``DimensionOverflowError`` when ``size`` exceeds the configured maximum."""
    limit = config.max_dimension()
    if size > limit:
        raise DimensionOverflowError(f"{name} dimension {size} exceeds the configured maximum {limit}")


def frobenius(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix))


def tensor_product(a, b) -> np.ndarray:
    """
    Kronecker product ``a ⊗ b``.

    Block (i, j) of the result is ``a[i, j] * b``, which matches the index convention
    ``i * dim(b) + k`` used for states on the product space.

    Raises:
        DimensionOverflowError: If either side of the result exceeds the maximum dimension.
    """
    a = as_matrix(a, "left factor")
    b = as_matrix(b, "right factor")
    check_dimension(a.shape[0] * b.shape[0], "tensor product")
    check_dimension(a.shape[1] * b.shape[1], "tensor product")
    return np.kron(a, b)


def commutator(a, b) -> np.ndarray:
    """Return ``ab - ba`` for square operands of equal size."""
    a = as_square(a, "left operand")
    b = as_square(b, "right operand")
    if a.shape != b.shape:
        raise DimensionError(f"cannot commute {a.shape} with {b.shape}")
    return a @ b - b @ a


@dataclass(frozen=True)
class ProjectorReport:
    """Outcome of a projector test with both residuals."""

    is_projector: bool
    hermiticity_residual: float
    idempotence_residual: float

    def __bool__(self) -> bool:
        return self.is_projector


def is_projector(matrix, tol: Optional[float] = None) -> ProjectorReport:
    """
    Test whether ``matrix`` is an orthogonal projector.

    Args:
        matrix: Square matrix.
        tol: Bound applied to both residuals. When None the configured hermiticity and
            idempotence tolerances are used.

    Returns:
        A ``ProjectorReport`` that is truthy iff ``‖M − M†‖_F`` and ``‖M² − M‖_F`` are
        both within tolerance.
    """
    m = as_square(matrix)
    herm_tol = config.tolerance("hermiticity") if tol is None else tol
    idem_tol = config.tolerance("idempotence") if tol is None else tol
    hermiticity = frobenius(m - m.conj().T)
    idempotence = frobenius(m @ m - m)
    return ProjectorReport(
        is_projector=hermiticity <= herm_tol and idempotence <= idem_tol,
        hermiticity_residual=hermiticity,
        idempotence_residual=idempotence,
    )


def projector_rank(matrix, tol: Optional[float] = None) -> int:
    """
    Rank of a verified projector, taken as its rounded trace.

    Raises:
        NotAProjectorError: If ``matrix`` fails ``is_projector``.
        NonIntegralTraceError: If the trace is further than the integrality tolerance
            from an integer.
    """
    report = is_projector(matrix, tol)
    if not report:
        raise NotAProjectorError(
            "rank requested for a non-projector "
            f"(hermiticity {report.hermiticity_residual:.3e}, idempotence {report.idempotence_residual:.3e})",
            residual=max(report.hermiticity_residual, report.idempotence_residual),
        )
    trace = float(np.real(np.trace(as_square(matrix))))
    rank = int(round(trace))
    gap = abs(trace - rank)
    if gap > config.tolerance("trace_integrality"):
        raise NonIntegralTraceError(f"trace {trace!r} is not integral", residual=gap)
    return rank


def normalize(vector) -> np.ndarray:
    v = as_vector(vector)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ZeroStateError("cannot normalize the zero vector")
    return v / norm


def ket_projector(vector) -> np.ndarray:
    """Rank-one projector ``|v⟩⟨v|`` onto the normalized ``vector``."""
    v = normalize(vector)
    return np.outer(v, v.conj())


def hermitian_basis(n: int) -> np.ndarray:
    """
    Orthonormal basis of the real vector space of n×n Hermitian matrices.

    The basis is ordered as the diagonal units, then the symmetric pairs
    ``(E_ij + E_ji)/√2`` and the antisymmetric pairs ``i(E_ij − E_ji)/√2`` for i < j.
    Orthonormality refers to ``Re tr(A† B)``.

    Returns:
        Array of shape (n², n, n).
    """
    basis = np.zeros((n * n, n, n), dtype=np.complex128)
    index = 0
    for i in range(n):
        basis[index, i, i] = 1.0
        index += 1
    scale = 1.0 / np.sqrt(2.0)
    for i in range(n):
        for j in range(i + 1, n):
            basis[index, i, j] = scale
            basis[index, j, i] = scale
            index += 1
            basis[index, i, j] = 1j * scale
            basis[index, j, i] = -1j * scale
            index += 1
    return basis
