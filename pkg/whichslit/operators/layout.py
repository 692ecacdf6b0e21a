"""
Block layout of the two-factor Hilbert space H1 ⊗ H2.

H1 carries the particle: its basis is ordered slit-1 states e_1..e_m followed by slit-2
states r_1..r_m, so ``L = diag(1_m, 0_m)`` projects onto slit 1. H2 carries the detector
cavities: its basis is ordered A-block, B-block, C-block, D-block. A product-space index
is ``i * dim2 + k`` with ``i`` indexing H1 and ``k`` indexing H2, so a state splits into
x_1..x_m (slit 1) followed by y_1..y_m (slit 2), each an H2 vector.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from whichslit.config import config
from whichslit.exceptions import DimensionError, IncompatibleStateError, InputError, ZeroStateError
from whichslit.operators.algebra import as_vector, check_dimension

logger = logging.getLogger(__name__)

CAVITIES: Tuple[str, ...] = ("A", "B", "C", "D")


@dataclass(frozen=True)
class SlitLayout:
    """Symmetric slit layout with ``m`` basis states per slit."""

    m: int

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise InputError(f"slit rank m must be a positive integer, got {self.m!r}")

    @property
    def dim1(self) -> int:
        return 2 * self.m

    @property
    def L(self) -> np.ndarray:
        """The which-slit projector on H1."""
        return np.diag(np.r_[np.ones(self.m), np.zeros(self.m)]).astype(np.complex128)

    @property
    def slit_swap(self) -> np.ndarray:
        """Permutation matrix exchanging e_j with r_j."""
        swap = np.zeros((self.dim1, self.dim1), dtype=np.complex128)
        for j in range(self.m):
            swap[j, self.m + j] = 1.0
            swap[self.m + j, j] = 1.0
        return swap


@dataclass(frozen=True)
class CavityDecomposition:
    """
    Orthogonal decomposition H2 = A ⊕ B ⊕ C ⊕ D given by block ranks.

    S = A + B is the detector property correlated with slit 1 and R = A + C is the
    detector property correlated with K.
    """

    rA: int
    rB: int
    rC: int
    rD: int

    def __post_init__(self):
        for name, rank in zip(CAVITIES, self.ranks):
            if not isinstance(rank, (int, np.integer)) or rank < 0:
                raise InputError(f"rank of cavity {name} must be a non-negative integer, got {rank!r}")
        if self.dim2 == 0:
            raise InputError("cavity decomposition has total rank zero")

    @property
    def ranks(self) -> Tuple[int, int, int, int]:
        return (self.rA, self.rB, self.rC, self.rD)

    @property
    def dim2(self) -> int:
        return sum(self.ranks)

    def block(self, cavity: str) -> slice:
        """Index range of ``cavity`` inside H2."""
        if cavity not in CAVITIES:
            raise InputError(f"unknown cavity {cavity!r}")
        start = 0
        for name, rank in zip(CAVITIES, self.ranks):
            if name == cavity:
                return slice(start, start + rank)
            start += rank
        raise AssertionError("unreachable")

    def projector(self, cavity: str) -> np.ndarray:
        diagonal = np.zeros(self.dim2)
        diagonal[self.block(cavity)] = 1.0
        return np.diag(diagonal).astype(np.complex128)

    @property
    def S(self) -> np.ndarray:
        return self.projector("A") + self.projector("B")

    @property
    def R(self) -> np.ndarray:
        return self.projector("A") + self.projector("C")

    def to_dict(self) -> Dict[str, int]:
        return {"rA": self.rA, "rB": self.rB, "rC": self.rC, "rD": self.rD}


def h2_vector(decomp: CavityDecomposition, a=None, b=None, c=None, d=None) -> np.ndarray:
    """
    Build an H2 vector from per-cavity components.

    Each argument is a scalar (for a rank-one cavity) or a sequence of length equal to
    that cavity's rank; omitted cavities are zero.
    """
    vector = np.zeros(decomp.dim2, dtype=np.complex128)
    for cavity, value in zip(CAVITIES, (a, b, c, d)):
        if value is None:
            continue
        block = decomp.block(cavity)
        part = np.atleast_1d(np.asarray(value, dtype=np.complex128))
        width = block.stop - block.start
        if part.size != width:
            raise DimensionError(f"cavity {cavity} has rank {width}, got {part.size} components")
        vector[block] = part
    return vector


@dataclass(frozen=True)
class BlockState:
    """
    A normalized state on H1 ⊗ H2 stored in block layout.

    ``vector`` is read-only; use the ``x``/``y`` accessors for the per-slit H2 components.
    """

    layout: SlitLayout
    decomp: CavityDecomposition
    vector: np.ndarray = field(repr=False)

    def __post_init__(self):
        vector = as_vector(self.vector, "state")
        expected = self.layout.dim1 * self.decomp.dim2
        if vector.size != expected:
            raise DimensionError(f"state has {vector.size} entries, layout expects {expected}")
        norm = np.linalg.norm(vector)
        if abs(norm - 1.0) > config.tolerance("equality") * max(1.0, np.sqrt(vector.size)):
            raise InputError(f"state is not normalized (norm {norm!r})")
        vector = vector.copy()
        vector.flags.writeable = False
        object.__setattr__(self, "vector", vector)

    @classmethod
    def normalized(cls, layout: SlitLayout, decomp: CavityDecomposition, vector) -> "BlockState":
        """Normalize ``vector`` and wrap it."""
        v = as_vector(vector, "state")
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ZeroStateError("state vector is zero")
        return cls(layout, decomp, v / norm)

    @property
    def dim(self) -> int:
        return self.vector.size

    @property
    def matrix(self) -> np.ndarray:
        """The state as a dim1 × dim2 coefficient matrix."""
        return self.vector.reshape(self.layout.dim1, self.decomp.dim2)

    @property
    def x(self) -> List[np.ndarray]:
        return [row.copy() for row in self.matrix[: self.layout.m]]

    @property
    def y(self) -> List[np.ndarray]:
        return [row.copy() for row in self.matrix[self.layout.m:]]

    def component(self, side: str, index: int, cavity: str) -> np.ndarray:
        """Components of x_index (side "x") or y_index (side "y") inside ``cavity``."""
        rows = self.x if side == "x" else self.y
        return rows[index][self.decomp.block(cavity)]

    def masked(self, x_cavities: Sequence[str], y_cavities: Sequence[str]) -> np.ndarray:
        """Copy of the vector keeping only the listed cavities on each side."""
        m = self.layout.m
        keep = np.zeros_like(self.matrix)
        for cavity in x_cavities:
            block = self.decomp.block(cavity)
            keep[:m, block] = self.matrix[:m, block]
        for cavity in y_cavities:
            block = self.decomp.block(cavity)
            keep[m:, block] = self.matrix[m:, block]
        return keep.reshape(-1)

    @property
    def forbidden_norm(self) -> float:
        """Norm of the components a detector-compatible state must not have."""
        forbidden = self.masked(("C", "D"), ("A", "B"))
        return float(np.linalg.norm(forbidden))


@dataclass(frozen=True)
class CompatibilityReport:
    holds: bool
    residual: float


def compatibility_report(state: BlockState, tol: Optional[float] = None) -> CompatibilityReport:
    """Check c_j = d_j = 0 and α_k = β_k = 0 for all j, k."""
    tol = config.tolerance("equality") if tol is None else tol
    residual = state.forbidden_norm
    return CompatibilityReport(holds=residual <= tol, residual=residual)


def assemble_state(
    x: Sequence,
    y: Sequence,
    decomp: CavityDecomposition,
    check_compatible: bool = True,
    strict: bool = False,
) -> BlockState:
    """
    Assemble a normalized block state from its slit-1 and slit-2 components.

    Args:
        x: The m H2 vectors x_1..x_m multiplying e_1..e_m.
        y: The m H2 vectors y_1..y_m multiplying r_1..r_m.
        decomp: Cavity decomposition fixing dim2.
        check_compatible: Check the detector-compatible form after assembly.
        strict: Raise instead of logging when that check fails.

    Returns:
        The normalized ``BlockState``.

    Raises:
        DimensionError: Component counts or lengths do not match.
        ZeroStateError: All components are zero.
        IncompatibleStateError: ``strict`` is set and forbidden components are present.
    """
    if len(x) != len(y) or len(x) == 0:
        raise DimensionError(f"need the same positive number of x and y components, got {len(x)} and {len(y)}")
    layout = SlitLayout(len(x))
    check_dimension(layout.dim1 * decomp.dim2, "state")
    rows = []
    for label, parts in (("x", x), ("y", y)):
        for j, part in enumerate(parts):
            row = np.atleast_1d(np.asarray(part, dtype=np.complex128))
            if row.shape != (decomp.dim2,):
                raise DimensionError(f"{label}_{j + 1} must have {decomp.dim2} entries, got shape {row.shape}")
            rows.append(row)
    state = BlockState.normalized(layout, decomp, np.concatenate(rows))

    if check_compatible:
        report = compatibility_report(state)
        if not report.holds:
            message = f"state violates the detector-compatible form (forbidden norm {report.residual:.3e})"
            if strict:
                raise IncompatibleStateError(message, residual=report.residual)
            logger.warning(message)
    return state


@dataclass(frozen=True)
class ExpectedImages:
    """Oracle images EΨ (keep a, b on slit 1) and GΨ (keep a on slit 1, γ on slit 2)."""

    e_image: np.ndarray
    g_image: np.ndarray


def expected_images(state: BlockState) -> ExpectedImages:
    report = compatibility_report(state)
    if not report.holds:
        raise IncompatibleStateError(
            f"expected images need a detector-compatible state (forbidden norm {report.residual:.3e})",
            residual=report.residual,
        )
    return ExpectedImages(
        e_image=state.masked(("A", "B"), ()),
        g_image=state.masked(("A",), ("C",)),
    )


def permute_cavities(state: BlockState, order: Sequence[str], swap_slits: bool = False) -> BlockState:
    """
    Re-express ``state`` with H2 blocks taken in ``order`` and optionally slits exchanged.

    The new decomposition gives cavity ``CAVITIES[i]`` the rank of old cavity ``order[i]``,
    and the new vector carries the old block ``order[i]`` in that slot.
    """
    decomp = state.decomp
    new_decomp = CavityDecomposition(*(decomp.ranks[CAVITIES.index(name)] for name in order))
    columns = np.concatenate([np.arange(decomp.dim2)[decomp.block(name)] for name in order])
    matrix = state.matrix[:, columns]
    if swap_slits:
        m = state.layout.m
        matrix = np.vstack([matrix[m:], matrix[:m]])
    return BlockState(state.layout, new_decomp, matrix.reshape(-1))
