"""
Exception hierarchy for whichslit.

Input problems (malformed files, bad shapes, out-of-range parameters) derive from
``InputError``; violations of the physical constraints derive from ``ConstraintError``.
The CLI maps the first family to exit status 2 and the rest to exit status 1.
"""

from typing import Optional


class WhichSlitError(Exception):
    """Base class for every error raised by the package."""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class InputError(WhichSlitError):
    """The caller handed over something malformed."""


class DimensionError(InputError):
    """Operands have incompatible shapes."""


class DimensionOverflowError(InputError):
    """A result would exceed the configured maximum dimension."""


class ZeroStateError(InputError):
    """A state vector has zero norm."""


class ParameterRangeError(InputError):
    """A family parameter lies outside its admissible range."""


class SchemaError(InputError):
    """A JSON artifact failed validation."""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.field = field


class ConstraintError(WhichSlitError):
    """A physical or algebraic precondition does not hold."""


class IncompatibleStateError(ConstraintError):
    """The state carries components forbidden for a detector-compatible state."""


class NotAProjectorError(ConstraintError):
    """A matrix is not Hermitian and idempotent within tolerance."""


class NonIntegralTraceError(ConstraintError):
    """The trace of a projector is not close to an integer."""


class NonCommutingError(ConstraintError):
    """Two operators that must commute do not."""


class ZeroDenominatorError(ConstraintError):
    """A conditional probability was requested on an event of probability zero."""


class DegenerateStateError(ConstraintError):
    """One side of the E or G image masks vanishes, so C5 can never hold."""


class DegenerateSplitError(ConstraintError):
    """The slit split of a state is trivial: pi(1) is 0 or 1."""


class DegenerateScreenError(ConstraintError):
    """A screen model produces no visible cross terms between the slits."""


class EmptySubspaceError(ConstraintError):
    """The linear constraints on K admit no Hermitian solution."""


class PreconditionError(ConstraintError):
    """An operation was called on an instance that does not meet its requirements."""


class SolverError(WhichSlitError):
    """A numerical search failed to produce an acceptable result."""


class NoCompletionError(SolverError):
    """No idempotent completion of a Hermitian pattern was found."""
