"""Exception hierarchy shared by every hilmod layer."""

from __future__ import annotations


class HilmodError(Exception):
    """Base class for all library errors."""


class DimensionError(HilmodError, ValueError):
    """Operands disagree in matrix size, truncation or algebra descriptor."""


class DomainError(HilmodError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(DomainError):
    """A quantitative precondition (e.g. a norm lower bound) fails."""


class DegenerateWeightsError(DomainError):
    """Every weight slot is null under the chosen state."""


class UnsupportedAlgebraError(HilmodError):
    """The operation is not available for this kind of algebra."""


class NumericError(HilmodError, ArithmeticError):
    """A numerical routine failed to converge or to meet its residual target."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class ConfigError(HilmodError, ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class CompactAtHorizonError(HilmodError):
    """The compactness deficiency vanishes over the probe horizon."""


class HorizonTooSmallError(HilmodError):
    """The truncation is too short to continue the witness sequence."""
