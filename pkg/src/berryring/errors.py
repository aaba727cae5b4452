"""Exception taxonomy shared by all modules.

Each error class maps to one CLI exit code family: configuration problems
exit 2, numerical problems exit 3, and I/O problems exit 4.
"""


class BerryRingError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(BerryRingError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(BerryRingError, ValueError):
    """An arc-length coordinate lies outside a path's domain."""


class DegeneracyError(BerryRingError, ArithmeticError):
    """The birefringence vector vanishes where an eigenbasis is required."""


class UndefinedNormalError(BerryRingError, ArithmeticError):
    """A space curve is locally straight so the normal direction is undefined."""

    def __init__(self, message, s_range=None):
        super().__init__(message)
        self.s_range = s_range


class SingularMatrixError(BerryRingError, ArithmeticError):
    """A matrix that must be inverted is singular to working precision."""


class ContractViolationError(BerryRingError, ValueError):
    """An input violates a normalization or unitarity contract."""


class SearchError(BerryRingError, ArithmeticError):
    """A bracketing or root search failed to converge."""


class AnalysisError(BerryRingError, ArithmeticError):
    """A curve analysis (extremum, width, unwrap) could not be completed."""


class ConfigError(BerryRingError, ValueError):
    """A run configuration is malformed or inconsistent."""

    def __init__(self, message, key=None):
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)
        self.key = key


class OutputError(BerryRingError, OSError):
    """An artifact file could not be read or written."""
