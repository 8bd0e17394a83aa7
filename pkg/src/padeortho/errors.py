"""Exception hierarchy for padeortho."""


class PadeOrthoError(Exception):
    """Base class for all library errors."""


class DomainError(PadeOrthoError, ValueError):
    """A point lies in the compact set E where the operation is undefined."""


class TruncationError(PadeOrthoError):
    """A coefficient vector is too short to give the requested entries exactly."""


class ConvergenceError(PadeOrthoError):
    """An adaptive procedure hit its cap without stabilizing."""


class DegenerateError(PadeOrthoError):
    """Too few usable data points for a fit."""


class SingularSystemError(PadeOrthoError):
    """The equilibrated denominator system is numerically singular.

    The least-norm solution is kept on ``solution`` so callers can still
    inspect it.
    """

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


class PoleError(PadeOrthoError, ZeroDivisionError):
    """Evaluation at (or numerically at) a zero of the denominator."""


class SizeError(PadeOrthoError, ValueError):
    """Problem size exceeds what an exhaustive routine supports."""


class InsufficientDataError(PadeOrthoError):
    """A verdict cannot be reached from the available data."""


class ParseError(PadeOrthoError, ValueError):
    """Malformed configuration; ``path`` names the offending field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class ValidationError(PadeOrthoError, ValueError):
    """Well-formed configuration that violates a cross-field invariant."""
