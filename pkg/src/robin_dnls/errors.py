"""Exception hierarchy shared by all modules."""


class DnlsError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(DnlsError):
    """Array length does not match the grid, or the grid is too small."""


class ConfigurationError(DnlsError):
    """Invalid combination of options (e.g. Simpson rule on an even grid)."""


class InvalidStateError(DnlsError):
    """A field contains NaN or Inf entries."""


class AdmissibilityError(DnlsError):
    """Wave parameters violate omega > alpha**2."""


class ParameterError(DnlsError):
    """A scalar argument is out of range."""


class PreconditionError(DnlsError):
    """An operation's mathematical precondition does not hold."""


class DegenerateTraceError(DnlsError):
    """Boundary trace vanishes where a nonzero trace is required."""


class ZeroFieldError(DnlsError):
    """Operation undefined on the zero field."""


class ConvergenceError(DnlsError):
    """Iteration did not reach tolerance; carries the last iterate."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class DegenerateDescentError(DnlsError):
    """Descent collapsed to the zero field or a vanishing step."""


class StepFailureError(DnlsError):
    """A single time step failed (fixed-point divergence or NaN)."""


class NumericalError(DnlsError):
    """Linear algebra failure (singular tridiagonal system)."""


class InsufficientDataError(DnlsError):
    """Not enough samples for the requested diagnostic."""
