"""Exception types raised by xycorr."""


class XYCorrError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(XYCorrError, ValueError):
    """Operand has the wrong dimension for the requested operation."""


class SymmetryError(XYCorrError, ValueError):
    """A matrix that must be Hermitian is not, beyond tolerance."""


class InvalidStateError(XYCorrError, ValueError):
    """A density matrix fails validation (trace or positivity)."""


class DomainError(XYCorrError, ValueError):
    """Parameter outside the domain where a quantity is defined."""


class CapacityError(XYCorrError, ValueError):
    """Requested problem size exceeds the supported dense storage bound."""


class QuadratureError(XYCorrError, ArithmeticError):
    """Adaptive quadrature failed to reach the requested accuracy.

    Attributes
    ----------
    estimate : numpy.ndarray
        Best estimate reached before giving up.
    error : float
        Estimated absolute error of ``estimate``.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class UsageError(XYCorrError, ValueError):
    """Invalid request from a caller (unknown measure, bad grid, ...)."""
