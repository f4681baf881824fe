"""Exception types raised across the package."""


class QInfoError(ValueError):
    """Base class for invalid-input errors."""


class NotHermitian(QInfoError):
    pass


class NotPSD(QInfoError):
    pass


class TraceOutOfRange(QInfoError):
    pass


class DimensionMismatch(QInfoError):
    pass


class LengthMismatch(QInfoError):
    pass


class ZeroVector(QInfoError):
    pass


class InvalidDistribution(QInfoError):
    pass


class NotAPovm(QInfoError):
    pass


class SupportViolation(QInfoError):
    """Relative entropy requested in strict mode with supp(rho) not inside supp(sigma)."""


class SandwichViolation(AssertionError):
    """A guessing-probability chain inequality failed; indicates a numerical bug."""


class NoConvergence(RuntimeError):
    """Iterative search stopped above its residual tolerance.

    The best result found is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
