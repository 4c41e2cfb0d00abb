"""Exception hierarchy shared by every module."""


class ExcessEntropyError(Exception):
    """Base class for all errors raised by this package."""


class InvalidBlockLengthError(ExcessEntropyError, ValueError):
    pass


class InvalidDistributionError(ExcessEntropyError, ValueError):
    pass


class InvalidTransformError(ExcessEntropyError, ValueError):
    pass


class InvalidModelError(ExcessEntropyError, ValueError):
    pass


class NoUniqueStationaryError(ExcessEntropyError):
    pass


class NotPositiveDefiniteError(ExcessEntropyError):
    """Raised when a Levinson prediction variance is not positive.

    The failing order is stored on ``order``.
    """

    def __init__(self, order, variance):
        super().__init__(
            f"Toeplitz covariance is not positive definite at order {order} "
            f"(prediction variance {variance:.3e})"
        )
        self.order = order
        self.variance = variance


class InvalidDensityError(ExcessEntropyError, ValueError):
    pass


class PrecisionNotReachedError(ExcessEntropyError):
    """Quadrature did not meet its target; ``best`` holds the last estimate."""

    def __init__(self, message, best=None, error=None):
        super().__init__(message)
        self.best = best
        self.error = error


class InsufficientDataError(ExcessEntropyError, ValueError):
    pass


class SingularPointError(ExcessEntropyError, ValueError):
    pass


class EmbeddingFailureError(ExcessEntropyError):
    pass


class InvariantViolationError(ExcessEntropyError):
    """An exact computation broke a structural identity it must satisfy."""
