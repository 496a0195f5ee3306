"""Exception hierarchy shared by all kss modules."""


class KssError(Exception):
    """Base class for every error raised by the package."""


class DomainError(KssError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class RangeError(KssError, ValueError):
    """An argument lies outside the validated numerical envelope."""


class BracketError(KssError, ValueError):
    """The target function does not change sign on the supplied bracket."""


class UnsupportedMethodError(KssError, ValueError):
    """The requested evaluation method does not cover these arguments."""


class AccuracyError(KssError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    The best available estimate is kept on ``estimate``.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class InfeasibleError(KssError, ValueError):
    """Physical targets that no parameter set in the envelope can satisfy.

    ``residuals`` carries whatever diagnostic values the solver collected,
    typically the residual at both ends of the search bracket.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})
