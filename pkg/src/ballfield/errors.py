"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """Argument outside the domain of a function."""


class DegenerateParameterError(ValueError):
    """Hypergeometric lower parameter at (or within tolerance of) a pole."""


class ConvergenceError(RuntimeError):
    """Iterative procedure failed to converge.

    The best estimate reached before giving up is kept in ``estimate``.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class TruncationWarning(UserWarning):
    """A truncated series left a tail larger than the requested tolerance."""
