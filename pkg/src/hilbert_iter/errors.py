"""Exception types raised by the solvers and generators."""


class DimensionError(ValueError):
    """Array shapes are inconsistent, or a dimension is too small."""


class NotSPDError(ValueError):
    """A matrix handed to the Cholesky factorization is not positive definite.

    Attributes
    ----------
    pivot : int
        Zero-based index of the first non-positive pivot.
    """

    def __init__(self, pivot, msg=None):
        self.pivot = pivot
        super().__init__(msg or f"matrix is not positive definite (pivot {pivot})")


class NumericalFailure(RuntimeError):
    """A numerical routine broke down (non-convergence, underflow, ...)."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class InfeasibleStart(ValueError):
    """The starting residual does not exceed ``C * delta``."""


class NonTermination(RuntimeError):
    """An iteration hit ``max_iter`` before the stopping rule fired.

    The partial trace is attached so callers can inspect what happened.
    """

    def __init__(self, msg, trace=None):
        super().__init__(msg)
        self.trace = list(trace or [])
