"""Exception hierarchy shared by all modules."""


class ToneError(Exception):
    """Base class for library errors."""


class DomainError(ToneError, ValueError):
    """An argument lies outside the supported domain."""


class SolverError(ToneError, RuntimeError):
    """A root finder or iterative solver failed to converge."""


class EvaluationError(ToneError, ArithmeticError):
    """A series or integration failed to converge.

    Carries the partial sum, the number of terms used and the last term
    so the caller can see how far the evaluation got.
    """

    def __init__(self, message, partial_sum=None, terms=None, last_term=None):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.terms = terms
        self.last_term = last_term


class PoleError(ToneError, ArithmeticError):
    """Evaluation hit a zero of the oscillating solution (a pole of K)."""

    def __init__(self, message, nearest_pole=None):
        super().__init__(message)
        self.nearest_pole = nearest_pole
