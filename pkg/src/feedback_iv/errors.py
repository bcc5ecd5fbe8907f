"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class FeedbackIVError(Exception):
    """Base class for library errors."""


class InvalidInputError(FeedbackIVError, ValueError):
    """Malformed arrays, shapes, or parameter values."""


class SingularDesignError(FeedbackIVError):
    """The regressor matrix is numerically rank deficient."""

    def __init__(self, rank: int, ncols: int, message: str | None = None):
        self.rank = rank
        self.ncols = ncols
        super().__init__(message or f"design matrix has numerical rank {rank} < {ncols} columns")


class NearSingularTransformError(FeedbackIVError):
    """X'(I - Gamma)X is too ill-conditioned to solve reliably."""

    def __init__(self, condition: float, message: str | None = None):
        self.condition = condition
        super().__init__(message or f"transformed design is near singular (condition estimate {condition:.3e})")


class NoConvergenceError(FeedbackIVError):
    """A gamma solver exhausted its iteration budget or left the admissible region."""

    def __init__(self, message: str, last_iterate=None, residual=None, iterations: int = 0):
        self.last_iterate = last_iterate
        self.residual = residual
        self.iterations = iterations
        super().__init__(message)


class DegenerateContrastError(FeedbackIVError):
    """The contrast has a zero standard error."""


class DegenerateSeriesError(FeedbackIVError):
    """A series or column is constant, so it cannot be filtered or scaled."""


class ZeroResidualError(FeedbackIVError):
    """The calibration regression fits exactly, so no feedback can be estimated."""


class MonteCarloFailure(FeedbackIVError):
    """Too many replications failed."""

    def __init__(self, failures: int, n_reps: int):
        self.failures = failures
        self.n_reps = n_reps
        super().__init__(f"{failures} of {n_reps} replications failed (limit 1%)")
