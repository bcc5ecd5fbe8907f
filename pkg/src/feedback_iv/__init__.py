"""Bias-corrected estimation for time-series regressions with many weakly exogenous regressors."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateContrastError,
    DegenerateSeriesError,
    FeedbackIVError,
    InvalidInputError,
    MonteCarloFailure,
    NearSingularTransformError,
    NoConvergenceError,
    SingularDesignError,
    ZeroResidualError,
)
from .estimators import Dataset, FitResult, SolverConfig, fit_iv, iv_fit, ols_fit, solve_gamma, solve_gamma_multi  # noqa: E402
from .projections import GammaPolynomial  # noqa: E402


def data_path(name: str):
    """Path to a file shipped in the package's ``data`` directory."""
    from importlib.resources import files

    return files(__name__) / "data" / name
