"""Transformations applied before estimation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .errors import DegenerateSeriesError, InvalidInputError


@dataclass(frozen=True)
class FilterConfig:
    """Lag count ``p`` and forecast horizon ``h`` (quarterly data: two years ahead)."""

    p: int = 4
    h: int = 8

    def __post_init__(self):
        if self.p < 1 or self.h < 1:
            raise InvalidInputError("p and h must be at least 1")


def _as_series(series) -> np.ndarray:
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidInputError("series must be one-dimensional")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("series contains missing or non-finite values")
    return x


def filter_design(series, cfg: FilterConfig = FilterConfig()) -> tuple[np.ndarray, np.ndarray]:
    """Regression design ``(1, x_t, ..., x_{t-p+1})`` and target ``x_{t+h}``."""
    x = _as_series(series)
    T, p, h = x.size, cfg.p, cfg.h
    if T <= p + h + 1:
        raise InvalidInputError(f"series of length {T} is too short for p={p}, h={h}")
    n = T - h - p + 1
    Z = np.empty((n, p + 1))
    Z[:, 0] = 1.0
    for j in range(p):
        Z[:, j + 1] = x[p - 1 - j : p - 1 - j + n]
    return Z, x[p - 1 + h :]


def hamilton_filter(series, cfg: FilterConfig = FilterConfig(), *, name: str | None = None) -> np.ndarray:
    """Cyclical component: residual of ``x_{t+h}`` on an intercept and ``p`` current/lagged values.

    Only a constant series is rejected; other rank-deficient designs are
    solved in the least-squares sense.  Output entry ``j`` belongs to original
    index ``j + p + h - 1``; the length is ``T - h - p + 1``.
    """
    x = _as_series(series)
    if np.ptp(x) <= 8 * np.finfo(np.float64).eps * max(np.abs(x).max(), 1.0):
        label = f"series {name!r}" if name else "series"
        raise DegenerateSeriesError(f"{label} is constant, so its lags are collinear with the intercept")
    Z, target = filter_design(x, cfg)
    coef = sla.lstsq(Z, target, lapack_driver="gelsy")[0]
    return target - Z @ coef


def filter_panel(X, cfg: FilterConfig = FilterConfig(), labels: Sequence[str] = ()) -> np.ndarray:
    """Filter each column; all columns share the sample, so the result is already aligned."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidInputError("panel must be two-dimensional")
    names = list(labels) or [f"column {k + 1}" for k in range(X.shape[1])]
    return np.column_stack([hamilton_filter(X[:, k], cfg, name=names[k]) for k in range(X.shape[1])])


def standardize(X, labels: Sequence[str] = ()) -> np.ndarray:
    """Demean each column and scale it to unit sample variance (``ddof=1``)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] < 2 or not np.all(np.isfinite(X)):
        raise InvalidInputError("need at least two finite rows")
    mu = X.mean(axis=0)
    sd = X.std(axis=0, ddof=1)
    names = list(labels) or [f"column {k + 1}" for k in range(X.shape[1])]
    for k in np.flatnonzero(sd <= np.finfo(np.float64).eps * np.maximum(np.abs(mu), 1.0) * X.shape[0]):
        raise DegenerateSeriesError(f"{names[k]!r} is constant and cannot be standardized")
    return (X - mu) / sd


__all__: Sequence[str] = ["FilterConfig", "filter_design", "filter_panel", "hamilton_filter", "standardize"]
