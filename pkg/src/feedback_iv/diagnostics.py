"""Pre-estimation checks: lower-trace ratios, solvability and feedback screening."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInputError
from .estimators import Dataset, SampleSizeWarning, fit_iv, ols_fit
from .inference import diff_se
from .projections import annihilator_lower_traces
from .simulation import calibrate_from_data

TIERS = ("green", "amber", "red")


@dataclass(frozen=True)
class TierThresholds:
    """``|tr(D'M)|/T`` below ``amber`` is green, above ``red`` is red, amber in between."""

    amber: float = 0.05
    red: float = 0.10

    def __post_init__(self):
        if not 0 <= self.amber <= self.red:
            raise InvalidInputError("need 0 <= amber <= red")

    def classify(self, ratio: float) -> str:
        a = abs(ratio)
        if a < self.amber:
            return "green"
        if a <= self.red:
            return "amber"
        return "red"


@dataclass(frozen=True)
class DiagnosticsReport:
    lower_trace_ratios: np.ndarray
    k_over_t: float
    dimension_ok: bool
    mu: float
    mu_bound_ok: bool
    estimated_alpha: np.ndarray
    alpha_t_stat: float
    tier: str
    gamma: float
    T: int
    K: int

    def to_dict(self) -> dict:
        return {
            "lower_trace_ratios": [float(v) for v in self.lower_trace_ratios],
            "k_over_t": self.k_over_t,
            "dimension_ok": self.dimension_ok,
            "mu": self.mu,
            "mu_bound_ok": self.mu_bound_ok,
            "estimated_alpha": [float(v) for v in self.estimated_alpha],
            "alpha_t_stat": self.alpha_t_stat,
            "tier": self.tier,
            "gamma": self.gamma,
            "T": self.T,
            "K": self.K,
        }


def diagnose(data: Dataset, L_max: int = 4, thresholds: TierThresholds = TierThresholds()) -> DiagnosticsReport:
    """Screen a regression for feedback bias before estimating it.

    ``mu = sqrt(|tr(D'M)|/K)`` clipped to [0, 1]; the solvability bound checks
    ``K < T/5`` and ``|tr(D'M)| <= mu^2 K`` with that mu.  ``alpha_t_stat`` is
    the OLS-IV difference t-statistic along the estimated feedback direction.
    """
    if L_max < 1:
        raise InvalidInputError("L_max must be at least 1")
    if not L_max < data.T:
        raise InvalidInputError(f"L_max must be below T={data.T}")
    mom = data.moments(L_max)
    ratios = annihilator_lower_traces(mom, L_max) / data.T
    lower = float(ratios[0] * data.T)
    mu = min(max(math.sqrt(abs(lower) / data.K), 0.0), 1.0)
    dimension_ok = data.K < data.T / 5
    alpha = calibrate_from_data(data.X, data.y).alphas[0]
    ols = ols_fit(data)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SampleSizeWarning)
        iv = fit_iv(data, 1)
    t_stat = 0.0
    if np.any(alpha != 0.0):
        se = diff_se(data, iv.gamma, ols.sigma2, alpha)
        if se > 0:
            t_stat = abs(float(alpha @ (ols.beta - iv.beta))) / se
    return DiagnosticsReport(
        lower_trace_ratios=ratios,
        k_over_t=data.K / data.T,
        dimension_ok=bool(dimension_ok),
        mu=mu,
        mu_bound_ok=bool(abs(lower) <= mu * mu * data.K * (1 + 1e-12)),
        estimated_alpha=alpha,
        alpha_t_stat=t_stat,
        tier=thresholds.classify(float(ratios[0])),
        gamma=float(iv.gamma.coeffs[0]),
        T=data.T,
        K=data.K,
    )


__all__: Sequence[str] = ["DiagnosticsReport", "TIERS", "TierThresholds", "diagnose"]
