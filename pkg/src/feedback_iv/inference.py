"""Standard errors, confidence intervals, the OLS-IV difference test, and
leading-order bias formulas evaluated on a known strictly exogenous design."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import norm

from .errors import DegenerateContrastError, InvalidInputError
from .estimators import Dataset, FitResult
from .projections import (
    CrossMoments,
    GammaPolynomial,
    collapse,
    effective_dof,
    equation_operator,
    factor_transform,
    feedback_operator_traces,
    instrument_gram,
    oblique_trace,
    poly_mul,
    shift_power,
)


class Regime(str, enum.Enum):
    MODERATE_K = "moderate_k"
    GAUSSIAN_CONSERVATIVE = "gaussian_conservative"

    @classmethod
    def parse(cls, value) -> "Regime":
        if isinstance(value, cls):
            return value
        aliases = {"moderate": cls.MODERATE_K, "gaussian": cls.GAUSSIAN_CONSERVATIVE}
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise InvalidInputError(f"unknown regime {value!r}") from None


@dataclass(frozen=True)
class ContrastSpec:
    r: np.ndarray
    label: str = "contrast"

    def __post_init__(self):
        r = np.atleast_1d(np.asarray(self.r, dtype=np.float64))
        if r.ndim != 1 or not np.all(np.isfinite(r)):
            raise InvalidInputError("contrast must be a finite vector")
        if not np.any(r != 0.0):
            raise InvalidInputError("contrast vector must be nonzero")
        object.__setattr__(self, "r", r)

    @classmethod
    def coordinate(cls, K: int, k: int, label: str | None = None) -> "ContrastSpec":
        r = np.zeros(K)
        r[k] = 1.0
        return cls(r, label or f"e{k + 1}")


@dataclass(frozen=True)
class InferenceReport:
    label: str
    estimate: float
    se: float
    t_stat: float
    ci_low: float
    ci_high: float
    psi: float
    regime: Regime
    null: float = 0.0
    level: float = 0.95

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "estimate": self.estimate,
            "se": self.se,
            "t_stat": self.t_stat,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "psi": self.psi,
            "regime": self.regime.value,
            "null": self.null,
            "level": self.level,
        }


@dataclass(frozen=True)
class OracleInputs:
    """Strictly exogenous design, feedback vectors ``alpha_1..alpha_L``, error variance and contrast."""

    X_tilde: np.ndarray
    alphas: tuple
    sigma2: float
    r: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X_tilde, dtype=np.float64)
        alphas = tuple(np.asarray(a, dtype=np.float64) for a in self.alphas)
        r = np.asarray(self.r, dtype=np.float64)
        if X.ndim != 2:
            raise InvalidInputError("X_tilde must be 2-d")
        if not alphas:
            raise InvalidInputError("need at least one feedback vector")
        if any(a.shape != (X.shape[1],) or not np.all(np.isfinite(a)) for a in alphas):
            raise InvalidInputError("feedback vectors must be finite with K entries")
        if r.shape != (X.shape[1],):
            raise InvalidInputError("contrast must have K entries")
        if not self.sigma2 > 0:
            raise InvalidInputError("sigma2 must be positive")
        object.__setattr__(self, "X_tilde", X)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "r", r)

    @property
    def L(self) -> int:
        return len(self.alphas)


def critical_value(level: float = 0.95) -> float:
    if not 0 < level < 1:
        raise InvalidInputError("level must be in (0, 1)")
    if level == 0.95:
        return 1.96
    return float(norm.ppf(0.5 + level / 2))


def _contrast(r, K: int) -> ContrastSpec:
    c = r if isinstance(r, ContrastSpec) else ContrastSpec(r)
    if c.r.shape != (K,):
        raise InvalidInputError(f"contrast has {c.r.size} entries, design has {K} columns")
    return c


def weight_norm2(mom: CrossMoments, g, r, fac=None) -> float:
    """``||r'(X'(I-Gamma)X)^{-1} X'(I-Gamma)||^2`` from cross moments."""
    fac = fac or factor_transform(mom, g)
    u = fac.solve(np.asarray(r, dtype=np.float64), trans=1)
    return float(u @ instrument_gram(mom, g) @ u)


def psi_correction(mom: CrossMoments, g, fac=None) -> float:
    """``|tr(B^2)| / tr(B'B)`` with ``B = D'(I-Gamma)M_Gamma``."""
    _, tr_b2, tr_btb = feedback_operator_traces(mom, g, fac)
    return abs(tr_b2) / tr_btb


def contrast_se(
    data: Dataset,
    g,
    fit: FitResult,
    r,
    regime=Regime.MODERATE_K,
    *,
    level: float = 0.95,
    null: float = 0.0,
) -> InferenceReport:
    """Inference on ``r'beta`` for a fit produced with the same ``(data, g)``.

    The moderate-K variance is ``sigma2 * ||r'S^{-1}X'(I-Gamma)||^2``; the
    Gaussian conservative regime inflates it by ``1 + psi``.
    """
    g = g if isinstance(g, GammaPolynomial) else GammaPolynomial(tuple(np.atleast_1d(g)))
    regime = Regime.parse(regime)
    c = _contrast(r, data.K)
    mom = data.moments(max(g.L, 1))
    fac = factor_transform(mom, g)
    var = fit.sigma2 * weight_norm2(mom, g, c.r, fac)
    psi = 0.0
    if regime is Regime.GAUSSIAN_CONSERVATIVE:
        psi = psi_correction(mom, g, fac)
        var *= 1.0 + psi
    if not var > 0.0:
        raise DegenerateContrastError(f"contrast {c.label!r} has zero standard error")
    se = math.sqrt(var)
    est = float(c.r @ fit.beta)
    z = critical_value(level)
    return InferenceReport(
        label=c.label,
        estimate=est,
        se=se,
        t_stat=(est - null) / se,
        ci_low=est - z * se,
        ci_high=est + z * se,
        psi=psi,
        regime=regime,
        null=null,
        level=level,
    )


def diff_se(data: Dataset, g, sigma2: float, r) -> float:
    """Standard error of ``r'(beta_OLS - beta_IV)`` under strict exogeneity.

    The difference weight vector satisfies
    ``||w||^2 = r'S^{-1}Z'Z S^{-T} r - r'(X'X)^{-1} r`` because ``X'Z = S'``.
    """
    g = g if isinstance(g, GammaPolynomial) else GammaPolynomial(tuple(np.atleast_1d(g)))
    c = _contrast(r, data.K)
    if g.is_zero:
        return 0.0
    mom = data.moments(g.L)
    iv_part = weight_norm2(mom, g, c.r)
    ols_part = weight_norm2(mom, GammaPolynomial(), c.r)
    return math.sqrt(max(sigma2, 0.0) * max(iv_part - ols_part, 0.0))


def difference_t(data: Dataset, ols: FitResult, iv: FitResult, r) -> float:
    """``|r'(beta_OLS - beta_IV)| / diff_se`` using the OLS variance estimate."""
    c = _contrast(r, data.K)
    se = diff_se(data, iv.gamma, ols.sigma2, c)
    if not se > 0.0:
        raise DegenerateContrastError(f"difference for {c.label!r} has zero standard error")
    return abs(float(c.r @ (ols.beta - iv.beta))) / se


# ---------------------------------------------------------------------------
# bias oracles
# ---------------------------------------------------------------------------


def _oracle_parts(o: OracleInputs, g):
    g = g if isinstance(g, GammaPolynomial) else GammaPolynomial(tuple(np.atleast_1d(g)))
    L = max(o.L, g.L, 1)
    mom = CrossMoments.from_design(o.X_tilde, L)
    fac = factor_transform(mom, g)
    ig = g.transform_poly()
    R = np.array([oblique_trace(mom, g, equation_operator(g, ell), fac) for ell in range(1, o.L + 1)])
    S_bar = fac.S.copy()
    for j, a_j in enumerate(o.alphas, start=1):
        for ell, a_l in enumerate(o.alphas, start=1):
            op = collapse(poly_mul({shift_power(ell - j): 1.0}, ig))
            S_bar += o.sigma2 * np.outer(a_j, a_l) * oblique_trace(mom, g, op, fac)
    return g, mom, fac, R, S_bar


def iv_bias_oracle(o: OracleInputs, g) -> float:
    """Leading bias of ``r'beta_IV(Gamma)`` for multi-period feedback.

    ``sigma2 * sum_l r'Sbar^{-1} alpha_l * R_l`` with ``R_l`` the trace-equation
    value on ``X_tilde`` and
    ``Sbar = X_tilde'(I-Gamma)X_tilde + sigma2 sum_{j,l} alpha_j alpha_l' tr[D^l D'^j (I-Gamma) M_Gamma]``,
    where shift products are merged the same way as in the trace equations.
    """
    _, _, _, R, S_bar = _oracle_parts(o, g)
    A = np.column_stack(o.alphas)
    coef = np.linalg.solve(S_bar.T, o.r) @ A
    return float(o.sigma2 * coef @ R)


def ols_bias_oracle(o: OracleInputs) -> float:
    """Leading bias of ``r'beta_OLS`` under one-period feedback."""
    if o.L != 1:
        raise InvalidInputError("the OLS bias formula covers one-period feedback; use iv_bias_oracle with zero gamma")
    mom = CrossMoments.from_design(o.X_tilde, 1)
    T, K = o.X_tilde.shape
    a = o.alphas[0]
    S_bar = mom.lagged(0) + o.sigma2 * (T - K) * np.outer(a, a)
    lower = oblique_trace(mom, GammaPolynomial(), {shift_power(-1): 1.0})
    return float(o.sigma2 * (o.r @ np.linalg.solve(S_bar, a)) * lower)


def variance_bias_oracle(o: OracleInputs, g) -> float:
    """Predicted ``E[sigma2_hat(Gamma)] / sigma2`` to leading order, one-period feedback."""
    if o.L != 1:
        raise InvalidInputError("variance oracle covers one-period feedback only")
    g, mom, fac, R, S_bar = _oracle_parts(o, g)
    a = o.alphas[0]
    lag_side = oblique_trace(mom, g, collapse(poly_mul({shift_power(1): 1.0}, g.transform_poly())), fac)
    dof = effective_dof(mom, g, fac)
    return float(1.0 - o.sigma2 * (a @ np.linalg.solve(S_bar, a)) * R[0] * lag_side / dof)


__all__: Sequence[str] = [
    "ContrastSpec",
    "InferenceReport",
    "OracleInputs",
    "Regime",
    "contrast_se",
    "critical_value",
    "diff_se",
    "difference_t",
    "iv_bias_oracle",
    "ols_bias_oracle",
    "psi_correction",
    "variance_bias_oracle",
    "weight_norm2",
]
