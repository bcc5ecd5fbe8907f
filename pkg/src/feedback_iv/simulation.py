"""Data-generating processes, calibration to observed data, and the Monte Carlo engine."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla
from threadpoolctl import threadpool_limits

from .errors import (
    FeedbackIVError,
    InvalidInputError,
    MonteCarloFailure,
    SingularDesignError,
    ZeroResidualError,
)
from .estimators import Dataset, SampleSizeWarning, SolverConfig, fit_iv, ols_fit
from .inference import contrast_se, diff_se
from .projections import GammaPolynomial, oblique_trace, shift_power

PROCESSES = ("ar1", "ma1", "fixed_base")
THREADS_ENV = "FEEDBACK_IV_THREADS"
FAILURE_LIMIT = 0.01
SWEEP_COLUMNS = ("K", "rho", "T", "estimator", "bias", "sd", "size", "lower_trace_ratio", "n_reps", "failures", "seed")

# stream index reserved for the base regressors of a run
_BASE_STREAM = 2**63 - 1


def stream(seed: int, *key: int) -> np.random.Generator:
    """Counter-based generator for ``(seed, *key)``; independent of call order."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *(int(k) for k in key)])))


def standard_normal_errors(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n)


@dataclass(frozen=True)
class DgpSpec:
    """``x_t = x_tilde_t + sum_l alpha_l eps_{t-l}``, ``y = X beta + eps``, ``eps ~ iid(0, sigma2)``.

    ``redraw_base`` draws a fresh ``X_tilde`` for every replication; by default it
    is drawn once per run so summaries are conditional on the base design.
    """

    T: int
    K: int
    process: str = "ar1"
    rho: float = 0.0
    base: np.ndarray | None = None
    alphas: tuple = ()
    beta: np.ndarray | None = None
    sigma2: float = 1.0
    redraw_base: bool = False

    def __post_init__(self):
        T, K = int(self.T), int(self.K)
        if not T > K >= 1:
            raise InvalidInputError(f"need T > K >= 1, got T={T}, K={K}")
        if self.process not in PROCESSES:
            raise InvalidInputError(f"process must be one of {PROCESSES}, got {self.process!r}")
        if self.process != "fixed_base" and not (math.isfinite(self.rho) and abs(self.rho) < 1):
            raise InvalidInputError("rho must lie in (-1, 1)")
        base = self.base
        if self.process == "fixed_base":
            if base is None:
                raise InvalidInputError("fixed_base process needs a base matrix")
            base = np.asarray(base, dtype=np.float64)
            if base.shape != (T, K) or not np.all(np.isfinite(base)):
                raise InvalidInputError(f"base must be a finite {T}x{K} matrix")
            base.setflags(write=False)
        elif base is not None:
            raise InvalidInputError("base is only used by the fixed_base process")
        alphas = tuple(np.asarray(a, dtype=np.float64).reshape(-1) for a in self.alphas)
        if any(a.shape != (K,) or not np.all(np.isfinite(a)) for a in alphas):
            raise InvalidInputError("each feedback vector must be finite with K entries")
        beta = np.zeros(K) if self.beta is None else np.asarray(self.beta, dtype=np.float64).reshape(-1)
        if beta.shape != (K,) or not np.all(np.isfinite(beta)):
            raise InvalidInputError("beta must be finite with K entries")
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise InvalidInputError("sigma2 must be positive")
        for name, value in (("T", T), ("K", K), ("base", base), ("alphas", alphas), ("beta", beta)):
            object.__setattr__(self, name, value)
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "sigma2", float(self.sigma2))

    @property
    def L(self) -> int:
        return len(self.alphas)

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "K": self.K,
            "process": self.process,
            "rho": self.rho,
            "base": None if self.base is None else self.base.tolist(),
            "alphas": [a.tolist() for a in self.alphas],
            "beta": self.beta.tolist(),
            "sigma2": self.sigma2,
            "redraw_base": self.redraw_base,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DgpSpec":
        """Build from a JSON mapping.

        Besides the field names, ``feedback_scale`` (a list ``a_1..a_L``) is
        accepted as shorthand for ``alpha_l = a_l e_1``, and a scalar ``beta``
        is broadcast.
        """
        d = dict(d)
        try:
            T, K = int(d.pop("T")), int(d.pop("K"))
        except KeyError as exc:
            raise InvalidInputError(f"spec is missing {exc.args[0]!r}") from None
        scale = d.pop("feedback_scale", None)
        if scale is not None:
            if "alphas" in d:
                raise InvalidInputError("give either alphas or feedback_scale, not both")
            scale = [scale] if np.isscalar(scale) else list(scale)
            alphas = []
            for a in scale:
                v = np.zeros(K)
                v[0] = float(a)
                alphas.append(v)
            d["alphas"] = alphas
        beta = d.pop("beta", None)
        if beta is not None and np.isscalar(beta):
            beta = np.full(K, float(beta))
        known = {"process", "rho", "base", "alphas", "sigma2", "redraw_base"}
        extra = set(d) - known
        if extra:
            raise InvalidInputError(f"unknown spec fields: {sorted(extra)}")
        try:
            return cls(T=T, K=K, beta=beta, **d)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidInputError):
                raise
            raise InvalidInputError(f"invalid spec: {exc}") from None


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def _rotate(V: np.ndarray) -> np.ndarray:
    T = V.shape[0]
    try:
        Lc = np.linalg.cholesky(V.T @ V / T)
    except np.linalg.LinAlgError:
        raise SingularDesignError(np.linalg.matrix_rank(V), V.shape[1]) from None
    return sla.solve_triangular(Lc, V.T, lower=True).T


def gen_base_regressors(T: int, K: int, process: str, rho: float, rng: np.random.Generator) -> np.ndarray:
    """Rotated AR(1) or MA(1) regressors with ``X'X/T = I``.

    AR(1) starts from its stationary law.  The rotation is ``V (Lc')^{-1}`` with
    ``Lc`` the lower Cholesky factor of ``V'V/T``.
    """
    if process not in ("ar1", "ma1"):
        raise InvalidInputError(f"cannot generate base regressors for process {process!r}")
    if not T > K >= 1 or not abs(rho) < 1:
        raise InvalidInputError("need T > K >= 1 and |rho| < 1")
    for attempt in range(2):
        if process == "ar1":
            prev = rng.standard_normal(K) / math.sqrt(1.0 - rho * rho)
            U = rng.standard_normal((T, K))
            V = np.empty((T, K))
            for t in range(T):
                prev = rho * prev + U[t]
                V[t] = prev
        else:
            U = rng.standard_normal((T + 1, K))
            V = rho * U[:-1] + U[1:]
        try:
            return _rotate(V)
        except SingularDesignError:
            if attempt:
                raise
    raise AssertionError("unreachable")


def _base_for_run(spec: DgpSpec, seed: int) -> np.ndarray:
    if spec.process == "fixed_base":
        return spec.base
    return gen_base_regressors(spec.T, spec.K, spec.process, spec.rho, stream(seed, _BASE_STREAM))


def gen_sample(
    spec: DgpSpec,
    rng: np.random.Generator,
    base: np.ndarray | None = None,
    error_dist: Callable[[np.random.Generator, int], np.ndarray] | None = None,
    *,
    return_errors: bool = False,
):
    """Draw ``eps_{1-L..T}`` and build ``(X, y)``.

    ``base`` overrides the spec's base regressors; when omitted, ``fixed_base``
    uses ``spec.base`` and the other processes draw from ``rng`` first.
    ``error_dist(rng, n)`` must return unit-variance draws.
    """
    if base is None:
        base = spec.base if spec.process == "fixed_base" else gen_base_regressors(spec.T, spec.K, spec.process, spec.rho, rng)
    draw = error_dist or standard_normal_errors
    L, T = spec.L, spec.T
    eps_full = math.sqrt(spec.sigma2) * np.asarray(draw(rng, T + L), dtype=np.float64)
    eps = eps_full[L:]
    X = np.array(base, dtype=np.float64)
    for ell, a in enumerate(spec.alphas, start=1):
        if np.any(a != 0.0):
            X += np.outer(eps_full[L - ell : L - ell + T], a)
    y = X @ spec.beta + eps
    data = Dataset(X, y)
    return (data, eps_full) if return_errors else data


def calibrate_from_data(X_r, y_r, labels: Sequence[str] = ()) -> DgpSpec:
    """Fixed-base DGP with OLS ``beta``, ``sigma2 = e'e/(T-K)`` and one-period feedback.

    The feedback vector is ``sum_t x_{t+1} e_t / e'e``, the regression of next
    period's regressors on today's residual.
    """
    data = Dataset(X_r, y_r, labels=tuple(labels))
    fit = ols_fit(data)
    e = data.y - data.X @ fit.beta
    ee = float(e @ e)
    if ee <= (np.finfo(np.float64).eps * data.T) ** 2 * max(float(data.y @ data.y), 1.0):
        raise ZeroResidualError("outcome is fitted exactly; residuals are zero")
    alpha = data.X[1:].T @ e[:-1] / ee
    return DgpSpec(
        T=data.T,
        K=data.K,
        process="fixed_base",
        base=np.array(data.X),
        alphas=(alpha,),
        beta=fit.beta,
        sigma2=ee / (data.T - data.K),
    )


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EstimatorSummary:
    bias: float
    sd: float
    size_5pct: float
    bias_se: float
    sigma2_ratio: float
    sigma2_ratio_se: float

    def to_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class McSummary:
    ols: EstimatorSummary
    iv: EstimatorSummary
    lower_trace_ratio: float
    diff_rejection: float
    theta: float
    r: np.ndarray
    n_reps: int
    failures: int
    seed: int
    max_solver_residual: float
    draws: dict = field(default_factory=dict, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "ols": self.ols.to_dict(),
            "iv": self.iv.to_dict(),
            "lower_trace_ratio": self.lower_trace_ratio,
            "diff_rejection": self.diff_rejection,
            "theta": self.theta,
            "r": self.r.tolist(),
            "n_reps": self.n_reps,
            "failures": self.failures,
            "seed": self.seed,
            "max_solver_residual": self.max_solver_residual,
        }


_FIELDS = (
    "est_ols",
    "est_iv",
    "se_ols",
    "se_iv",
    "sigma2_ols",
    "sigma2_iv",
    "lower_trace_ratio",
    "t_diff",
    "gamma1",
    "residual",
)


def resolve_contrast(spec: DgpSpec, contrast) -> np.ndarray:
    """``"feedback_direction"`` (``sum_l alpha_l``), ``("coordinate", k)``, ``"e<k>"`` or an explicit vector."""
    K = spec.K
    if isinstance(contrast, str):
        if contrast == "feedback_direction":
            r = np.sum(spec.alphas, axis=0) if spec.alphas else np.zeros(K)
            if not np.any(r != 0.0):
                raise InvalidInputError("feedback direction is undefined when all feedback vectors are zero")
            return np.asarray(r, dtype=np.float64)
        if contrast.startswith("e") and contrast[1:].isdigit():
            contrast = ("coordinate", int(contrast[1:]) - 1)
        else:
            raise InvalidInputError(f"unknown contrast {contrast!r}")
    if isinstance(contrast, tuple) and len(contrast) == 2 and contrast[0] == "coordinate":
        k = int(contrast[1])
        if not 0 <= k < K:
            raise InvalidInputError(f"coordinate {k} out of range for K={K}")
        r = np.zeros(K)
        r[k] = 1.0
        return r
    r = np.asarray(contrast, dtype=np.float64).reshape(-1)
    if r.shape != (K,) or not np.all(np.isfinite(r)) or not np.any(r != 0.0):
        raise InvalidInputError("contrast vector must be finite, nonzero, with K entries")
    return r


def _replicate(spec, base, r, lags, cfg, seed, i, error_dist):
    rng = stream(seed, i)
    if spec.redraw_base and spec.process != "fixed_base":
        base = gen_base_regressors(spec.T, spec.K, spec.process, spec.rho, rng)
    data = gen_sample(spec, rng, base, error_dist)
    ols = ols_fit(data)
    iv = fit_iv(data, lags, cfg)
    se_ols = contrast_se(data, GammaPolynomial(), ols, r).se
    se_iv = contrast_se(data, iv.gamma, iv, r).se
    mom = data.moments(max(lags, 1))
    lower = oblique_trace(mom, GammaPolynomial(), {shift_power(-1): 1.0})
    dse = diff_se(data, iv.gamma, ols.sigma2, r)
    est_ols, est_iv = float(r @ ols.beta), float(r @ iv.beta)
    t_diff = abs(est_ols - est_iv) / dse if dse > 0 else 0.0
    res = float(np.max(np.abs(iv.solver_residual))) if iv.solver_residual.size else 0.0
    g1 = iv.gamma.coeffs[0] if iv.gamma.L else 0.0
    return (est_ols, est_iv, se_ols, se_iv, ols.sigma2, iv.sigma2, abs(lower) / spec.T, t_diff, g1, res)


def _run_chunk(spec, base, r, lags, cfg, seed, indices, error_dist):
    out = []
    with threadpool_limits(1), warnings.catch_warnings():
        warnings.simplefilter("ignore", SampleSizeWarning)
        for i in indices:
            try:
                out.append((i, _replicate(spec, base, r, lags, cfg, seed, i, error_dist)))
            except FeedbackIVError:
                out.append((i, None))
    return out


def resolve_workers(workers: int | None = None) -> int:
    """Requested worker count, capped by ``FEEDBACK_IV_THREADS`` (0 or unset means no cap)."""
    auto = os.cpu_count() or 1
    n = auto if workers in (None, 0) else int(workers)
    if n < 1:
        raise InvalidInputError("workers must be positive")
    cap = os.environ.get(THREADS_ENV, "").strip()
    if cap:
        try:
            cap_n = int(cap)
        except ValueError:
            raise InvalidInputError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
        if cap_n < 0:
            raise InvalidInputError(f"{THREADS_ENV} must be non-negative")
        if cap_n:
            n = min(n, cap_n)
    return n


def run_monte_carlo(
    spec: DgpSpec,
    n_reps: int,
    contrast="feedback_direction",
    seed: int = 0,
    *,
    lags: int | None = None,
    workers: int | None = 1,
    cfg: SolverConfig | None = None,
    error_dist: Callable | None = None,
    keep_draws: bool = False,
) -> McSummary:
    """Replicate OLS and IV fits on draws from ``spec``.

    Replication ``i`` uses the stream ``(seed, i)`` and results are reduced in
    index order, so the summary does not depend on ``workers``.  ``lags``
    defaults to the number of feedback vectors (at least one).  Replications
    whose solver or factorization fails are counted; more than 1% raises.
    """
    if n_reps < 2:
        raise InvalidInputError("n_reps must be at least 2")
    r = resolve_contrast(spec, contrast)
    lags = max(spec.L, 1) if lags is None else int(lags)
    if lags < 0:
        raise InvalidInputError("lags must be non-negative")
    base = _base_for_run(spec, seed)
    n_workers = min(resolve_workers(workers), n_reps)
    idx = list(range(n_reps))
    if n_workers == 1:
        results = _run_chunk(spec, base, r, lags, cfg, seed, idx, error_dist)
    else:
        chunks = [idx[w::n_workers] for w in range(n_workers)]
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            futures = [pool.submit(_run_chunk, spec, base, r, lags, cfg, seed, c, error_dist) for c in chunks]
            results = [item for f in futures for item in f.result()]
    slots = [None] * n_reps
    for i, rec in results:
        slots[i] = rec
    ok = [rec for rec in slots if rec is not None]
    failures = n_reps - len(ok)
    if failures > FAILURE_LIMIT * n_reps:
        raise MonteCarloFailure(failures, n_reps)
    if len(ok) < 2:
        raise MonteCarloFailure(failures, n_reps)
    arr = np.array(ok, dtype=np.float64)
    draws = {name: arr[:, j] for j, name in enumerate(_FIELDS)}
    theta = float(r @ spec.beta)
    z = 1.96

    def summarize(est, se, s2):
        n = est.size
        sd = float(np.std(est, ddof=1))
        ratio = s2 / spec.sigma2
        return EstimatorSummary(
            bias=float(np.mean(est) - theta),
            sd=sd,
            size_5pct=float(np.mean(np.abs(est - theta) / se > z)),
            bias_se=sd / math.sqrt(n),
            sigma2_ratio=float(np.mean(ratio)),
            sigma2_ratio_se=float(np.std(ratio, ddof=1) / math.sqrt(n)),
        )

    return McSummary(
        ols=summarize(draws["est_ols"], draws["se_ols"], draws["sigma2_ols"]),
        iv=summarize(draws["est_iv"], draws["se_iv"], draws["sigma2_iv"]),
        lower_trace_ratio=float(np.mean(draws["lower_trace_ratio"])),
        diff_rejection=float(np.mean(draws["t_diff"] > z)) if lags else 0.0,
        theta=theta,
        r=r,
        n_reps=n_reps,
        failures=failures,
        seed=int(seed),
        max_solver_residual=float(np.max(draws["residual"])),
        draws=draws if keep_draws else {},
    )


# ---------------------------------------------------------------------------
# sweeps and files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepConfig:
    """A base spec plus a grid over ``K``, ``rho`` and/or ``T``."""

    template: dict
    grid: dict
    contrast: object = "feedback_direction"
    lags: int | None = None

    def points(self):
        keys = [k for k in ("K", "rho", "T") if k in self.grid]
        values = [list(self.grid[k]) for k in keys]
        if not keys:
            yield DgpSpec.from_dict(self.template)
            return
        for combo in np.array(np.meshgrid(*[np.arange(len(v)) for v in values], indexing="ij")).reshape(len(keys), -1).T:
            d = dict(self.template)
            for k, v, j in zip(keys, values, combo):
                d[k] = v[int(j)]
            yield DgpSpec.from_dict(d)


def load_sweep(source) -> SweepConfig:
    """Parse a JSON spec file (path, text or mapping) with an optional ``grid``."""
    if isinstance(source, dict):
        d = dict(source)
    else:
        text = source if isinstance(source, str) and source.lstrip().startswith("{") else None
        if text is None:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"spec is not valid JSON: {exc}") from None
    if not isinstance(d, dict):
        raise InvalidInputError("spec must be a JSON object")
    grid = d.pop("grid", {}) or {}
    if not isinstance(grid, dict) or set(grid) - {"K", "rho", "T"}:
        raise InvalidInputError("grid may only vary K, rho and T")
    contrast = d.pop("contrast", "feedback_direction")
    if isinstance(contrast, list) and len(contrast) == 2 and contrast[0] == "coordinate":
        contrast = ("coordinate", int(contrast[1]))
    lags = d.pop("lags", None)
    cfg = SweepConfig(template=d, grid=grid, contrast=contrast, lags=lags)
    for spec in cfg.points():  # validate every point up front
        resolve_contrast(spec, contrast)
    return cfg


def run_sweep(cfg: SweepConfig, n_reps: int, seed: int, *, workers: int | None = 1) -> list[dict]:
    rows = []
    for spec in cfg.points():
        s = run_monte_carlo(spec, n_reps, cfg.contrast, seed, lags=cfg.lags, workers=workers)
        for name, est in (("ols", s.ols), ("iv", s.iv)):
            rows.append(
                {
                    "K": spec.K,
                    "rho": spec.rho,
                    "T": spec.T,
                    "estimator": name,
                    "bias": est.bias,
                    "sd": est.sd,
                    "size": est.size_5pct,
                    "lower_trace_ratio": s.lower_trace_ratio,
                    "n_reps": s.n_reps,
                    "failures": s.failures,
                    "seed": s.seed,
                }
            )
    return rows


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def sweep_csv(rows: list[dict]) -> str:
    """Comma-separated, header first, LF line endings, shortest round-trip floats."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow([_cell(row[c]) for c in SWEEP_COLUMNS])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# random regressions drawn from a panel
# ---------------------------------------------------------------------------


def synthetic_panel(T: int = 200, n_series: int = 108, seed: int = 0) -> np.ndarray:
    """Stand-in for a detrended macro panel: factor-driven AR(1) series with mixed persistence."""
    rng = stream(seed, 0)
    n_factors = 6
    rho_f = rng.uniform(0.5, 0.95, n_factors)
    rho_i = rng.uniform(0.0, 0.9, n_series)
    load = rng.standard_normal((n_series, n_factors)) * rng.uniform(0.2, 1.0, n_series)[:, None]
    F = np.zeros((T, n_factors))
    E = np.zeros((T, n_series))
    f = rng.standard_normal(n_factors) / np.sqrt(1 - rho_f**2)
    e = rng.standard_normal(n_series) / np.sqrt(1 - rho_i**2)
    for t in range(T):
        f = rho_f * f + rng.standard_normal(n_factors)
        e = rho_i * e + rng.standard_normal(n_series)
        F[t], E[t] = f, e
    P = F @ load.T + E
    return (P - P.mean(axis=0)) / P.std(axis=0, ddof=1)


def random_regressions(
    panel: np.ndarray,
    K: int,
    n_experiments: int,
    seed: int,
    *,
    lags: int = 1,
    level_z: float = 1.96,
) -> list[dict]:
    """Draw ``K + 1`` distinct columns, regress one on the rest, compare OLS and IV.

    Each record holds the share of coefficients with ``|t_diff| > level_z``, the
    difference in the estimated feedback direction, and its standard errors.
    """
    panel = np.asarray(panel, dtype=np.float64)
    T, P = panel.shape
    if not 1 <= K < P:
        raise InvalidInputError(f"need 1 <= K < {P}")
    out = []
    for i in range(n_experiments):
        rng = stream(seed, i)
        cols = rng.choice(P, size=K + 1, replace=False)
        y, X = panel[:, cols[0]], panel[:, cols[1:]]
        try:
            data = Dataset(X, y)
            ols = ols_fit(data)
            iv = fit_iv(data, lags)
            t_diff = []
            for k in range(K):
                r = np.zeros(K)
                r[k] = 1.0
                se = diff_se(data, iv.gamma, ols.sigma2, r)
                t_diff.append(abs(ols.beta[k] - iv.beta[k]) / se if se > 0 else 0.0)
            alpha = calibrate_from_data(X, y).alphas[0]
            d_alpha = float(alpha @ (ols.beta - iv.beta))
            out.append(
                {
                    "experiment": i,
                    "columns": [int(c) for c in cols],
                    "gamma": list(iv.gamma.coeffs),
                    "share_significant": float(np.mean(np.array(t_diff) > level_z)),
                    "feedback_difference": abs(d_alpha),
                    "feedback_diff_se": diff_se(data, iv.gamma, ols.sigma2, alpha),
                    "ols_se": contrast_se(data, GammaPolynomial(), ols, alpha).se,
                    "iv_se": contrast_se(data, iv.gamma, iv, alpha).se,
                    "failed": False,
                }
            )
        except FeedbackIVError:
            out.append({"experiment": i, "columns": [int(c) for c in cols], "failed": True})
    return out


__all__: Sequence[str] = [
    "DgpSpec",
    "EstimatorSummary",
    "McSummary",
    "SweepConfig",
    "calibrate_from_data",
    "gen_base_regressors",
    "gen_sample",
    "load_sweep",
    "random_regressions",
    "resolve_contrast",
    "resolve_workers",
    "run_monte_carlo",
    "run_sweep",
    "stream",
    "sweep_csv",
    "synthetic_panel",
]
