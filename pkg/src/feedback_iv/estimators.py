"""OLS, the transformed-instrument estimator, and the gamma solvers."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from .errors import InvalidInputError, NoConvergenceError, SingularDesignError
from .projections import (
    ADMISSIBLE_BOUND,
    LEAD,
    CrossMoments,
    GammaPolynomial,
    effective_dof,
    factor_transform,
    oblique_trace,
    trace_equation_values,
)


class SampleSizeWarning(UserWarning):
    """K >= T/5: existence of a unique gamma root is no longer guaranteed."""


@dataclass(frozen=True)
class Dataset:
    """Outcome ``y`` (length T) and regressors ``X`` (T x K) with column labels."""

    X: np.ndarray
    y: np.ndarray
    labels: tuple = ()
    check_rank: bool = True
    _moments: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise InvalidInputError(f"incompatible shapes X{X.shape}, y{y.shape}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise InvalidInputError("data contain non-finite values")
        T, K = X.shape
        if T <= K:
            raise InvalidInputError(f"need T > K, got T={T}, K={K}")
        labels = tuple(self.labels) if len(self.labels) else tuple(f"x{k + 1}" for k in range(K))
        if len(labels) != K:
            raise InvalidInputError(f"{len(labels)} labels for {K} columns")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "labels", labels)
        if self.check_rank:
            _qr(X)

    @property
    def T(self) -> int:
        return self.X.shape[0]

    @property
    def K(self) -> int:
        return self.X.shape[1]

    def moments(self, L: int = 1) -> CrossMoments:
        """Cross moments covering lags up to ``2L + 2``, cached per dataset."""
        need = 2 * L + 2
        mom = self._moments.get("mom")
        if mom is None or mom.max_lag < need:
            mom = CrossMoments(self.X, max_lag=need)
            self._moments["mom"] = mom
        return mom


@dataclass(frozen=True)
class FitResult:
    beta: np.ndarray
    sigma2: float
    dof: float
    gamma: GammaPolynomial
    solver_iterations: int = 0
    solver_residual: np.ndarray = field(default_factory=lambda: np.zeros(0))
    estimator: str = "ols"
    projected: bool = False

    def to_dict(self) -> dict:
        return {
            "estimator": self.estimator,
            "beta": [float(b) for b in self.beta],
            "sigma2": float(self.sigma2),
            "dof": float(self.dof),
            "gamma": list(self.gamma.coeffs),
            "solver_iterations": int(self.solver_iterations),
            "solver_residual": [float(r) for r in self.solver_residual],
            "projected": bool(self.projected),
        }


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-12
    max_iter: int = 500
    jacobian_step: float = 1e-7
    initial: GammaPolynomial | None = None

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidInputError("tol must be positive")
        if self.max_iter < 1:
            raise InvalidInputError("max_iter must be at least 1")
        if not self.jacobian_step > 0:
            raise InvalidInputError("jacobian_step must be positive")


@dataclass(frozen=True)
class GammaSolution:
    """A solved gamma plus the solver trace."""

    gamma: GammaPolynomial
    iterations: int
    residual: np.ndarray
    projected: bool = False


def _qr(X):
    Q, R, piv = sla.qr(X, mode="economic", pivoting=True, check_finite=False)
    d = np.abs(np.diag(R))
    tol = max(X.shape) * np.finfo(np.float64).eps * (d[0] if d.size else 0.0)
    rank = int(np.sum(d > tol))
    if rank < X.shape[1]:
        raise SingularDesignError(rank, X.shape[1])
    return Q, R, piv


def ols_fit(data: Dataset) -> FitResult:
    """Least squares through a pivoted QR; ``sigma2 = e'e / (T - K)``."""
    Q, R, piv = _qr(data.X)
    beta = np.empty(data.K)
    beta[piv] = sla.solve_triangular(R, Q.T @ data.y, check_finite=False)
    e = data.y - data.X @ beta
    dof = float(data.T - data.K)
    return FitResult(beta=beta, sigma2=float(e @ e) / dof, dof=dof, gamma=GammaPolynomial(), estimator="ols")


def iv_fit(data: Dataset, g, *, solution: GammaSolution | None = None) -> FitResult:
    """``beta = (X'(I-Gamma)X)^{-1} X'(I-Gamma) y`` with its variance estimate.

    ``sigma2 = y'(I-Gamma)M_Gamma y / (T - K_Gamma)``, evaluated as
    ``e'(I-Gamma)e`` on the IV residual ``e = M_Gamma y``.  Roundoff below zero
    is clipped.  ``Gamma = 0`` reproduces :func:`ols_fit`.
    """
    g = g if isinstance(g, GammaPolynomial) else GammaPolynomial(tuple(np.atleast_1d(g)))
    extra = {}
    if solution is not None:
        extra = dict(solver_iterations=solution.iterations, solver_residual=solution.residual, projected=solution.projected)
    if g.is_zero:
        ols = ols_fit(data)
        return FitResult(beta=ols.beta, sigma2=ols.sigma2, dof=ols.dof, gamma=g, estimator="iv", **extra)
    mom = data.moments(g.L)
    fac = factor_transform(mom, g)
    beta = fac.solve(data.X.T @ g.apply(data.y))
    e = data.y - data.X @ beta
    dof = effective_dof(mom, g, fac)
    sigma2 = max(float(e @ g.apply(e)), 0.0) / dof
    return FitResult(beta=beta, sigma2=sigma2, dof=dof, gamma=g, estimator="iv", **extra)


def _warn_sample_size(data: Dataset) -> None:
    if data.K >= data.T / 5:
        warnings.warn(
            f"K={data.K} >= T/5={data.T / 5:g}: a unique gamma root is not guaranteed",
            SampleSizeWarning,
            stacklevel=3,
        )


def fixed_point_map(data: Dataset, gamma: float) -> float:
    """``gamma -> tr(D'M_Gamma) / (T - K)`` for ``Gamma = gamma D``."""
    g = GammaPolynomial((gamma,))
    return oblique_trace(data.moments(1), g, {(LEAD,): 1.0}) / (data.T - data.K)


def solve_gamma(data: Dataset, cfg: SolverConfig | None = None) -> GammaSolution:
    """Single-lag gamma by fixed-point iteration ``gamma <- tr(D'M_Gamma)/(T-K)``.

    Stops once successive iterates differ by at most ``cfg.tol``.
    """
    cfg = cfg or SolverConfig()
    _warn_sample_size(data)
    gamma = float(cfg.initial.coeffs[0]) if cfg.initial is not None and cfg.initial.L else 0.0
    for it in range(1, cfg.max_iter + 1):
        if abs(gamma) > ADMISSIBLE_BOUND:
            raise NoConvergenceError(
                f"iterate {gamma:.6g} left the admissible region", last_iterate=gamma, iterations=it - 1
            )
        new = fixed_point_map(data, gamma)
        step = abs(new - gamma)
        gamma = new
        if step <= cfg.tol:
            break
    else:
        raise NoConvergenceError(
            f"fixed-point iteration did not converge in {cfg.max_iter} iterations (last step {step:.3e})",
            last_iterate=gamma,
            residual=step,
            iterations=cfg.max_iter,
        )
    if abs(gamma) > ADMISSIBLE_BOUND:
        raise NoConvergenceError(f"fixed point {gamma:.6g} is not admissible", last_iterate=gamma, iterations=it)
    g = GammaPolynomial((gamma,))
    return GammaSolution(gamma=g, iterations=it, residual=trace_equation_values(data.moments(1), g))


def _project(gamma: np.ndarray) -> tuple[np.ndarray, bool]:
    total = float(np.sum(np.abs(gamma)))
    if total > ADMISSIBLE_BOUND:
        return gamma * (ADMISSIBLE_BOUND / total), True
    return gamma, False


def solve_gamma_multi(data: Dataset, L: int, cfg: SolverConfig | None = None) -> GammaSolution:
    """Solve the ``L`` trace equations by damped Newton with a finite-difference Jacobian.

    Steps are halved until the residual norm drops.  Iterates outside the
    admissible region are scaled back to its boundary and flagged.  Converged
    when the residual is at most ``tol * (T - K)`` or the step is at most ``tol``.
    """
    cfg = cfg or SolverConfig()
    if L < 1:
        raise InvalidInputError("L must be at least 1")
    if not L < data.T / 4:
        raise InvalidInputError(f"need L < T/4, got L={L}, T={data.T}")
    _warn_sample_size(data)
    mom = data.moments(L)
    scale = float(data.T - data.K)

    def H(gam):
        return trace_equation_values(mom, GammaPolynomial(tuple(gam)))

    if cfg.initial is not None and cfg.initial.L:
        gam = np.zeros(L)
        n = min(L, cfg.initial.L)
        gam[:n] = cfg.initial.as_array()[:n]
    else:
        gam = np.zeros(L)
    gam, projected = _project(gam)
    h = H(gam)
    it = 0
    while True:
        if np.max(np.abs(h)) <= cfg.tol * scale:
            break
        if it >= cfg.max_iter:
            raise NoConvergenceError(
                f"Newton iteration did not converge in {cfg.max_iter} iterations",
                last_iterate=gam,
                residual=h,
                iterations=it,
            )
        J = np.empty((L, L))
        for j in range(L):
            step = cfg.jacobian_step
            trial = gam.copy()
            trial[j] += step
            if np.sum(np.abs(trial)) > ADMISSIBLE_BOUND:
                step = -step
                trial[j] = gam[j] + step
            J[:, j] = (H(trial) - h) / step
        try:
            delta = np.linalg.solve(J, -h)
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(J, -h, rcond=None)[0]
        lam = 1.0
        hnorm = np.linalg.norm(h)
        for _ in range(60):
            cand, was_projected = _project(gam + lam * delta)
            hc = H(cand)
            if np.linalg.norm(hc) < hnorm:
                break
            lam *= 0.5
        else:
            # no decrease available: accept only if already at the roundoff floor
            if np.max(np.abs(h)) <= 1e3 * cfg.tol * scale:
                break
            raise NoConvergenceError(
                "line search failed to reduce the residual", last_iterate=gam, residual=h, iterations=it
            )
        it += 1
        moved = float(np.max(np.abs(cand - gam)))
        gam, h = cand, hc
        projected = projected or was_projected
        if moved <= cfg.tol:
            break
    return GammaSolution(gamma=GammaPolynomial(tuple(gam)), iterations=it, residual=h, projected=projected)


def fit_iv(data: Dataset, L: int = 1, cfg: SolverConfig | None = None) -> FitResult:
    """Solve for gamma with ``L`` lags and fit; ``L = 0`` is plain OLS."""
    if L == 0:
        return iv_fit(data, GammaPolynomial())
    sol = solve_gamma(data, cfg) if L == 1 else solve_gamma_multi(data, L, cfg)
    return iv_fit(data, sol.gamma, solution=sol)


__all__: Sequence[str] = [
    "Dataset",
    "FitResult",
    "GammaSolution",
    "SampleSizeWarning",
    "SolverConfig",
    "fit_iv",
    "fixed_point_map",
    "iv_fit",
    "ols_fit",
    "solve_gamma",
    "solve_gamma_multi",
]
