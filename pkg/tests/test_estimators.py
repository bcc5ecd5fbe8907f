import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles as O
from feedback_iv.errors import InvalidInputError, NoConvergenceError, SingularDesignError
from feedback_iv.estimators import (
    Dataset,
    SampleSizeWarning,
    SolverConfig,
    fit_iv,
    fixed_point_map,
    iv_fit,
    ols_fit,
    solve_gamma,
    solve_gamma_multi,
)
from feedback_iv.projections import CrossMoments, GammaPolynomial, trace_equation_values

ROOT = (3 - math.sqrt(21)) / 6


def quiet(fn, *args, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SampleSizeWarning)
        return fn(*args, **kw)


def test_dataset_validation():
    with pytest.raises(InvalidInputError):
        Dataset(np.ones((3, 3)), np.ones(3))
    with pytest.raises(InvalidInputError):
        Dataset(np.ones((4, 1)), np.array([1.0, np.nan, 0.0, 1.0]))
    with pytest.raises(InvalidInputError):
        Dataset(np.ones((4, 1)), np.ones(5))
    with pytest.raises(SingularDesignError):
        Dataset(np.column_stack([np.ones(6), np.ones(6)]), np.arange(6.0))
    d = Dataset(np.ones((4, 1)), np.arange(4.0))
    assert d.labels == ("x1",) and d.T == 4 and d.K == 1


def test_ols_examples(rng):
    X = rng.standard_normal((30, 3))
    b = np.array([1.0, -2.0, 0.5])
    fit = ols_fit(Dataset(X, X @ b))
    np.testing.assert_allclose(fit.beta, b, rtol=1e-12)
    assert fit.sigma2 == pytest.approx(0.0, abs=1e-25)
    # square identity design has no degrees of freedom, so embed it in T > K
    fit = ols_fit(Dataset(np.vstack([np.eye(2), np.zeros((1, 2))]), np.array([3.0, 5.0, 0.0])))
    np.testing.assert_allclose(fit.beta, [3.0, 5.0])
    y = rng.standard_normal(30)
    fit = ols_fit(Dataset(X, y))
    np.testing.assert_allclose(fit.beta, np.linalg.solve(X.T @ X, X.T @ y), rtol=1e-10)
    e = y - X @ fit.beta
    assert fit.sigma2 == pytest.approx(e @ e / 27)
    assert fit.dof == 27


def test_iv_zero_gamma_is_ols(rng):
    d = Dataset(rng.standard_normal((40, 4)), rng.standard_normal(40))
    a, b = ols_fit(d), iv_fit(d, GammaPolynomial())
    np.testing.assert_array_equal(a.beta, b.beta)
    assert a.sigma2 == b.sigma2 and a.dof == b.dof


@pytest.mark.parametrize("gammas", [[0.3], [-0.4], [0.25, -0.2]])
def test_iv_matches_dense(rng, gammas):
    T, K = 45, 4
    X = O.ar1_design(rng, T, K, 0.5)
    y = rng.standard_normal(T)
    fit = iv_fit(Dataset(X, y), GammaPolynomial(tuple(gammas)))
    np.testing.assert_allclose(fit.beta, O.iv_beta(X, y, gammas), rtol=1e-10)
    assert fit.sigma2 == pytest.approx(O.iv_sigma2(X, y, gammas), rel=1e-10)
    assert fit.dof == pytest.approx(O.effective_dof(X, gammas), rel=1e-12)
    # oblique form through the orthogonal annihilator
    d = O.projections(X, gammas)
    A = np.linalg.solve(d["I"] - d["G"], d["G"])
    alt = np.linalg.solve(X.T @ X, X.T @ np.linalg.solve(d["I"] + A @ d["M"], y))
    np.testing.assert_allclose(fit.beta, alt, rtol=1e-8)


@given(st.integers(0, 2**31))
def test_sigma2_nonnegative(seed):
    rng = np.random.default_rng(seed)
    T = int(rng.integers(8, 50))
    K = int(rng.integers(1, T // 2))
    X = O.ar1_design(rng, T, K, float(rng.uniform(-0.95, 0.95)))
    # residual nearly in the column space stresses roundoff
    y = X @ rng.standard_normal(K) + 10.0 ** rng.uniform(-12, 0) * rng.standard_normal(T)
    gamma = float(rng.choice([rng.uniform(-0.99, 0.99), 0.989, -0.989]))
    try:
        fit = iv_fit(Dataset(X, y), GammaPolynomial((gamma,)))
    except Exception as exc:  # near-singular transforms are allowed to refuse
        assert type(exc).__name__ == "NearSingularTransformError"
        return
    assert fit.sigma2 >= 0.0


@given(st.integers(0, 2**31))
def test_sigma2_invariant_to_beta(seed):
    rng = np.random.default_rng(seed)
    X = O.ar1_design(rng, 60, 5, 0.6)
    y = rng.standard_normal(60)
    g = GammaPolynomial((float(rng.uniform(-0.5, 0.5)),))
    b = 10 * rng.standard_normal(5)
    s1 = iv_fit(Dataset(X, y), g).sigma2
    s2 = iv_fit(Dataset(X, y + X @ b), g).sigma2
    assert s2 == pytest.approx(s1, rel=1e-10)


def test_closed_form_root():
    sol = quiet(solve_gamma, Dataset(np.ones((4, 1)), np.array([1.0, 2.5, 0.5, 3.0])))
    assert sol.gamma.coeffs[0] == pytest.approx(ROOT, abs=1e-8)
    assert 3 * ROOT**2 - 3 * ROOT - 1 == pytest.approx(0.0, abs=1e-14)


def test_zero_lower_trace_gives_zero_gamma():
    # alternating columns: every lower-diagonal trace of M is zero by symmetry
    T = 40
    t = np.arange(T)
    X = np.column_stack([np.cos(np.pi * t / 2), np.sin(np.pi * t / 2)])
    d = Dataset(X, np.ones(T))
    mom = CrossMoments(X)
    assert trace_equation_values(mom, GammaPolynomial((0.0,)))[0] == pytest.approx(0.0, abs=1e-12)
    assert abs(solve_gamma(d).gamma.coeffs[0]) < 1e-12
    # spikes at dates further apart than the lag order: P is diagonal
    X = np.zeros((T, 3))
    X[[2, 15, 30], [0, 1, 2]] = 1.0
    d = Dataset(X, np.ones(T))
    np.testing.assert_allclose(trace_equation_values(d.moments(3), GammaPolynomial((0.0,) * 3)), 0.0, atol=1e-14)
    np.testing.assert_allclose(solve_gamma_multi(d, 3).gamma.as_array(), 0.0, atol=1e-12)


def _random_design(seed):
    rng = np.random.default_rng(seed)
    T = int(rng.integers(30, 121))
    K = int(rng.integers(1, math.ceil(T / 5)))
    X = O.ar1_design(rng, T, K, float(rng.uniform(-0.9, 0.95)))
    return X, rng.standard_normal(T)


@given(st.integers(0, 2**31))
def test_fixed_point_matches_bisection(seed):
    X, y = _random_design(seed)
    sol = solve_gamma(Dataset(X, y))
    gamma = sol.gamma.coeffs[0]
    assert -0.5 <= gamma <= 0.5
    assert sol.iterations <= 100
    T, K = X.shape
    root = O.bisect(lambda g: O.f_hat(X, g) - g, -0.5, 0.5)
    assert gamma == pytest.approx(root, abs=1e-10)


@given(st.integers(0, 2**31))
def test_contraction(seed):
    X, y = _random_design(seed)
    d = Dataset(X, y)
    rng = np.random.default_rng(seed + 1)
    g1, g2 = rng.uniform(-0.5, 0.5, 2)
    assert abs(fixed_point_map(d, g1) - fixed_point_map(d, g2)) <= 0.5 * abs(g1 - g2) + 1e-10


def test_fixed_point_map_dense(rng):
    X = O.ar1_design(rng, 30, 3, 0.7)
    d = Dataset(X, np.zeros(30))
    for g in (-0.3, 0.0, 0.4):
        assert fixed_point_map(d, g) == pytest.approx(O.f_hat(X, g), abs=1e-13)


def test_multi_agrees_with_scalar(rng):
    X = O.ar1_design(rng, 300, 20, 0.8)
    d = Dataset(X, rng.standard_normal(300))
    a = solve_gamma(d).gamma.coeffs[0]
    b = solve_gamma_multi(d, 1).gamma.coeffs[0]
    assert b == pytest.approx(a, abs=1e-10)


def test_multi_l2_dense(rng):
    T, K = 300, 20
    X = O.ar1_design(rng, T, K, 0.8)
    sol = solve_gamma_multi(Dataset(X, rng.standard_normal(T)), 2)
    assert np.max(np.abs(sol.residual)) <= 1e-9 * (T - K)
    dense = O.collapsed_equations(X, list(sol.gamma.coeffs))
    assert np.max(np.abs(dense)) <= 1e-9 * (T - K)


def test_multi_validation(rng):
    d = Dataset(rng.standard_normal((20, 2)), rng.standard_normal(20))
    with pytest.raises(InvalidInputError):
        solve_gamma_multi(d, 0)
    with pytest.raises(InvalidInputError):
        solve_gamma_multi(d, 5)


def test_no_convergence_reports_state(rng):
    d = Dataset(O.ar1_design(rng, 60, 5, 0.8), rng.standard_normal(60))
    with pytest.raises(NoConvergenceError) as err:
        solve_gamma(d, SolverConfig(max_iter=2))
    assert err.value.iterations == 2 and err.value.last_iterate is not None


def test_sample_size_warning(rng):
    d = Dataset(rng.standard_normal((20, 5)), rng.standard_normal(20))
    with pytest.warns(SampleSizeWarning):
        solve_gamma(d)


def test_solver_config_validation():
    with pytest.raises(InvalidInputError):
        SolverConfig(tol=0)
    with pytest.raises(InvalidInputError):
        SolverConfig(max_iter=0)


def test_rotation_invariance(rng):
    X = O.ar1_design(rng, 120, 6, 0.7)
    y = rng.standard_normal(120)
    A = rng.standard_normal((6, 6)) + 3 * np.eye(6)
    f1 = fit_iv(Dataset(X, y))
    f2 = fit_iv(Dataset(X @ A, y))
    assert f2.gamma.coeffs[0] == pytest.approx(f1.gamma.coeffs[0], abs=1e-10)
    np.testing.assert_allclose(f2.beta, np.linalg.solve(A, f1.beta), rtol=1e-8, atol=1e-12)
    r = rng.standard_normal(6)
    assert (A.T @ r) @ f2.beta == pytest.approx(r @ f1.beta, rel=1e-8)


def test_feedback_correction_at_root(rng):
    # the defining property, in the collapsed convention used by the solver
    X = O.ar1_design(rng, 50, 5, 0.8)
    sol = solve_gamma(Dataset(X, rng.standard_normal(50)))
    gamma = sol.gamma.coeffs[0]
    assert abs(O.collapsed_equations(X, [gamma])[0]) <= 1e-12 * 45 * 10
    # the literal finite-sample trace differs only by a boundary term
    d = O.projections(X, [gamma])
    B = O.feedback_operator(X, [gamma])
    assert np.trace(B) == pytest.approx(gamma * d["M_g"][-1, -1], abs=1e-10)


def test_fit_iv_lags_zero_is_ols(rng):
    d = Dataset(rng.standard_normal((30, 3)), rng.standard_normal(30))
    np.testing.assert_array_equal(fit_iv(d, 0).beta, ols_fit(d).beta)
