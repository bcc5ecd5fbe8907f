import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles as O
from feedback_iv.errors import InvalidInputError, NearSingularTransformError, SingularDesignError
from feedback_iv.projections import (
    CrossMoments,
    GammaPolynomial,
    annihilator,
    annihilator_lower_traces,
    apply_poly,
    effective_dof,
    feedback_operator_traces,
    instrument_gram,
    lower_trace,
    shift,
    trace_equation_values,
)


def test_shift_examples():
    np.testing.assert_array_equal(shift([1, 2, 3, 4], 1), [0, 1, 2, 3])
    v = np.array([3.0, -1.0, 2.0])
    np.testing.assert_array_equal(shift(v, 0), v)
    np.testing.assert_array_equal(shift([5, 6], 3), [0, 0])
    with pytest.raises(InvalidInputError):
        shift(v, -1)


@given(st.integers(0, 6), st.integers(0, 6), st.integers(1, 12))
def test_shift_composes(a, b, T):
    v = np.arange(1.0, T + 1)
    np.testing.assert_array_equal(shift(shift(v, a), b), shift(v, a + b))


def test_shift_matches_lag_matrix(rng):
    v = rng.standard_normal(9)
    for ell in range(4):
        np.testing.assert_allclose(shift(v, ell), O.shift_matrix(9, ell) @ v)


def test_lower_trace_examples():
    assert lower_trace(np.eye(5), 1) == 0.0
    M = np.eye(4) - np.ones((4, 4)) / 4
    assert lower_trace(M, 1) == pytest.approx(-0.75, abs=1e-15)
    assert lower_trace(np.ones((3, 3)), 1) == 2.0
    with pytest.raises(InvalidInputError):
        lower_trace(np.ones((3, 4)), 1)
    with pytest.raises(InvalidInputError):
        lower_trace(np.eye(3), 3)


def test_annihilator_examples(rng):
    np.testing.assert_allclose(annihilator(np.eye(4)), 0.0, atol=1e-14)
    M = annihilator(np.ones((4, 1)))
    np.testing.assert_allclose(M, np.eye(4) - 0.25, atol=1e-15)
    assert np.trace(M) == pytest.approx(3.0)
    X = rng.standard_normal((30, 6))
    with pytest.raises(SingularDesignError) as err:
        annihilator(np.column_stack([X, X[:, 0] + X[:, 1]]))
    assert err.value.rank == 6


@given(st.integers(8, 40), st.integers(1, 6), st.integers(0, 2**31))
def test_annihilator_properties(T, K, seed):
    X = np.random.default_rng(seed).standard_normal((T, K))
    M = annihilator(X)
    np.testing.assert_allclose(M, M.T, atol=1e-12)
    np.testing.assert_allclose(M @ M, M, atol=1e-10)
    np.testing.assert_allclose(M @ X, 0.0, atol=1e-10 * np.abs(X).max())
    assert abs(np.trace(M) - (T - K)) < 1e-8
    assert abs(lower_trace(np.eye(T) - M, 1)) <= K + 1e-10


def test_gamma_polynomial_validation():
    assert GammaPolynomial().is_zero
    assert GammaPolynomial((0.5, -0.49)).L == 2
    with pytest.raises(InvalidInputError):
        GammaPolynomial((0.6, 0.4))
    with pytest.raises(InvalidInputError):
        GammaPolynomial((np.nan,))


def test_ones_design_trace_equation():
    mom = CrossMoments(np.ones((4, 1)))
    assert trace_equation_values(mom, GammaPolynomial((0.0,)))[0] == pytest.approx(-0.75, abs=1e-15)
    X = np.ones((4, 1))
    for gamma in (-0.4, -0.1, 0.2, 0.45):
        dense = np.trace(O.lag_matrix(4).T @ O.projections(X, [gamma])["M_g"]) - gamma * 3
        assert trace_equation_values(mom, GammaPolynomial((gamma,)))[0] == pytest.approx(dense, abs=1e-13)


@pytest.mark.parametrize("gammas", [[0.0], [0.3], [-0.45], [0.2, -0.3], [0.1, 0.2, -0.15]])
def test_traces_match_dense(rng, gammas):
    T, K = 37, 5
    X = O.ar1_design(rng, T, K, 0.6)
    mom = CrossMoments.from_design(X, len(gammas))
    g = GammaPolynomial(tuple(gammas))
    np.testing.assert_allclose(trace_equation_values(mom, g, exact=True), O.exact_equations(X, gammas), atol=1e-11)
    np.testing.assert_allclose(trace_equation_values(mom, g), O.collapsed_equations(X, gammas), atol=1e-11)
    assert effective_dof(mom, g) == pytest.approx(O.effective_dof(X, gammas), abs=1e-10)
    B = O.feedback_operator(X, gammas)
    np.testing.assert_allclose(feedback_operator_traces(mom, g), [np.trace(B), np.trace(B @ B), np.trace(B.T @ B)], atol=1e-10)
    Z = (np.eye(T) - O.gamma_matrix(T, gammas).T) @ X
    np.testing.assert_allclose(instrument_gram(mom, g), Z.T @ Z, atol=1e-10)


def test_effective_dof_zero_gamma_exact(rng):
    X = rng.standard_normal((50, 7))
    assert effective_dof(CrossMoments(X), GammaPolynomial()) == 43.0


def test_effective_dof_bounds(rng):
    T, K, gamma = 200, 50, 0.3
    for _ in range(5):
        X = O.ar1_design(rng, T, K, 0.5)
        dof = effective_dof(CrossMoments(X), GammaPolynomial((gamma,)))
        assert (0.7 / 1.3) * 150 <= dof <= (1.3 / 0.7) * 150


def test_annihilator_lower_traces_dense(rng):
    X = O.ar1_design(rng, 40, 4, 0.7)
    M = O.projections(X, [0.0])["M"]
    got = annihilator_lower_traces(CrossMoments(X, max_lag=5), 5)
    np.testing.assert_allclose(got, [lower_trace(M, ell) for ell in range(1, 6)], atol=1e-12)


def test_apply_poly_matches_gamma_matrix(rng):
    g = GammaPolynomial((0.3, -0.2))
    v = rng.standard_normal(12)
    np.testing.assert_allclose(g.apply(v), (np.eye(12) - O.gamma_matrix(12, [0.3, -0.2])) @ v)
    np.testing.assert_allclose(apply_poly(g.transform_poly(), v), g.apply(v))


def test_near_singular_transform():
    # columns nearly collinear after the transform: x2 = (I - Gamma)^{-1}-ish perturbation of x1
    T = 30
    x = np.linspace(1.0, 2.0, T)
    X = np.column_stack([x, x + 1e-13 * np.arange(T) ** 2])
    with pytest.raises((NearSingularTransformError, SingularDesignError)):
        trace_equation_values(CrossMoments(X), GammaPolynomial((0.3,)))


def _oblique_case(seed):
    rng = np.random.default_rng(seed)
    T = int(rng.integers(15, 61))
    K = int(rng.integers(1, min(12, T // 3) + 1))
    gamma = float(rng.uniform(-0.5, 0.5))
    X = O.ar1_design(rng, T, K, float(rng.uniform(-0.9, 0.9)))
    return T, K, gamma, X


def oblique_errors(T, K, gamma, X):
    """Relative errors of the four oblique-projection identities."""
    d = O.projections(X, [gamma])
    I, G, P, M, M_g, P_g = d["I"], d["G"], d["P"], d["M"], d["M_g"], d["P_g"]
    A = np.linalg.solve(I - G, G)

    def rel(a, b):
        return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)

    return (
        rel(M_g, np.linalg.solve(I - P @ G, M)),
        rel((I - G) @ M_g, M @ np.linalg.inv(I + A @ M)),
        rel(P_g, np.linalg.solve(I - P @ G, P @ (I - G))),
        np.linalg.eigvalsh((I - G) @ M_g + M_g.T @ (I - G.T)).min(),
    )


@given(st.integers(0, 2**31))
def test_oblique_identities(seed):
    e1, e2, e3, min_eig = oblique_errors(*_oblique_case(seed))
    assert max(e1, e2, e3) < 1e-8
    assert min_eig >= -1e-8
