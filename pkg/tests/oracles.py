"""Dense T x T reference constructions used only by the tests.

Everything here builds the lag matrix explicitly and uses plain inverses, so it
shares no code path with the cross-moment implementation it checks.
"""

import numpy as np


def lag_matrix(T):
    return np.eye(T, k=-1)


def shift_matrix(T, k):
    """Pure shift: D^k for k >= 0, (D')^(-k) for k < 0."""
    D = lag_matrix(T)
    if k >= 0:
        return np.linalg.matrix_power(D, k)
    return np.linalg.matrix_power(D.T, -k)


def gamma_matrix(T, gammas):
    D = lag_matrix(T)
    G = np.zeros((T, T))
    for ell, g in enumerate(gammas, start=1):
        G += g * np.linalg.matrix_power(D, ell)
    return G


def projections(X, gammas):
    T = X.shape[0]
    I = np.eye(T)
    G = gamma_matrix(T, gammas)
    P = X @ np.linalg.inv(X.T @ X) @ X.T
    M = I - P
    S = X.T @ (I - G) @ X
    P_g = X @ np.linalg.inv(S) @ X.T @ (I - G)
    M_g = I - P_g
    return dict(I=I, G=G, P=P, M=M, S=S, P_g=P_g, M_g=M_g)


def exact_equations(X, gammas):
    T = X.shape[0]
    d = projections(X, gammas)
    Dt = lag_matrix(T).T
    return np.array(
        [np.trace(np.linalg.matrix_power(Dt, ell) @ (d["I"] - d["G"]) @ d["M_g"]) for ell in range(1, len(gammas) + 1)]
    )


def collapsed_operator(T, gammas, ell):
    """(D')^ell (I - Gamma) with D'^a D^b replaced by the pure shift of net order."""
    C = shift_matrix(T, -ell).copy()
    for j, g in enumerate(gammas, start=1):
        C -= g * shift_matrix(T, j - ell)
    return C


def collapsed_equations(X, gammas):
    T = X.shape[0]
    d = projections(X, gammas)
    return np.array([np.trace(collapsed_operator(T, gammas, ell) @ d["M_g"]) for ell in range(1, len(gammas) + 1)])


def effective_dof(X, gammas):
    d = projections(X, gammas)
    return np.trace((d["I"] - d["G"]) @ d["M_g"])


def feedback_operator(X, gammas):
    T = X.shape[0]
    d = projections(X, gammas)
    return lag_matrix(T).T @ (d["I"] - d["G"]) @ d["M_g"]


def iv_beta(X, y, gammas):
    T = X.shape[0]
    G = gamma_matrix(T, gammas)
    I = np.eye(T)
    return np.linalg.inv(X.T @ (I - G) @ X) @ X.T @ (I - G) @ y


def iv_sigma2(X, y, gammas):
    d = projections(X, gammas)
    num = y @ (d["I"] - d["G"]) @ d["M_g"] @ y
    return num / np.trace((d["I"] - d["G"]) @ d["M_g"])


def iv_weight(X, gammas, r):
    """r'(X'(I-G)X)^{-1} X'(I-G) as a T-vector."""
    d = projections(X, gammas)
    return r @ np.linalg.inv(d["S"]) @ X.T @ (d["I"] - d["G"])


def f_hat(X, gamma):
    """gamma -> tr(D'M_Gamma)/(T-K) for Gamma = gamma D."""
    T, K = X.shape
    d = projections(X, [gamma])
    return np.trace(lag_matrix(T).T @ d["M_g"]) / (T - K)


def bisect(fun, lo, hi, tol=1e-14, max_iter=200):
    flo = fun(lo)
    fhi = fun(hi)
    assert flo * fhi <= 0, (flo, fhi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if flo * fm <= 0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def ar1_design(rng, T, K, rho):
    V = np.zeros((T, K))
    prev = rng.standard_normal(K) / np.sqrt(1 - rho**2)
    for t in range(T):
        prev = rho * prev + rng.standard_normal(K)
        V[t] = prev
    return V
