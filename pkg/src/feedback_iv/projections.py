"""Shift-operator algebra, annihilators and lower-diagonal traces.

The lag matrix ``D`` (ones on the first subdiagonal) is never stored.  Operators
built from ``D`` and its transpose are represented as polynomials over *words*:
tuples of letters where ``LAG`` (-1) stands for ``D`` and ``LEAD`` (+1) for
``D'``, read left to right as a matrix product.  A word ``W`` acts on a series
as ``(W v)_t = v_{t+n}`` with ``n`` the letter sum, and the row ``t`` survives
only if every intermediate index stays inside the sample.  That makes every
quadratic form ``X' W X`` a windowed lagged cross product, which
:class:`CrossMoments` evaluates from ``K x K`` sums precomputed once per design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Tuple

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import InvalidInputError, NearSingularTransformError, SingularDesignError

LAG = -1
LEAD = 1

Word = Tuple[int, ...]
Poly = Dict[Word, float]

# sum |gamma_l| bound standing in for ||Gamma|| < 1 - c
ADMISSIBLE_BOUND = 0.99
# condition estimates of X'(I - Gamma)X
SINGULAR_CONDITION = 1e12
REFINE_CONDITION = 1e10


# ---------------------------------------------------------------------------
# shifts
# ---------------------------------------------------------------------------


def shift(v, ell: int = 1) -> np.ndarray:
    """Lag ``v`` by ``ell`` periods along axis 0, filling with zeros.

    ``shift(v, ell)[t] = v[t - ell]`` for ``t >= ell`` and 0 before that, i.e.
    ``D**ell @ v`` without forming ``D``.
    """
    if ell < 0:
        raise InvalidInputError(f"lag must be non-negative, got {ell}")
    v = np.asarray(v, dtype=np.float64)
    if ell == 0:
        return v.copy()
    out = np.zeros_like(v)
    if ell < v.shape[0]:
        out[ell:] = v[: v.shape[0] - ell]
    return out


def lead(v, ell: int = 1) -> np.ndarray:
    """Lead ``v`` by ``ell`` periods (``D'**ell @ v``), zero filled at the end."""
    if ell < 0:
        raise InvalidInputError(f"lead must be non-negative, got {ell}")
    v = np.asarray(v, dtype=np.float64)
    if ell == 0:
        return v.copy()
    out = np.zeros_like(v)
    if ell < v.shape[0]:
        out[: v.shape[0] - ell] = v[ell:]
    return out


def shift_power(k: int) -> Word:
    """Word for the pure shift ``D**k`` (``k >= 0``) or ``D'**(-k)`` (``k < 0``)."""
    return (LAG,) * k if k >= 0 else (LEAD,) * (-k)


def apply_word(word: Word, v) -> np.ndarray:
    out = np.asarray(v, dtype=np.float64)
    for letter in reversed(word):
        out = shift(out, 1) if letter == LAG else lead(out, 1)
    return out


def apply_poly(poly: Poly, v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    out = np.zeros_like(v)
    for word, c in poly.items():
        out += c * apply_word(word, v)
    return out


# ---------------------------------------------------------------------------
# word polynomials
# ---------------------------------------------------------------------------


def poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            w = wa + wb
            out[w] = out.get(w, 0.0) + ca * cb
    return out


def poly_transpose(a: Poly) -> Poly:
    return {tuple(-x for x in reversed(w)): c for w, c in a.items()}


def collapse(a: Poly) -> Poly:
    """Replace each word by the pure shift with the same net displacement.

    This is the algebra of shifts on an unbounded sequence, where ``D'D = I``.
    It differs from the finite-sample product only in boundary rows.
    """
    out: Poly = {}
    for w, c in a.items():
        key = shift_power(-sum(w))
        out[key] = out.get(key, 0.0) + c
    return out


def word_window(word: Word, T: int) -> tuple[int, int, int]:
    """Return ``(n, lo, hi)``: ``(W v)_t = v_{t+n}`` for rows ``lo <= t <= hi`` (0-based)."""
    p = 0
    pmin = pmax = 0
    for letter in word:
        p += letter
        pmin = min(pmin, p)
        pmax = max(pmax, p)
    return p, -pmin, T - 1 - pmax


def poly_trace(poly: Poly, T: int) -> float:
    total = 0.0
    for w, c in poly.items():
        n, lo, hi = word_window(w, T)
        if n == 0 and hi >= lo:
            total += c * (hi - lo + 1)
    return total


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaPolynomial:
    """Lag coefficients ``(gamma_1, ..., gamma_L)`` of ``Gamma = sum_l gamma_l D**l``."""

    coeffs: Tuple[float, ...] = ()

    def __post_init__(self):
        c = tuple(float(x) for x in np.atleast_1d(np.asarray(self.coeffs, dtype=np.float64)))
        if not all(math.isfinite(x) for x in c):
            raise InvalidInputError("gamma coefficients must be finite")
        if sum(abs(x) for x in c) > ADMISSIBLE_BOUND + 1e-12:
            raise InvalidInputError(
                f"sum of |gamma| = {sum(abs(x) for x in c):.6g} exceeds the admissible bound {ADMISSIBLE_BOUND}"
            )
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, L: int) -> "GammaPolynomial":
        return cls((0.0,) * L)

    @property
    def L(self) -> int:
        return len(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return all(x == 0.0 for x in self.coeffs)

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=np.float64)

    def transform_poly(self) -> Poly:
        """``I - Gamma`` as a word polynomial."""
        poly: Poly = {(): 1.0}
        for ell, g in enumerate(self.coeffs, start=1):
            if g != 0.0:
                poly[shift_power(ell)] = -g
        return poly

    def apply(self, v) -> np.ndarray:
        """``(I - Gamma) v``."""
        v = np.asarray(v, dtype=np.float64)
        out = v.copy()
        for ell, g in enumerate(self.coeffs, start=1):
            if g != 0.0:
                out -= g * shift(v, ell)
        return out

    def apply_transpose(self, v) -> np.ndarray:
        """``(I - Gamma') v``, the instrument transform."""
        v = np.asarray(v, dtype=np.float64)
        out = v.copy()
        for ell, g in enumerate(self.coeffs, start=1):
            if g != 0.0:
                out -= g * lead(v, ell)
        return out


def _as_gamma(g) -> GammaPolynomial:
    return g if isinstance(g, GammaPolynomial) else GammaPolynomial(tuple(np.atleast_1d(g)))


# ---------------------------------------------------------------------------
# dense helpers
# ---------------------------------------------------------------------------


def numerical_rank(X) -> int:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidInputError("design must be a 2-d array")
    if X.shape[1] == 0:
        return 0
    R = sla.qr(X, mode="r", pivoting=True, check_finite=False)[0]
    d = np.abs(np.diag(R))
    if d.size == 0 or d[0] == 0.0:
        return 0
    tol = max(X.shape) * np.finfo(np.float64).eps * d[0]
    return int(np.sum(d > tol))


def check_full_rank(X) -> None:
    rank = numerical_rank(X)
    K = np.asarray(X).shape[1]
    if rank < K:
        raise SingularDesignError(rank, K)


def lower_trace(A, ell: int = 1) -> float:
    """Sum of the ``ell``-th subdiagonal, ``sum_t A[t, t-ell] = tr(D'**ell A)``."""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"lower_trace needs a square matrix, got shape {A.shape}")
    if not 1 <= ell < A.shape[0]:
        raise InvalidInputError(f"need 1 <= ell < T, got ell={ell}, T={A.shape[0]}")
    return float(np.trace(A, offset=-ell))


def annihilator(X) -> np.ndarray:
    """Dense ``M = I - X (X'X)^{-1} X'`` from a pivoted QR of ``X``.

    Only meant for small samples: the estimators work from cross moments.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidInputError("design must be a 2-d array")
    T, K = X.shape
    Q, R, _ = sla.qr(X, mode="economic", pivoting=True, check_finite=False)
    d = np.abs(np.diag(R))
    tol = max(T, K) * np.finfo(np.float64).eps * (d[0] if d.size else 0.0)
    rank = int(np.sum(d > tol))
    if rank < K:
        raise SingularDesignError(rank, K)
    return np.eye(T) - Q @ Q.T


# ---------------------------------------------------------------------------
# cross moments
# ---------------------------------------------------------------------------


class CrossMoments:
    """Lagged cross products of a ``T x K`` design.

    ``lagged(n)`` is ``sum_t x_t x_{t+n}'`` over every admissible ``t``; any
    windowed version is obtained by removing a handful of edge outer products.
    """

    def __init__(self, X, max_lag: int = 3):
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise InvalidInputError("design must be a 2-d array")
        self.X = X
        self.T, self.K = X.shape
        self.max_lag = max_lag
        self._lagged: dict[int, np.ndarray] = {}
        for n in range(min(max_lag, self.T - 1) + 1):
            self.lagged(n)

    @classmethod
    def from_design(cls, X, L: int = 1) -> "CrossMoments":
        return cls(X, max_lag=2 * L + 2)

    def lagged(self, n: int) -> np.ndarray:
        if n < 0:
            return self.lagged(-n).T
        if n not in self._lagged:
            X = self.X
            if n >= self.T:
                self._lagged[n] = np.zeros((self.K, self.K))
            else:
                self._lagged[n] = X[: self.T - n].T @ X[n:]
        return self._lagged[n]

    def window(self, n: int, lo: int, hi: int) -> np.ndarray:
        """``sum_{t=lo}^{hi} x_t x_{t+n}'`` with 0-based rows."""
        T = self.T
        full_lo, full_hi = max(0, -n), min(T - 1, T - 1 - n)
        lo, hi = max(lo, full_lo), min(hi, full_hi)
        if hi < lo:
            return np.zeros((self.K, self.K))
        out = self.lagged(n)
        ex = list(range(full_lo, lo)) + list(range(hi + 1, full_hi + 1))
        if ex:
            ex = np.asarray(ex)
            out = out - self.X[ex].T @ self.X[ex + n]
        return out

    def quad(self, poly: Poly) -> np.ndarray:
        """``X' W X`` for a word polynomial ``W``."""
        out = np.zeros((self.K, self.K))
        for w, c in poly.items():
            if c == 0.0:
                continue
            n, lo, hi = word_window(w, self.T)
            out += c * self.window(n, lo, hi)
        return out

    def A(self, a: int, b: int) -> np.ndarray:
        """``X' (D')**a D**b X``."""
        return self.quad({(LEAD,) * a + (LAG,) * b: 1.0})


class TransformFactor:
    """LU factorization of ``S = X'(I - Gamma)X`` with a condition check.

    Solves get one step of iterative refinement once the condition estimate
    passes ``REFINE_CONDITION``.
    """

    def __init__(self, S: np.ndarray):
        self.S = S
        self.lu = sla.lu_factor(S, check_finite=False)
        anorm = np.linalg.norm(S, 1)
        rcond, _ = lapack.dgecon(self.lu[0], anorm, norm="1")
        self.condition = math.inf if rcond <= 0.0 or not math.isfinite(rcond) else 1.0 / rcond
        if not self.condition <= SINGULAR_CONDITION:
            raise NearSingularTransformError(self.condition)
        self.refine = self.condition > REFINE_CONDITION

    def solve(self, B, trans: int = 0) -> np.ndarray:
        x = sla.lu_solve(self.lu, B, trans=trans, check_finite=False)
        if self.refine:
            A = self.S if trans == 0 else self.S.T
            x = x + sla.lu_solve(self.lu, B - A @ x, trans=trans, check_finite=False)
        return x

    def trace_solve(self, B) -> float:
        """``tr(S^{-1} B)``."""
        return float(np.trace(self.solve(B)))


def factor_transform(mom: CrossMoments, g) -> TransformFactor:
    g = _as_gamma(g)
    return TransformFactor(mom.quad(g.transform_poly()))


def oblique_trace(mom: CrossMoments, g, C: Poly, fac: TransformFactor | None = None) -> float:
    """``tr(C M_Gamma)`` for a word polynomial ``C``.

    ``M_Gamma = I - X S^{-1} X'(I - Gamma)`` so the trace splits into
    ``tr(C) - tr(S^{-1} X'(I - Gamma) C X)``.
    """
    g = _as_gamma(g)
    fac = fac or factor_transform(mom, g)
    return poly_trace(C, mom.T) - fac.trace_solve(mom.quad(poly_mul(g.transform_poly(), C)))


def equation_operator(g, ell: int, exact: bool = False) -> Poly:
    """``(D')**ell (I - Gamma)``, collapsed to pure shifts unless ``exact``."""
    g = _as_gamma(g)
    op = poly_mul({shift_power(-ell): 1.0}, g.transform_poly())
    return op if exact else collapse(op)


def trace_equation_values(mom: CrossMoments, g, exact: bool = False, fac: TransformFactor | None = None) -> np.ndarray:
    """Values of the ``L`` trace equations at ``g``.

    By default entry ``l`` is ``tr[C_l M_Gamma]`` where ``C_l`` is
    ``(D')**l (I - Gamma)`` with lag/lead products merged into single shifts
    (so ``D'D`` counts as the identity).  For ``L = 1`` this is
    ``tr(D'M_Gamma) - gamma (T - K)``, whose root is the fixed point of
    ``gamma -> tr(D'M_Gamma) / (T - K)``.  With ``exact=True`` the literal
    finite-sample product ``tr[(D')**l (I - Gamma) M_Gamma]`` is used; the two
    differ by boundary terms that stay bounded as ``T`` grows.
    """
    g = _as_gamma(g)
    fac = fac or factor_transform(mom, g)
    return np.array([oblique_trace(mom, g, equation_operator(g, ell, exact), fac) for ell in range(1, g.L + 1)])


def effective_dof(mom: CrossMoments, g, fac: TransformFactor | None = None) -> float:
    """``T - K_Gamma = tr[(I - Gamma) M_Gamma]``; exactly ``T - K`` when ``Gamma = 0``."""
    g = _as_gamma(g)
    if g.is_zero:
        return float(mom.T - mom.K)
    return oblique_trace(mom, g, g.transform_poly(), fac)


def annihilator_lower_traces(mom: CrossMoments, L_max: int) -> np.ndarray:
    """``tr((D')**l M)`` for ``l = 1..L_max`` with the orthogonal annihilator ``M``."""
    zero = GammaPolynomial()
    fac = factor_transform(mom, zero)
    return np.array([oblique_trace(mom, zero, {shift_power(-ell): 1.0}, fac) for ell in range(1, L_max + 1)])


def feedback_operator_traces(mom: CrossMoments, g, fac: TransformFactor | None = None) -> tuple[float, float, float]:
    """``(tr B, tr B^2, tr B'B)`` for ``B = D'(I - Gamma) M_Gamma``."""
    g = _as_gamma(g)
    fac = fac or factor_transform(mom, g)
    T = mom.T
    ig = g.transform_poly()
    G = poly_mul({(LEAD,): 1.0}, ig)
    Gt = poly_transpose(G)
    GtG = poly_mul(Gt, G)
    GG = poly_mul(G, G)

    tr_b = poly_trace(G, T) - fac.trace_solve(mom.quad(poly_mul(ig, G)))

    zgx = fac.solve(mom.quad(poly_mul(ig, G)))
    tr_b2 = poly_trace(GG, T) - 2.0 * fac.trace_solve(mom.quad(poly_mul(ig, GG))) + float(np.sum(zgx * zgx.T))

    # tr(S^{-T} X'G'GX S^{-1} Z'Z)
    left = fac.solve(mom.quad(GtG), trans=1)
    right = fac.solve(mom.quad(poly_mul(ig, poly_transpose(ig))))
    tr_btb = poly_trace(GtG, T) - 2.0 * fac.trace_solve(mom.quad(poly_mul(ig, GtG))) + float(np.sum(left * right.T))
    return float(tr_b), float(tr_b2), float(tr_btb)


def instrument_gram(mom: CrossMoments, g) -> np.ndarray:
    """``Z'Z = X'(I - Gamma)(I - Gamma')X`` for the instrument ``Z = (I - Gamma')X``."""
    g = _as_gamma(g)
    ig = g.transform_poly()
    return mom.quad(poly_mul(ig, poly_transpose(ig)))


__all__: Iterable[str] = [
    "ADMISSIBLE_BOUND",
    "CrossMoments",
    "GammaPolynomial",
    "TransformFactor",
    "annihilator",
    "annihilator_lower_traces",
    "apply_poly",
    "apply_word",
    "check_full_rank",
    "collapse",
    "effective_dof",
    "equation_operator",
    "factor_transform",
    "feedback_operator_traces",
    "instrument_gram",
    "lead",
    "lower_trace",
    "numerical_rank",
    "oblique_trace",
    "poly_mul",
    "poly_trace",
    "poly_transpose",
    "shift",
    "shift_power",
    "trace_equation_values",
]
