"""Shifted orthonormal Legendre polynomials, Gauss-Legendre rules on (0, 1)
and the matrices defining a HBVM(k, s) method.

The polynomials are normalised so that ``int_0^1 P_i P_j = delta_ij`` with a
positive leading coefficient, i.e. ``P_j(c) = sqrt(2j+1) L_j(2c-1)`` where
``L_j`` is the classical Legendre polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_ORDER = 64

_NEWTON_TOL = 1e-15
_NEWTON_MAXIT = 100


def _classical_table(n: int, x: np.ndarray) -> np.ndarray:
    """Classical Legendre values ``L_0..L_n`` at ``x``, shape ``x.shape + (n+1,)``."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (n + 1,))
    out[..., 0] = 1.0
    if n >= 1:
        out[..., 1] = x
    for j in range(1, n):
        out[..., j + 1] = ((2 * j + 1) * x * out[..., j] - j * out[..., j - 1]) / (j + 1)
    return out


def legendre_table(n: int, c) -> np.ndarray:
    """Values of ``P_0, ..., P_n`` at the points ``c``; last axis indexes degree."""
    c = np.asarray(c, dtype=float)
    scale = np.sqrt(2.0 * np.arange(n + 1) + 1.0)
    return _classical_table(n, 2.0 * c - 1.0) * scale


def legendre_eval(j: int, c):
    """Shifted orthonormal Legendre polynomial ``P_j`` evaluated at ``c``."""
    if j < 0:
        raise ValueError(f"degree must be nonnegative, got {j}")
    vals = legendre_table(j, c)[..., j]
    return float(vals) if np.ndim(vals) == 0 else vals


def legendre_integral_table(n: int, c) -> np.ndarray:
    """Values of ``int_0^c P_j`` for ``j = 0..n`` at the points ``c``.

    Uses ``int_0^c P_j = (P_{j+1}/sqrt(2j+3) - P_{j-1}/sqrt(2j-1)) / (2 sqrt(2j+1))``
    for ``j >= 1``; the lower-limit contributions cancel because
    ``L_{j+1}(-1) = L_{j-1}(-1)``.
    """
    c = np.asarray(c, dtype=float)
    P = legendre_table(n + 1, c)
    out = np.empty(c.shape + (n + 1,))
    out[..., 0] = c
    for j in range(1, n + 1):
        out[..., j] = (
            P[..., j + 1] / np.sqrt(2 * j + 3) - P[..., j - 1] / np.sqrt(2 * j - 1)
        ) / (2.0 * np.sqrt(2 * j + 1))
    return out


def legendre_integral(j: int, c):
    """Closed-form ``int_0^c P_j(t) dt``."""
    if j < 0:
        raise ValueError(f"degree must be nonnegative, got {j}")
    vals = legendre_integral_table(j, c)[..., j]
    return float(vals) if np.ndim(vals) == 0 else vals


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule on (0, 1) with ``k`` nodes."""

    k: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def _newton_roots(k: int) -> tuple[np.ndarray, np.ndarray]:
    # Chebyshev points of the first kind as starting guesses, in (-1, 1)
    x = np.cos(np.pi * (np.arange(k) + 0.5) / k)
    for _ in range(_NEWTON_MAXIT):
        L = _classical_table(k, x)
        Lk, Lkm1 = L[:, k], L[:, k - 1]
        dL = k * (Lkm1 - x * Lk) / (1.0 - x * x)
        dx = Lk / dL
        x = x - dx
        if np.max(np.abs(dx)) <= _NEWTON_TOL:
            break
    L = _classical_table(k, x)
    dL = k * (L[:, k - 1] - x * L[:, k]) / (1.0 - x * x)
    return x, dL


@lru_cache(maxsize=None)
def _gauss_cached(k: int) -> QuadratureRule:
    x, dL = _newton_roots(k)
    order = np.argsort(x)
    x, dL = x[order], dL[order]
    w = 1.0 / ((1.0 - x * x) * dL * dL)  # classical weight 2/(...) halved for (0,1)
    nodes = 0.5 * (x + 1.0)
    if k % 2 == 1:
        nodes[k // 2] = 0.5
    nodes.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(k=k, nodes=nodes, weights=w)


def gauss_rule(k: int, max_order: int = MAX_ORDER) -> QuadratureRule:
    """The ``k``-point Gauss-Legendre rule on (0, 1), nodes increasing."""
    if k < 1 or k > max_order:
        raise ValueError(f"quadrature size must lie in [1, {max_order}], got {k}")
    return _gauss_cached(int(k))


def xi_coefficients(s: int) -> np.ndarray:
    i = np.arange(s, dtype=float)
    return 1.0 / (2.0 * np.sqrt(np.abs(4.0 * i * i - 1.0)))


def x_matrix(s: int) -> np.ndarray:
    """Closed-form ``X_s``: ``xi_0`` in the corner, ``xi_i`` below and ``-xi_i``
    above the diagonal."""
    xi = xi_coefficients(s)
    X = np.zeros((s, s))
    X[0, 0] = xi[0]
    for i in range(1, s):
        X[i, i - 1] = xi[i]
        X[i - 1, i] = -xi[i]
    return X


@dataclass(frozen=True)
class HbvmTableau:
    """Matrices of a HBVM(k, s) method.

    ``P[i, j] = P_j(c_i)`` and ``I[i, j] = int_0^{c_i} P_j``, both ``k x s``.
    The Runge-Kutta matrix is ``I @ P.T @ diag(b)``.
    """

    k: int
    s: int
    c: np.ndarray
    b: np.ndarray
    P: np.ndarray
    I: np.ndarray
    X: np.ndarray
    xi: np.ndarray
    rho: float
    # derived, kept for the solvers
    PtO: np.ndarray = field(repr=False)
    IX: np.ndarray = field(repr=False)
    X_inv: np.ndarray = field(repr=False)
    P_next: np.ndarray = field(repr=False)

    @property
    def Omega(self) -> np.ndarray:
        return np.diag(self.b)

    @property
    def rk_matrix(self) -> np.ndarray:
        return self.I @ self.PtO

    @property
    def is_gauss(self) -> bool:
        return self.k == self.s


def build_tableau(k: int, s: int, max_order: int = MAX_ORDER) -> HbvmTableau:
    """Assemble all matrices of HBVM(k, s); ``k == s`` gives Gauss collocation."""
    if s < 1 or k < s:
        raise ValueError(f"HBVM(k, s) requires k >= s >= 1, got k={k}, s={s}")
    if s > max_order:
        raise ValueError(f"s={s} exceeds the maximum order {max_order}")
    return _tableau_cached(int(k), int(s), int(max_order))


@lru_cache(maxsize=None)
def _tableau_cached(k: int, s: int, max_order: int) -> HbvmTableau:
    rule = gauss_rule(k, max_order)
    c, b = rule.nodes, rule.weights
    Pfull = legendre_table(s, c)
    P = Pfull[:, :s]
    I = legendre_integral_table(s - 1, c)
    X = x_matrix(s)
    rho = float(np.min(np.abs(np.linalg.eigvals(X))))
    arrays = dict(
        c=c, b=b, P=P, I=I, X=X, xi=xi_coefficients(s),
        PtO=P.T * b, IX=I @ X, X_inv=np.linalg.inv(X),
        # P_s at the nodes, used to estimate the first neglected coefficient
        P_next=Pfull[:, s].copy(),
    )
    for arr in arrays.values():
        arr.setflags(write=False)
    return HbvmTableau(k=k, s=s, rho=rho, **arrays)
