"""Blended Newton-type iteration for the HBVM stage equations.

The iteration only ever inverts the constant matrix ``Sigma = I - h rho A``
(first-order problems) or ``Sigma = I + h^2 rho^2 A^2`` (special second-order
problems), where ``A`` is the linear part of a semilinear vector field. For
the PDE models that matrix is diagonal or a 2x2 block of diagonals, so it is
stored as vectors and never factored densely.

A dense simplified-Newton solver is kept alongside as a reference for tests.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .basis_quadrature import HbvmTableau
from .errors import NonConvergence, NumericalBreakdown
from .system import LinearPart

Residual = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class BlendedConfig:
    """Stopping rule: ``|delta|_inf <= tol_abs + tol_rel * |gamma|_inf``.

    With ``polish`` the iteration carries on past that point: the contraction
    factor ``theta`` is estimated from the last two updates and enough extra
    iterations are taken for ``|delta| theta^j`` to fall below
    ``POLISH_FACTOR * eps * |gamma|_inf`` (within ``max_iter``). Iterating
    only until the update norm stops decreasing is not enough, because the
    update norm reaches the round-off floor while a smooth, systematic
    component of the error is still decaying underneath it, and that
    component shows up as a steady drift of the invariants.
    """

    tol_rel: float = 1e-12
    tol_abs: float = 1e-14
    max_iter: int = 100
    polish: bool = False

    def __post_init__(self):
        if not (self.tol_rel > 0 and self.tol_abs > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class SigmaOperator:
    """Structured ``Sigma`` and its inverse.

    ``kind == "diagonal"``: ``Sigma = diag(diag)``, ``inv = 1/diag``.
    ``kind == "block"``: ``Sigma = [[I, -B], [B, I]]`` and
    ``Sigma^{-1} = [[G, B G], [-B G, G]]`` with ``G = (I + B^2)^{-1}``.
    """

    kind: str
    diag: np.ndarray | None = None
    inv: np.ndarray | None = None
    B: np.ndarray | None = None
    gamma: np.ndarray | None = None
    b_gamma: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.diag.shape[0] if self.kind == "diagonal" else 2 * self.B.shape[0]

    def apply(self, v: np.ndarray) -> np.ndarray:
        if self.kind == "diagonal":
            return self.diag * v
        n = self.B.shape[0]
        v1, v2 = v[..., :n], v[..., n:]
        return np.concatenate([v1 - self.B * v2, self.B * v1 + v2], axis=-1)

    def apply_inverse(self, v: np.ndarray) -> np.ndarray:
        if self.kind == "diagonal":
            return self.inv * v
        n = self.B.shape[0]
        v1, v2 = v[..., :n], v[..., n:]
        return np.concatenate(
            [self.gamma * v1 + self.b_gamma * v2, self.gamma * v2 - self.b_gamma * v1],
            axis=-1,
        )

    def dense(self) -> np.ndarray:
        return self.apply(np.eye(self.dim)).T

    def dense_inverse(self) -> np.ndarray:
        return self.apply_inverse(np.eye(self.dim)).T


def _diagonal_sigma(diag: np.ndarray) -> SigmaOperator:
    if np.any(diag == 0.0):
        raise np.linalg.LinAlgError("Sigma is singular")
    return SigmaOperator("diagonal", diag=diag, inv=1.0 / diag)


def _block_sigma(B: np.ndarray) -> SigmaOperator:
    g = 1.0 / (1.0 + B * B)
    return SigmaOperator("block", B=B, gamma=g, b_gamma=B * g)


def build_sigma_first(linear_part: LinearPart, h: float, rho: float) -> SigmaOperator:
    """``Sigma = I - h rho A`` for ``y' = A y + g(y)``."""
    if not isinstance(linear_part, LinearPart):
        raise TypeError("Sigma needs a structured LinearPart, got %r" % type(linear_part))
    if linear_part.kind == "diagonal":
        return _diagonal_sigma(1.0 - h * rho * linear_part.d)
    # A = [[0, D], [-D, 0]]  =>  I - h rho A = [[I, -h rho D], [h rho D, I]]
    return _block_sigma(h * rho * linear_part.d)


def build_sigma_second(linear_part_sq: LinearPart, h: float, rho: float) -> SigmaOperator:
    """``Sigma = I + h^2 rho^2 A^2`` for ``q'' = -A^2 q + g(q)``."""
    if not isinstance(linear_part_sq, LinearPart):
        raise TypeError("Sigma needs a structured LinearPart, got %r" % type(linear_part_sq))
    if linear_part_sq.kind != "diagonal":
        raise ValueError("second-order Sigma needs a diagonal A^2")
    return _diagonal_sigma(1.0 + (h * rho) ** 2 * linear_part_sq.d)


def _norm(x: np.ndarray) -> float:
    return float(np.abs(x).max()) if x.size else 0.0


POLISH_FACTOR = 1e-2
_EPS = np.finfo(float).eps


def _polish_iterations(nrm: float, prev: float, scale: float) -> int:
    """Extra iterations for a geometric error ``nrm * theta^j`` to reach the
    polishing target."""
    target = POLISH_FACTOR * _EPS * scale
    if nrm <= target:
        return 0
    theta = nrm / prev if np.isfinite(prev) and prev > 0 else 0.5
    theta = min(max(theta, 1e-3), 0.99)
    return int(np.ceil(np.log(target / nrm) / np.log(theta)))


def _blended_loop(residual: Residual, M1: np.ndarray, sigma: SigmaOperator,
                  config: BlendedConfig, gamma0: np.ndarray) -> tuple[np.ndarray, int]:
    gamma = np.array(gamma0, dtype=float, copy=True)
    nrm = np.inf
    stop_at = None
    for it in range(1, config.max_iter + 1):
        eta = -residual(gamma)
        eta1 = M1 @ eta
        delta = sigma.apply_inverse(eta1 + sigma.apply_inverse(eta - eta1))
        prev, nrm = nrm, _norm(delta)
        if not np.isfinite(nrm):
            raise NumericalBreakdown(f"non-finite blended update at iteration {it}")
        gamma += delta
        if stop_at is not None:
            if it >= stop_at:
                return gamma, it
            continue
        if nrm == 0.0:
            return gamma, it
        if nrm <= config.tol_abs + config.tol_rel * _norm(gamma):
            if not config.polish:
                return gamma, it
            stop_at = it + _polish_iterations(nrm, prev, _norm(gamma))
            if stop_at <= it:
                return gamma, it
    if stop_at is not None:
        return gamma, config.max_iter
    raise NonConvergence(config.max_iter, nrm)


def blended_solve_first(residual: Residual, tableau: HbvmTableau, sigma: SigmaOperator,
                        config: BlendedConfig = BlendedConfig(),
                        gamma0: np.ndarray | None = None) -> tuple[np.ndarray, int]:
    """Solve ``F(gamma) = 0`` (shape ``(s, dim)``) by the blended iteration.

    Each sweep computes ``eta = -F``, ``eta1 = rho X^{-1} eta`` and
    ``delta = theta (eta1 + theta (eta - eta1))`` with ``theta = Sigma^{-1}``
    applied blockwise.
    """
    if gamma0 is None:
        gamma0 = np.zeros((tableau.s, sigma.dim))
    return _blended_loop(residual, tableau.rho * tableau.X_inv, sigma, config, gamma0)


def blended_solve_second(residual: Residual, tableau: HbvmTableau, sigma: SigmaOperator,
                         config: BlendedConfig = BlendedConfig(),
                         gamma0: np.ndarray | None = None) -> tuple[np.ndarray, int]:
    """Second-order variant: ``eta1 = rho^2 X^{-2} eta``."""
    if gamma0 is None:
        gamma0 = np.zeros((tableau.s, sigma.dim))
    M1 = tableau.rho ** 2 * (tableau.X_inv @ tableau.X_inv)
    return _blended_loop(residual, M1, sigma, config, gamma0)


def dense_newton_solve(residual: Residual, jacobian_at_y0: np.ndarray, tableau: HbvmTableau,
                       h: float, config: BlendedConfig = BlendedConfig(),
                       gamma0: np.ndarray | None = None,
                       order: int = 1) -> tuple[np.ndarray, int]:
    """Simplified Newton with the full ``(s*dim)``-square matrix, LU-factored once.

    ``order=1``: ``I - h X (x) J``; ``order=2``: ``I - h^2 X^2 (x) J`` with ``J``
    the Hessian of ``U``.
    """
    J = np.atleast_2d(np.asarray(jacobian_at_y0, dtype=float))
    n = J.shape[0]
    if tableau.s * n > 2048 * 3:
        raise ValueError("dense reference solver is limited to small systems")
    if order == 1:
        M = np.eye(tableau.s * n) - h * np.kron(tableau.X, J)
    elif order == 2:
        M = np.eye(tableau.s * n) - h * h * np.kron(tableau.X @ tableau.X, J)
    else:
        raise ValueError("order must be 1 or 2")
    with warnings.catch_warnings():
        # singularity is reported below as an exception
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=True)
    if np.any(np.diag(lu) == 0.0):
        raise np.linalg.LinAlgError("simplified Newton matrix is singular")

    gamma = np.zeros((tableau.s, n)) if gamma0 is None else np.array(gamma0, dtype=float)
    nrm = np.inf
    for it in range(1, config.max_iter + 1):
        delta = scipy.linalg.lu_solve((lu, piv), -residual(gamma).ravel()).reshape(gamma.shape)
        nrm = _norm(delta)
        if not np.isfinite(nrm):
            raise NumericalBreakdown(f"non-finite Newton update at iteration {it}")
        gamma += delta
        if nrm <= config.tol_abs + config.tol_rel * _norm(gamma):
            return gamma, it
    raise NonConvergence(config.max_iter, nrm)
