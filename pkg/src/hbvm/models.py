"""Fourier-Galerkin semi-discretisations of three Hamiltonian PDEs and the
analytic solutions used as references.

* semilinear wave ``u_tt = u_xx - f'(u)`` as ``q'' = -D^2 q - int omega f'(omega^T q)``
* NLS ``u_t = -v_xx - f'(u^2+v^2) v``, ``v_t = u_xx + f'(u^2+v^2) u``
* KdV ``u_t = alpha u_xxx + beta u u_x`` on the zero-mean layout
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .elliptic import elliptic_k, jacobi_ellipj
from .fourier import FULL, ZERO_MEAN, SpectralBasis, project
from .system import FIRST_ORDER, SECOND_ORDER, LinearPart, SemiDiscreteSystem

Scalar = Callable[[np.ndarray], np.ndarray]


def sech(x):
    ax = np.abs(np.asarray(x, dtype=float))
    e = np.exp(-ax)
    return 2.0 * e / (1.0 + e * e)


def _checked(values: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise FloatingPointError(f"non-finite values in {what}")
    return values


class WaveModel:
    """Special second-order system for ``u_tt = u_xx - f'(u)``; state ``(q, p)``."""

    def __init__(self, basis: SpectralBasis, f_prime: Scalar, f: Scalar):
        if basis.layout != FULL:
            raise ValueError("the wave model needs the full layout")
        self.basis = basis
        self.f_prime = f_prime
        self.f = f
        self.n = basis.size
        self.d2 = basis.d ** 2

    def rhs(self, q: np.ndarray) -> np.ndarray:
        U = self.basis.synthesize(q)
        return -self.d2 * q - self.basis.analyze(_checked(self.f_prime(U), "f'(u)"))

    def hamiltonian(self, state: np.ndarray) -> float:
        q, p = state[: self.n], state[self.n :]
        U = self.basis.synthesize(q)
        return 0.5 * (p @ p + q @ (self.d2 * q)) + self.basis.weight * np.sum(self.f(U))

    def project_initial(self, u0: Scalar, v0: Scalar) -> np.ndarray:
        return np.concatenate([project(self.basis, u0), project(self.basis, v0)])

    initial_state = project_initial

    def solution(self, state: np.ndarray) -> np.ndarray:
        return self.basis.synthesize(state[: self.n])

    def system(self) -> SemiDiscreteSystem:
        return SemiDiscreteSystem(
            dim=self.n, form=SECOND_ORDER, rhs=self.rhs, hamiltonian=self.hamiltonian,
            linear_part=LinearPart("diagonal", self.d2), name="wave",
        )


class NlsModel:
    """First-order system for the NLS equation; state ``y = (q, p)``."""

    def __init__(self, basis: SpectralBasis, f_prime: Scalar, f: Scalar):
        if basis.layout != FULL:
            raise ValueError("the NLS model needs the full layout")
        self.basis = basis
        self.f_prime = f_prime
        self.f = f
        self.n = basis.size
        self.d2 = basis.d ** 2

    def rhs(self, y: np.ndarray) -> np.ndarray:
        q, p = y[..., : self.n], y[..., self.n :]
        U, V = self.basis.synthesize(q), self.basis.synthesize(p)
        F = _checked(self.f_prime(U * U + V * V), "f'(u^2+v^2)")
        qdot = self.d2 * p - self.basis.analyze(F * V)
        pdot = -self.d2 * q + self.basis.analyze(F * U)
        return np.concatenate([qdot, pdot], axis=-1)

    def hamiltonian(self, y: np.ndarray) -> float:
        q, p = y[: self.n], y[self.n :]
        U, V = self.basis.synthesize(q), self.basis.synthesize(p)
        return 0.5 * (p @ (self.d2 * p) + q @ (self.d2 * q)
                      - self.basis.weight * np.sum(self.f(U * U + V * V)))

    def mass(self, y: np.ndarray) -> float:
        return float(y @ y)

    def momentum(self, y: np.ndarray) -> float:
        q, p = y[: self.n], y[self.n :]
        return float(q @ self.basis.dbar_apply(p))

    def invariants(self, y: np.ndarray) -> tuple[float, float, float]:
        return self.hamiltonian(y), self.mass(y), self.momentum(y)

    def project_initial(self, u0: Scalar, v0: Scalar) -> np.ndarray:
        return np.concatenate([project(self.basis, u0), project(self.basis, v0)])

    initial_state = project_initial

    def solution(self, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.basis.synthesize(y[: self.n]), self.basis.synthesize(y[self.n :])

    def system(self) -> SemiDiscreteSystem:
        return SemiDiscreteSystem(
            dim=2 * self.n, form=FIRST_ORDER, rhs=self.rhs, hamiltonian=self.hamiltonian,
            linear_part=LinearPart("skew-block", self.d2),
            extra_invariants={"M1": self.mass, "M2": self.momentum}, name="nls",
        )


class KdvModel:
    """First-order system for ``u_t = alpha u_xxx + beta u u_x`` with the mean
    ``u_hat0`` held fixed outside the state ``y = (q, p)`` (cosine, sine)."""

    def __init__(self, basis: SpectralBasis, alpha: float, beta: float, u_hat0: float):
        if basis.layout != ZERO_MEAN:
            raise ValueError("the KdV model needs the zero-mean layout")
        self.basis = basis
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.u_hat0 = float(u_hat0)
        self.N = basis.N
        self.d = basis.d
        self.d2 = basis.d ** 2

    @classmethod
    def for_data(cls, basis: SpectralBasis, alpha: float, beta: float, u0: Scalar) -> "KdvModel":
        return cls(basis, alpha, beta, project(basis, u0)[1])

    def field(self, y: np.ndarray) -> np.ndarray:
        return self.u_hat0 + self.basis.synthesize(y)

    def rhs(self, y: np.ndarray) -> np.ndarray:
        q, p = y[..., : self.N], y[..., self.N :]
        g = self.basis.analyze(_checked(self.field(y), "u") ** 2)
        half_beta = 0.5 * self.beta
        qdot = self.d * (-self.alpha * self.d2 * p + half_beta * g[..., self.N :])
        pdot = -self.d * (-self.alpha * self.d2 * q + half_beta * g[..., : self.N])
        return np.concatenate([qdot, pdot], axis=-1)

    def hamiltonian(self, y: np.ndarray) -> float:
        q, p = y[: self.N], y[self.N :]
        u = self.field(y)
        return 0.5 * (-self.alpha * (q @ (self.d2 * q) + p @ (self.d2 * p))
                      + self.beta / 3.0 * self.basis.weight * np.sum(u ** 3))

    def project_initial(self, u0: Scalar, v0=None) -> np.ndarray:
        return project(self.basis, u0)[0]

    def initial_state(self, u0: Scalar, v0=None) -> np.ndarray:
        return self.project_initial(u0)

    def solution(self, y: np.ndarray) -> np.ndarray:
        return self.field(y)

    def linear_part(self) -> LinearPart:
        # A = (J2 (x) D)(I2 (x) Dhat), Dhat = -alpha D^2 + beta u_hat0 I
        return LinearPart("skew-block", self.d * (-self.alpha * self.d2 + self.beta * self.u_hat0))

    def system(self) -> SemiDiscreteSystem:
        return SemiDiscreteSystem(
            dim=2 * self.N, form=FIRST_ORDER, rhs=self.rhs, hamiltonian=self.hamiltonian,
            linear_part=self.linear_part(), name="kdv",
        )


# -- reference solutions -------------------------------------------------------

def reference_sine_gordon(gamma: float, x, t):
    """Breather ``4 atan(sech(x/g) sin(t sqrt(1-g^-2)) / sqrt(g^2-1))``."""
    if gamma <= 1.0:
        raise ValueError("the breather needs gamma > 1")
    w = np.sqrt(1.0 - gamma ** -2)
    return 4.0 * np.arctan(sech(np.asarray(x) / gamma) * np.sin(w * t) / np.sqrt(gamma ** 2 - 1.0))


def reference_sine_gordon_t(gamma: float, x, t):
    """Time derivative of :func:`reference_sine_gordon`."""
    if gamma <= 1.0:
        raise ValueError("the breather needs gamma > 1")
    w = np.sqrt(1.0 - gamma ** -2)
    r = sech(np.asarray(x) / gamma) / np.sqrt(gamma ** 2 - 1.0)
    z = r * np.sin(w * t)
    return 4.0 * r * w * np.cos(w * t) / (1.0 + z * z)


def reference_nls(x, t):
    """Travelling soliton ``(sech(x-4t) cos(2x-3t), sech(x-4t) sin(2x-3t))``."""
    x = np.asarray(x, dtype=float)
    amp = sech(x - 4.0 * t)
    return amp * np.cos(2.0 * x - 3.0 * t), amp * np.sin(2.0 * x - 3.0 * t)


@dataclass(frozen=True)
class CnoidalParams:
    eps: float = 1e-2
    modulus: float = 0.9
    x0: float = 0.5

    @property
    def K(self) -> float:
        return elliptic_k(self.modulus)

    @property
    def amplitude(self) -> float:
        return 192.0 * self.modulus * self.eps * self.K ** 2

    @property
    def speed(self) -> float:
        return 64.0 * self.eps * (2.0 * self.modulus - 1.0) * self.K ** 2


def reference_kdv(params: CnoidalParams, x, t):
    """Cnoidal wave ``a cn^2(4K(m)(x - nu t - x0) | m)`` of ``u_t + eps u_xxx + u u_x = 0``."""
    z = 4.0 * params.K * (np.asarray(x, dtype=float) - params.speed * t - params.x0)
    cn = jacobi_ellipj(z, params.modulus)[1]
    return params.amplitude * cn * cn


@dataclass(frozen=True)
class ReferenceSolution:
    evaluator: Callable
    description: str

    def __call__(self, x, t):
        return self.evaluator(x, t)
