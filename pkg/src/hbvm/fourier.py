"""Truncated orthonormal Fourier basis on a periodic interval ``[a, b]``.

Two coefficient layouts are supported:

``"full"``
    ``2N+1`` coefficients ordered ``c_0, s_1, c_1, ..., s_N, c_N``.
``"zero-mean"``
    ``2N`` coefficients, cosine block ``c_1..c_N`` followed by the sine block
    ``s_1..s_N``; the mean is carried separately as a constant ``u_hat0``.

Integrals are computed with the composite trapezoidal rule on ``m`` uniform
points, right endpoint excluded, so every weight equals ``(b - a) / m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

FULL = "full"
ZERO_MEAN = "zero-mean"
FFT = "fft"
MATRIX = "matrix"

_CHUNK = 4096


def default_m(N: int, layout: str) -> int:
    return 3 * N + 1 if layout == ZERO_MEAN else 4 * N


def _basis_values(N: int, a: float, b: float, layout: str, x: np.ndarray) -> np.ndarray:
    L = b - a
    x = np.asarray(x, dtype=float)
    j = np.arange(1, N + 1)
    arg = (2.0 * np.pi / L) * np.multiply.outer(x - a, j)
    amp = np.sqrt(2.0 / L)
    cos, sin = amp * np.cos(arg), amp * np.sin(arg)
    if layout == ZERO_MEAN:
        return np.concatenate([cos, sin], axis=-1)
    out = np.empty(x.shape + (2 * N + 1,))
    out[..., 0] = 1.0 / np.sqrt(L)
    out[..., 1::2] = sin
    out[..., 2::2] = cos
    return out


@dataclass(frozen=True)
class SpectralBasis:
    N: int
    a: float
    b: float
    layout: str = FULL
    m: int | None = None
    transform: str = FFT
    grid: np.ndarray = field(init=False, repr=False)
    d: np.ndarray = field(init=False, repr=False)
    matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.layout not in (FULL, ZERO_MEAN):
            raise ValueError(f"unknown layout {self.layout!r}")
        if self.transform not in (FFT, MATRIX):
            raise ValueError(f"unknown transform {self.transform!r}")
        if not self.b > self.a:
            raise ValueError("interval must satisfy b > a")
        if self.N < 1:
            raise ValueError("N must be positive")
        m = default_m(self.N, self.layout) if self.m is None else int(self.m)
        if m <= 2 * self.N:
            raise ValueError(f"m={m} must exceed 2N={2 * self.N} to resolve the basis")
        object.__setattr__(self, "m", m)
        grid = self.a + np.arange(m) * (self.L / m)
        kappa = 2.0 * np.pi / self.L
        j = np.arange(1, self.N + 1, dtype=float)
        if self.layout == FULL:
            d = np.concatenate([[0.0], np.repeat(j, 2)]) * kappa
        else:
            d = j * kappa
        mat = _basis_values(self.N, self.a, self.b, self.layout, grid)
        for arr in (grid, d, mat):
            arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "matrix", mat)

    @property
    def L(self) -> float:
        return self.b - self.a

    @property
    def size(self) -> int:
        return 2 * self.N + 1 if self.layout == FULL else 2 * self.N

    @property
    def weight(self) -> float:
        return self.L / self.m

    @property
    def D(self) -> np.ndarray:
        """Differentiation magnitudes as a dense diagonal matrix."""
        return np.diag(self.d)

    @property
    def Dbar(self) -> np.ndarray:
        """Skew block matrix with ``omega'(x) = Dbar omega(x)`` (full layout)."""
        if self.layout != FULL:
            raise ValueError("Dbar is defined for the full layout only")
        n = self.size
        M = np.zeros((n, n))
        idx = np.arange(1, self.N + 1)
        kappa = 2.0 * np.pi / self.L
        M[2 * idx - 1, 2 * idx] = idx * kappa
        M[2 * idx, 2 * idx - 1] = -idx * kappa
        return M

    def dbar_apply(self, v: np.ndarray) -> np.ndarray:
        """``Dbar @ v`` along the last axis without forming the matrix."""
        out = np.zeros_like(v)
        kappa = 2.0 * np.pi / self.L
        j = np.arange(1, self.N + 1) * kappa
        out[..., 1::2] = j * v[..., 2::2]
        out[..., 2::2] = -j * v[..., 1::2]
        return out

    def synthesize(self, coeffs: np.ndarray) -> np.ndarray:
        """Expansion values on the grid, ``coeffs @ matrix.T`` along the last axis."""
        if self.transform == MATRIX:
            return coeffs @ self.matrix.T
        N, m = self.N, self.m
        Z = np.zeros(coeffs.shape[:-1] + (m // 2 + 1,), dtype=complex)
        amp = 0.5 * m * np.sqrt(2.0 / self.L)
        if self.layout == FULL:
            Z[..., 0] = m * coeffs[..., 0] / np.sqrt(self.L)
            cos, sin = coeffs[..., 2::2], coeffs[..., 1::2]
        else:
            cos, sin = coeffs[..., :N], coeffs[..., N:]
        Z[..., 1:N + 1] = amp * (cos - 1j * sin)
        return np.fft.irfft(Z, n=m, axis=-1)

    def analyze(self, values: np.ndarray) -> np.ndarray:
        """Weighted inner products with the basis, ``weight * values @ matrix``."""
        if self.transform == MATRIX:
            return values @ (self.weight * self.matrix)
        N = self.N
        G = np.fft.rfft(values, axis=-1)[..., : N + 1]
        amp = self.weight * np.sqrt(2.0 / self.L)
        out = np.empty(values.shape[:-1] + (self.size,))
        if self.layout == FULL:
            out[..., 0] = self.weight * G[..., 0].real / np.sqrt(self.L)
            out[..., 2::2] = amp * G[..., 1:].real
            out[..., 1::2] = -amp * G[..., 1:].imag
        else:
            out[..., :N] = amp * G[..., 1:].real
            out[..., N:] = -amp * G[..., 1:].imag
        return out

    def evaluate(self, x) -> np.ndarray:
        """Basis values at arbitrary points, shape ``(len(x), size)``."""
        return _basis_values(self.N, self.a, self.b, self.layout, np.asarray(x, dtype=float))

    def with_N(self, N: int) -> "SpectralBasis":
        m = None if self.m is None or self.m == default_m(self.N, self.layout) else self.m
        return SpectralBasis(N, self.a, self.b, self.layout, m, self.transform)


def basis_matrix(basis: SpectralBasis) -> np.ndarray:
    """Rows are the basis vector at each quadrature abscissa."""
    return basis.matrix


def _samples(basis: SpectralBasis, samples_or_function) -> np.ndarray:
    if callable(samples_or_function):
        return np.asarray(samples_or_function(basis.grid), dtype=float)
    vals = np.asarray(samples_or_function, dtype=float)
    if vals.shape[0] != basis.m:
        raise ValueError(f"expected {basis.m} samples, got {vals.shape[0]}")
    return vals


def project(basis: SpectralBasis, samples_or_function):
    """Trapezoidal projection onto the basis.

    For the zero-mean layout returns ``(coefficients, u_hat0)`` where
    ``u_hat0`` is the mean value of the data.
    """
    u = _samples(basis, samples_or_function)
    coeffs = basis.analyze(u.T).T
    if basis.layout == ZERO_MEAN:
        return coeffs, float(np.mean(u))
    return coeffs


def reconstruct(basis: SpectralBasis, coefficients: np.ndarray, eval_points=None,
                u_hat0: float = 0.0) -> np.ndarray:
    """Evaluate the expansion at ``eval_points`` (quadrature grid by default)."""
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.shape[-1] != basis.size:
        raise ValueError(
            f"coefficient length {coefficients.shape[-1]} does not match basis size {basis.size}"
        )
    if eval_points is None:
        return basis.synthesize(coefficients) + u_hat0
    x = np.asarray(eval_points, dtype=float)
    out = np.empty(x.shape[0])
    for lo in range(0, x.shape[0], _CHUNK):
        out[lo:lo + _CHUNK] = basis.evaluate(x[lo:lo + _CHUNK]) @ coefficients
    return out + u_hat0


def fine_grid(basis: SpectralBasis, factor: int = 10) -> np.ndarray:
    n = factor * basis.m
    return basis.a + np.arange(n) * (basis.L / n)


def e0_diagnostic(basis: SpectralBasis, u0: Callable, q0: np.ndarray,
                  v0: Callable | None = None, p0: np.ndarray | None = None,
                  u_hat0: float = 0.0) -> float:
    """Max-norm error of the projected initial data on a 10x refined grid."""
    x = fine_grid(basis)
    err = np.max(np.abs(u0(x) - reconstruct(basis, q0, x, u_hat0)))
    if v0 is not None:
        err = max(err, np.max(np.abs(v0(x) - reconstruct(basis, p0, x))))
    return float(err)


def delta_h0_diagnostic(model_factory: Callable[[int], object], N: int, u0: Callable,
                        v0: Callable | None = None, scan_step: int = 10) -> float:
    """``|H0(N) - H0(N - scan_step)|`` for the semi-discrete Hamiltonian.

    ``model_factory(N)`` must return a model with ``project_initial(u0, v0)``
    and ``hamiltonian(state)``.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    prev = max(1, N - scan_step)
    values = []
    for n in (N, prev):
        model = model_factory(n)
        values.append(model.hamiltonian(model.project_initial(u0, v0)))
    return abs(values[0] - values[1])
