"""The three benchmark problems: sine-Gordon breather, NLS soliton and KdV
cnoidal wave, each bundled with its projected initial state and a solution
error measure against the analytic reference."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fourier import FFT, FULL, ZERO_MEAN, SpectralBasis, delta_h0_diagnostic, e0_diagnostic
from .models import (
    CnoidalParams,
    KdvModel,
    NlsModel,
    WaveModel,
    reference_kdv,
    reference_nls,
    reference_sine_gordon,
    reference_sine_gordon_t,
    sech,
)
from .system import SemiDiscreteSystem

SINE_GORDON = "sine-gordon"
NLS = "nls"
KDV = "kdv"
PROBLEMS = (SINE_GORDON, NLS, KDV)


@dataclass
class Problem:
    name: str
    model: object
    system: SemiDiscreteSystem
    state0: np.ndarray
    t_end: float
    error: Callable[[float, np.ndarray], float]
    e0: Callable[[], float]
    u0: Callable[[np.ndarray], np.ndarray]
    v0: Callable[[np.ndarray], np.ndarray] | None
    model_at: Callable[[int], object]
    """Same problem discretised with another ``N`` (default ``m`` for that ``N``)."""

    def delta_h0(self, scan_step: int = 10) -> float:
        return delta_h0_diagnostic(self.model_at, self.model.basis.N, self.u0, self.v0, scan_step)


def sine_gordon_problem(N: int = 250, m: int | None = None, gamma: float = 1.5,
                        interval: tuple[float, float] = (-50.0, 50.0),
                        t_end: float = 100.0, transform: str = FFT) -> Problem:
    # 1 - cos(u) written as 2 sin^2(u/2) to avoid cancellation near u = 0
    def model_at(n, m=None):
        basis = SpectralBasis(n, *interval, layout=FULL, m=m, transform=transform)
        return WaveModel(basis, np.sin, lambda u: 2.0 * np.sin(0.5 * u) ** 2)

    model = model_at(N, m)
    basis = model.basis
    u0 = lambda x: np.zeros_like(x)
    v0 = lambda x: 4.0 / gamma * sech(x / gamma)
    state0 = model.project_initial(u0, v0)
    grid = basis.grid

    def error(t, state):
        return float(np.max(np.abs(model.solution(state) - reference_sine_gordon(gamma, grid, t))))

    def e0():
        n = model.n
        return e0_diagnostic(basis, u0, state0[:n], v0, state0[n:])

    return Problem(SINE_GORDON, model, model.system(), state0, t_end, error, e0, u0, v0, model_at)


def sine_gordon_velocity(gamma: float = 1.5):
    return lambda x, t: reference_sine_gordon_t(gamma, x, t)


def nls_problem(N: int = 600, m: int | None = None,
                interval: tuple[float, float] = (-40.0, 120.0),
                t_end: float = 20.0, transform: str = FFT) -> Problem:
    def model_at(n, m=None):
        basis = SpectralBasis(n, *interval, layout=FULL, m=m, transform=transform)
        return NlsModel(basis, lambda r: 2.0 * r, lambda r: r * r)

    model = model_at(N, m)
    basis = model.basis
    u0 = lambda x: reference_nls(x, 0.0)[0]
    v0 = lambda x: reference_nls(x, 0.0)[1]
    state0 = model.project_initial(u0, v0)
    grid = basis.grid

    def error(t, y):
        U, V = model.solution(y)
        u, v = reference_nls(grid, t)
        return float(max(np.max(np.abs(U - u)), np.max(np.abs(V - v))))

    def e0():
        n = model.n
        return e0_diagnostic(basis, u0, state0[:n], v0, state0[n:])

    return Problem(NLS, model, model.system(), state0, t_end, error, e0, u0, v0, model_at)


def kdv_problem(N: int = 50, m: int | None = None, params: CnoidalParams = CnoidalParams(),
                interval: tuple[float, float] = (0.0, 1.0), t_end: float = 10.0,
                transform: str = FFT) -> Problem:
    u0 = lambda x: reference_kdv(params, x, 0.0)

    # u_t + eps u_xxx + u u_x = 0  <=>  alpha = -eps, beta = -1
    def model_at(n, m=None):
        basis = SpectralBasis(n, *interval, layout=ZERO_MEAN, m=m, transform=transform)
        return KdvModel.for_data(basis, -params.eps, -1.0, u0)

    model = model_at(N, m)
    basis = model.basis
    state0 = model.project_initial(u0)
    grid = basis.grid

    def error(t, y):
        return float(np.max(np.abs(model.solution(y) - reference_kdv(params, grid, t))))

    def e0():
        return e0_diagnostic(basis, u0, state0, u_hat0=model.u_hat0)

    return Problem(KDV, model, model.system(), state0, t_end, error, e0, u0, None, model_at)
