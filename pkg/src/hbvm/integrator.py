"""One-step HBVM(k, s) advancement, trajectory driver and spectral order
selection."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .basis_quadrature import HbvmTableau, build_tableau
from .blended import (
    BlendedConfig,
    SigmaOperator,
    blended_solve_first,
    blended_solve_second,
    build_sigma_first,
    build_sigma_second,
)
from .errors import NonConvergence, NumericalBreakdown, OrderSelectionFailure
from .system import FIRST_ORDER, SECOND_ORDER, SemiDiscreteSystem

log = logging.getLogger(__name__)


@dataclass
class StepResult:
    new_state: np.ndarray
    gamma: np.ndarray
    iterations: int
    gamma_norms: np.ndarray


def _rhs_at_nodes(system: SemiDiscreteSystem, Y: np.ndarray, tableau: HbvmTableau) -> np.ndarray:
    fY = system.rhs(Y)
    # the dot product is finite whenever every entry is; locate the node only on failure
    if not np.isfinite(np.dot(fY.ravel(), fY.ravel())) and not np.isfinite(fY).all():
        i = int(np.argmax((~np.isfinite(fY)).any(axis=-1)))
        raise NumericalBreakdown(
            f"right-hand side is not finite at quadrature node {i} (c={tableau.c[i]:.6g})"
        )
    return fY


def stage_states_first(y0: np.ndarray, h: float, tableau: HbvmTableau, gamma: np.ndarray) -> np.ndarray:
    return y0 + h * (tableau.I @ gamma)


def stage_states_second(q0: np.ndarray, p0: np.ndarray, h: float, tableau: HbvmTableau,
                        gamma: np.ndarray) -> np.ndarray:
    return q0 + h * np.multiply.outer(tableau.c, p0) + h * h * (tableau.IX @ gamma)


def stage_residual_first(system: SemiDiscreteSystem, y0: np.ndarray, h: float,
                         tableau: HbvmTableau, gamma: np.ndarray) -> np.ndarray:
    """``F(gamma) = gamma - (P^T Omega) f(e y0 + h I gamma)``, shape ``(s, dim)``."""
    Y = stage_states_first(y0, h, tableau, gamma)
    return gamma - tableau.PtO @ _rhs_at_nodes(system, Y, tableau)


def stage_residual_second(system: SemiDiscreteSystem, q0: np.ndarray, p0: np.ndarray, h: float,
                          tableau: HbvmTableau, gamma: np.ndarray) -> np.ndarray:
    """``G(gamma) = gamma - (P^T Omega) gradU(e q0 + h c p0 + h^2 I X gamma)``."""
    Q = stage_states_second(q0, p0, h, tableau, gamma)
    return gamma - tableau.PtO @ _rhs_at_nodes(system, Q, tableau)


def build_sigma(system: SemiDiscreteSystem, h: float, tableau: HbvmTableau) -> SigmaOperator:
    if system.form == FIRST_ORDER:
        return build_sigma_first(system.linear_part, h, tableau.rho)
    return build_sigma_second(system.linear_part, h, tableau.rho)


def hbvm_step(system: SemiDiscreteSystem, state: np.ndarray, h: float, tableau: HbvmTableau,
              solver_config: BlendedConfig | None = None,
              sigma: SigmaOperator | None = None) -> StepResult:
    """Advance ``state`` by one HBVM(k, s) step of size ``h`` (may be negative).

    ``sigma`` may be passed in to reuse a factorisation across steps; it must
    have been built for the same ``h`` and tableau.
    """
    if h == 0:
        raise ValueError("step size must be nonzero")
    config = solver_config or BlendedConfig()
    if sigma is None:
        sigma = build_sigma(system, h, tableau)
    state = np.asarray(state, dtype=float)

    if system.form == FIRST_ORDER:
        y0 = state
        gamma, its = blended_solve_first(
            lambda g: stage_residual_first(system, y0, h, tableau, g), tableau, sigma, config
        )
        new_state = y0 + h * gamma[0]
    else:
        q0, p0 = system.split(state)
        gamma, its = blended_solve_second(
            lambda g: stage_residual_second(system, q0, p0, h, tableau, g), tableau, sigma, config
        )
        q1 = q0 + h * p0 + h * h * (tableau.X[0] @ gamma)
        p1 = p0 + h * gamma[0]
        new_state = np.concatenate([q1, p1])
    return StepResult(new_state, gamma, its, np.linalg.norm(gamma, axis=1))


def next_coefficient(system: SemiDiscreteSystem, state: np.ndarray, h: float,
                     tableau: HbvmTableau, gamma: np.ndarray) -> np.ndarray:
    """Quadrature estimate of the first neglected Legendre coefficient ``gamma_s``
    of the vector field along the converged path. Needs ``k > s``."""
    if tableau.k <= tableau.s:
        raise ValueError("estimating gamma_s needs k > s")
    state = np.asarray(state, dtype=float)
    if system.form == FIRST_ORDER:
        Z = stage_states_first(state, h, tableau, gamma)
    else:
        q0, p0 = system.split(state)
        Z = stage_states_second(q0, p0, h, tableau, gamma)
    return (tableau.b * tableau.P_next) @ _rhs_at_nodes(system, Z, tableau)


@dataclass
class Monitor:
    """Scalar observable evaluated after every step.

    ``mode == "drift"`` keeps ``max |v(t) - v(0)|``; ``mode == "max"`` keeps
    ``max |v(t)|`` over the recorded times (including ``t = 0``).
    """

    name: str
    fn: Callable[[float, np.ndarray], float]
    mode: str = "drift"


@dataclass
class TrajectorySummary:
    final_state: np.ndarray
    n_steps: int
    h: float
    maxima: dict[str, float]
    iterations: np.ndarray
    history: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def mean_iterations(self) -> float:
        return float(np.mean(self.iterations)) if self.iterations.size else 0.0


def invariant_monitors(system: SemiDiscreteSystem) -> list[Monitor]:
    mons = [Monitor("H", lambda t, y: system.hamiltonian(y))]
    for name, fn in system.extra_invariants.items():
        mons.append(Monitor(name, lambda t, y, fn=fn: fn(y)))
    return mons


def integrate(system: SemiDiscreteSystem, state0: np.ndarray, t_end: float, n_steps: int,
              tableau: HbvmTableau, solver_config: BlendedConfig | None = None,
              monitors: Sequence[Monitor] | None = None,
              record_history: bool = False) -> TrajectorySummary:
    """Take ``n_steps`` steps of size ``t_end / n_steps`` from ``state0``.

    ``monitors`` defaults to the drift of the Hamiltonian and of every extra
    invariant of ``system``. ``Sigma`` is built once for the whole run.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    h = t_end / n_steps
    mons = invariant_monitors(system) if monitors is None else list(monitors)
    sigma = build_sigma(system, h, tableau)
    y = np.asarray(state0, dtype=float).copy()

    ref = [m.fn(0.0, y) for m in mons]
    maxima = {m.name: (0.0 if m.mode == "drift" else abs(v)) for m, v in zip(mons, ref)}
    history = {m.name: [v] for m, v in zip(mons, ref)} if record_history else {}
    iters = np.empty(n_steps, dtype=int)

    for n in range(n_steps):
        try:
            res = hbvm_step(system, y, h, tableau, solver_config, sigma)
        except NonConvergence as exc:
            raise exc.at_step(n) from exc
        y = res.new_state
        iters[n] = res.iterations
        t = (n + 1) * h
        for m, v0 in zip(mons, ref):
            v = m.fn(t, y)
            dev = abs(v - v0) if m.mode == "drift" else abs(v)
            if dev > maxima[m.name]:
                maxima[m.name] = dev
            if record_history:
                history[m.name].append(v)
    hist = {k: np.asarray(v) for k, v in history.items()}
    return TrajectorySummary(y, n_steps, h, maxima, iters, hist)


def select_spectral_order(system: SemiDiscreteSystem, state: np.ndarray, h: float, tol: float,
                          k_offset: int = 2, s_min: int = 4, s_max: int = 32,
                          solver_config: BlendedConfig | None = None
                          ) -> tuple[int, int, np.ndarray]:
    """Smallest ``s`` for which the first neglected Legendre coefficient of the
    vector field along a trial step is below ``tol`` times the largest retained
    one.

    For each candidate ``s`` a trial HBVM(s + k_offset, s) step is taken from
    ``state``; ``gamma_s`` is estimated by quadrature on the converged stages
    (with one extra node when ``k_offset == 0``). Returns ``(s, k, norms)``
    where ``norms`` holds ``|gamma_0|, ..., |gamma_s|``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if k_offset < 0:
        raise ValueError("k_offset must be nonnegative")
    for s in range(s_min, s_max + 1):
        k = s + k_offset
        tab = build_tableau(max(k, s + 1), s)
        res = hbvm_step(system, state, h, tab, solver_config)
        last = np.linalg.norm(next_coefficient(system, state, h, tab, res.gamma))
        norms = np.append(res.gamma_norms, last)
        ref = res.gamma_norms.max()
        log.debug("spectral order s=%d: |gamma_s|=%.3e, max=%.3e", s, last, ref)
        if ref == 0.0 or last < tol * ref:
            return s, k, norms
    raise OrderSelectionFailure(f"no s <= {s_max} met the truncation criterion (tol={tol:g})")
