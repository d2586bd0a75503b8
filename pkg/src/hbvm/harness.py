"""Configuration-driven experiment runner for the benchmark tables.

A configuration is a flat ``key = value`` text file; ``#`` starts a comment
and an empty value means "use the problem default". Every run produces one
:class:`RunRecord` per step count, and :func:`records_to_csv` renders them
with a fixed header so that identical configurations give identical files.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .basis_quadrature import build_tableau
from .blended import BlendedConfig
from .errors import ConfigError, NonConvergence
from .integrator import Monitor, integrate, invariant_monitors, select_spectral_order
from .models import CnoidalParams
from .problems import KDV, NLS, PROBLEMS, SINE_GORDON, Problem, kdv_problem, nls_problem, sine_gordon_problem

log = logging.getLogger(__name__)

METHODS = ("gauss", "hbvm", "shbvm")
PLATEAU = 1e-13
SQRT_EPS = math.sqrt(np.finfo(float).eps)

_PROBLEM_DEFAULTS = {
    SINE_GORDON: dict(N=250, t_end=100.0, interval=(-50.0, 50.0), shbvm_tol=SQRT_EPS, k_offset=3),
    NLS: dict(N=600, t_end=20.0, interval=(-40.0, 120.0), shbvm_tol=0.1 * SQRT_EPS, k_offset=2),
    KDV: dict(N=50, t_end=10.0, interval=(0.0, 1.0), shbvm_tol=0.1 * SQRT_EPS, k_offset=2),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One method on one problem over a list of step counts.

    ``None`` fields take the per-problem defaults at run time. ``k`` is
    ignored for ``gauss`` (where ``k = s``) and for ``shbvm`` (where ``s`` is
    selected and ``k = s + k_offset``).
    """

    problem: str
    method: str
    n_list: tuple[int, ...]
    s: int = 1
    k: int | None = None
    N: int | None = None
    m: int | None = None
    t_end: float | None = None
    interval: tuple[float, float] | None = None
    gamma: float = 1.5
    eps: float = 1e-2
    modulus: float = 0.9
    x0: float = 0.5
    tol_rel: float = 1e-12
    tol_abs: float = 1e-14
    max_iter: int = 100
    polish: bool = True
    shbvm_tol: float | None = None
    k_offset: int | None = None
    output: str | None = None

    def __post_init__(self):
        validate(self)

    def resolved(self, name: str):
        value = getattr(self, name)
        return _PROBLEM_DEFAULTS[self.problem][name] if value is None else value

    @property
    def stages(self) -> tuple[int, int]:
        """``(k, s)`` for gauss and hbvm runs."""
        if self.method == "gauss":
            return self.s, self.s
        return (self.s if self.k is None else self.k), self.s

    @property
    def solver(self) -> BlendedConfig:
        return BlendedConfig(self.tol_rel, self.tol_abs, self.max_iter, self.polish)

    @property
    def label(self) -> str:
        if self.method == "gauss":
            return f"Gauss-{self.s}"
        if self.method == "hbvm":
            return "HBVM(%d,%d)" % self.stages
        return "SHBVM"


def validate(cfg: ExperimentConfig) -> None:
    if cfg.problem not in PROBLEMS:
        raise ConfigError(f"problem must be one of {PROBLEMS}, got {cfg.problem!r}")
    if cfg.method not in METHODS:
        raise ConfigError(f"method must be one of {METHODS}, got {cfg.method!r}")
    if not cfg.n_list:
        raise ConfigError("n_list must not be empty")
    if any(n < 1 for n in cfg.n_list) or any(b <= a for a, b in zip(cfg.n_list, cfg.n_list[1:])):
        raise ConfigError(f"n_list must be positive and strictly increasing, got {list(cfg.n_list)}")
    if cfg.s < 1:
        raise ConfigError("s must be at least 1")
    if cfg.method == "hbvm" and cfg.k is not None and cfg.k < cfg.s:
        raise ConfigError(f"hbvm needs k >= s, got k={cfg.k}, s={cfg.s}")
    if cfg.N is not None and cfg.N < 1:
        raise ConfigError("N must be positive")
    if cfg.m is not None and cfg.N is not None and cfg.m <= 2 * cfg.N:
        raise ConfigError("m must exceed 2N")
    if cfg.t_end is not None and not cfg.t_end > 0:
        raise ConfigError("t_end must be positive")
    if cfg.interval is not None and not cfg.interval[1] > cfg.interval[0]:
        raise ConfigError("interval must satisfy b > a")
    if cfg.problem == SINE_GORDON and not cfg.gamma > 1:
        raise ConfigError("the breather needs gamma > 1")
    if cfg.problem == KDV and not 0 <= cfg.modulus < 1:
        raise ConfigError("modulus must lie in [0, 1)")
    if not (cfg.tol_rel > 0 and cfg.tol_abs > 0) or cfg.max_iter < 1:
        raise ConfigError("solver tolerances must be positive and max_iter >= 1")
    if cfg.shbvm_tol is not None and not cfg.shbvm_tol > 0:
        raise ConfigError("shbvm_tol must be positive")
    if cfg.k_offset is not None and cfg.k_offset < 0:
        raise ConfigError("k_offset must be nonnegative")


# -- config text format --------------------------------------------------------

def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.replace(",", " ").split())


def _parse_pair(text: str) -> tuple[float, float]:
    parts = [float(t) for t in text.replace(",", " ").split()]
    if len(parts) != 2:
        raise ValueError(f"expected two numbers, got {text!r}")
    return parts[0], parts[1]


_PARSERS: dict[str, Callable[[str], object]] = {
    "problem": str, "method": str, "n_list": _parse_ints, "s": int, "k": int, "N": int, "m": int,
    "t_end": float, "interval": _parse_pair, "gamma": float, "eps": float, "modulus": float,
    "x0": float, "tol_rel": float, "tol_abs": float, "max_iter": int, "polish": _parse_bool,
    "shbvm_tol": float, "k_offset": int, "output": str,
}
_REQUIRED = ("problem", "method", "n_list")


def _render_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(_render_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_assignments(lines: Iterable[str], base: dict | None = None) -> dict:
    """Parse ``key = value`` lines into a dict of typed values."""
    out = dict(base or {})
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, text = (t.strip() for t in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if text == "":
            out[key] = None
            continue
        try:
            out[key] = _PARSERS[key](text)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    return out


def config_from_dict(values: dict) -> ExperimentConfig:
    missing = [k for k in _REQUIRED if values.get(k) is None]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    defaults = {f.name: f.default for f in fields(ExperimentConfig) if f.name not in _REQUIRED}
    merged = {**defaults, **{k: v for k, v in values.items() if not (v is None and k in _REQUIRED)}}
    return ExperimentConfig(**merged)


def parse_config(text: str, overrides: Sequence[str] = ()) -> ExperimentConfig:
    """Build a validated config from file text plus ``key=value`` overrides."""
    values = parse_assignments(text.splitlines())
    values = parse_assignments(overrides, values)
    return config_from_dict(values)


def render_config(cfg: ExperimentConfig) -> str:
    return "".join(f"{f.name} = {_render_value(getattr(cfg, f.name))}\n" for f in fields(cfg))


def load_config(path: str | Path, overrides: Sequence[str] = ()) -> ExperimentConfig:
    return parse_config(Path(path).read_text(), overrides)


# -- running -------------------------------------------------------------------

@dataclass
class RunRecord:
    """One table row. ``e_u`` holds ``e_uv`` for NLS; ``e_1``/``e_2`` are the
    mass and momentum drifts (NLS only)."""

    n: int
    e_u: float
    e_H: float
    e_1: float | None = None
    e_2: float | None = None
    rate_u: float | None = None
    rate_H: float | None = None
    rate_1: float | None = None
    rate_2: float | None = None
    s: int | None = None
    k: int | None = None
    iterations_mean: float = 0.0
    wall_time_seconds: float = field(default=0.0, compare=False)


def compute_rate(e_prev: float, e_cur: float, n_prev: int, n_cur: int) -> float | None:
    """Observed order between consecutive rows; ``None`` once ``e_cur`` is at the
    round-off plateau."""
    if min(e_prev, e_cur, n_prev, n_cur) <= 0:
        return None
    if e_cur < PLATEAU:
        return None
    return math.log(e_prev / e_cur) / math.log(n_cur / n_prev)


def build_problem(cfg: ExperimentConfig) -> Problem:
    N, interval, t_end = cfg.resolved("N"), cfg.resolved("interval"), cfg.resolved("t_end")
    if cfg.problem == SINE_GORDON:
        return sine_gordon_problem(N, cfg.m, cfg.gamma, interval, t_end)
    if cfg.problem == NLS:
        return nls_problem(N, cfg.m, interval, t_end)
    return kdv_problem(N, cfg.m, CnoidalParams(cfg.eps, cfg.modulus, cfg.x0), interval, t_end)


def _fill_rates(records: list[RunRecord]) -> None:
    for prev, cur in zip(records, records[1:]):
        for name in ("u", "H", "1", "2"):
            ep, ec = getattr(prev, "e_" + name), getattr(cur, "e_" + name)
            if ep is not None and ec is not None:
                setattr(cur, "rate_" + name, compute_rate(ep, ec, prev.n, cur.n))


def run_experiment(cfg: ExperimentConfig, problem: Problem | None = None) -> list[RunRecord]:
    """Integrate ``cfg.problem`` to ``t_end`` once per step count in ``cfg.n_list``.

    Raises :class:`NonConvergence` annotated with the step index; the step
    count ``n`` of the failing run is attached as ``exc.n``.
    """
    problem = problem or build_problem(cfg)
    solver = cfg.solver
    records = []
    for n in cfg.n_list:
        h = problem.t_end / n
        start = time.perf_counter()
        if cfg.method == "shbvm":
            s, k, _ = select_spectral_order(
                problem.system, problem.state0, h, cfg.resolved("shbvm_tol"),
                k_offset=cfg.resolved("k_offset"), solver_config=solver,
            )
        else:
            k, s = cfg.stages
        monitors = invariant_monitors(problem.system) + [Monitor("e_u", problem.error, "max")]
        try:
            summary = integrate(problem.system, problem.state0, problem.t_end, n,
                                build_tableau(k, s), solver, monitors)
        except NonConvergence as exc:
            exc.n = n
            raise
        elapsed = time.perf_counter() - start
        mx = summary.maxima
        rec = RunRecord(
            n=n, e_u=mx["e_u"], e_H=mx["H"], e_1=mx.get("M1"), e_2=mx.get("M2"),
            s=s if cfg.method == "shbvm" else None, k=k if cfg.method == "shbvm" else None,
            iterations_mean=summary.mean_iterations, wall_time_seconds=elapsed,
        )
        log.info("%s %s n=%d: e_u=%.3e e_H=%.3e iters=%.2f (%.1fs)",
                 problem.name, cfg.label, n, rec.e_u, rec.e_H, rec.iterations_mean, elapsed)
        records.append(rec)
    _fill_rates(records)
    return records


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def csv_columns(problem: str, shbvm: bool) -> list[str]:
    cols = ["n", "e_u", "rate_u", "e_H", "rate_H"]
    if problem == NLS:
        cols += ["e_1", "rate_1", "e_2", "rate_2"]
    if shbvm:
        cols += ["s", "k"]
    return cols + ["iters"]


def records_to_csv(records: Sequence[RunRecord], problem: str, shbvm: bool = False) -> str:
    """CSV text with 17 significant digits; wall times are left out so the
    output is reproducible."""
    cols = csv_columns(problem, shbvm)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for rec in records:
        row = []
        for c in cols:
            row.append(_fmt(rec.iterations_mean if c == "iters" else getattr(rec, c)))
        writer.writerow(row)
    return buf.getvalue()


def spectral_scan(problem: str, N_values: Sequence[int], scan_step: int = 10,
                  cfg: ExperimentConfig | None = None) -> str:
    """CSV of ``N, E0, deltaH0`` for choosing the space resolution.

    ``cfg`` supplies problem parameters (interval, breather and cnoidal
    parameters); ``m`` always takes its default for each ``N``.
    """
    if problem not in PROBLEMS:
        raise ConfigError(f"problem must be one of {PROBLEMS}, got {problem!r}")
    if not N_values or any(N < 2 for N in N_values):
        raise ConfigError("N values must be at least 2")
    cfg = cfg or ExperimentConfig(problem=problem, method="gauss", n_list=(1,))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["N", "E0", "deltaH0"])
    for N in N_values:
        prob = build_problem(replace(cfg, problem=problem, N=N, m=None))
        writer.writerow([N, _fmt(prob.e0()), _fmt(prob.delta_h0(scan_step))])
    return buf.getvalue()


# -- the three tables ----------------------------------------------------------

def _grid(lo: int, hi: int, step: int) -> tuple[int, ...]:
    return tuple(range(lo, hi + 1, step))


def table_configs(table_id: int, reduced: bool = False) -> dict[str, ExperimentConfig]:
    """Method blocks of a table, keyed by a file-name friendly block name.

    ``reduced`` keeps the first two step counts of every non-spectral block
    (the grid used by the default acceptance run).
    """
    if table_id == 1:
        problem, blocks = SINE_GORDON, {
            "gauss1": ("gauss", 1, None, _grid(2000, 6000, 1000)),
            "gauss2": ("gauss", 2, None, _grid(1000, 3000, 500)),
            "hbvm41": ("hbvm", 1, 4, _grid(1000, 3000, 500)),
            "hbvm42": ("hbvm", 2, 4, _grid(1000, 3000, 500)),
            "shbvm": ("shbvm", 1, None, (50, 75, 100)),
        }
    elif table_id == 2:
        grid = (400, 600, 800, 1000)
        problem, blocks = NLS, {
            "gauss1": ("gauss", 1, None, grid),
            "gauss2": ("gauss", 2, None, grid),
            "hbvm21": ("hbvm", 1, 2, grid),
            "hbvm42": ("hbvm", 2, 4, grid),
            "shbvm": ("shbvm", 1, None, (50, 75, 100)),
        }
    elif table_id == 3:
        grid = _grid(10000, 50000, 10000)
        problem, blocks = KDV, {
            "gauss1": ("gauss", 1, None, grid),
            "gauss2": ("gauss", 2, None, grid),
            "hbvm21": ("hbvm", 1, 2, grid),
            "hbvm32": ("hbvm", 2, 3, grid),
            "shbvm": ("shbvm", 1, None, (400, 600, 800)),
        }
    else:
        raise ConfigError(f"table_id must be 1, 2 or 3, got {table_id!r}")
    m = 151 if problem == KDV else None
    out = {}
    for name, (method, s, k, n_list) in blocks.items():
        if reduced and method != "shbvm":
            n_list = n_list[:2]
        # large-s spectral steps contract slowly at the biggest h
        max_iter = 300 if method == "shbvm" else 100
        out[name] = ExperimentConfig(problem=problem, method=method, n_list=n_list, s=s, k=k, m=m,
                                     max_iter=max_iter)
    return out


def reproduce_table(table_id: int, out_dir: str | Path, reduced: bool = False,
                    blocks: Sequence[str] | None = None) -> list[Path]:
    """Run every method block of a table and write ``table<id>_<block>.csv``."""
    configs = table_configs(table_id, reduced)
    if blocks is not None:
        unknown = sorted(set(blocks) - set(configs))
        if unknown:
            raise ConfigError(f"unknown blocks {unknown}; choose from {sorted(configs)}")
        configs = {k: v for k, v in configs.items() if k in blocks}
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    problem = build_problem(next(iter(configs.values())))
    paths = []
    for name, cfg in configs.items():
        records = run_experiment(cfg, problem)
        path = out_dir / f"table{table_id}_{name}.csv"
        path.write_text(records_to_csv(records, cfg.problem, cfg.method == "shbvm"))
        paths.append(path)
    return paths
