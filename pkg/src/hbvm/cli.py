"""Command-line entry point: ``hbvm {tableau,spectral-scan,run,reproduce}``.

Every subcommand writes CSV to standard output or to ``--out``. Solver
failures exit with status 1 and configuration errors with status 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

from .basis_quadrature import build_tableau
from .errors import ConfigError, HbvmError, NonConvergence
from .harness import (
    load_config,
    parse_config,
    records_to_csv,
    reproduce_table,
    run_experiment,
    spectral_scan,
    table_configs,
)
from .problems import PROBLEMS

log = logging.getLogger("hbvm")


def _g(x: float) -> str:
    return format(float(x), ".17g")


def tableau_csv(k: int, s: int) -> str:
    """Long-format CSV ``quantity,i,j,value`` with nodes, weights, X_s and rho_s."""
    tab = build_tableau(k, s)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["quantity", "i", "j", "value"])
    for i, (c, b) in enumerate(zip(tab.c, tab.b)):
        w.writerow(["c", i, "", _g(c)])
        w.writerow(["b", i, "", _g(b)])
    for i in range(s):
        for j in range(s):
            w.writerow(["X", i, j, _g(tab.X[i, j])])
    w.writerow(["rho", "", "", _g(tab.rho)])
    return buf.getvalue()


def _parse_N_range(text: str) -> list[int]:
    """``"10:300:10"`` (inclusive) or a comma separated list."""
    try:
        if ":" in text:
            lo, hi, *rest = (int(t) for t in text.split(":"))
            step = rest[0] if rest else 1
            if step < 1:
                raise ValueError
            return list(range(lo, hi + 1, step))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad N range {text!r}; use LO:HI:STEP or a list") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hbvm", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tableau", help="nodes, weights, X_s and rho_s of HBVM(k, s)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("spectral-scan", help="E0 and deltaH0 versus N")
    p.add_argument("--problem", choices=PROBLEMS, required=True)
    p.add_argument("--N", type=_parse_N_range, default=None,
                   help="LO:HI:STEP or comma list (default 10:300:10)")
    p.add_argument("--scan-step", type=int, default=10)
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="problem parameter override, e.g. gamma=1.5")
    p.add_argument("--out")

    p = sub.add_parser("run", help="run one experiment configuration")
    p.add_argument("--config", help="key = value file")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a configuration key (repeatable)")
    p.add_argument("--out", help="CSV path (overrides the config's output key)")

    p = sub.add_parser("reproduce", help="rerun the method blocks of a benchmark table")
    p.add_argument("--table", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("--reduced", action="store_true", help="first two step counts per block")
    p.add_argument("--blocks", nargs="+", help="subset of method blocks")
    return ap


def _cmd_tableau(args) -> None:
    try:
        text = tableau_csv(args.k, args.s)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    _emit(text, args.out)


def _cmd_scan(args) -> None:
    Ns = args.N or list(range(10, 301, 10))
    overrides = [f"problem = {args.problem}", "method = gauss", "n_list = 1", *args.set]
    cfg = parse_config("", overrides)
    _emit(spectral_scan(args.problem, Ns, args.scan_step, cfg), args.out)


def _cmd_run(args) -> None:
    cfg = load_config(args.config, args.set) if args.config else parse_config("", args.set)
    records = run_experiment(cfg)
    _emit(records_to_csv(records, cfg.problem, cfg.method == "shbvm"), args.out or cfg.output)


def _cmd_reproduce(args) -> None:
    if args.blocks:
        known = table_configs(args.table)
        bad = [b for b in args.blocks if b not in known]
        if bad:
            raise ConfigError(f"unknown blocks {bad}; choose from {sorted(known)}")
    for path in reproduce_table(args.table, args.out, args.reduced, args.blocks):
        print(path)


_COMMANDS = {"tableau": _cmd_tableau, "spectral-scan": _cmd_scan, "run": _cmd_run,
             "reproduce": _cmd_reproduce}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"hbvm: configuration error: {exc}", file=sys.stderr)
        return 2
    except NonConvergence as exc:
        n = getattr(exc, "n", None)
        where = "" if n is None else f" (n={n})"
        print(f"hbvm: solver failure{where}: {exc}", file=sys.stderr)
        return 1
    except (HbvmError, FloatingPointError) as exc:
        print(f"hbvm: solver failure: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"hbvm: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
