"""Command-line front end: ``qszilard {cycle,figure,solve,sweep}``.

Parameters come from built-in defaults, then an optional ``--config`` file of
``key = value`` lines, then command-line flags. Keys: l, L, beta, beta_D,
Delta, F, l_g, l_e, guard (and tol). ``beta_D = inf`` is a zero-temperature
demon.

Exit codes: 0 success, 1 bad configuration, 2 cycle/domain failure,
3 solver failure (no sign change or boundary maximum).
"""

from __future__ import annotations

import argparse
import os
import sys

from . import analysis
from .cycle import run_cycle
from .errors import BoundaryMaximum, NoSignChange, QSzilardError
from .sweep import (
    CYCLE_COLUMNS,
    DEFAULTS,
    FIGURES,
    PARAM_KEYS,
    Axis,
    ConfigError,
    SweepTable,
    cycle_row,
    figure_table,
    fmt,
    make_config,
    parse_value,
    provenance,
    read_config_file,
    resolve_tol,
    run_sweep,
)

EXIT_CONFIG, EXIT_DOMAIN, EXIT_SOLVER = 1, 2, 3
SOLVE_TARGETS = ("pwc-beta", "l-cri", "l-wmax")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_common(p):
    p.add_argument("--config", metavar="PATH", help="key=value configuration file")
    p.add_argument("--out", metavar="PATH", help="CSV output path")
    p.add_argument("--tol", type=float, help="series tolerance (falls back to $QSZILARD_TOL)")
    p.add_argument("--workers", type=int, default=1, help="worker processes for grids")
    for key in PARAM_KEYS:
        p.add_argument(f"--{key}", dest=f"param_{key}", metavar="X")


def build_parser():
    parser = _Parser(prog="qszilard", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cycle", help="ledger of a single cycle")
    _add_common(p)

    p = sub.add_parser("figure", help="data behind a published figure")
    p.add_argument("name", help=", ".join(FIGURES))
    _add_common(p)

    p = sub.add_parser("solve", help="operating-point solvers")
    p.add_argument("target", help=", ".join(SOLVE_TARGETS))
    p.add_argument("--bracket", nargs=2, type=float, metavar=("LO", "HI"))
    _add_common(p)

    p = sub.add_parser("sweep", help="grid of cycles written as CSV")
    p.add_argument("--axis", action="append", required=True, metavar="NAME:MIN:MAX:COUNT[:log]")
    _add_common(p)
    return parser


def gather_params(args):
    params = {}
    file_tol = None
    if args.config:
        params.update(read_config_file(args.config))
        file_tol = params.pop("tol", None)
    for key in PARAM_KEYS:
        raw = getattr(args, f"param_{key}")
        if raw is not None:
            params[key] = parse_value(key, raw)
    return params, resolve_tol(args.tol, file_tol)


def _print_cycle(result, out):
    out.write(f"{'step':<12} {'W':>14} {'Q':>14} {'dU':>14} {'dS':>14}\n")
    for s in result.steps:
        out.write(f"{s.name:<12} {s.W:>14.8g} {s.Q:>14.8g} {s.dU:>14.8g} {s.dS:>14.8g}\n")
    out.write(f"P_L = {result.P_L:.10g}   P_R = {result.P_R:.10g}\n")
    out.write(f"p_g = {result.p_g:.10g}   p_e = {result.p_e:.10g}\n")
    out.write(f"W_tot = {result.W_tot:.12g}\nQ_tot = {result.Q_tot:.12g}\n")
    out.write(f"eta = {result.eta:.12g}   eta_Carnot = {result.eta_carnot:.12g}\n")
    out.write(f"PWC satisfied: {'yes' if result.pwc_satisfied else 'no'}\n")
    out.write(f"demon entropy after removal = {result.demon_entropy:.10g} "
              f"(erasure cost T_D*S = {result.erasure_cost:.10g})\n")


def cmd_cycle(params, tol, args, out):
    result = run_cycle(make_config(params, tol))
    _print_cycle(result, out)
    table = SweepTable(CYCLE_COLUMNS, [cycle_row(params, tol)], provenance("cycle", params, tol))
    out.write("\n")
    out.write(",".join(table.columns) + "\n")
    out.write(",".join(fmt(v) for v in table.rows[0]) + "\n")
    if args.out:
        table.write(args.out)
    return 0


def cmd_figure(params, tol, args, out):
    if args.name not in FIGURES:
        raise ConfigError("figure", f"unknown figure {args.name!r}; choose from {', '.join(FIGURES)}")
    table = figure_table(args.name, params, tol, args.workers)
    path = args.out or f"{args.name}.csv"
    table.write(path)
    out.write(f"wrote {len(table.rows)} rows to {path}\n")
    return 0


SOLVE_COLUMNS = ("target", "value", "residual", "bracket_lo", "bracket_hi", "iterations", *PARAM_KEYS)


def cmd_solve(params, tol, args, out):
    if args.target not in SOLVE_TARGETS:
        raise ConfigError("target", f"unknown target {args.target!r}; choose from {', '.join(SOLVE_TARGETS)}")
    cfg = make_config(params, tol)
    solver = {
        "pwc-beta": analysis.pwc_beta_threshold,
        "l-cri": analysis.critical_insertion,
        "l-wmax": analysis.max_work_insertion,
    }[args.target]
    report = solver(cfg, bracket=tuple(args.bracket) if args.bracket else None)
    out.write(f"{report.target}: {report.value:.12g}\n")
    out.write(f"residual = {report.residual:.3g}   bracket = [{report.bracket[0]:.6g}, "
              f"{report.bracket[1]:.6g}]   iterations = {report.iterations}\n")
    for key, value in report.details.items():
        out.write(f"{key} = {value}\n")
    if args.out:
        merged = {**DEFAULTS, **params}
        row = [report.target, report.value, report.residual, *report.bracket, report.iterations,
               *(merged[k] for k in PARAM_KEYS)]
        fresh = not os.path.exists(args.out) or os.path.getsize(args.out) == 0
        with open(args.out, "a") as fh:
            if fresh:
                for line in provenance("solve", params, tol):
                    fh.write(f"# {line}\n")
                fh.write(",".join(SOLVE_COLUMNS) + "\n")
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return 0


def cmd_sweep(params, tol, args, out):
    axes = [Axis.parse(text) for text in args.axis]
    table = run_sweep(params, axes, tol, args.workers)
    path = args.out or "sweep.csv"
    table.write(path)
    failed = sum(1 for r in table.rows if r[-1])
    out.write(f"wrote {len(table.rows)} rows to {path} ({failed} failed points)\n")
    return 0


COMMANDS = {"cycle": cmd_cycle, "figure": cmd_figure, "solve": cmd_solve, "sweep": cmd_sweep}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        params, tol = gather_params(args)
        return COMMANDS[args.command](params, tol, args, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NoSignChange, BoundaryMaximum) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except QSzilardError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
