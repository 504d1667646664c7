"""Run configurations, parameter grids and CSV emission for the CLI."""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .cycle import CycleConfig, run_cycle
from .demon import DemonSpec
from .errors import QSzilardError
from .spectrum import DEFAULT_TOL, WellSpec, classical_probability, joint_split_log_Z

PARAM_KEYS = ("l", "L", "beta", "beta_D", "Delta", "F", "l_g", "l_e", "guard")
SWEEP_AXES = ("l", "beta_D", "Delta", "F", "L", "beta")
DEFAULTS = {
    "l": 0.5,
    "L": 1.0,
    "beta": 1.0,
    "beta_D": math.inf,
    "Delta": 0.5,
    "F": 0.0,
    "l_g": None,
    "l_e": None,
    "guard": 1e-6,
}
TOL_ENV = "QSZILARD_TOL"
STEP_COLUMNS = tuple(f"{q}_{s}" for q in ("W", "Q") for s in ("ins", "mea", "exp", "rev"))
RESULT_COLUMNS = (
    "P_L", "P_R", "p_g", "p_e", "l_g_used", "l_e_used",
    *STEP_COLUMNS,
    "W_tot", "Q_tot", "eta", "eta_carnot", "pwc", "demon_entropy", "erasure_cost",
)


class ConfigError(QSzilardError, ValueError):
    """Malformed or unknown configuration entry."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


def parse_value(key, text):
    text = str(text).strip()
    if key in ("l_g", "l_e") and text.lower() in ("", "none", "auto"):
        return None
    try:
        return float(text)
    except ValueError:
        raise ConfigError(key, f"cannot parse {text!r} as a number") from None


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    params = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}", f"expected key=value, got {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            if key == "tol":
                params["tol"] = parse_value(key, value)
                continue
            if key not in PARAM_KEYS:
                raise ConfigError(key, "unknown configuration key")
            params[key] = parse_value(key, value)
    return params


def resolve_tol(explicit=None, from_file=None) -> float:
    if explicit is not None:
        return explicit
    if from_file is not None:
        return from_file
    env = os.environ.get(TOL_ENV)
    if env:
        return parse_value(TOL_ENV, env)
    return DEFAULT_TOL


def make_config(params: dict, tol: float = DEFAULT_TOL) -> CycleConfig:
    p = {**DEFAULTS, **params}
    return CycleConfig(
        well=WellSpec(box_length=p["L"]),
        beta=p["beta"],
        demon=DemonSpec(gap=p["Delta"], beta_D=p["beta_D"], coherence=p["F"]),
        l=p["l"],
        l_g=p["l_g"],
        l_e=p["l_e"],
        guard=p["guard"],
        tol=tol,
    )


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int
    log: bool = False

    def __post_init__(self):
        if self.name not in SWEEP_AXES:
            raise ConfigError(self.name, f"sweep axis must be one of {', '.join(SWEEP_AXES)}")
        if self.count < 2:
            raise ConfigError(self.name, "sweep count must be >= 2")
        if self.log and not (self.start > 0 and self.stop > 0):
            raise ConfigError(self.name, "log spacing needs positive bounds")

    @classmethod
    def parse(cls, text: str) -> "Axis":
        """``name:start:stop:count[:log|lin]``"""
        parts = text.split(":")
        if len(parts) not in (4, 5):
            raise ConfigError(text, "axis must be name:start:stop:count[:log]")
        name = parts[0]
        try:
            count = int(parts[3])
        except ValueError:
            raise ConfigError(name, f"bad count {parts[3]!r}") from None
        log = len(parts) == 5 and parts[4] == "log"
        if len(parts) == 5 and parts[4] not in ("log", "lin"):
            raise ConfigError(name, f"spacing must be 'log' or 'lin', got {parts[4]!r}")
        return cls(name, parse_value(name, parts[1]), parse_value(name, parts[2]), count, log)

    def values(self):
        if self.log:
            return np.geomspace(self.start, self.stop, self.count).tolist()
        return np.linspace(self.start, self.stop, self.count).tolist()

    def describe(self) -> str:
        return f"{self.name}:{fmt(self.start)}:{fmt(self.stop)}:{self.count}:{'log' if self.log else 'lin'}"


@dataclass
class SweepTable:
    columns: tuple
    rows: list
    header: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for line in self.header:
            buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([fmt(v) for v in row])
        return buf.getvalue()

    def write(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def provenance(command: str, params: dict, tol: float, extra=()) -> list:
    lines = [f"qszilard {__version__}", f"command: {command}"]
    merged = {**DEFAULTS, **params}
    lines += [f"{k} = {fmt(merged[k]) or 'auto'}" for k in PARAM_KEYS]
    lines.append(f"tol = {fmt(tol)}")
    lines.extend(extra)
    return lines


def cycle_row(params: dict, tol: float) -> list:
    """Evaluate one point; failures become NaN cells plus the error name."""
    merged = {**DEFAULTS, **params}
    head = [merged[k] for k in PARAM_KEYS]
    try:
        r = run_cycle(make_config(merged, tol))
    except QSzilardError as exc:
        return head + [math.nan] * len(RESULT_COLUMNS) + [type(exc).__name__]
    steps = [s.W for s in r.steps] + [s.Q for s in r.steps]
    body = [r.P_L, r.P_R, r.p_g, r.p_e, r.l_g, r.l_e, *steps,
            r.W_tot, r.Q_tot, r.eta, r.eta_carnot, r.pwc_satisfied, r.demon_entropy, r.erasure_cost]
    return head + body + [""]


CYCLE_COLUMNS = (*PARAM_KEYS, *RESULT_COLUMNS, "error")


def _cycle_row_task(args):
    return cycle_row(*args)


def evaluate(points, tol, workers=1, task=_cycle_row_task):
    """Evaluate ``points`` in order, optionally on a process pool."""
    jobs = [(p, tol) for p in points]
    if workers <= 1 or len(jobs) < 2:
        return [task(j) for j in jobs]
    chunk = max(1, len(jobs) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map yields in submission order, so the row order never depends on scheduling
        return list(pool.map(task, jobs, chunksize=chunk))


def grid_points(base: dict, axes) -> list:
    """Row-major grid: the first axis varies slowest."""
    names = [a.name for a in axes]
    return [{**base, **dict(zip(names, combo))} for combo in itertools.product(*(a.values() for a in axes))]


def run_sweep(base: dict, axes, tol: float, workers: int = 1) -> SweepTable:
    rows = evaluate(grid_points(base, axes), tol, workers)
    header = provenance("sweep", base, tol, [f"axis = {a.describe()}" for a in axes])
    return SweepTable(CYCLE_COLUMNS, rows, header)


# figure data -------------------------------------------------------------

FIGURES = ("fig2", "fig3a", "fig3b", "fig4", "fig5")


def _fig2_task(args):
    (l, T, L), tol = args
    _, p_left, _ = joint_split_log_Z(WellSpec(box_length=L), 1.0 / T, l, tol)
    return [l, T, 1.0 / T, p_left, classical_probability(l, L)]


def _insertion_ledger_task(args):
    params, tol = args
    r = run_cycle(make_config(params, tol))
    return [params["beta"], params["L"], params["l"], r.steps[0].W, r.steps[0].Q]


def figure_table(name: str, base: dict, tol: float, workers: int = 1) -> SweepTable:
    """Data behind one of the published figures, with ``base`` overriding defaults."""
    p = {**DEFAULTS, **base}
    if name == "fig2":
        L = p["L"]
        temps = np.linspace(0.1, 10.0, 100).tolist()
        jobs = [(l * L, T, L) for l in (1 / 3, 1 / 4) for T in temps]
        rows = evaluate(jobs, tol, workers, _fig2_task)
        cols = ("l", "T", "beta", "P_L", "P_L_classical")
    elif name == "fig3a":
        L = p["L"]
        points = [{**p, "beta": b, "l": x}
                  for b in (1.0, 0.5, 0.1) for x in np.linspace(0.0, L, 101).tolist()]
        rows = evaluate(points, tol, workers, _insertion_ledger_task)
        cols = ("beta", "L", "l", "W_ins", "Q_ins")
    elif name == "fig3b":
        points = [{**p, "L": L, "l": frac * L}
                  for frac in (0.1, 0.3, 0.5) for L in np.linspace(1.0, 50.0, 99).tolist()]
        rows = evaluate(points, tol, workers, _insertion_ledger_task)
        cols = ("beta", "L", "l", "W_ins", "Q_ins")
    elif name in ("fig4", "fig5"):
        L = p["L"]
        axes_bd = np.linspace(1.0, 5.0, 41).tolist() + [math.inf]
        ls = (np.arange(1, 100) / 100 * L).tolist()
        points = [{**p, "beta_D": bd, "l": x} for bd in axes_bd for x in ls]
        full = evaluate(points, tol, workers)
        idx = {c: i for i, c in enumerate(CYCLE_COLUMNS)}
        if name == "fig4":
            cols = ("beta_D", "l", "W_tot", "W_mea", "pwc", "error")
        else:
            # eta is already 0 wherever the net work is not positive
            cols = ("beta_D", "l", "eta", "eta_carnot", "pwc", "error")
        rows = [[r[idx[c]] for c in cols] for r in full]
    else:
        raise ConfigError("figure", f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    return SweepTable(cols, rows, provenance(f"figure {name}", base, tol))
