"""Operating-point solvers and limit studies built on :func:`run_cycle`."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cycle import CycleConfig, run_cycle
from .errors import BoundaryMaximum, NoSignChange
from .spectrum import WellSpec

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SolveReport:
    target: str
    value: float
    residual: float
    bracket: tuple[float, float]
    iterations: int
    details: dict = field(default_factory=dict)


def find_root(f, a, b, xtol=1e-13, maxiter=200):
    """Bracketed root of ``f`` by secant steps safeguarded with bisection.

    Returns ``(x, f(x), iterations)``. Raises :class:`NoSignChange` unless
    ``f(a)`` and ``f(b)`` have opposite signs (or exactly one is zero).
    """
    fa, fb = f(a), f(b)
    if fa == 0 and fb == 0:
        raise NoSignChange(f"f vanishes at both ends of [{a}, {b}]")
    if fa == 0:
        return a, fa, 0
    if fb == 0:
        return b, fb, 0
    if fa * fb > 0:
        raise NoSignChange(f"f({a})={fa:.3g} and f({b})={fb:.3g} have the same sign")
    it = 0
    width = abs(b - a)
    while abs(b - a) > xtol and it < maxiter:
        it += 1
        x = b - fb * (b - a) / (fb - fa)
        lo, hi = min(a, b), max(a, b)
        # fall back to bisection when the secant leaves the bracket or stalls
        if not lo < x < hi or abs(b - a) > 0.5 * width:
            x = 0.5 * (a + b)
        width = abs(b - a)
        fx = f(x)
        if fx == 0:
            return x, fx, it
        if fa * fx < 0:
            b, fb = x, fx
        else:
            a, fa = x, fx
    x, fx = (a, fa) if abs(fa) <= abs(fb) else (b, fb)
    return x, fx, it


def golden_max(f, a, b, xtol=1e-10, maxiter=500):
    """Maximise a unimodal ``f`` on [a, b] by golden-section search."""
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while abs(b - a) > xtol and it < maxiter:
        it += 1
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    return (x1, f1, it) if f1 >= f2 else (x2, f2, it)


def _work_in(cfg, **changes):
    return run_cycle(cfg.with_(**changes)).W_tot


def pwc_beta_threshold(cfg: CycleConfig, bracket=None, xtol=1e-13) -> SolveReport:
    """Demon inverse temperature at which the net work changes sign."""
    if bracket is None:
        bracket = (cfg.beta, 100.0 * cfg.beta)
    if cfg.demon.gap == 0:
        raise NoSignChange("a degenerate demon gives W_tot = 0 for every beta_D")
    root, res, it = find_root(lambda bd: _work_in(cfg, beta_D=bd), *bracket, xtol=xtol)
    return SolveReport("pwc-beta", root, res, tuple(bracket), it)


def pure_demon_critical_condition(cfg: CycleConfig) -> float:
    """T (P_L ln P_L + P_R ln P_R) + P_R * gap, the zero-temperature-demon
    form of W_tot(l) = 0 with the sign flipped."""
    r = run_cycle(cfg)
    mix = sum(p * math.log(p) for p in (r.P_L, r.P_R) if p > 0)
    return cfg.temperature * mix + r.P_R * cfg.demon.gap


def _scan(f, lo, hi, n):
    xs = [float(x) for x in np.linspace(lo, hi, n)]
    return xs, np.array([f(x) for x in xs])


def critical_insertion(cfg: CycleConfig, bracket=None, n_scan=129, xtol=1e-13) -> SolveReport:
    """Smallest insertion position in ``bracket`` where W_tot(l) changes sign."""
    L = cfg.well.box_length
    if bracket is None:
        bracket = (0.05 * L, 0.95 * L)
    work = lambda l: _work_in(cfg, l=l)  # noqa: E731
    xs, ws = _scan(work, bracket[0], bracket[1], n_scan)
    cells = np.nonzero(ws[:-1] * ws[1:] < 0)[0]
    if len(cells) == 0:
        raise NoSignChange(f"W_tot(l) keeps its sign on [{bracket[0]}, {bracket[1]}]")
    i = int(cells[0])
    root, res, it = find_root(work, xs[i], xs[i + 1], xtol=xtol * L)

    pure = lambda l: pure_demon_critical_condition(cfg.with_(l=l))  # noqa: E731
    details = {"cell": (float(xs[i]), float(xs[i + 1])), "pure_demon_residual": pure(root)}
    try:
        p_root, _, _ = find_root(pure, xs[max(i - 1, 0)], xs[min(i + 2, n_scan - 1)], xtol=xtol * L)
        details["pure_demon_root"] = p_root
    except NoSignChange:
        details["pure_demon_root"] = math.nan
    return SolveReport("l-cri", root, res, tuple(bracket), it, details)


def max_work_condition_residual(cfg: CycleConfig) -> float:
    """Mismatch of the stationarity condition for maximal W_tot at ``cfg.l``."""
    r = run_cycle(cfg)
    ratio = (r.P_L * r.p_e + r.P_R * r.p_g) / (r.P_L * r.p_g + r.P_R * r.p_e)
    return ratio - math.exp(-cfg.beta * cfg.demon.gap)


def max_work_insertion(cfg: CycleConfig, bracket=None, n_scan=129, xtol=None) -> SolveReport:
    """Insertion position maximising the net extracted work."""
    L = cfg.well.box_length
    if bracket is None:
        bracket = (0.05 * L, 0.95 * L)
    if xtol is None:
        xtol = 1e-9 * L
    p_g, p_e = cfg.populations()
    if p_g == p_e or cfg.demon.gap == 0:
        # W_tot is symmetric about the centre (identically zero when p_g = p_e)
        return SolveReport("l-wmax", 0.5 * L, 0.0, tuple(bracket), 0, {"symmetric": True})
    work = lambda l: _work_in(cfg, l=l)  # noqa: E731
    xs, ws = _scan(work, bracket[0], bracket[1], n_scan)
    i = int(np.argmax(ws))
    if i == 0 or i == n_scan - 1:
        raise BoundaryMaximum(f"W_tot is largest at the bracket edge l={xs[i]:.6g}")
    x, fx, it = golden_max(work, xs[i - 1], xs[i + 1], xtol=xtol)
    residual = max_work_condition_residual(cfg.with_(l=x))
    return SolveReport("l-wmax", x, residual, tuple(bracket), it, {"W_tot": fx})


@dataclass(frozen=True)
class HalfSplit:
    W_tot: float
    eta: float
    eta_max: float


def _mixing_gain(d):
    """ln 2 - H((1 + d)/2), evaluated without cancellation for small d."""
    if d >= 1.0:
        return math.log(2.0)
    return 0.5 * ((1 + d) * math.log1p(d) + (1 - d) * math.log1p(-d))


def half_split_closed_forms(beta: float, gap: float, beta_D: float) -> HalfSplit:
    """Net work, efficiency and its small-gap limit for a wall at the centre."""
    T = 1.0 / beta
    d = 1.0 if math.isinf(beta_D * gap) else math.tanh(0.5 * beta_D * gap)  # p_g - p_e
    eta_max = 1.0 - 2.0 * beta / beta_D
    gain = _mixing_gain(d)
    W = T * gain - d * gap / 2
    eta = eta_max if gap == 0 else 1.0 - d * gap / (2 * T * gain)
    return HalfSplit(W, eta, eta_max)


def richardson_limit(hs, values, ratio=10.0, orders=(2, 4)):
    """Extrapolate ``values`` sampled at step sizes ``hs`` (shrinking by ``ratio``) to h -> 0."""
    table = list(values)
    for p in orders[: len(table) - 1]:
        k = ratio**p
        table = [(k * fine - coarse) / (k - 1) for coarse, fine in zip(table, table[1:])]
    return table[-1]


def eta_small_gap_limit(beta: float, beta_D: float, gaps=(1e-2, 1e-3, 1e-4)) -> float:
    """Richardson estimate of the centre-wall efficiency as the gap closes.

    The efficiency is even in the gap, so the error terms are O(gap^2), O(gap^4).
    """
    values = [half_split_closed_forms(beta, g, beta_D).eta for g in gaps]
    return richardson_limit(gaps, values, ratio=gaps[0] / gaps[1])


@dataclass(frozen=True)
class LimitOrderResult:
    order_a: float
    order_b: float
    order_b_extrapolated: float
    sequence_a: tuple
    sequence_b: tuple


def limit_order_demo(
    beta=1.0,
    L=100.0,
    beta_D_seq=(1.0, 10.0, 100.0, 1e3, math.inf),
    gap_seq=(1e-2, 1e-4, 1e-6),
) -> LimitOrderResult:
    """Net work at a centred wall for the two orders of gap -> 0 and beta_D -> inf.

    Order A closes the gap first (the demon becomes maximally mixed), order B
    cools the demon first (it becomes pure |g>).
    """
    base = CycleConfig(well=WellSpec(box_length=L), beta=beta, l=L / 2)
    seq_a = tuple((bd, _work_in(base, gap=0.0, beta_D=bd)) for bd in beta_D_seq)
    seq_b = tuple((g, _work_in(base, gap=g, beta_D=math.inf)) for g in gap_seq)
    (g1, w1), (g2, w2) = seq_b[-2], seq_b[-1]
    # linear in the gap for a pure demon; extrapolate the last two points to 0
    extrap = w2 - g2 * (w1 - w2) / (g1 - g2)
    return LimitOrderResult(seq_a[-1][1], seq_b[-1][1], extrap, seq_a, seq_b)
