import math

import numpy as np
import pytest
from scipy.optimize import brentq

from oracles import logistic_ground, xlogx
from qszilard.analysis import (
    critical_insertion,
    eta_small_gap_limit,
    find_root,
    golden_max,
    half_split_closed_forms,
    limit_order_demo,
    max_work_condition_residual,
    max_work_insertion,
    pure_demon_critical_condition,
    pwc_beta_threshold,
    richardson_limit,
)
from qszilard.cycle import CycleConfig, run_cycle
from qszilard.demon import DemonSpec
from qszilard.errors import BoundaryMaximum, NoSignChange
from qszilard.spectrum import WellSpec


def cfg_of(l=0.5, L=1.0, beta=1.0, gap=0.5, beta_D=math.inf, F=0.0, **kw):
    return CycleConfig(WellSpec(box_length=L), beta, DemonSpec(gap, beta_D, F), l, **kw)


def work(cfg, **changes):
    return run_cycle(cfg.with_(**changes)).W_tot


# generic solvers ----------------------------------------------------------

def test_find_root_polynomial():
    x, fx, _ = find_root(lambda x: x**3 - 2, 0.0, 3.0)
    assert x == pytest.approx(2 ** (1 / 3), abs=1e-12)
    assert abs(fx) < 1e-12


def test_find_root_needs_sign_change():
    with pytest.raises(NoSignChange):
        find_root(lambda x: x * x + 1, -1.0, 1.0)


def test_golden_max_parabola():
    x, fx, _ = golden_max(lambda x: -(x - 0.3) ** 2, 0.0, 1.0, xtol=1e-12)
    assert x == pytest.approx(0.3, abs=1e-6)


def test_richardson_removes_even_error_terms():
    hs = (1e-1, 1e-2, 1e-3)
    vals = [1.0 + 3 * h * h - 7 * h**4 for h in hs]
    assert richardson_limit(hs, vals) == pytest.approx(1.0, abs=1e-14)


# positive-work threshold --------------------------------------------------

def test_pwc_anchor():
    rep = pwc_beta_threshold(cfg_of(beta_D=1.0))
    assert rep.value == pytest.approx(2.09, abs=0.01)
    assert abs(rep.residual) < 1e-10
    assert rep.bracket[0] <= rep.value <= rep.bracket[1]


def test_pwc_degenerate_demon():
    with pytest.raises(NoSignChange):
        pwc_beta_threshold(cfg_of(gap=0.0, beta_D=1.0))


def test_pwc_bracket_without_root():
    with pytest.raises(NoSignChange):
        pwc_beta_threshold(cfg_of(beta_D=1.0), bracket=(3.0, 10.0))


def test_pwc_matches_scalar_closed_form():
    gap = 0.25

    def closed(bd):
        p_g = logistic_ground(bd, gap)
        p_e = 1 - p_g
        return math.log(2) + xlogx(p_g) + xlogx(p_e) - (p_g - p_e) * gap / 2

    oracle = brentq(closed, 1.0, 100.0, xtol=1e-14)
    rep = pwc_beta_threshold(cfg_of(gap=gap, beta_D=1.0))
    assert rep.value == pytest.approx(oracle, abs=1e-9)


# critical insertion -------------------------------------------------------

def test_critical_insertion_anchor():
    rep = critical_insertion(cfg_of())
    assert rep.value == pytest.approx(0.447, abs=0.005)
    assert abs(rep.residual) < 1e-10
    assert abs(rep.details["pure_demon_residual"]) < 5e-3
    # with a zero-temperature demon the pure-demon condition is the exact one
    assert rep.details["pure_demon_root"] == pytest.approx(rep.value, abs=1e-9)


def test_pure_demon_condition_is_sign_flipped_work_for_pure_demon():
    for l in (0.2, 0.45, 0.7):
        cfg = cfg_of(l=l)
        assert pure_demon_critical_condition(cfg) == pytest.approx(-work(cfg), abs=1e-12)


def test_critical_insertion_shrinks_with_gap():
    roots = [critical_insertion(cfg_of(gap=g)).value for g in (0.5, 0.2, 0.05, 0.01)]
    assert all(r2 < r1 for r1, r2 in zip(roots, roots[1:]))


def test_critical_insertion_warm_demon_against_dense_grid():
    cfg = cfg_of(beta_D=3.0)
    ls = np.linspace(0.05, 0.95, 2001)
    ws = np.array([work(cfg, l=float(l)) for l in ls])
    i = int(np.nonzero(ws[:-1] * ws[1:] < 0)[0][0])
    oracle = brentq(lambda l: work(cfg, l=l), ls[i], ls[i + 1], xtol=1e-14)
    rep = critical_insertion(cfg)
    assert rep.value == pytest.approx(oracle, abs=1e-10)


def test_critical_insertion_no_sign_change():
    with pytest.raises(NoSignChange):
        # a degenerate demon gives W_tot = 0 at every l
        critical_insertion(cfg_of(gap=0.0, beta_D=2.0))


# maximum work -------------------------------------------------------------

def test_max_work_symmetric_cases():
    assert max_work_insertion(cfg_of(gap=0.0, beta_D=2.0)).value == 0.5
    assert max_work_insertion(cfg_of(L=3.0, l=1.0, gap=0.0)).value == 1.5


def test_max_work_off_centre():
    cfg = cfg_of(beta_D=4.0)
    rep = max_work_insertion(cfg)
    assert rep.value > 0.5
    assert abs(rep.residual) < 1e-6
    assert abs(max_work_condition_residual(cfg.with_(l=rep.value))) < 1e-6
    assert rep.details["W_tot"] == pytest.approx(work(cfg, l=rep.value), abs=1e-15)


def test_max_work_boundary():
    # a narrow bracket on the rising flank puts the maximum at its edge
    with pytest.raises(BoundaryMaximum):
        max_work_insertion(cfg_of(beta_D=4.0), bracket=(0.3, 0.4))


@pytest.mark.parametrize("beta_D", [3.0, 4.0, math.inf])
def test_solvers_agree_with_fine_grid(beta_D):
    cfg = cfg_of(beta_D=beta_D)
    ls = np.linspace(0.05, 0.95, 10_001)
    ws = np.array([work(cfg, l=float(l)) for l in ls])
    h = ls[1] - ls[0]

    wmax = max_work_insertion(cfg)
    j = int(np.argmax(ws))
    assert abs(wmax.value - ls[j]) <= h

    crossings = np.nonzero(ws[:-1] * ws[1:] < 0)[0]
    if len(crossings):
        cri = critical_insertion(cfg)
        i = int(crossings[0])
        assert ls[i] <= cri.value <= ls[i + 1]


def test_roots_stable_under_bracket_shift():
    cfg = cfg_of()
    a = critical_insertion(cfg).value
    b = critical_insertion(cfg, bracket=(0.07, 0.9)).value
    assert a == pytest.approx(b, abs=1e-8)
    c = pwc_beta_threshold(cfg.with_(beta_D=1.0)).value
    d = pwc_beta_threshold(cfg.with_(beta_D=1.0), bracket=(1.3, 60.0)).value
    assert c == pytest.approx(d, abs=1e-8)
    cfg4 = cfg.with_(beta_D=4.0)
    e = max_work_insertion(cfg4).value
    f = max_work_insertion(cfg4, bracket=(0.1, 0.9)).value
    assert e == pytest.approx(f, abs=1e-8)


def test_work_is_asymmetric_about_centre():
    cfg = cfg_of(beta_D=4.0)
    assert work(cfg, l=0.4) < work(cfg, l=0.6)


# centred wall -------------------------------------------------------------

@pytest.mark.parametrize("gap,beta,beta_D", [(0.5, 1.0, 2.09), (0.5, 1.0, 4.0), (0.2, 2.0, 7.0), (1.0, 0.5, 1.5)])
def test_half_split_matches_ledger(gap, beta, beta_D):
    hs = half_split_closed_forms(beta, gap, beta_D)
    r = run_cycle(cfg_of(L=2.0, l=1.0, beta=beta, gap=gap, beta_D=beta_D))
    assert hs.W_tot == pytest.approx(r.W_tot, abs=1e-10)
    if r.pwc_satisfied:
        assert hs.eta == pytest.approx(r.eta, abs=1e-10)


def test_half_split_anchor_values():
    assert abs(half_split_closed_forms(1.0, 0.5, 2.09).W_tot) < 1e-3
    assert half_split_closed_forms(1.0, 0.5, 4.0).eta == pytest.approx(0.419, abs=5e-4)
    assert half_split_closed_forms(1.0, 0.5, 4.0).eta_max == 0.5


def test_eta_monotone_in_gap():
    etas = [half_split_closed_forms(1.0, g, 4.0).eta for g in (1e-4, 1e-3, 1e-2, 0.1, 0.5)]
    assert all(e2 < e1 for e1, e2 in zip(etas, etas[1:]))


@pytest.mark.parametrize("beta,beta_D", [(1.0, 4.0), (1.0, 2.5), (0.5, 3.0)])
def test_eta_small_gap_limit(beta, beta_D):
    assert eta_small_gap_limit(beta, beta_D) == pytest.approx(1 - 2 * beta / beta_D, abs=1e-4)


# limit orders -------------------------------------------------------------

def test_limit_orders():
    res = limit_order_demo()
    assert abs(res.order_a) < 1e-6
    assert res.order_b == pytest.approx(math.log(2), abs=1e-3)
    assert res.order_b_extrapolated == pytest.approx(math.log(2), abs=1e-3)
    assert all(abs(w) < 1e-6 for _, w in res.sequence_a)


def test_pure_demon_finite_box_gives_mixing_entropy():
    # gap -> 0 with a pure demon: W_tot -> T ln 2 at the centre even for L = 1
    ws = [work(cfg_of(gap=g)) for g in (1e-2, 1e-4, 1e-6)]
    assert ws[-1] == pytest.approx(math.log(2), abs=1e-6)
    assert abs(ws[-1] - math.log(2)) < abs(ws[0] - math.log(2))
