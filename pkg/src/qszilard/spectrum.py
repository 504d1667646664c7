"""Particle in an infinite square well: levels and canonical thermodynamics.

All quantities use natural units with k_B = 1. With the default constants
(m = pi^2/2, hbar = 1) the levels of a box of width y are E_n = n^2 / y^2.

Partition sums are evaluated through the reduced variable a = beta * E_1(y),
for which Z = sum_{n>=1} exp(-a n^2). Large a is summed directly in a
factored form that never underflows; small a switches to the Poisson
(Jacobi theta) resummation so the cost stays bounded in the classical limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

from .errors import DomainError, SumUnderflow, TruncationError

DEFAULT_TOL = 1e-14
THETA_CUTOFF = 1e-3
UNDERFLOW_LIMIT = 700.0
MAX_TERMS = 10_000_000


@dataclass(frozen=True)
class WellSpec:
    """Infinite square well of width ``box_length`` holding one particle."""

    mass: float = math.pi**2 / 2
    hbar: float = 1.0
    box_length: float = 1.0

    def __post_init__(self):
        if not (self.mass > 0 and self.hbar > 0 and self.box_length > 0):
            raise DomainError(
                f"well constants must be positive: m={self.mass}, "
                f"hbar={self.hbar}, L={self.box_length}"
            )

    def with_length(self, length: float) -> "WellSpec":
        return replace(self, box_length=length)


@dataclass(frozen=True)
class BoxThermo:
    log_Z: float
    mean_energy: float
    entropy: float
    n_terms_used: int
    truncation_bound: float


def eigen_energy(well: WellSpec, n: int, width: float | None = None) -> float:
    """Energy (hbar n pi)^2 / (2 m y^2) of level ``n`` in a box of width ``width``."""
    y = well.box_length if width is None else width
    if not y > 0:
        raise DomainError(f"box width must be positive, got {y}")
    if int(n) != n or n < 1:
        raise DomainError(f"quantum number must be a positive integer, got {n}")
    # divide first: y*y underflows to 0 for subnormal widths
    k = well.hbar * n * math.pi / y
    return k * k / (2.0 * well.mass)


@lru_cache(maxsize=65536)
def _series(a: float, tol: float) -> tuple[float, float, float, int, float]:
    """Moments of S(a) = sum_{n>=1} exp(-a n^2).

    Returns ``(log S + a, <n^2>, <n^2 - 1>, n_terms, bound)`` where the
    averages are over the weights exp(-a n^2)/S. The ``+ a`` offset keeps the
    large-a branch free of underflow.
    """
    if a < THETA_CUTOFF:
        return _series_theta(a, tol)
    return _series_direct(a, tol)


def _series_direct(a, tol):
    # terms t_n = exp(-a (n^2 - 1)); t_1 = 1
    total = 1.0
    first = 0.0  # sum (n^2 - 1) t_n
    n = 1
    while True:
        nxt = n + 1
        t_next = math.exp(-a * (nxt * nxt - 1))
        # terms decay faster than geometric with ratio exp(-a(2n+3))
        ratio = math.exp(-a * (2 * nxt + 1))
        bound = t_next / (1.0 - ratio) / total if ratio < 1.0 else math.inf
        if bound <= tol or t_next == 0.0:
            break
        total += t_next
        first += (nxt * nxt - 1) * t_next
        n = nxt
        if n >= MAX_TERMS:
            raise TruncationError(f"series for a={a} needs more than {MAX_TERMS} terms")
    excess = first / total
    return math.log(total), 1.0 + excess, excess, n, bound


def _series_theta(a, tol):
    # S = (sqrt(pi/a) * theta - 1) / 2, theta = 1 + 2 sum_k exp(-pi^2 k^2 / a)
    c = math.pi**2 / a
    theta = 1.0
    dtheta = 0.0  # d theta / d a
    k = 1
    while True:
        t = math.exp(-c * k * k)
        # relative error of S is at most twice that of theta for a < 1e-3
        bound = 4.0 * t / theta
        if bound <= tol:
            break
        theta += 2.0 * t
        dtheta += 2.0 * t * c * k * k / a
        k += 1
    root = math.sqrt(math.pi / a)
    s = 0.5 * (root * theta - 1.0)
    # M = -dS/da = sum n^2 exp(-a n^2)
    m2 = 0.5 * root * (0.5 * theta / a - dtheta)
    mean_n2 = m2 / s
    # log S + a; a is tiny here so the offset is harmless
    return math.log(s) + a, mean_n2, mean_n2 - 1.0, k, bound


def reduced_exponent(well: WellSpec, beta: float, width: float) -> float:
    """beta * E_1(width); infinite for zero (or vanishingly small) width."""
    if width == 0:
        return math.inf
    return beta * eigen_energy(well, 1, width)


def box_thermo(
    well: WellSpec,
    beta: float,
    width: float | None = None,
    tol: float = DEFAULT_TOL,
    log_space: bool = False,
) -> BoxThermo:
    """Canonical log Z, mean energy and entropy of a box of width ``width``.

    With ``log_space=False`` a box whose ground-state Boltzmann factor leaves
    the double exponent range raises :class:`SumUnderflow`. ``log_space=True``
    returns the (finite, very negative) log Z instead.
    """
    y = well.box_length if width is None else width
    if not y > 0:
        raise DomainError(f"box width must be positive, got {y}")
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    if not 0 < tol < 1:
        raise DomainError(f"tol must lie in (0, 1), got {tol}")
    e1 = eigen_energy(well, 1, y)
    a = beta * e1
    if math.isinf(a):
        raise SumUnderflow(f"E_1 of a box of width {y:.3g} overflows")
    if a >= UNDERFLOW_LIMIT and not log_space:
        raise SumUnderflow(f"beta*E_1 = {a:.6g} exceeds the exponent range")
    log_s, mean_n2, excess, n_terms, bound = _series(a, tol)
    log_z = log_s - a
    u = e1 * mean_n2
    # S = log Z + beta U, arranged so the large a terms cancel analytically
    s = log_s + a * excess
    return BoxThermo(log_z, u, s, n_terms, bound)


def log_partition(well: WellSpec, beta: float, width: float, tol: float = DEFAULT_TOL) -> float:
    """ln Z for a box of ``width``; a zero-width box has Z = 0 (returns -inf)."""
    if width < 0:
        raise DomainError(f"box width must be non-negative, got {width}")
    a = reduced_exponent(well, beta, width)
    if math.isinf(a):
        return -math.inf
    return box_thermo(well, beta, width, tol, log_space=True).log_Z


def joint_split_log_Z(
    well: WellSpec, beta: float, l: float, tol: float = DEFAULT_TOL
) -> tuple[float, float, float]:
    """Split the well at ``l``: returns (ln Z(l) + Z(L - l), P_L, P_R)."""
    L = well.box_length
    if not 0 <= l <= L:
        raise DomainError(f"insertion position {l} outside [0, {L}]")
    lz_left = log_partition(well, beta, l, tol)
    lz_right = log_partition(well, beta, L - l, tol)
    if lz_left == lz_right:
        return lz_left + math.log(2.0), 0.5, 0.5
    hi = max(lz_left, lz_right)
    lo = min(lz_left, lz_right)
    log_total = hi + math.log1p(math.exp(lo - hi))
    small = math.exp(lo - log_total)
    if lz_left <= lz_right:
        p_left, p_right = small, 1.0 - small
    else:
        p_left, p_right = 1.0 - small, small
    return log_total, p_left, p_right


def classical_probability(l: float, L: float, side: str = "left") -> float:
    """Volume-proportional probability of finding the particle on ``side``."""
    if not 0 <= l <= L:
        raise DomainError(f"position {l} outside [0, {L}]")
    if side == "left":
        return l / L
    if side == "right":
        return 1.0 - l / L
    raise DomainError(f"side must be 'left' or 'right', got {side!r}")
