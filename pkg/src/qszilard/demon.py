"""Two-level demon: thermal populations, coherence and effective temperature.

The demon density matrix is [[p_g, F], [F*, p_e]]. Only |F| enters any
observable used here, so the phase of F is not modelled. A coherent demon
enters the engine cycle through the eigenvalues of this matrix, i.e. as an
incoherent demon at a lower effective temperature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateGap, DomainError, PositivityError


@dataclass(frozen=True)
class DemonSpec:
    """Demon with level spacing ``gap`` prepared by a bath at ``beta_D``.

    ``beta_D = math.inf`` is the zero-temperature demon.
    """

    gap: float = 0.5
    beta_D: float = math.inf
    coherence: float = 0.0

    def __post_init__(self):
        if not self.gap >= 0:
            raise DomainError(f"gap must be >= 0, got {self.gap}")
        if not self.beta_D > 0:
            raise DomainError(f"beta_D must be > 0, got {self.beta_D}")
        if not self.coherence >= 0 or math.isinf(self.coherence):
            raise DomainError(f"|F| must be finite and >= 0, got {self.coherence}")
        p_g, p_e = thermal_populations(self)
        if self.coherence**2 > p_g * p_e:
            raise PositivityError(
                f"|F|^2 = {self.coherence**2:.6g} exceeds p_g p_e = {p_g * p_e:.6g}"
            )

    @property
    def temperature(self) -> float:
        return 1.0 / self.beta_D


@dataclass(frozen=True)
class DemonState:
    p_g: float
    p_e: float
    effective_beta: float
    p_plus: float
    p_minus: float


def thermal_populations(spec: DemonSpec) -> tuple[float, float]:
    """Boltzmann populations (p_g, p_e) of the bare demon."""
    if spec.gap == 0:
        return 0.5, 0.5
    x = spec.beta_D * spec.gap
    if math.isinf(x):
        return 1.0, 0.0
    # p_e = 1 / (1 + e^x) without overflow
    t = math.exp(-x)
    p_e = t / (1.0 + t)
    return 1.0 - p_e, p_e


def eigen_populations_exact(spec: DemonSpec) -> tuple[float, float]:
    """Eigenvalues (p_plus, p_minus) of the demon density matrix, p_plus <= p_minus."""
    p_g, p_e = thermal_populations(spec)
    f2 = spec.coherence**2
    if f2 == 0:
        return min(p_g, p_e), max(p_g, p_e)
    det = p_g * p_e - f2
    if det < 0:
        raise PositivityError(f"|F|^2 = {f2:.6g} exceeds p_g p_e = {p_g * p_e:.6g}")
    p_minus = 0.5 + math.sqrt(0.25 * (p_g - p_e) ** 2 + f2)
    # product of eigenvalues = det keeps the small one accurate
    return det / p_minus, p_minus


def effective_beta(spec: DemonSpec) -> float:
    """Inverse temperature of the thermal demon with the same eigen-populations.

    Computed as ln(p_minus / p_plus) / gap; equals ``beta_D`` without coherence.
    """
    if spec.coherence == 0:
        return spec.beta_D
    if spec.gap == 0:
        raise DegenerateGap("effective temperature is undefined for a zero gap with |F| > 0")
    p_plus, p_minus = eigen_populations_exact(spec)
    if p_plus == 0:
        return math.inf
    return math.log(p_minus / p_plus) / spec.gap


def effective_beta_expansion(spec: DemonSpec) -> float:
    """Second-order small-|F| expansion of the effective inverse temperature."""
    x = 0.5 * spec.gap * spec.beta_D
    return spec.beta_D + 4 * spec.coherence**2 / spec.gap * math.cosh(x) ** 2 / math.tanh(x)


def eigen_populations_expansion(spec: DemonSpec) -> tuple[float, float]:
    """Second-order small-|F| expansion of (p_plus, p_minus)."""
    p_g, p_e = thermal_populations(spec)
    shift = spec.coherence**2 / math.tanh(0.5 * spec.gap * spec.beta_D)
    return p_e - shift, p_g + shift


def operating_populations(spec: DemonSpec) -> tuple[float, float]:
    """Diagonal populations (p_g, p_e) with which the demon enters the cycle.

    The larger eigenvalue is assigned to the ground level, so a coherent
    demon behaves as a colder incoherent one.
    """
    if spec.coherence == 0:
        return thermal_populations(spec)
    p_plus, p_minus = eigen_populations_exact(spec)
    return p_minus, p_plus


def demon_state(spec: DemonSpec) -> DemonState:
    p_g, p_e = thermal_populations(spec)
    p_plus, p_minus = eigen_populations_exact(spec)
    return DemonState(p_g, p_e, effective_beta(spec), p_plus, p_minus)


def binary_entropy(p: float) -> float:
    """Shannon entropy (nats) of the distribution (p, 1 - p)."""
    q = 1.0 - p
    return -(_xlogx(p) + _xlogx(q))


def _xlogx(x):
    return x * math.log(x) if x > 0 else 0.0
