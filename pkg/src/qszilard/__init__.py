"""Quantum Szilard engine with a finite-temperature two-level demon."""

__version__ = "0.1.0"

from .analysis import (
    critical_insertion,
    half_split_closed_forms,
    limit_order_demo,
    max_work_insertion,
    pwc_beta_threshold,
)
from .cycle import CycleConfig, CycleResult, run_cycle
from .demon import DemonSpec, effective_beta, operating_populations, thermal_populations
from .spectrum import WellSpec, box_thermo, eigen_energy, joint_split_log_Z

__all__ = [
    "CycleConfig",
    "CycleResult",
    "DemonSpec",
    "WellSpec",
    "box_thermo",
    "critical_insertion",
    "effective_beta",
    "eigen_energy",
    "half_split_closed_forms",
    "joint_split_log_Z",
    "limit_order_demo",
    "max_work_insertion",
    "operating_populations",
    "pwc_beta_threshold",
    "run_cycle",
    "thermal_populations",
]
