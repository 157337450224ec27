"""Excitation of a two-level atom by Fock and coherent pulses in two spatial modes.

Time is measured in units of 1/gamma0 and rates in units of gamma0 throughout.
"""

from .coherent import CoherentPair
from .engine import IntegrationPlan, Trajectory
from .envelopes import PulseEnvelope
from .errors import CapacityError, ConfigError, NumericalError, TwoModeError, UnsupportedConfigurationError
from .hierarchy import FockSuperposition, even_mode_expand
from .oracles import CollisionModelConfig, analytic_single_photon_pmax, collision_model_pt
from .params import SystemParams
from .problems import EvenFock, Problem, RunOptions
from .sweep import SweepResult, optimize_bandwidth, scan_bandwidth, scan_phase, scan_photon_number

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CoherentPair",
    "CollisionModelConfig",
    "ConfigError",
    "EvenFock",
    "FockSuperposition",
    "IntegrationPlan",
    "NumericalError",
    "Problem",
    "PulseEnvelope",
    "RunOptions",
    "SweepResult",
    "SystemParams",
    "Trajectory",
    "TwoModeError",
    "UnsupportedConfigurationError",
    "analytic_single_photon_pmax",
    "collision_model_pt",
    "even_mode_expand",
    "optimize_bandwidth",
    "scan_bandwidth",
    "scan_phase",
    "scan_photon_number",
]
