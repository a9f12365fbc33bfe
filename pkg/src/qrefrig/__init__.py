"""Cooling a microwave resonator with driven three- and four-level atoms.

Frequencies, rates and temperatures (as ``k_B T / h``) are in cyclic MHz and
times in microseconds throughout.
"""

from .atoms import FourLevelParams, ThreeLevelParams, build_atom_liouvillian, planck_occupation
from .composite import CompositeSpec, build_composite_liouvillian, composite_steady_photon
from .config import RunConfig, format_config, load_config, load_preset, parse_config
from .harness import SweepSpec, doppler_broadening, estimate_report, find_minimum, sweep_drive
from .operators import liouvillian, steady_state
from .rates import cooling_limit, effective_temperature, rates, rates_3l, rates_4l
from .regression import numeric_rates_full, regression_integral
from .resonator import ResonatorParams, steady_photon_number, transient_mean_photon

__all__ = [
    "CompositeSpec", "FourLevelParams", "ResonatorParams", "RunConfig", "SweepSpec", "ThreeLevelParams",
    "build_atom_liouvillian", "build_composite_liouvillian", "composite_steady_photon", "cooling_limit",
    "doppler_broadening", "effective_temperature", "estimate_report", "find_minimum", "format_config",
    "liouvillian", "load_config", "load_preset", "numeric_rates_full", "parse_config", "planck_occupation",
    "rates", "rates_3l", "rates_4l", "regression_integral", "steady_photon_number", "steady_state",
    "sweep_drive", "transient_mean_photon",
]
