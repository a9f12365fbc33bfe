"""Drive sweeps, minimum search and device-level estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import constants
from scipy.optimize import minimize_scalar

from .atoms import ThreeLevelParams, kelvin_to_mhz, planck_occupation
from .rates import (
    cooling_limit,
    dephasing_rates_3l,
    dephasing_rates_4l,
    effective_temperature,
    rates,
    steady_populations_3l,
    steady_populations_4l,
    working_region_bound,
)
from .regression import oracle_rates
from .resonator import ResonatorParams, steady_photon_number

RATE_SOURCES = ("closed", "oracle")
DEFAULT_POINTS = 200
#: mpmath digits used by the oracle source; optical Boltzmann factors of
#: 1e-30 and below make double precision useless there
ORACLE_DPS = 40


@dataclass(frozen=True)
class SweepSpec:
    params: object
    kappa: float
    nbar_r: float
    g: float
    drive_grid: tuple = ()
    rate_source: str = "closed"

    def __post_init__(self):
        if self.rate_source not in RATE_SOURCES:
            raise ValueError(f"rate_source must be one of {RATE_SOURCES}, got {self.rate_source!r}")
        grid = tuple(float(x) for x in (self.drive_grid or default_grid(self.params)))
        if len(grid) < 2 or np.any(np.diff(grid) <= 0):
            raise ValueError("drive_grid needs at least two strictly increasing values")
        object.__setattr__(self, "drive_grid", grid)

    @property
    def model(self):
        return "3L" if isinstance(self.params, ThreeLevelParams) else "4L"


@dataclass(frozen=True)
class SweepRow:
    drive: float
    a_plus: float = math.nan
    a_minus: float = math.nan
    n_ss: float = math.nan
    populations: dict = field(default_factory=dict)
    effective_temperature_kelvin: float = math.nan
    error: str | None = None

    @property
    def ok(self):
        return self.error is None


def pumping_threshold(params):
    """Drive at which pumping matches thermal excitation of the driven transition.

    Below roughly this value the atom stays thermal and the resonator is not
    cooled. Returns 0 if the optical excitation rate underflows.
    """
    baths = params.baths()
    if isinstance(params, ThreeLevelParams):
        ups, gp = dephasing_rates_3l(params).ups_ea, baths["ea"].gamma_plus
    else:
        ups, gp = dephasing_rates_4l(params).ups_em_p, baths["em"].gamma_plus
    return math.sqrt(2.0 * ups * gp)


def default_grid(params, points=DEFAULT_POINTS):
    """Log-spaced drives from below the pumping threshold to past the working region.

    Nominally ``[1e-3, 1e4]``; the ends move outward when the threshold or
    the three-level working-region bound would otherwise fall near an edge.
    """
    lo, hi = 1e-3, 1e4
    threshold = pumping_threshold(params)
    if threshold > 0:
        lo = min(lo, 1e-3 * threshold)
    if isinstance(params, ThreeLevelParams):
        ups = dephasing_rates_3l(params)
        hi = max(hi, 100.0 * working_region_bound(ups.ups_eb, ups.ups_ab))
    return tuple(np.logspace(math.log10(lo), math.log10(hi), points))


def _rates_at(spec, drive):
    p = spec.params.with_drive(drive)
    if spec.rate_source == "oracle":
        a_plus, a_minus = oracle_rates(p, spec.g, dps=ORACLE_DPS)
        pops = (steady_populations_3l if spec.model == "3L" else steady_populations_4l)(p)[0]
        return a_plus, a_minus, pops
    r = rates(p, spec.g)
    return r.a_plus, r.a_minus, r.pops


def evaluate_point(spec: SweepSpec, drive):
    """One sweep row; failures are recorded in the row instead of raised."""
    try:
        a_plus, a_minus, pops = _rates_at(spec, drive)
        n = steady_photon_number(ResonatorParams(spec.kappa, spec.nbar_r, a_plus, a_minus))
        t_eff = effective_temperature(spec.params.omega_r, n) if n > 0 else 0.0
        return SweepRow(drive, a_plus, a_minus, n, pops, t_eff)
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        return SweepRow(drive, error=f"{type(exc).__name__}: {exc}")


def sweep_drive(spec: SweepSpec):
    return [evaluate_point(spec, d) for d in spec.drive_grid]


def photon_number_at(spec: SweepSpec, drive):
    """Closed-form photon number at a single drive."""
    r = rates(spec.params.with_drive(drive), spec.g)
    return steady_photon_number(ResonatorParams(spec.kappa, spec.nbar_r, r.a_plus, r.a_minus))


@dataclass(frozen=True)
class Minimum:
    drive: float
    n_ss: float
    at_boundary: bool
    index: int


def find_minimum(rows, objective=None, flat_rtol=1e-9):
    """Smallest photon number along a sweep.

    Values within round-off of the minimum count as ties and the smallest
    such drive wins. The result is flagged ``at_boundary`` when it sits on
    the first or last row, or when the curve stays flat from there to the
    end of the grid (an asymptote rather than a dip). Interior minima are
    refined by golden-section search in ``log(drive)`` between the
    neighbouring rows when ``objective(drive)`` is supplied.
    """
    good = [r for r in rows if r.ok]
    if len(good) < 3:
        raise ValueError("find_minimum needs at least three successful rows")
    n = np.array([r.n_ss for r in good])
    n_min = n.min()
    k = int(np.flatnonzero(n <= n_min * (1.0 + 1e-12))[0])
    flat_tail = bool(np.all(n[k:] <= n_min * (1.0 + flat_rtol)))
    if k == 0 or k == len(good) - 1 or flat_tail:
        return Minimum(good[k].drive, float(n[k]), True, k)
    if objective is None:
        return Minimum(good[k].drive, float(n[k]), False, k)
    lo, mid, hi = (math.log(good[j].drive) for j in (k - 1, k, k + 1))
    try:
        res = minimize_scalar(
            lambda x: objective(math.exp(x)), bracket=(lo, mid, hi), method="golden", tol=1e-10
        )
    except ValueError:
        return Minimum(good[k].drive, float(n[k]), False, k)
    if res.fun <= n[k] and lo <= res.x <= hi:
        return Minimum(math.exp(res.x), float(res.fun), False, k)
    return Minimum(good[k].drive, float(n[k]), False, k)


def locate_upturn(rows, factor=2.0):
    """First drive past the minimum where the photon number reaches ``factor`` times the minimum.

    Linear interpolation in ``log(drive)`` between the bracketing rows;
    ``None`` if the curve never climbs that far.
    """
    good = [r for r in rows if r.ok]
    n = np.array([r.n_ss for r in good])
    k = int(np.argmin(n))
    target = factor * n[k]
    for j in range(k + 1, len(good)):
        if n[j] >= target:
            x0, x1 = math.log(good[j - 1].drive), math.log(good[j].drive)
            w = (target - n[j - 1]) / (n[j] - n[j - 1])
            return math.exp(x0 + w * (x1 - x0))
    return None


def doppler_broadening(nu0, temperature, mass):
    """Doppler FWHM ``(nu0/c) sqrt(8 ln2 k T / m)``.

    ``nu0`` in any frequency unit (the result shares it), ``temperature`` in
    kelvin, ``mass`` in atomic mass units.
    """
    if nu0 <= 0 or mass <= 0 or temperature < 0:
        raise ValueError("doppler_broadening needs nu0, mass > 0 and temperature >= 0")
    m = mass * constants.atomic_mass
    return nu0 / constants.c * math.sqrt(8.0 * math.log(2.0) * constants.k * temperature / m)


@dataclass(frozen=True)
class EstimateReport:
    name: str
    omega_r: float
    g: float
    kappa: float
    ups_ab: float
    nbar_r: float
    limit_exact: float
    limit_approx: float
    t_eff_exact_kelvin: float
    t_eff_approx_kelvin: float
    ideal_cavity: bool
    extra: dict = field(default_factory=dict)

    def items(self):
        out = {
            "name": self.name,
            "omega_r_MHz": self.omega_r,
            "g_MHz": self.g,
            "kappa_MHz": self.kappa,
            "ups_ab_MHz": self.ups_ab,
            "nbar_r": self.nbar_r,
            "limit_exact": self.limit_exact,
            "limit_approx": self.limit_approx,
            "t_eff_exact_K": self.t_eff_exact_kelvin,
            "t_eff_approx_K": self.t_eff_approx_kelvin,
            "ideal_cavity": self.ideal_cavity,
        }
        out.update(self.extra)
        return out


def estimate_report(omega_r, g, kappa, ups_ab, nbar_r=None, temperature_k=None, name="", ups_eb=None):
    """Cooling floor and effective temperatures for one device.

    Frequencies and rates in MHz. The resonator occupation is ``nbar_r`` or,
    failing that, the Planck occupation at ``temperature_k``. With
    ``kappa == 0`` the floor is zero and ``ideal_cavity`` is set.
    """
    if nbar_r is None:
        if temperature_k is None:
            raise ValueError("estimate_report needs nbar_r or temperature_k")
        nbar_r = planck_occupation(omega_r, kelvin_to_mhz(temperature_k))
    limit = cooling_limit(g, kappa, ups_ab, nbar_r)
    ideal = kappa == 0

    def t_eff(n):
        return effective_temperature(omega_r, n) if n > 0 else 0.0

    extra = {}
    if ups_eb is not None:
        extra["working_region_bound_MHz"] = working_region_bound(ups_eb, ups_ab)
    return EstimateReport(
        name, omega_r, g, kappa, ups_ab, nbar_r, limit.exact, limit.approx,
        t_eff(limit.exact), t_eff(limit.approx), ideal, extra,
    )
