"""Closed-form steady states, heating/cooling rates and cooling limits.

Everything here is algebraic in the atom parameters; the numerical
counterparts live in :mod:`qrefrig.regression` (reduced regression
equations) and in the full-Liouvillian oracle of the same module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import constants

from .atoms import FourLevelParams, ThreeLevelParams, boltzmann_factor
from .resonator import ResonatorParams, steady_photon_number


@dataclass(frozen=True)
class DephasingRates:
    """Total coherence decay rates. Three-level fields are ``None`` for the
    four-level atom and vice versa."""

    ups_ab: float | None = None
    ups_ea: float | None = None
    ups_eb: float | None = None
    ups_ab_p: float | None = None
    ups_em_p: float | None = None

    @property
    def microwave(self):
        """Decay rate of the a-b coherence for whichever model is populated."""
        return self.ups_ab if self.ups_ab is not None else self.ups_ab_p


@dataclass(frozen=True)
class RateReport:
    a_plus: float
    a_minus: float
    pops: dict
    coherence: complex
    dephasing: DephasingRates
    n_ss_predicted: float | None = None
    extra: dict = field(default_factory=dict)


def dephasing_rates_3l(p: ThreeLevelParams) -> DephasingRates:
    b = p.baths()
    ea, eb = b["ea"], b["eb"]
    return DephasingRates(
        ups_ab=0.5 * (ea.gamma_plus + eb.gamma_plus + p.gp_a + p.gp_b),
        ups_ea=0.5 * (ea.gamma_plus + ea.gamma_minus + eb.gamma_minus + p.gp_e + p.gp_a),
        ups_eb=0.5 * (ea.gamma_minus + eb.gamma_minus + eb.gamma_plus + p.gp_e + p.gp_b),
    )


def dephasing_rates_4l(p: FourLevelParams) -> DephasingRates:
    b = p.baths()
    em, ma, eb = b["em"], b["ma"], b["eb"]
    return DephasingRates(
        ups_ab_p=0.5 * (eb.gamma_plus + ma.gamma_plus + p.gp_a + p.gp_b),
        ups_em_p=0.5 * (em.gamma_plus + em.gamma_minus + eb.gamma_minus + ma.gamma_minus + p.gp_e + p.gp_m),
    )


def dephasing_rates(p):
    if isinstance(p, ThreeLevelParams):
        return dephasing_rates_3l(p)
    return dephasing_rates_4l(p)


def _pump(drive, ups):
    if drive == 0:
        return 0.0
    if ups <= 0:
        raise ValueError("the pumped coherence has zero decay rate; steady state undefined")
    return drive**2 / (2.0 * ups)


def _normalize(weights):
    total = sum(weights.values())
    return {k: v / total for k, v in weights.items()}


def steady_populations_3l(p: ThreeLevelParams):
    """Steady populations (``b, a, e``) and the coherence ``<tau-_ea>``.

    Populations are referenced to ``|b>`` so the tiny optical Boltzmann factors
    appear only as multipliers and nothing overflows.
    """
    ups = dephasing_rates_3l(p)
    ea = p.baths()["ea"]
    pump = _pump(p.drive, ups.ups_ea)
    r_eb = boltzmann_factor(p.omega_eb, p.temperature)
    if pump == 0:
        r_ab = boltzmann_factor(p.omega_r, p.temperature)
    else:
        r_ab = r_eb * (ea.gamma_minus + pump) / (ea.gamma_plus + pump)
    pops = _normalize({"b": 1.0, "a": r_ab, "e": r_eb})
    coherence = 1j * p.drive / (2.0 * ups.ups_ea) * (pops["e"] - pops["a"]) if p.drive else 0j
    return pops, coherence


def steady_populations_4l(p: FourLevelParams):
    """Steady populations (``b, a, m, e``) and the coherence ``<tau-_em>``.

    ``e/b`` and ``a/m`` sit at their Boltzmann ratios; only ``m/e`` feels the
    drive.
    """
    ups = dephasing_rates_4l(p)
    em = p.baths()["em"]
    pump = _pump(p.drive, ups.ups_em_p)
    r_eb = boltzmann_factor(p.omega_eb, p.temperature)
    if pump == 0:
        r_mb = boltzmann_factor(p.omega_r + p.omega_ma, p.temperature)
        r_ab = boltzmann_factor(p.omega_r, p.temperature)
    else:
        m_over_e = (em.gamma_minus + pump) / (em.gamma_plus + pump)
        r_mb = r_eb * m_over_e
        r_ab = boltzmann_factor(p.omega_eb - p.omega_ma, p.temperature) * m_over_e
    pops = _normalize({"b": 1.0, "a": r_ab, "m": r_mb, "e": r_eb})
    coherence = 1j * p.drive / (2.0 * ups.ups_em_p) * (pops["e"] - pops["m"]) if p.drive else 0j
    return pops, coherence


def _prediction(a_plus, a_minus, kappa, nbar_r):
    if kappa is None or nbar_r is None:
        return None
    return steady_photon_number(ResonatorParams(kappa, nbar_r, a_plus, a_minus))


def rates_3l(p: ThreeLevelParams, g, kappa=None, nbar_r=None) -> RateReport:
    """Heating ``A+`` and cooling ``A-`` rates of the three-level refrigerator.

    The drive enters twice: through the populations, and through the
    resonance-breaking factor ``2 g^2 / (ups_ab + drive^2 / 4 ups_eb)``. The
    coherence term of ``A+`` is kept complex until the real part is taken.
    If ``kappa`` and ``nbar_r`` are given the steady photon number is
    predicted as well.
    """
    if g <= 0:
        raise ValueError("coupling g must be positive")
    ups = dephasing_rates_3l(p)
    pops, tau_minus = steady_populations_3l(p)
    prefactor = 2.0 * g**2 / (ups.ups_ab + p.drive**2 / (4.0 * ups.ups_eb))
    tau_plus = tau_minus.conjugate()
    a_plus = prefactor * (pops["a"] + 1j * p.drive / (2.0 * ups.ups_eb) * tau_plus).real
    a_minus = prefactor * pops["b"]
    return RateReport(a_plus, a_minus, pops, tau_minus, ups, _prediction(a_plus, a_minus, kappa, nbar_r))


def rates_4l(p: FourLevelParams, g, kappa=None, nbar_r=None) -> RateReport:
    """Heating/cooling rates of the four-level refrigerator.

    The a-b coherence is not coupled to the drive, so both rates are the
    bare factor ``2 g^2 / ups_ab'`` times a population.
    """
    if g <= 0:
        raise ValueError("coupling g must be positive")
    ups = dephasing_rates_4l(p)
    pops, tau_minus = steady_populations_4l(p)
    prefactor = 2.0 * g**2 / ups.ups_ab_p
    a_plus = prefactor * pops["a"]
    a_minus = prefactor * pops["b"]
    return RateReport(a_plus, a_minus, pops, tau_minus, ups, _prediction(a_plus, a_minus, kappa, nbar_r))


def rates(p, g, kappa=None, nbar_r=None) -> RateReport:
    if isinstance(p, ThreeLevelParams):
        return rates_3l(p, g, kappa, nbar_r)
    return rates_4l(p, g, kappa, nbar_r)


# ---------------------------------------------------------------------------
# expanded forms with explicit Boltzmann exponentials
# ---------------------------------------------------------------------------


def rates_3l_expanded(p: ThreeLevelParams, g):
    """``(A+, A-)`` from the fully expanded three-level expressions.

    Numerator and denominator are multiplied through by ``exp(-omega_eb/T)``
    so that optical gaps far above the temperature stay finite.
    """
    ups = dephasing_rates_3l(p)
    ea = p.baths()["ea"]
    pump = _pump(p.drive, ups.ups_ea)
    prefactor = 2.0 * g**2 / (ups.ups_ab + p.drive**2 / (4.0 * ups.ups_eb))
    s_eb = boltzmann_factor(p.omega_eb, p.temperature)
    # e^{ea/T} Gamma+_ea = Gamma-_ea keeps every term finite after scaling
    den = (s_eb + 1.0) * ea.gamma_plus + s_eb * ea.gamma_minus + (2.0 * s_eb + 1.0) * pump
    heat_num = s_eb * (ea.gamma_minus + (1.0 - p.gamma_ea / (2.0 * ups.ups_eb)) * pump)
    cool_num = ea.gamma_plus + pump
    return prefactor * heat_num / den, prefactor * cool_num / den


def rates_4l_expanded(p: FourLevelParams, g):
    """``(A+', A-')`` from the expanded four-level expressions, scaled by ``exp(-omega_eb/T)``."""
    ups = dephasing_rates_4l(p)
    em = p.baths()["em"]
    pump = _pump(p.drive, ups.ups_em_p)
    prefactor = 2.0 * g**2 / ups.ups_ab_p
    s_eb = boltzmann_factor(p.omega_eb, p.temperature)
    s_ma_eb = boltzmann_factor(p.omega_eb - p.omega_ma, p.temperature)
    den = (
        (s_eb + s_ma_eb) * em.gamma_minus
        + (s_eb + 1.0) * em.gamma_plus
        + (2.0 * s_eb + 1.0 + s_ma_eb) * pump
    )
    heat_num = s_ma_eb * (em.gamma_minus + pump)
    cool_num = em.gamma_plus + pump
    return prefactor * heat_num / den, prefactor * cool_num / den


# ---------------------------------------------------------------------------
# limits and scalings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoolingLimit:
    exact: float
    approx: float


def cooling_limit(g, kappa, ups, nbar):
    """Photon-number floor with full ground-state pumping and no level shift.

    ``exact = kappa nbar / (2 g^2/ups + kappa)`` and the strong-coupling
    approximation ``approx = nbar / (2 g^2 / (kappa ups))``.
    """
    if g <= 0 or ups <= 0 or nbar < 0 or kappa < 0:
        raise ValueError("cooling_limit needs g, ups > 0 and kappa, nbar >= 0")
    cooling = 2.0 * g**2 / ups
    exact = kappa * nbar / (cooling + kappa)
    approx = nbar * kappa / cooling
    return CoolingLimit(exact, approx)


def working_region_bound(ups_eb, ups_ab):
    """Drive at which the level shift halves the three-level rates: ``2 sqrt(ups_eb ups_ab)``."""
    if ups_eb <= 0 or ups_ab <= 0:
        raise ValueError("dephasing rates must be positive")
    return 2.0 * math.sqrt(ups_eb * ups_ab)


def collective_coupling(g, n_atoms):
    """Ensemble coupling ``sqrt(N) g``."""
    if n_atoms < 1 or int(n_atoms) != n_atoms:
        raise ValueError(f"n_atoms must be a positive integer, got {n_atoms}")
    return g * math.sqrt(n_atoms)


def effective_temperature(omega, n):
    """Kelvin temperature whose Planck occupation at cyclic frequency ``omega`` (MHz) is ``n``."""
    if omega <= 0:
        raise ValueError("frequency must be positive")
    if n <= 0:
        raise ValueError(f"occupation must be positive, got {n}")
    return constants.h * omega * 1e6 / (constants.k * math.log1p(1.0 / n))
