import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qrefrig import operators as ops
from qrefrig.atoms import ThreeLevelParams, build_atom_liouvillian, populations
from qrefrig.rates import (
    collective_coupling,
    cooling_limit,
    dephasing_rates_3l,
    dephasing_rates_4l,
    effective_temperature,
    rates,
    rates_3l,
    rates_3l_expanded,
    rates_4l,
    rates_4l_expanded,
    steady_populations_3l,
    steady_populations_4l,
    working_region_bound,
)

DRIVES = np.logspace(-3, 5, 60)


def test_dephasing_rates_from_baths(mild3, mild4):
    b = mild3.baths()
    ups = dephasing_rates_3l(mild3)
    assert ups.ups_ab == 0.5 * (b["ea"].gamma_plus + b["eb"].gamma_plus + mild3.gp_a + mild3.gp_b)
    assert ups.ups_ea == 0.5 * (
        b["ea"].gamma_plus + b["ea"].gamma_minus + b["eb"].gamma_minus + mild3.gp_e + mild3.gp_a
    )
    assert ups.ups_eb == 0.5 * (
        b["ea"].gamma_minus + b["eb"].gamma_minus + b["eb"].gamma_plus + mild3.gp_e + mild3.gp_b
    )
    b = mild4.baths()
    ups = dephasing_rates_4l(mild4)
    assert ups.ups_ab_p == 0.5 * (b["eb"].gamma_plus + b["ma"].gamma_plus + mild4.gp_a + mild4.gp_b)
    assert ups.ups_em_p == 0.5 * (
        b["em"].gamma_plus + b["em"].gamma_minus + b["eb"].gamma_minus + b["ma"].gamma_minus
        + mild4.gp_e + mild4.gp_m
    )


@pytest.mark.parametrize("which", ["mild3", "mild4"])
def test_closed_populations_match_liouvillian(which, request):
    p0 = request.getfixturevalue(which)
    steady = steady_populations_3l if isinstance(p0, ThreeLevelParams) else steady_populations_4l
    worst = 0.0
    for d in DRIVES:
        p = p0.with_drive(d)
        pops, coh = steady(p)
        rho = ops.steady_state(build_atom_liouvillian(p))
        num = populations(rho, p)
        worst = max(worst, max(abs(num[k] - pops[k]) / pops[k] for k in pops))
        hi = p.levels.index("e")
        lo = p.levels.index("a" if isinstance(p, ThreeLevelParams) else "m")
        assert rho[hi, lo] == pytest.approx(coh, rel=1e-8, abs=1e-13 * max(1.0, d))
    assert worst < 1e-9


def test_coherence_vanishes_without_drive(mild3):
    assert steady_populations_3l(mild3)[1] == 0


@pytest.mark.parametrize("model", [rates_3l, rates_4l])
def test_undriven_rates_obey_boltzmann(model, mild3, mild4):
    p = mild3 if model is rates_3l else mild4
    r = model(p, 0.1)
    assert r.a_minus / r.a_plus == pytest.approx(math.exp(p.omega_r / p.temperature), rel=1e-12)


def test_three_level_rates_vanish_at_strong_drive(mild3):
    weak = rates_3l(mild3.with_drive(1.0), 0.1)
    strong = rates_3l(mild3.with_drive(1e6), 0.1)
    assert strong.a_plus < 1e-9 * weak.a_plus
    assert strong.a_minus < 1e-9 * weak.a_minus


def test_four_level_rates_strong_drive(fig2b):
    r = rates_4l(fig2b.with_drive(1e6), 1.5)
    assert r.a_plus < 1e-18 * r.a_minus
    assert r.a_minus == pytest.approx(2 * 1.5**2 / 0.5, rel=1e-9)


@pytest.mark.parametrize("which", ["mild3", "mild4", "fig2a", "fig2b"])
def test_expanded_forms_agree(which, request):
    p0 = request.getfixturevalue(which)
    expanded = rates_3l_expanded if isinstance(p0, ThreeLevelParams) else rates_4l_expanded
    for d in DRIVES:
        p = p0.with_drive(d)
        r = rates(p, 0.3)
        ap, am = expanded(p, 0.3)
        assert ap == pytest.approx(r.a_plus, rel=1e-10)
        assert am == pytest.approx(r.a_minus, rel=1e-10)


def test_rate_report_invariants(fig2a):
    for d in DRIVES:
        r = rates(fig2a.with_drive(d), 1.5, kappa=0.1, nbar_r=6200)
        assert r.a_plus >= 0 and r.a_minus >= 0
        assert sum(r.pops.values()) == pytest.approx(1.0, abs=1e-15)
        assert r.n_ss_predicted > 0
    with pytest.raises(ValueError):
        rates(fig2a, 0.0)


def test_four_level_monotone_rates(fig2b, mild4):
    for p in (fig2b, mild4):
        reports = [rates_4l(p.with_drive(d), 1.0) for d in DRIVES]
        a_minus = np.array([r.a_minus for r in reports])
        a_plus = np.array([r.a_plus for r in reports])
        assert np.all(np.diff(a_minus) >= -1e-15 * a_minus[1:])
        assert np.all(np.diff(a_plus) <= 1e-15 * a_plus[1:])


def test_cooling_limit_values():
    lim = cooling_limit(1.5, 0.1, 0.5, 6200)
    assert lim.approx == pytest.approx(6200 / 90, rel=1e-14)
    assert lim.exact == pytest.approx(6200 / 91, rel=1e-14)
    assert round(lim.approx, 1) == 68.9
    assert round(lim.exact, 1) == 68.1
    assert cooling_limit(1.5, 0.0, 0.5, 6200).exact == 0.0
    with pytest.raises(ValueError):
        cooling_limit(0.0, 0.1, 0.5, 6200)


def test_working_region_bound():
    assert working_region_bound(1.0, 1.0) == 2.0
    assert working_region_bound(4.0, 1.0) == 4.0
    with pytest.raises(ValueError):
        working_region_bound(0.0, 1.0)


def test_collective_coupling(mild3):
    assert collective_coupling(0.2, 1) == 0.2
    assert collective_coupling(0.2, 4) == pytest.approx(0.4)
    with pytest.raises(ValueError):
        collective_coupling(0.2, 0)


@given(st.integers(1, 10**6), st.floats(1e-3, 1e3))
def test_collective_rates_scale_linearly(n_atoms, drive):
    p = ThreeLevelParams(omega_r=1.0, omega_ea=3.0, gamma_ea=1.0, gamma_eb=0.7, temperature=2.0, gp_a=0.1, drive=drive)
    one = rates_3l(p, 0.01)
    many = rates_3l(p, collective_coupling(0.01, n_atoms))
    assert many.a_plus == pytest.approx(n_atoms * one.a_plus, rel=1e-12)
    assert many.a_minus == pytest.approx(n_atoms * one.a_minus, rel=1e-12)


def test_effective_temperature():
    assert effective_temperature(1000.0, 6200 / 90) == pytest.approx(3.33, abs=0.01)
    from qrefrig.atoms import kelvin_to_mhz, planck_occupation

    n = planck_occupation(1000.0, kelvin_to_mhz(4.2))
    assert effective_temperature(1000.0, n) == pytest.approx(4.2, rel=1e-12)
    assert effective_temperature(1000.0, 1e-12) < 0.002
    with pytest.raises(ValueError):
        effective_temperature(1000.0, 0.0)


def test_three_level_has_interior_minimum(fig2a):
    from qrefrig.harness import default_grid

    n = np.array([rates(fig2a.with_drive(d), 1.5, 0.1, 6200).n_ss_predicted for d in default_grid(fig2a)])
    k = int(np.argmin(n))
    assert 0 < k < len(n) - 1
    assert n[0] > 2 * n[k] and n[-1] > 2 * n[k]


@given(st.floats(0.01, 100.0), st.floats(1e-2, 1e2))
def test_degree_zero_homogeneity(scale, drive):
    def n_ss(c):
        p = ThreeLevelParams(
            omega_r=1.0, omega_ea=3.0, gamma_ea=1.0 * c, gamma_eb=0.7 * c, temperature=2.0,
            gp_a=0.1 * c, gp_b=0.2 * c, gp_e=0.05 * c, drive=drive * c,
        )
        return rates(p, 0.05 * c, kappa=0.01 * c, nbar_r=1.2).n_ss_predicted

    assert n_ss(scale) == pytest.approx(n_ss(1.0), rel=1e-11)


def test_optical_dephasing_insensitivity(fig2a):
    """Extra optical dephasing barely moves the floor of the three-level curve."""
    base = rates(fig2a.with_drive(1e-3), 1.5, 0.1, 6200).n_ss_predicted
    shifted = dataclasses.replace(fig2a, gp_e=100.0, drive=1e-3)
    assert rates(shifted, 1.5, 0.1, 6200).n_ss_predicted == pytest.approx(base, rel=1e-3)
