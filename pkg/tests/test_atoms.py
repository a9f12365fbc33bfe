import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qrefrig import operators as ops
from qrefrig.atoms import (
    EXPONENT_GUARD,
    FourLevelParams,
    ThreeLevelParams,
    bath_rates,
    boltzmann_populations,
    build_atom_liouvillian,
    build_atom_liouvillian_3l,
    build_atom_liouvillian_4l,
    kelvin_to_mhz,
    planck_occupation,
    populations,
    temperature_for_occupation,
)
from qrefrig.rates import dephasing_rates_4l


def test_planck_limits():
    assert planck_occupation(1.0, 1.0 / (2 * EXPONENT_GUARD)) == 0.0
    assert planck_occupation(math.log(2.0), 1.0) == pytest.approx(1.0, rel=1e-15)
    # small gap/T keeps full precision: n ~ T/gap - 1/2
    assert planck_occupation(1e-9, 1.0) == pytest.approx(1e9 - 0.5, rel=1e-12)


def test_planck_room_temperature_gigahertz():
    n = planck_occupation(1000.0, kelvin_to_mhz(300.0))
    assert n == pytest.approx(6.25e3, rel=2e-3)


@pytest.mark.parametrize("gap,temp", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0)])
def test_planck_rejects_nonpositive(gap, temp):
    with pytest.raises(ValueError):
        planck_occupation(gap, temp)


@given(st.floats(1e-3, 1e3), st.floats(1e-6, 1e6))
def test_temperature_inverts_planck(gap, nbar):
    T = temperature_for_occupation(gap, nbar)
    assert planck_occupation(gap, T) == pytest.approx(nbar, rel=1e-9)


@given(st.floats(1e-3, 1e4), st.floats(1e-2, 1e4), st.floats(0.01, 10))
def test_bath_boltzmann_ratio(gap, temp, gamma):
    b = bath_rates(gamma, gap, temp)
    x = gap / temp
    if x < EXPONENT_GUARD:
        assert b.gamma_plus / b.gamma_minus == pytest.approx(math.exp(-x), rel=1e-12)
    assert b.gamma_minus - b.gamma_plus == pytest.approx(gamma, rel=1e-9)


def test_ladder_and_rate_validation():
    with pytest.raises(ValueError, match="ladder"):
        ThreeLevelParams(omega_r=1.0, omega_ea=3.0, omega_eb=5.0, gamma_ea=1, gamma_eb=1, temperature=1)
    with pytest.raises(ValueError, match="ladder"):
        FourLevelParams(
            omega_r=1, omega_em=2, omega_ma=1, omega_eb=3, gamma_em=1, gamma_ma=1, gamma_eb=1, temperature=1
        )
    with pytest.raises(ValueError):
        ThreeLevelParams(omega_r=1.0, omega_ea=3.0, gamma_ea=-1, gamma_eb=1, temperature=1)
    with pytest.raises(ValueError):
        ThreeLevelParams(omega_r=1.0, omega_ea=3.0, gamma_ea=1, gamma_eb=1, temperature=0)


def test_with_ups_ab_sets_total_dephasing(fig2a, fig2b):
    from qrefrig.rates import dephasing_rates_3l

    assert dephasing_rates_3l(fig2a).ups_ab == pytest.approx(0.5, rel=1e-15)
    assert dephasing_rates_4l(fig2b).ups_ab_p == pytest.approx(0.5, rel=1e-15)
    with pytest.raises(ValueError):
        ThreeLevelParams.with_ups_ab(1e-3, omega_r=1.0, omega_ea=0.5, gamma_ea=1, gamma_eb=1, temperature=5)


def test_builder_type_checks(mild3, mild4):
    with pytest.raises(TypeError):
        build_atom_liouvillian_3l(mild4)
    with pytest.raises(TypeError):
        build_atom_liouvillian_4l(mild3)


@pytest.mark.parametrize("which", ["mild3", "mild4"])
def test_undriven_steady_state_is_boltzmann(which, request):
    p = request.getfixturevalue(which)
    p = type(p)(**{**p.__dict__, "gp_a": 0.0, "gp_b": 0.0, "gp_e": 0.0, **({"gp_m": 0.0} if "gp_m" in p.__dict__ else {})})
    rho = ops.steady_state(build_atom_liouvillian(p))
    assert np.allclose(np.diag(rho).real, boltzmann_populations(p), rtol=1e-10, atol=0)
    pops = populations(rho, p)
    assert pops["a"] / pops["b"] == pytest.approx(math.exp(-p.omega_r / p.temperature), rel=1e-9)


@pytest.mark.parametrize("which", ["mild3", "mild4"])
def test_liouvillian_trace_preserving(which, request, rng):
    from conftest import random_density

    p = request.getfixturevalue(which).with_drive(1.7)
    L = build_atom_liouvillian(p)
    dim = len(p.levels)
    for _ in range(20):
        out = ops.apply(L, random_density(rng, dim))
        assert abs(np.trace(out)) < 1e-12


def test_no_direct_ab_channel(mild3):
    L = build_atom_liouvillian(mild3)
    rho = ops.projector(1, 3)  # all population in |a>
    drho = ops.apply(L, rho)
    assert drho[0, 0] == 0  # nothing flows a -> b directly


def test_four_level_coherence_decay_rate(mild4):
    p = mild4.with_drive(0.0)
    L = build_atom_liouvillian(p)
    # coherence |e><m| decays at ups_em'
    rho0 = ops.transition(3, 2, 4)
    t1, t2 = 0.3, 0.9
    c1 = ops.unvec(ops.propagator(L, t1) @ ops.vec(rho0), 4)[3, 2]
    c2 = ops.unvec(ops.propagator(L, t2) @ ops.vec(rho0), 4)[3, 2]
    rate = math.log(abs(c1) / abs(c2)) / (t2 - t1)
    assert rate == pytest.approx(dephasing_rates_4l(p).ups_em_p, rel=1e-9)


def test_strong_drive_limits(mild3, mild4):
    gmax = max(mild3.gamma_ea, mild3.gamma_eb)
    rho = ops.steady_state(build_atom_liouvillian(mild3.with_drive(100 * gmax * 10)))
    pops = populations(rho, mild3)
    assert pops["a"] / pops["b"] == pytest.approx(math.exp(-mild3.omega_eb / mild3.temperature), rel=0.05)

    rho = ops.steady_state(build_atom_liouvillian(mild4.with_drive(1000.0)))
    pops = populations(rho, mild4)
    assert pops["e"] / pops["m"] == pytest.approx(1.0, rel=0.05)
