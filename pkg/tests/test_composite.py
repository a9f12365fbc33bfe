import numpy as np
import pytest

from qrefrig import operators as ops
from qrefrig.atoms import ThreeLevelParams, build_atom_liouvillian
from qrefrig.composite import (
    CompositeSpec,
    FockTruncationError,
    atom_populations,
    build_composite_liouvillian,
    composite_steady_photon,
    composite_steady_state,
    desk_spec,
    eliminated_photon_number,
    g_ladder_scan,
)
from qrefrig.rates import steady_populations_3l
from qrefrig.resonator import thermal_distribution

from conftest import random_density


def test_uncoupled_state_factorizes():
    spec = desk_spec(g=0.0, fock_dim=20)
    rho = composite_steady_state(spec)
    rho_atom = ops.steady_state(build_atom_liouvillian(spec.atom))
    thermal = np.diag(thermal_distribution(spec.nbar_r, spec.fock_dim - 1))
    np.testing.assert_allclose(rho, np.kron(rho_atom, thermal), atol=1e-12)


def test_uncoupled_photon_number_is_thermal():
    spec = desk_spec(g=0.0, fock_dim=40)
    assert composite_steady_photon(spec) == pytest.approx(spec.nbar_r, rel=1e-9)


def test_vacuum_rabi_oscillation():
    atom = ThreeLevelParams(omega_r=1.0, omega_ea=4.0, gamma_ea=0.0, gamma_eb=0.0, temperature=1.0)
    g = 0.3
    spec = CompositeSpec(atom, kappa=0.0, nbar_r=0.0, g=g, fock_dim=3)
    L = build_composite_liouvillian(spec)
    a_idx = atom.levels.index("a")
    b_idx = atom.levels.index("b")
    start = a_idx * spec.fock_dim
    partner = b_idx * spec.fock_dim + 1
    rho0 = np.zeros((spec.dim, spec.dim), complex)
    rho0[start, start] = 1.0
    for t in (0.4, 1.7, 5.2):
        rho = ops.evolve(L, rho0, t)
        # population swings as cos^2(g t) = (1 + cos(2 g t)) / 2
        assert rho[start, start].real == pytest.approx(np.cos(g * t) ** 2, abs=1e-10)
        assert rho[partner, partner].real == pytest.approx(np.sin(g * t) ** 2, abs=1e-10)


def test_trace_and_hermiticity_preserved(rng):
    spec = desk_spec(fock_dim=5)
    L = build_composite_liouvillian(spec)
    for _ in range(3):
        rho0 = random_density(rng, spec.dim)
        drho = ops.apply(L, rho0)
        assert abs(np.trace(drho)) < 1e-10
        rho = ops.evolve(L, rho0, 2.0)
        assert abs(np.trace(rho) - 1) < 1e-10
        assert np.max(np.abs(rho - rho.conj().T)) < 1e-10


def test_desk_point_within_five_percent():
    spec = desk_spec()
    comp = composite_steady_photon(spec)
    elim = eliminated_photon_number(spec)
    assert abs(comp - elim) / elim < 0.05


def test_discrepancy_shrinks_quadratically():
    points = g_ladder_scan(desk_spec())
    errs = [p.rel_error for p in points]
    assert errs[1] <= 0.25 * errs[0]
    assert errs[2] <= 0.25 * errs[1]


def test_stronger_coupling_breaks_elimination():
    weak = g_ladder_scan(desk_spec(), factors=(1.0,))[0]
    strong = g_ladder_scan(desk_spec(fock_dim=30), factors=(10.0,))[0]
    assert strong.rel_error > 10 * weak.rel_error


def test_atom_populations_converge():
    spec = desk_spec(g=2.5e-3)
    rho = composite_steady_state(spec)
    pops, _ = steady_populations_3l(spec.atom)
    expected = np.array([pops[k] for k in spec.atom.levels])
    np.testing.assert_allclose(atom_populations(rho, spec), expected, rtol=1e-2)


def test_short_fock_space_reported():
    atom = desk_spec().atom
    spec = CompositeSpec(atom, kappa=1e-3, nbar_r=2.0, g=0.0, fock_dim=6)
    with pytest.raises(FockTruncationError) as info:
        composite_steady_photon(spec)
    assert info.value.suggested > 6


def test_spec_validation():
    atom = desk_spec().atom
    with pytest.raises(ValueError):
        CompositeSpec(atom, 1e-3, 0.5, 0.01, fock_dim=1)
    with pytest.raises(ValueError):
        CompositeSpec(atom, 1e-3, 0.5, 0.01, fock_dim=4, omega_r=2.0)
    with pytest.raises(ops.DimensionCapError):
        CompositeSpec(atom, 1e-3, 0.5, 0.01, fock_dim=1000)
