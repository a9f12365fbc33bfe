import numpy as np
import pytest
from hypothesis import settings

from qrefrig.atoms import FourLevelParams, ThreeLevelParams, temperature_for_occupation

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

NBAR_FIG2 = 6200.0
T_FIG2 = temperature_for_occupation(1000.0, NBAR_FIG2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def fig2a():
    return ThreeLevelParams.with_ups_ab(
        0.5, omega_r=1000.0, omega_ea=4e8, gamma_ea=1000.0, gamma_eb=1000.0, temperature=T_FIG2
    )


@pytest.fixture
def fig2b():
    return FourLevelParams.with_ups_ab(
        0.5, omega_r=1000.0, omega_em=3e8, omega_ma=4e8, gamma_em=1000.0, gamma_ma=1000.0,
        gamma_eb=1000.0, temperature=T_FIG2,
    )


@pytest.fixture
def mild3():
    """Three-level atom whose populations are all comparable, so double precision suffices."""
    return ThreeLevelParams(
        omega_r=1.0, omega_ea=3.0, gamma_ea=1.0, gamma_eb=0.7, temperature=2.0, gp_a=0.1, gp_b=0.2, gp_e=0.05
    )


@pytest.fixture
def mild4():
    return FourLevelParams(
        omega_r=1.0, omega_em=2.0, omega_ma=1.5, gamma_em=1.0, gamma_ma=0.5, gamma_eb=0.7, temperature=2.0,
        gp_a=0.1, gp_b=0.1, gp_m=0.1, gp_e=0.1,
    )


def random_density(rng, dim):
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = x @ x.conj().T
    return rho / np.trace(rho)


def random_hermitian(rng, dim):
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return x + x.conj().T
