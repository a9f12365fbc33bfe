"""Three- and four-level refrigerator atoms and their thermal baths.

All frequencies, rates and temperatures share one unit: cyclic MHz
(``nu = omega / 2 pi``), with temperatures expressed as ``k_B T / h``. Only
ratios such as ``gap / temperature`` enter the physics.

Level order is ``b, a, e`` for the three-level atom and ``b, a, m, e`` for the
four-level atom, so ``|b>`` (index 0) is always the ground state and the
microwave transition is ``|a> <-> |b>``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

from . import operators as ops

LEVELS_3L = ("b", "a", "e")
LEVELS_4L = ("b", "a", "m", "e")

#: above this gap/temperature the Planck occupation is reported as zero
EXPONENT_GUARD = 700.0

_LADDER_RTOL = 1e-12


def planck_occupation(gap, temperature):
    """Bose-Einstein occupation ``1 / (exp(gap/T) - 1)``.

    ``expm1`` keeps full precision when ``gap << T``; beyond
    :data:`EXPONENT_GUARD` the occupation underflows and 0 is returned.
    """
    if gap <= 0:
        raise ValueError(f"gap must be positive, got {gap}")
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    x = gap / temperature
    if x > EXPONENT_GUARD:
        return 0.0
    return 1.0 / math.expm1(x)


def temperature_for_occupation(gap, nbar):
    """Temperature (same unit as ``gap``) at which ``planck_occupation`` is ``nbar``."""
    if nbar <= 0:
        raise ValueError(f"occupation must be positive, got {nbar}")
    return gap / math.log1p(1.0 / nbar)


def kelvin_to_mhz(kelvin):
    """``k_B T / h`` in MHz."""
    return constants.k * kelvin / constants.h / 1e6


def mhz_to_kelvin(mhz):
    return mhz * 1e6 * constants.h / constants.k


def boltzmann_factor(gap, temperature):
    """``exp(-gap/T)``, flushing to zero past the exponent guard."""
    x = gap / temperature
    return 0.0 if x > EXPONENT_GUARD else math.exp(-x)


@dataclass(frozen=True)
class BathRates:
    """Thermal excitation/decay rates of one optical transition."""

    gamma_plus: float
    gamma_minus: float
    nbar: float

    @property
    def ratio(self):
        return self.gamma_plus / self.gamma_minus if self.gamma_minus else 0.0


def bath_rates(gamma, gap, temperature):
    """``Gamma+ = gamma nbar`` and ``Gamma- = gamma (nbar + 1)``."""
    if gamma < 0:
        raise ValueError(f"decay rate must be non-negative, got {gamma}")
    n = planck_occupation(gap, temperature)
    return BathRates(gamma * n, gamma * (n + 1.0), n)


def _check_nonnegative(obj, names):
    for name in names:
        value = getattr(obj, name)
        if value < 0 or not np.isfinite(value):
            raise ValueError(f"{name} must be a non-negative finite number, got {value}")


def _check_ladder(name, value, expected):
    if not math.isclose(value, expected, rel_tol=_LADDER_RTOL, abs_tol=0.0):
        raise ValueError(
            f"level ladder does not close: {name} = {value!r} but the sum of the "
            f"lower gaps is {expected!r}"
        )


@dataclass(frozen=True)
class ThreeLevelParams:
    """Driven three-level refrigerator (drive on ``e <-> a``)."""

    omega_r: float
    omega_ea: float
    gamma_ea: float
    gamma_eb: float
    temperature: float
    drive: float = 0.0
    gp_a: float = 0.0
    gp_b: float = 0.0
    gp_e: float = 0.0
    omega_eb: float | None = None

    def __post_init__(self):
        if self.omega_eb is None:
            object.__setattr__(self, "omega_eb", self.omega_ea + self.omega_r)
        for name in ("omega_r", "omega_ea", "omega_eb", "temperature"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        _check_nonnegative(self, ("gamma_ea", "gamma_eb", "gp_a", "gp_b", "gp_e", "drive"))
        _check_ladder("omega_eb", self.omega_eb, self.omega_ea + self.omega_r)

    @property
    def levels(self):
        return LEVELS_3L

    def with_drive(self, drive):
        return dataclasses.replace(self, drive=drive)

    def baths(self):
        return {
            "ea": bath_rates(self.gamma_ea, self.omega_ea, self.temperature),
            "eb": bath_rates(self.gamma_eb, self.omega_eb, self.temperature),
        }

    @classmethod
    def with_ups_ab(cls, ups_ab, **kwargs):
        """Build with ``gp_a = gp_b`` chosen so that the a-b dephasing rate is ``ups_ab``.

        The thermal excitation rates out of ``|a>`` and ``|b>`` are subtracted
        first, so the total a-b coherence decay rate equals ``ups_ab`` exactly.
        """
        probe = cls(**kwargs)
        baths = probe.baths()
        gp = ups_ab - 0.5 * (baths["ea"].gamma_plus + baths["eb"].gamma_plus)
        if gp < 0:
            raise ValueError(f"ups_ab={ups_ab} is below the thermal floor {ups_ab - gp}")
        return dataclasses.replace(probe, gp_a=gp, gp_b=gp)


@dataclass(frozen=True)
class FourLevelParams:
    """Driven four-level refrigerator (drive on ``e <-> m``)."""

    omega_r: float
    omega_em: float
    omega_ma: float
    gamma_em: float
    gamma_ma: float
    gamma_eb: float
    temperature: float
    drive: float = 0.0
    gp_a: float = 0.0
    gp_b: float = 0.0
    gp_m: float = 0.0
    gp_e: float = 0.0
    omega_eb: float | None = None

    def __post_init__(self):
        if self.omega_eb is None:
            object.__setattr__(self, "omega_eb", self.omega_em + self.omega_ma + self.omega_r)
        for name in ("omega_r", "omega_em", "omega_ma", "omega_eb", "temperature"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        _check_nonnegative(
            self, ("gamma_em", "gamma_ma", "gamma_eb", "gp_a", "gp_b", "gp_m", "gp_e", "drive")
        )
        _check_ladder("omega_eb", self.omega_eb, self.omega_em + self.omega_ma + self.omega_r)

    @property
    def levels(self):
        return LEVELS_4L

    def with_drive(self, drive):
        return dataclasses.replace(self, drive=drive)

    def baths(self):
        return {
            "em": bath_rates(self.gamma_em, self.omega_em, self.temperature),
            "ma": bath_rates(self.gamma_ma, self.omega_ma, self.temperature),
            "eb": bath_rates(self.gamma_eb, self.omega_eb, self.temperature),
        }

    @classmethod
    def with_ups_ab(cls, ups_ab, **kwargs):
        """Four-level analogue of :meth:`ThreeLevelParams.with_ups_ab`."""
        probe = cls(**kwargs)
        baths = probe.baths()
        gp = ups_ab - 0.5 * (baths["eb"].gamma_plus + baths["ma"].gamma_plus)
        if gp < 0:
            raise ValueError(f"ups_ab={ups_ab} is below the thermal floor {ups_ab - gp}")
        return dataclasses.replace(probe, gp_a=gp, gp_b=gp)


# ---------------------------------------------------------------------------
# operators and Liouvillians
# ---------------------------------------------------------------------------


def _index(params):
    return {name: i for i, name in enumerate(params.levels)}


def atom_hamiltonian(params):
    """Interaction-picture drive ``(drive/2)(|hi><lo| + h.c.)`` on the pumped transition."""
    idx = _index(params)
    dim = len(idx)
    hi, lo = ("e", "a") if isinstance(params, ThreeLevelParams) else ("e", "m")
    tau = ops.transition(idx[hi], idx[lo], dim)
    return 0.5 * params.drive * (tau + tau.conj().T)


def atom_jumps(params):
    """``(L, rate)`` pairs: thermal up/down jumps per optical transition, then dephasing."""
    idx = _index(params)
    dim = len(idx)
    jumps = []
    for name, bath in params.baths().items():
        hi, lo = idx[name[0]], idx[name[1]]
        jumps.append((ops.transition(hi, lo, dim), bath.gamma_plus))
        jumps.append((ops.transition(lo, hi, dim), bath.gamma_minus))
    for level, i in idx.items():
        jumps.append((ops.projector(i, dim), getattr(params, f"gp_{level}")))
    return jumps


def sigma_minus(params):
    """Microwave lowering operator ``|b><a|``."""
    idx = _index(params)
    return ops.transition(idx["b"], idx["a"], len(idx))


def build_atom_liouvillian(params, sparse=False):
    """Atom-only generator: drive commutator + thermal dissipators + pure dephasing."""
    return ops.liouvillian(atom_hamiltonian(params), atom_jumps(params), sparse=sparse)


def build_atom_liouvillian_3l(params, sparse=False):
    if not isinstance(params, ThreeLevelParams):
        raise TypeError("expected ThreeLevelParams")
    return build_atom_liouvillian(params, sparse)


def build_atom_liouvillian_4l(params, sparse=False):
    if not isinstance(params, FourLevelParams):
        raise TypeError("expected FourLevelParams")
    return build_atom_liouvillian(params, sparse)


def boltzmann_populations(params):
    """Thermal populations ``exp(-E/T)/Z`` in level order, ground energy 0."""
    if isinstance(params, ThreeLevelParams):
        energies = [0.0, params.omega_r, params.omega_eb]
    else:
        energies = [0.0, params.omega_r, params.omega_r + params.omega_ma, params.omega_eb]
    w = np.array([boltzmann_factor(E, params.temperature) if E else 1.0 for E in energies])
    return w / w.sum()


def populations(rho, params):
    """Diagonal of an atom density matrix keyed by level name."""
    return {name: float(np.real(rho[i, i])) for name, i in _index(params).items()}
