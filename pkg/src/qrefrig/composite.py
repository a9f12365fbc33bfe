"""Atom plus truncated resonator, simulated without eliminating the atom.

The joint space is ``atom (x) Fock`` with the atom index first. The resonator
is taken exactly resonant with the a-b transition, so the interaction picture
coupling ``g (sigma+ a + sigma- a^+)`` is time independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import operators as ops
from .atoms import FourLevelParams, ThreeLevelParams, atom_hamiltonian, atom_jumps, sigma_minus
from .rates import rates
from .resonator import ResonatorParams, steady_photon_number

TAIL_TOL = 1e-10


class FockTruncationError(RuntimeError):
    def __init__(self, tail_mass, fock_dim, suggested):
        self.tail_mass = tail_mass
        self.fock_dim = fock_dim
        self.suggested = suggested
        super().__init__(
            f"top Fock level holds {tail_mass:.3g} of the population (limit {TAIL_TOL:g}); "
            f"try fock_dim >= {suggested}"
        )


@dataclass(frozen=True)
class CompositeSpec:
    atom: ThreeLevelParams | FourLevelParams
    kappa: float
    nbar_r: float
    g: float
    fock_dim: int
    omega_r: float | None = None

    def __post_init__(self):
        if self.fock_dim < 2:
            raise ValueError("fock_dim must be at least 2")
        if self.kappa < 0 or self.nbar_r < 0 or self.g < 0:
            raise ValueError("kappa, nbar_r and g must be non-negative")
        if self.omega_r is not None and not math.isclose(self.omega_r, self.atom.omega_r, rel_tol=1e-12):
            raise ValueError("resonator frequency must equal the atom's a-b splitting")
        ops.check_dim(self.dim)

    @property
    def atom_dim(self):
        return len(self.atom.levels)

    @property
    def dim(self):
        return self.atom_dim * self.fock_dim


def _lift(spec):
    eye_a = np.eye(spec.atom_dim)
    eye_f = np.eye(spec.fock_dim)
    return (lambda A: np.kron(A, eye_f)), (lambda F: np.kron(eye_a, F))


def composite_operators(spec):
    """``(a, sigma_minus)`` embedded in the joint space."""
    on_atom, on_field = _lift(spec)
    return on_field(ops.destroy(spec.fock_dim)), on_atom(sigma_minus(spec.atom))


def build_composite_liouvillian(spec: CompositeSpec, sparse=True):
    """Atom generator, thermal resonator damping and the exchange coupling, in sparse storage."""
    on_atom, _ = _lift(spec)
    a, sm = composite_operators(spec)
    H = on_atom(atom_hamiltonian(spec.atom)) + spec.g * (sm.conj().T @ a + sm @ a.conj().T)
    jumps = [(on_atom(L), rate) for L, rate in atom_jumps(spec.atom)]
    jumps.append((a, spec.kappa * (spec.nbar_r + 1.0)))
    jumps.append((a.conj().T, spec.kappa * spec.nbar_r))
    return ops.liouvillian(H, jumps, sparse=sparse)


def composite_steady_state(spec: CompositeSpec, dps=None):
    return ops.steady_state(build_composite_liouvillian(spec), dps=dps)


def fock_populations(rho, spec):
    r = rho.reshape(spec.atom_dim, spec.fock_dim, spec.atom_dim, spec.fock_dim)
    return np.real(np.einsum("imim->m", r))


def atom_populations(rho, spec):
    r = rho.reshape(spec.atom_dim, spec.fock_dim, spec.atom_dim, spec.fock_dim)
    return np.real(np.einsum("imim->i", r))


def _suggest_fock_dim(mean):
    if mean <= 0:
        return 2
    r = mean / (mean + 1.0)
    return int(math.ceil(math.log(TAIL_TOL) / math.log(r))) + 2


def composite_steady_photon(spec: CompositeSpec, rho=None):
    """``<a^+ a>`` in the joint steady state, after checking the Fock tail."""
    if rho is None:
        rho = composite_steady_state(spec)
    p = fock_populations(rho, spec)
    mean = float(np.arange(spec.fock_dim) @ p)
    if p[-1] > TAIL_TOL:
        raise FockTruncationError(float(p[-1]), spec.fock_dim, _suggest_fock_dim(mean))
    return mean


@dataclass(frozen=True)
class ElimPoint:
    g: float
    composite: float
    eliminated: float

    @property
    def rel_error(self):
        return abs(self.composite - self.eliminated) / self.eliminated


def eliminated_photon_number(spec: CompositeSpec):
    """Photon number predicted by the eliminated resonator equation with closed-form rates."""
    r = rates(spec.atom, spec.g)
    return steady_photon_number(ResonatorParams(spec.kappa, spec.nbar_r, r.a_plus, r.a_minus))


def g_ladder_scan(spec: CompositeSpec, factors=(1.0, 0.5, 0.25)):
    """Composite vs eliminated photon number at ``g * factor`` for each factor."""
    out = []
    for f in factors:
        s = CompositeSpec(spec.atom, spec.kappa, spec.nbar_r, spec.g * f, spec.fock_dim)
        out.append(ElimPoint(s.g, composite_steady_photon(s), eliminated_photon_number(s)))
    return out


def desk_spec(g=1e-2, drive=1.0, fock_dim=24):
    """Small-occupation test bed: ``nbar_r = 0.5``, ``kappa = 1e-3``, unit optical decay."""
    from .atoms import temperature_for_occupation

    T = temperature_for_occupation(1.0, 0.5)
    atom = ThreeLevelParams(
        omega_r=1.0, omega_ea=4.0, gamma_ea=1.0, gamma_eb=1.0, temperature=T,
        drive=drive, gp_a=0.1, gp_b=0.1,
    )
    return CompositeSpec(atom, kappa=1e-3, nbar_r=0.5, g=g, fock_dim=fock_dim)
