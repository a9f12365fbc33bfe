"""Photon-number dynamics of the resonator after the atom has been eliminated.

Only the diagonal of the resonator state is tracked. Photons are created at
rate ``Gamma+ (n + 1)`` and destroyed at rate ``Gamma- n`` with

    Gamma+ = A+ + kappa nbar_r,    Gamma- = A- + kappa (nbar_r + 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

TAIL_TOL = 1e-12


class UnstableResonatorError(ValueError):
    """Heating outruns the total damping, so no steady state exists."""

    def __init__(self, margin):
        self.margin = margin
        super().__init__(f"A- - A+ + kappa = {margin:.6g} <= 0; heating exceeds total damping")


class TruncationError(RuntimeError):
    def __init__(self, tail_mass, n_max):
        self.tail_mass = tail_mass
        self.n_max = n_max
        super().__init__(f"steady tail mass {tail_mass:.3g} at n_max={n_max} exceeds {TAIL_TOL:g}")


@dataclass(frozen=True)
class ResonatorParams:
    kappa: float
    nbar_r: float
    a_plus: float = 0.0
    a_minus: float = 0.0

    def __post_init__(self):
        for name in ("kappa", "nbar_r", "a_plus", "a_minus"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be non-negative and finite, got {value}")
        margin = self.a_minus - self.a_plus + self.kappa
        if margin <= 0:
            raise UnstableResonatorError(margin)

    @property
    def gamma_up(self):
        return self.a_plus + self.kappa * self.nbar_r

    @property
    def gamma_down(self):
        return self.a_minus + self.kappa * (self.nbar_r + 1.0)

    @property
    def relaxation_rate(self):
        """``Gamma- - Gamma+``, the decay rate of the mean photon number."""
        return self.a_minus - self.a_plus + self.kappa


def steady_photon_number(rp: ResonatorParams):
    """``(A+ + kappa nbar_r) / (A- - A+ + kappa)``."""
    return rp.gamma_up / rp.relaxation_rate


@dataclass(frozen=True)
class PhotonDistribution:
    """Photon-number probabilities ``p_0 .. p_{n_max}``."""

    probs: np.ndarray
    n_max: int

    @property
    def mean(self):
        return float(np.arange(self.n_max + 1) @ self.probs)

    @property
    def tail_mass(self):
        return float(self.probs[-1])


def birth_death_generator(rp: ResonatorParams, n_max):
    """Sparse rate matrix ``W`` with ``dp/dt = W p`` on ``n = 0..n_max``.

    The top level has no upward transition, so probability is conserved
    exactly on the truncated space.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    n = np.arange(n_max + 1, dtype=float)
    up = rp.gamma_up * (n + 1.0)
    up[-1] = 0.0
    down = rp.gamma_down * n
    W = sp.diags(
        [up[:-1], -(up + down), down[1:]],
        offsets=[-1, 0, 1],
        shape=(n_max + 1, n_max + 1),
        format="csr",
    )
    return W


def _chain_steady(W):
    """Stationary vector of a tridiagonal generator by the product recursion.

    Balance across each edge gives ``p_{n+1} / p_n = up_n / down_{n+1}``; the
    recursion runs in logs so long chains do not underflow.
    """
    up = W.diagonal(-1)
    down = W.diagonal(1)
    with np.errstate(divide="ignore"):
        log_ratio = np.log(up) - np.log(down)
    logp = np.concatenate([[0.0], np.cumsum(log_ratio)])
    logp -= logp.max()
    p = np.exp(logp)
    return p / p.sum()


def chain_steady_state(rp: ResonatorParams, n_max=None, check_tail=True):
    """Steady photon distribution of the truncated chain.

    Without ``n_max`` the chain starts at ``4 (n_ss + 1)`` levels and doubles
    until the last level carries less than ``TAIL_TOL``.
    """
    if n_max is not None:
        p = _chain_steady(birth_death_generator(rp, n_max))
        if check_tail and p[-1] >= TAIL_TOL:
            raise TruncationError(float(p[-1]), n_max)
        return PhotonDistribution(p, n_max)

    n_max = int(math.ceil(4.0 * (steady_photon_number(rp) + 1.0)))
    while True:
        p = _chain_steady(birth_death_generator(rp, n_max))
        if p[-1] < TAIL_TOL:
            return PhotonDistribution(p, n_max)
        n_max *= 2


def transient_mean_photon(rp: ResonatorParams, n0, t):
    """Mean photon number relaxing from ``n0`` toward the steady value."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("times must be non-negative")
    n_ss = steady_photon_number(rp)
    out = n_ss + (n0 - n_ss) * np.exp(-rp.relaxation_rate * t)
    return float(out) if out.ndim == 0 else out


def evolve_chain(rp: ResonatorParams, p0, times):
    """Distributions at each of ``times`` (sorted) starting from ``p0``."""
    p0 = np.asarray(p0, dtype=float)
    W = birth_death_generator(rp, p0.size - 1).tocsc()
    times = np.asarray(times, dtype=float)
    out = np.empty((times.size, p0.size))
    for k, t in enumerate(times):
        out[k] = expm_multiply(W * t, p0) if t > 0 else p0
    return out


def thermal_distribution(nbar, n_max):
    """Geometric distribution with mean ``nbar`` truncated at ``n_max`` and renormalized."""
    if nbar == 0:
        p = np.zeros(n_max + 1)
        p[0] = 1.0
        return p
    r = nbar / (nbar + 1.0)
    p = r ** np.arange(n_max + 1)
    return p / p.sum()
