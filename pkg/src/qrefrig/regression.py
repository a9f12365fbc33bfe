"""Heating and cooling rates from two-time correlations.

Two independent routes are provided. The reduced route integrates the small
linear system obeyed by ``<sigma(t) X(0)>`` in closed form, ``-G^{-1} V0``.
The full route never reduces anything: it takes the stationary state of the
whole atom Liouvillian and applies its resolvent to the correlation source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.integrate import simpson

from . import operators as ops
from .atoms import FourLevelParams, ThreeLevelParams, build_atom_liouvillian, sigma_minus
from .rates import dephasing_rates_3l, dephasing_rates_4l, steady_populations_3l, steady_populations_4l


class UnstableSystemError(ValueError):
    pass


@dataclass(frozen=True)
class RegressionSystem:
    """``dV/dt = G V`` with ``V(0) = v0``.

    ``g_matrix`` is 2x2 for the three-level atom and 1x1 for the four-level
    one, where the a-b coherence decouples from the drive.
    """

    g_matrix: np.ndarray
    v0: np.ndarray

    def __post_init__(self):
        G = np.atleast_2d(np.asarray(self.g_matrix, dtype=complex))
        v0 = np.atleast_1d(np.asarray(self.v0, dtype=complex))
        if G.shape != (v0.size, v0.size):
            raise ValueError(f"g_matrix shape {G.shape} does not match v0 of length {v0.size}")
        lam = np.linalg.eigvals(G)
        if np.max(lam.real) >= 0:
            raise UnstableSystemError(f"G has an eigenvalue with real part {np.max(lam.real):.3g} >= 0")
        object.__setattr__(self, "g_matrix", G)
        object.__setattr__(self, "v0", v0)

    @property
    def eigenvalues(self):
        return np.linalg.eigvals(self.g_matrix)


def build_regression_3l(p: ThreeLevelParams, which):
    """Regression system for ``A+`` (``which="heating"``) or ``A-`` (``"cooling"``).

    Heating follows ``(<sigma+(t) sigma->, <tau+_eb(t) sigma->)`` and starts
    from ``(N_a, <tau+_ea>)``; cooling follows the conjugate pair and starts
    from ``(N_b, 0)``.
    """
    ups = dephasing_rates_3l(p)
    pops, tau_minus = steady_populations_3l(p)
    half = 0.5 * p.drive
    if which == "heating":
        off = 1j * half
        v0 = [pops["a"], np.conj(tau_minus)]
    elif which == "cooling":
        off = -1j * half
        v0 = [pops["b"], 0.0]
    else:
        raise ValueError(f"which must be 'heating' or 'cooling', got {which!r}")
    G = np.array([[-ups.ups_ab, off], [off, -ups.ups_eb]], dtype=complex)
    return RegressionSystem(G, v0)


def build_regression_4l(p: FourLevelParams, which):
    """Scalar decay at ``ups_ab'`` from ``N_a`` (heating) or ``N_b`` (cooling)."""
    ups = dephasing_rates_4l(p)
    pops, _ = steady_populations_4l(p)
    if which not in ("heating", "cooling"):
        raise ValueError(f"which must be 'heating' or 'cooling', got {which!r}")
    start = pops["a"] if which == "heating" else pops["b"]
    return RegressionSystem([[-ups.ups_ab_p]], [start])


def build_regression(p, which):
    if isinstance(p, ThreeLevelParams):
        return build_regression_3l(p, which)
    return build_regression_4l(p, which)


def regression_integral(rs: RegressionSystem):
    """``int_0^inf exp(G t) v0 dt = -G^{-1} v0``."""
    try:
        return -sla.solve(rs.g_matrix, rs.v0)
    except sla.LinAlgError as exc:
        raise UnstableSystemError(f"G is singular: {exc}") from exc


def regression_rates(p, g):
    """``(A+, A-)`` from the reduced regression systems."""
    scale = 2.0 * g**2
    heat = regression_integral(build_regression(p, "heating"))[0]
    cool = regression_integral(build_regression(p, "cooling"))[0]
    return scale * heat.real, scale * cool.real


def quadrature_integral(rs: RegressionSystem, rtol=1e-9, horizon=40.0):
    """Brute-force ``int exp(G t) v0 dt`` for checking :func:`regression_integral`.

    The window ``[0, horizon / |Re lambda|_min]`` is cut into geometrically
    growing segments starting at the fastest time scale. Each segment uses
    composite Simpson, halving the step until the Richardson estimate
    ``|S_h - S_2h| / 15`` falls below ``rtol`` times the running total.
    """
    G, v0 = rs.g_matrix, rs.v0
    rates = np.abs(rs.eigenvalues.real)
    t_end = horizon / rates.min()
    edges = [0.0]
    t = 1.0 / rates.max()
    while t < t_end:
        edges.append(t)
        t *= 2.0
    edges.append(t_end)

    total = np.zeros_like(v0)
    start = v0.copy()
    for a, b in zip(edges[:-1], edges[1:]):
        n = 16
        prev = None
        while True:
            ts = np.linspace(0.0, b - a, n + 1)
            step = sla.expm(G * (ts[1] - ts[0]))
            vals = np.empty((n + 1, v0.size), dtype=complex)
            vals[0] = start
            for k in range(n):
                vals[k + 1] = step @ vals[k]
            est = simpson(vals, x=ts, axis=0)
            if prev is not None:
                err = np.max(np.abs(est - prev)) / 15.0
                if err <= rtol * max(np.max(np.abs(total + est)), 1e-300):
                    break
            if n > 2**20:
                raise RuntimeError("quadrature did not converge")
            prev = est
            n *= 2
        total = total + est
        start = vals[-1]
    return total


def numeric_rates_full(liouvillian, sigma_minus_op, g, dps=None, rho_ss=None, max_dps=320):
    """``(A+, A-)`` from correlation integrals of the full atom Liouvillian.

    ``dps`` switches the stationary state and resolvent solves to extended
    precision, needed when optical Boltzmann factors push populations far
    below double-precision round-off of the rates. Nearly decoupled levels
    can hide the spectral gap below ``10**-dps``; the precision is then
    doubled (up to ``max_dps``) until the steady state is certified unique,
    and the resolvent is taken at the same precision.
    """
    sm = np.asarray(sigma_minus_op, dtype=complex)
    sp_ = sm.conj().T
    if rho_ss is None:
        while True:
            try:
                rho_ss = ops.steady_state(liouvillian, dps=dps)
                break
            except ops.DegenerateSteadyStateError:
                if dps is None or 2 * dps > max_dps:
                    raise
                dps *= 2
    scale = 2.0 * g**2
    heat = ops.correlation_integral(liouvillian, rho_ss, sp_, sm, dps=dps)
    cool = ops.correlation_integral(liouvillian, rho_ss, sm, sp_, dps=dps)
    return scale * heat.real, scale * cool.real


def oracle_rates(p, g, dps=None):
    """Full-Liouvillian rates straight from atom parameters."""
    return numeric_rates_full(build_atom_liouvillian(p), sigma_minus(p), g, dps=dps)


def correlation_function(liouvillian, rho_ss, X, Y, times):
    """``<X(t) Y(0)>_ss - <X><Y>`` at each time."""
    dim = ops.superop_dim(liouvillian)
    L = liouvillian.toarray() if hasattr(liouvillian, "toarray") else np.asarray(liouvillian)
    X = np.asarray(X, dtype=complex)
    source = np.asarray(Y, dtype=complex) @ rho_ss
    mean_x = np.trace(X @ rho_ss)
    mean_y = np.trace(source)
    out = []
    for t in np.atleast_1d(times):
        state = ops.unvec(sla.expm(t * L) @ ops.vec(source), dim)
        out.append(np.trace(X @ state) - mean_x * mean_y)
    return np.array(out)


def decay_rate_fit(values, t1, t2):
    """Rate of a pure exponential from two samples."""
    return math.log(abs(values[0]) / abs(values[1])) / (t2 - t1)
