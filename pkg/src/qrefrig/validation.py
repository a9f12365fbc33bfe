"""Self-checks run by ``qrefrig validate``.

Each check returns a :class:`CheckResult`; the suite passes only if all do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import operators as ops
from .atoms import boltzmann_populations, build_atom_liouvillian, sigma_minus
from .composite import (
    atom_populations,
    build_composite_liouvillian,
    composite_steady_state,
    desk_spec,
    g_ladder_scan,
)
from .config import load_preset
from .harness import (
    estimate_report,
    find_minimum,
    locate_upturn,
    photon_number_at,
    sweep_drive,
)
from .rates import cooling_limit, dephasing_rates, rates, steady_populations_3l, working_region_bound
from .regression import (
    build_regression,
    numeric_rates_full,
    quadrature_integral,
    regression_integral,
    regression_rates,
)
from .resonator import ResonatorParams, chain_steady_state, steady_photon_number

RATE_RTOL = 1e-8
ORACLE_DPS = 40


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_rel_error: float
    detail: str = ""


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def three_way_errors(params, g, drives, dps=None):
    """Largest pairwise relative gap between closed-form, reduced and full rates."""
    worst = 0.0
    sm = sigma_minus(params)
    for d in drives:
        p = params.with_drive(d)
        r = rates(p, g)
        reg = regression_rates(p, g)
        full = numeric_rates_full(build_atom_liouvillian(p), sm, g, dps=dps)
        for k, closed in enumerate((r.a_plus, r.a_minus)):
            worst = max(worst, _rel(closed, reg[k]), _rel(closed, full[k]), _rel(reg[k], full[k]))
    return worst


def check_three_way(preset, points):
    cfg = load_preset(preset)
    params = cfg.atom_params()
    drives = np.logspace(-3, 4, points)
    err = three_way_errors(params, cfg.g, drives, dps=ORACLE_DPS)
    return CheckResult(f"three-way rates {cfg.model} ({preset})", bool(err < RATE_RTOL), float(err), f"{points} drives")


def check_desk_three_way(points):
    spec = desk_spec()
    err = three_way_errors(spec.atom, spec.g, np.logspace(-2, 2, points))
    return CheckResult("three-way rates 3L (desk, double precision)", bool(err < RATE_RTOL), float(err), f"{points} drives")


def check_detailed_balance():
    spec = desk_spec(drive=0.0)
    p = spec.atom
    a_plus, a_minus = numeric_rates_full(build_atom_liouvillian(p), sigma_minus(p), spec.g)
    expected = math.exp(p.omega_r / p.temperature)
    err = _rel(a_minus / a_plus, expected)
    return CheckResult("undriven detailed balance A-/A+", err < 1e-9, err)


def check_regression_quadrature():
    spec = desk_spec(drive=0.7)
    worst = 0.0
    for which in ("heating", "cooling"):
        rs = build_regression(spec.atom, which)
        exact = regression_integral(rs)
        quad = quadrature_integral(rs)
        worst = max(worst, float(np.max(np.abs(exact - quad)) / np.max(np.abs(exact))))
    return CheckResult("regression integral vs quadrature", worst < 1e-6, worst)


def check_fig2(preset):
    cfg = load_preset(preset)
    spec = cfg.sweep_spec()
    rows = sweep_drive(spec)
    failed = sum(not r.ok for r in rows)
    m = find_minimum(rows, lambda d: photon_number_at(spec, d))
    err = abs(m.n_ss - 68.1) / 68.1
    n = np.array([r.n_ss for r in rows])
    if cfg.model == "3L":
        shape_ok = not m.at_boundary
        shape = "interior minimum"
    else:
        shape_ok = bool(np.all(np.diff(n) <= 1e-12 * n[:-1]))
        err = max(err, abs(n[-1] - 68.1) / 68.1)
        shape = "non-increasing"
    ok = failed == 0 and err < 0.02 and shape_ok
    return CheckResult(
        f"{preset} minimum", ok, err, f"min {m.n_ss:.4f} at drive {m.drive:.3g} MHz, {shape}: {shape_ok}"
    )


def check_limits():
    worst, notes = 0.0, []
    ok = True
    for preset in ("fig2a", "fig2b"):
        cfg = load_preset(preset)
        r = rates(cfg.atom_params(drive=0.0), cfg.g)
        n0 = steady_photon_number(ResonatorParams(cfg.kappa, cfg.nbar_r, r.a_plus, r.a_minus))
        e = _rel(n0, cfg.nbar_r)
        worst = max(worst, e)
        ok &= e < 1e-9
        notes.append(f"{preset} undriven {n0:.10g}")

    cfg = load_preset("fig2b")
    spec = cfg.sweep_spec()
    n_top = photon_number_at(spec, spec.drive_grid[-1])
    ups = dephasing_rates(spec.params)
    target = cooling_limit(cfg.g, cfg.kappa, ups.ups_ab_p, cfg.nbar_r).exact
    e = _rel(n_top, target)
    ok &= e < 1e-3
    notes.append(f"4L asymptote off by {e:.2e}")

    cfg = load_preset("fig2a")
    spec = cfg.sweep_spec()
    upturn = locate_upturn(sweep_drive(spec))
    ups = dephasing_rates(spec.params)
    bound = working_region_bound(ups.ups_eb, ups.ups_ab)
    ratio = upturn / bound if upturn else math.inf
    ok &= 1.0 / 3.0 <= ratio <= 3.0
    notes.append(f"3L upturn/bound {ratio:.3f}")
    return CheckResult("limit behaviours", bool(ok), worst, "; ".join(notes))


def check_estimates():
    nv = estimate_report(**load_preset("sec5_nv").estimate_inputs())
    na = estimate_report(**load_preset("sec5_na").estimate_inputs())
    ok = abs(nv.limit_approx - 68.9) <= 0.5 and abs(nv.t_eff_approx_kelvin - 3.3) <= 0.1 and na.limit_exact < 1.0
    detail = f"NV {nv.limit_approx:.3f} / {nv.t_eff_approx_kelvin:.3f} K; Na {na.limit_exact:.4f}"
    return CheckResult("device estimates", ok, abs(nv.limit_approx - 68.9) / 68.9, detail)


def check_elimination():
    points = g_ladder_scan(desk_spec())
    errs = [p.rel_error for p in points]
    shrink = [errs[k + 1] / errs[k] for k in range(len(errs) - 1)]
    ok = errs[0] < 0.05 and all(s <= 0.25 for s in shrink)

    small = desk_spec(g=points[-1].g)
    rho = composite_steady_state(small)
    pops, _ = steady_populations_3l(small.atom)
    expected = np.array([pops[k] for k in small.atom.levels])
    pop_err = float(np.max(np.abs(atom_populations(rho, small) - expected) / expected))
    ok = ok and pop_err < 0.01
    detail = "errors " + ", ".join(f"{e:.2e}" for e in errs) + "; shrink " + ", ".join(f"{s:.3f}" for s in shrink)
    return CheckResult("adiabatic elimination (desk)", ok, errs[0], detail + f"; atom pops {pop_err:.2e}")


def check_invariants(seed=0):
    rng = np.random.default_rng(seed)
    worst, ok = 0.0, True

    spec = desk_spec(fock_dim=6)
    L = build_composite_liouvillian(spec).toarray()
    X = rng.normal(size=(spec.dim,) * 2) + 1j * rng.normal(size=(spec.dim,) * 2)
    rho0 = X @ X.conj().T
    rho0 /= np.trace(rho0)
    rho = ops.evolve(L, rho0, 3.0)
    trace_err = abs(np.trace(rho) - 1.0)
    herm_err = float(np.max(np.abs(rho - rho.conj().T)))
    worst = max(worst, trace_err, herm_err)
    ok &= trace_err < 1e-10 and herm_err < 1e-10

    p = desk_spec().atom
    for name, bath in p.baths().items():
        gap = p.omega_ea if name == "ea" else p.omega_eb
        e = _rel(bath.gamma_minus / bath.gamma_plus, math.exp(gap / p.temperature))
        worst = max(worst, e)
        ok &= e < 1e-12

    rho_atom = ops.steady_state(build_atom_liouvillian(p.with_drive(0.0)))
    e = float(np.max(np.abs(np.real(np.diag(rho_atom)) - boltzmann_populations(p))))
    worst = max(worst, e)
    ok &= e < 1e-10

    for d in np.logspace(-2, 2, 9):
        pops, _ = steady_populations_3l(p.with_drive(d))
        v = np.array(list(pops.values()))
        ok &= bool(np.all(v >= 0) and np.all(v <= 1) and abs(v.sum() - 1) < 1e-12)

    rp = ResonatorParams(0.3, 2.0, 0.05, 0.4)
    dist = chain_steady_state(rp)
    ratio = dist.probs[1:30] / dist.probs[:29]
    e = max(float(np.max(np.abs(ratio / (rp.gamma_up / rp.gamma_down) - 1))), _rel(dist.mean, steady_photon_number(rp)))
    worst = max(worst, e)
    ok &= e < 1e-10
    return CheckResult("invariants", bool(ok), worst, "trace, hermiticity, Boltzmann ratios, simplex, birth-death")


def run_validation(quick=False):
    """Run every check; ``quick`` only trims the composite g-ladder and sweep densities."""
    points = 50 if quick else 100
    return [
        check_three_way("fig2a", points),
        check_three_way("fig2b", points),
        check_desk_three_way(points),
        check_detailed_balance(),
        check_regression_quadrature(),
        check_fig2("fig2a"),
        check_fig2("fig2b"),
        check_limits(),
        check_estimates(),
        check_elimination(),
        check_invariants(),
    ]
