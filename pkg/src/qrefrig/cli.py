"""Command-line front end.

Exit status is 0 when everything succeeded, 1 when a sweep row or a
validation check failed, and 2 for unusable input.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import operators as ops
from .config import PRESETS, ConfigError, load_config, parse_value
from .harness import estimate_report, find_minimum, photon_number_at, sweep_drive
from .rates import rates
from .resonator import ResonatorParams, transient_mean_photon
from .validation import run_validation


def _num(x):
    """Shortest text that reads back to the same double."""
    return repr(float(x))


def _input_columns(cfg, spec):
    p = spec.params
    cols = {
        "model": spec.model,
        "rate_source": spec.rate_source,
        "omega_r_MHz": _num(p.omega_r),
        "kappa_MHz": _num(spec.kappa),
        "nbar_r": _num(spec.nbar_r),
        "g_MHz": _num(spec.g),
        "temperature_MHz": _num(p.temperature),
    }
    for name in ("omega_ea", "omega_em", "omega_ma", "omega_eb", "gamma_ea", "gamma_em", "gamma_ma",
                 "gamma_eb", "gp_a", "gp_b", "gp_m", "gp_e"):
        if hasattr(p, name):
            cols[f"{name}_MHz"] = _num(getattr(p, name))
    return cols


def write_sweep(rows, cfg, spec, fh, delimiter=","):
    levels = spec.params.levels
    inputs = _input_columns(cfg, spec)
    header = (
        ["drive_MHz", "a_plus_MHz", "a_minus_MHz", "n_ss", *[f"pop_{k}" for k in levels],
         "t_eff_K", "error"] + list(inputs)
    )
    w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        pops = [_num(r.populations[k]) if r.ok else "nan" for k in levels]
        w.writerow(
            [_num(r.drive), _num(r.a_plus), _num(r.a_minus), _num(r.n_ss), *pops,
             _num(r.effective_temperature_kelvin), r.error or ""] + list(inputs.values())
        )


def cmd_sweep(args):
    cfg = load_config(args.config)
    spec = cfg.sweep_spec(args.rate_source)
    rows = sweep_drive(spec)
    delimiter = "\t" if cfg.get("output", "format") == "tsv" else ","
    out = args.out or cfg.get("output", "path")
    if out and out != "-":
        with open(out, "w", newline="", encoding="utf-8") as fh:
            write_sweep(rows, cfg, spec, fh, delimiter)
    else:
        write_sweep(rows, cfg, spec, sys.stdout, delimiter)
    failed = sum(not r.ok for r in rows)
    if len(rows) - failed >= 3:
        m = find_minimum(rows, lambda d: photon_number_at(spec, d))
        where = "boundary" if m.at_boundary else "interior"
        print(f"minimum n_ss = {m.n_ss!r} at drive {m.drive!r} MHz ({where})", file=sys.stderr)
    if failed:
        print(f"{failed} of {len(rows)} rows failed", file=sys.stderr)
        return 1
    return 0


def _format_report(items):
    lines = []
    for k, v in items.items():
        if isinstance(v, bool):
            v = str(v).lower()
        elif isinstance(v, float):
            v = _num(v)
        lines.append(f"{k} = {v}")
    return "\n".join(lines)


def cmd_limit(args):
    cfg = load_config(args.config)
    report = estimate_report(**cfg.estimate_inputs())
    print(_format_report(report.items()))
    return 0


def cmd_validate(args):
    results = run_validation(quick=args.quick)
    worst_rate = 0.0
    for c in results:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status}  {c.name}: max rel error {c.max_rel_error:.3e}  {c.detail}")
        if c.name.startswith("three-way"):
            worst_rate = max(worst_rate, c.max_rel_error)
    n_fail = sum(not c.passed for c in results)
    print(f"max relative error across rate equivalence checks: {worst_rate:.3e}")
    print(f"{len(results) - n_fail} passed, {n_fail} failed")
    return 1 if n_fail else 0


def cmd_simulate(args):
    cfg = load_config(args.config)
    t_final = parse_value("time", args.t_final) if args.t_final else cfg.get("simulate", "t_final")
    if t_final is None or t_final <= 0:
        raise ValueError("simulate needs a positive --t-final (for example '5 ms') or simulate.t_final")
    points = args.points or cfg.get("simulate", "points", 100)
    if points < 2:
        raise ValueError("--points must be at least 2")
    n0 = cfg.get("simulate", "n0", cfg.nbar_r)
    r = rates(cfg.atom_params(), cfg.g)
    rp = ResonatorParams(cfg.kappa, cfg.nbar_r, r.a_plus, r.a_minus)
    times = np.linspace(0.0, t_final, points)
    trace = transient_mean_photon(rp, n0, times)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["time_us", "n_mean"])
    for t, n in zip(times, trace):
        w.writerow([_num(t), _num(n)])
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="qrefrig", description="Microwave-mode cooling by driven multi-level atoms.")
    sub = parser.add_subparsers(dest="command", required=True)
    config_help = f"configuration file or preset name ({', '.join(PRESETS)})"

    p = sub.add_parser("sweep", help="photon number against drive strength")
    p.add_argument("--config", required=True, help=config_help)
    p.add_argument("--out", help="output table path ('-' for stdout)")
    p.add_argument("--rate-source", choices=("closed", "oracle"), help="closed forms or full-Liouvillian correlations")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("limit", help="cooling floor and effective temperature")
    p.add_argument("--config", required=True, help=config_help)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("validate", help="run the self-check suite")
    p.add_argument("--quick", action="store_true", help="smaller grids")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("simulate", help="mean photon number after switching on the drive")
    p.add_argument("--config", required=True, help=config_help)
    p.add_argument("--t-final", help="duration with unit, e.g. '20 ms'")
    p.add_argument("--points", type=int, help="number of output times")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, ops.DimensionCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
