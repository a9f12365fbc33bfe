import io
from dataclasses import replace

import numpy as np
import pytest

from qrefrig.cli import write_sweep
from qrefrig.config import load_preset
from qrefrig.harness import (
    SweepRow,
    SweepSpec,
    default_grid,
    doppler_broadening,
    estimate_report,
    evaluate_point,
    find_minimum,
    locate_upturn,
    pumping_threshold,
    sweep_drive,
)


def _rows(drives, values):
    return [SweepRow(d, n_ss=v) for d, v in zip(drives, values)]


def test_decreasing_rows_flag_last_point():
    m = find_minimum(_rows([1, 2, 3, 4], [5.0, 4.0, 3.0, 2.0]))
    assert m.at_boundary and m.index == 3 and m.drive == 4


def test_increasing_rows_flag_first_point():
    m = find_minimum(_rows([1, 2, 3], [1.0, 2.0, 3.0]))
    assert m.at_boundary and m.index == 0


def test_parabola_midpoint():
    x = np.linspace(-2, 2, 9)
    drives = np.exp(x)
    m = find_minimum(_rows(drives, 1 + x**2), objective=lambda d: 1 + np.log(d) ** 2)
    assert not m.at_boundary
    assert m.drive == pytest.approx(1.0, abs=1e-6)
    assert m.n_ss == pytest.approx(1.0, abs=1e-12)


def test_off_grid_refinement():
    x = np.linspace(-2, 2, 9)
    drives = np.exp(x)
    m = find_minimum(_rows(drives, 1 + (x - 0.2) ** 2), objective=lambda d: 1 + (np.log(d) - 0.2) ** 2)
    assert np.log(m.drive) == pytest.approx(0.2, abs=1e-5)


def test_ties_go_to_smaller_drive():
    m = find_minimum(_rows([1, 2, 3, 4, 5], [3.0, 1.0, 2.0, 1.0, 3.0]))
    assert m.index == 1


def test_flat_tail_is_boundary():
    m = find_minimum(_rows([1, 2, 3, 4], [5.0, 2.0, 2.0, 2.0]))
    assert m.at_boundary


def test_failed_rows_skipped():
    rows = _rows([1, 2, 3, 4], [3.0, 1.0, 2.0, 4.0])
    rows.insert(2, SweepRow(2.5, error="ValueError: bad"))
    assert find_minimum(rows).drive == 2


def test_too_few_rows():
    with pytest.raises(ValueError):
        find_minimum(_rows([1, 2], [1.0, 2.0]))


def test_upturn_interpolates():
    rows = _rows([1.0, 10.0, 100.0, 1000.0], [4.0, 1.0, 1.5, 2.5])
    up = locate_upturn(rows)
    assert 100.0 < up < 1000.0
    assert locate_upturn(_rows([1, 2, 3], [3.0, 2.0, 1.0])) is None


def test_doppler_sodium_ground_splitting():
    assert doppler_broadening(1.77e9, 300.0, 23.0) == pytest.approx(4.6e3, rel=0.03)


def test_doppler_zero_temperature_and_linearity():
    assert doppler_broadening(1.77e9, 0.0, 23.0) == 0.0
    one = doppler_broadening(1.0, 300.0, 23.0)
    assert doppler_broadening(2.0, 300.0, 23.0) == pytest.approx(2 * one, rel=1e-15)
    with pytest.raises(ValueError):
        doppler_broadening(1.0, 300.0, 0.0)


def test_nv_estimate():
    r = estimate_report(**load_preset("sec5_nv").estimate_inputs())
    assert r.limit_approx == pytest.approx(68.9, abs=0.5)
    assert r.t_eff_approx_kelvin == pytest.approx(3.3, abs=0.1)
    assert not r.ideal_cavity


def test_sodium_estimate_below_one_photon():
    r = estimate_report(**load_preset("sec5_na").estimate_inputs())
    assert r.limit_exact < 1.0


def test_ideal_cavity():
    r = estimate_report(omega_r=1000.0, g=1.5, kappa=0.0, ups_ab=0.5, nbar_r=6200.0)
    assert r.ideal_cavity and r.limit_exact == 0.0 and r.t_eff_exact_kelvin == 0.0


def test_estimate_needs_occupation():
    with pytest.raises(ValueError):
        estimate_report(omega_r=1000.0, g=1.5, kappa=0.1, ups_ab=0.5)


def test_default_grid_spans_threshold(fig2a):
    grid = default_grid(fig2a)
    assert len(grid) == 200 and np.all(np.diff(grid) > 0)
    assert grid[0] <= 1e-3 * pumping_threshold(fig2a)
    assert grid[-1] >= 1e4


def test_spec_rejects_bad_grid(fig2a):
    with pytest.raises(ValueError):
        SweepSpec(fig2a, 0.1, 6200.0, 1.5, drive_grid=(2.0, 1.0))
    with pytest.raises(ValueError):
        SweepSpec(fig2a, 0.1, 6200.0, 1.5, rate_source="guess")


def test_point_failure_recorded(mild3, monkeypatch):
    import qrefrig.harness as harness

    real = harness.rates

    def flaky(p, g):
        if p.drive > 0.5:
            raise ArithmeticError("overflow")
        return real(p, g)

    monkeypatch.setattr(harness, "rates", flaky)
    spec = SweepSpec(mild3, kappa=0.01, nbar_r=0.5, g=0.05, drive_grid=(0.1, 1.0, 2.0))
    rows = sweep_drive(spec)
    assert [r.ok for r in rows] == [True, False, False]
    assert rows[1].error == "ArithmeticError: overflow"


def test_fig2a_sweep():
    spec = load_preset("fig2a").sweep_spec()
    rows = sweep_drive(spec)
    assert all(r.ok and r.n_ss >= 0 for r in rows)
    m = find_minimum(rows)
    assert not m.at_boundary
    assert m.n_ss == pytest.approx(68.1, rel=0.02)
    assert rows[0].n_ss == pytest.approx(6200.0, rel=0.01)
    assert rows[-1].n_ss == pytest.approx(6200.0, rel=0.01)


def test_fig2b_sweep_non_increasing():
    spec = load_preset("fig2b").sweep_spec()
    n = np.array([r.n_ss for r in sweep_drive(spec)])
    assert np.all(np.diff(n) <= 1e-12 * n[:-1])
    assert n[-1] == pytest.approx(68.1, rel=0.02)


@pytest.mark.parametrize("preset", ["fig2a", "fig2b"])
def test_oracle_source_matches_closed(preset):
    cfg = load_preset(preset)
    grid = tuple(np.logspace(-3, 4, 12))
    closed = sweep_drive(replace(cfg.sweep_spec("closed"), drive_grid=grid))
    oracle = sweep_drive(replace(cfg.sweep_spec("oracle"), drive_grid=grid))
    for c, o in zip(closed, oracle):
        assert o.ok
        assert o.n_ss == pytest.approx(c.n_ss, rel=1e-6)
        assert o.a_minus == pytest.approx(c.a_minus, rel=1e-6)


def test_sweep_output_is_deterministic():
    cfg = load_preset("fig2a")
    texts = []
    for _ in range(2):
        spec = cfg.sweep_spec()
        buf = io.StringIO()
        write_sweep(sweep_drive(spec), cfg, spec, buf)
        texts.append(buf.getvalue())
    assert texts[0] == texts[1]


def test_evaluate_point_fields(mild3):
    spec = SweepSpec(mild3, kappa=0.01, nbar_r=0.5, g=0.05, drive_grid=(0.1, 1.0))
    row = evaluate_point(spec, 1.0)
    assert row.ok and set(row.populations) == set(mild3.levels)
    assert row.effective_temperature_kelvin > 0
