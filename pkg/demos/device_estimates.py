"""
Device-level numbers
====================

Cooling floor for a solid-state ensemble and for a warm sodium vapour whose
ground-state coherence is limited by Doppler broadening, then the approach to
the floor once the pump is switched on.
"""

import numpy as np

from qrefrig import doppler_broadening, estimate_report, load_preset
from qrefrig.rates import rates
from qrefrig.resonator import ResonatorParams, transient_mean_photon

for name in ("sec5_nv", "sec5_na"):
    report = estimate_report(**load_preset(name).estimate_inputs())
    print(f"{name}: floor {report.limit_exact:.4f} (approx {report.limit_approx:.4f}), "
          f"T_eff {report.t_eff_approx_kelvin:.3f} K")

width = doppler_broadening(1.77e9, 300.0, 23.0)
print(f"Doppler width of a 1.77 GHz line at 300 K, mass 23 u: {width / 1e3:.2f} kHz\n")

# relaxation toward the floor on the small test bed
cfg = load_preset("desk")
r = rates(cfg.atom_params(), cfg.g)
rp = ResonatorParams(cfg.kappa, cfg.nbar_r, r.a_plus, r.a_minus)
t = np.linspace(0.0, 5.0 / rp.relaxation_rate, 6)
for ti, ni in zip(t, transient_mean_photon(rp, cfg.nbar_r, t)):
    print(f"t = {ti:10.1f} us   <n> = {ni:.5f}")
