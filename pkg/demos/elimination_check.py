"""
Does eliminating the atom work?
===============================

Simulate atom and resonator together on a truncated Fock space and compare
with the photon number predicted after eliminating the atom.
"""

from qrefrig.composite import composite_steady_photon, desk_spec, eliminated_photon_number, g_ladder_scan

spec = desk_spec()
print(f"joint dimension {spec.dim}, thermal occupation {spec.nbar_r}")
print(f"full simulation {composite_steady_photon(spec):.6f}")
print(f"eliminated      {eliminated_photon_number(spec):.6f}\n")

# the mismatch should fall at least as fast as g^2
print("    g        full      eliminated   rel. error")
for p in g_ladder_scan(spec, factors=(10.0, 1.0, 0.5, 0.25)):
    print(f"{p.g:8.4f}  {p.composite:10.6f}  {p.eliminated:10.6f}   {p.rel_error:.2e}")
