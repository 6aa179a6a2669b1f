"""Cavity-QED figures of merit and how they change with cavity length.

The cooperativity depends on finesse and waist geometry only, so it is
the same for every cavity length. Coupling g and linewidth kappa do scale
with length, and that moves the cavity between coupling regimes.
"""

from __future__ import annotations

import numpy as np

from nanofiber_fp.constants import C0
from nanofiber_fp.cqed import (
    CqedInputs,
    design_scan,
    mode_volume,
    default_sections,
    regime_boundaries,
    report_from_inputs,
)
from nanofiber_fp.fibermode import FiberGeometry, solve_he11

LAM = 852.53e-9
FSR = 1.48084e9

waist = solve_he11(FiberGeometry.silica(500e-9, LAM))
sections = default_sections()
_, v_tilde = mode_volume(sections, LAM)
print(f"mode volume from the section table: {v_tilde:.3g} lambda^3")

r = report_from_inputs(CqedInputs(85.6, FSR, C0 / LAM, waist, sections))
rates = r.rates_over_2pi()
print(f"kappa/2pi = {rates['kappa'] / 1e6:.2f} MHz, g/2pi = {rates['g'] / 1e6:.2f} MHz, "
      f"gamma/2pi = {rates['gamma'] / 1e6:.2f} MHz")
print(f"Q = {r.Q:.3e}, E0 = {r.E0_surface:.1f} V/m, C = {r.C:.2f}, regime: {r.regime}")

b = regime_boundaries(r)
print("regime boundaries [m of optical path]:")
for k, v in b.items():
    print(f"  {k:>16}: {v:.4g}")

print("\n  L_opt [m]   g/2pi [MHz]   kappa/2pi [MHz]   regime")
for row in design_scan(r, np.geomspace(0.005, 2.0, 9), target="coherent"):
    mark = "*" if row["meets_target"] else " "
    print(f"{row['l_opt']:10.4f}   {row['g_over_2pi'] / 1e6:11.2f}   "
          f"{row['kappa_over_2pi'] / 1e6:15.3f}   {row['regime']} {mark}")
