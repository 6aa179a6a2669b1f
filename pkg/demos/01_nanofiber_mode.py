"""Guided HE11 mode of a 500 nm silica nanofiber at the Cs D2 wavelength.

The mode solver returns the effective index; the field module then gives
the evanescent intensity at the fiber surface and the effective cross
sections that later set the cavity mode volume.
"""

from __future__ import annotations

import numpy as np

from nanofiber_fp.fibermode import (
    FiberGeometry,
    effective_cross_section,
    field_intensity,
    group_index,
    solve_he11,
    v_number,
)

LAM = 852.53e-9

g = FiberGeometry.silica(500e-9, LAM)
m = solve_he11(g)
print(f"core index {g.core_index:.5f}, V = {v_number(g):.3f}")
print(f"n_eff = {m.n_eff:.6f}, beta = {m.beta:.4e} rad/m, group index {group_index(g):.4f}")

for ref in ("surface", "surface-average", "maximum"):
    print(f"A_eff ({ref:>15}) = {effective_cross_section(m, reference=ref) * 1e12:.4f} um^2")

# evanescent decay outside the fiber along the main polarization axis
r = g.radius * np.array([1.0, 1.2, 1.5, 2.0, 3.0])
I = field_intensity(m, r, phi=0.0).intensity_rel
for ri, Ii in zip(r, I / I[0]):
    print(f"r = {ri * 1e9:6.1f} nm   I/I(a) = {Ii:.4f}")

# shrinking the waist pushes the mode into the evanescent region
for d in (300e-9, 400e-9, 500e-9, 700e-9):
    mm = solve_he11(FiberGeometry.silica(d, LAM))
    print(f"d = {d * 1e9:.0f} nm   n_eff = {mm.n_eff:.5f}")
