"""From two measured finesses to taper loss and mirror parameters.

Before tapering the cavity has finesse F0; after tapering F1. Their ratio
fixes the single-pass taper transmission tc^2. Adding the on-resonance
transmission then separates mirror transmission from mirror loss.
"""

from __future__ import annotations

from nanofiber_fp.cavity import (
    PathSection,
    cavity_response,
    infer_mirror_parameters,
    model_from_inference,
    projected_finesse,
    taper_transmission_from_finesses,
    taper_transmission_mc,
    taper_transmission_uncertainty,
)

F0, F0_ERR = 158.0, 8.0
F1, F1_ERR = 85.6, 0.6
T_RES = 0.11

tc2 = taper_transmission_from_finesses(F0, F1)
_, sd = taper_transmission_uncertainty(F0, F0_ERR, F1, F1_ERR)
_, sd_mc = taper_transmission_mc(F0, F0_ERR, F1, F1_ERR, 200_000, seed=1)
print(f"tc^2 = {tc2:.5f} +- {sd:.5f} (first order), +- {sd_mc:.5f} (Monte Carlo)")

# the inversion is steep: a rounded tc^2 projects to a visibly different finesse
print(f"projected F1 from tc^2 = {tc2:.5f}: {projected_finesse(F0, tc2):.3f}")
print(f"projected F1 from tc^2 = 0.983:    {projected_finesse(F0, 0.983):.3f}")

inf = infer_mirror_parameters(F0, F1, T_RES)
print(f"r1 r2 = {inf.r1r2:.5f}, t1^2 t2^2 = {inf.t1sq_t2sq:.3e}, per-mirror loss = {inf.loss:.5f}")

model = model_from_inference(inf, (PathSection("fiber", 0.1, 1.0),))
T, R = cavity_response(0.0, model)
print(f"forward model on resonance: T = {T:.4f}, R = {R:.4f}, finesse = {model.finesse:.2f}")
