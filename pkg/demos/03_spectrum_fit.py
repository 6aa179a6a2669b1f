"""Synthetic laser scan, axis calibration and Airy fit.

A raw scan carries the cavity transmission together with a reference
etalon and a Doppler-broadened Cs D2 absorption dip. The etalon fringes
linearize the sweep, the absorption dip sets the absolute frequency and
the calibrated spectrum is fitted with an Airy function.
"""

from __future__ import annotations

from nanofiber_fp.cavity import PathSection, infer_mirror_parameters, model_from_inference, path_length_from_fsr
from nanofiber_fp.constants import CS_D2_FREQUENCY
from nanofiber_fp.spectra import calibrate_axis, fit_airy, synth_raw_scan

FSR = 1.48084e9
ETALON_FSR = 250e6

inf = infer_mirror_parameters(158.0, 85.56, 0.11)
model = model_from_inference(
    inf, (PathSection("fiber", path_length_from_fsr(FSR), 1.0),), resonance_frequency=CS_D2_FREQUENCY
)

raw, nu_true = synth_raw_scan(
    model, CS_D2_FREQUENCY - 3e9, CS_D2_FREQUENCY + 3e9, 12_000, ETALON_FSR,
    distortion=0.04, sigma=0.002, seed=3,
)
cal, spec = calibrate_axis(raw, ETALON_FSR)
err = cal.mapping(raw.axis) - nu_true
print(f"calibration: {len(cal.fringe_positions)} fringes, max axis error {abs(err).max() / 1e6:.2f} MHz")

fit = fit_airy(spec, (CS_D2_FREQUENCY + 0.5 * FSR, 2 * FSR))
print(f"finesse = {fit.finesse:.2f} +- {fit.finesse_err:.2f}")
print(f"FSR     = {fit.fsr / 1e9:.5f} GHz +- {fit.fsr_err / 1e3:.1f} kHz")
print(f"nu0 - Cs D2 = {(fit.nu0 - CS_D2_FREQUENCY) / 1e3:.0f} +- {fit.nu0_err / 1e3:.0f} kHz")
print(f"residual rms = {fit.residual_rms:.2e} (multiplicative noise, so mostly set by the dark wings)")
