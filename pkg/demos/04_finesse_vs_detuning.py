"""Finesse across the Bragg reflection band.

The mirrors are Gaussian-apodized fiber Bragg gratings, so the finesse is
highest at the Bragg wavelength and falls off with detuning. Fitting every
FSR of a wide synthetic scan traces that envelope.
"""

from __future__ import annotations

from nanofiber_fp.cavity import PathSection, infer_mirror_parameters, model_from_inference, path_length_from_fsr
from nanofiber_fp.constants import C0, CS_D2_FREQUENCY
from nanofiber_fp.fbg import FBGSpec
from nanofiber_fp.spectra import finesse_vs_detuning, synth_spectrum

FSR = 1.48084e9
N_FSR = 20

inf = infer_mirror_parameters(158.0, 85.6, 0.11)
fbg = FBGSpec(C0 / CS_D2_FREQUENCY, 0.2e-9, inf.r_amp[0] ** 2)
model = model_from_inference(
    inf, (PathSection("fiber", path_length_from_fsr(FSR), 1.0),), fbg=fbg,
    resonance_frequency=CS_D2_FREQUENCY,
)
s = synth_spectrum(
    model, CS_D2_FREQUENCY - (N_FSR + 0.5) * FSR, CS_D2_FREQUENCY + (N_FSR + 0.5) * FSR,
    (2 * N_FSR + 1) * 1000, 0.002, 11,
)

print(" detuning [pm]   finesse")
for det, fit in finesse_vs_detuning(s, unit="nm"):
    print(f"{det * 1e3:12.2f}   {fit.finesse:7.2f} +- {fit.finesse_err:.2f}")
