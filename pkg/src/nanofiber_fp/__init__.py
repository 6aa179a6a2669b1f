"""Nanofiber Fabry-Perot microresonators with fiber-Bragg-grating mirrors.

Modules: :mod:`fibermode` (HE11 nanofiber mode), :mod:`fbg` and
:mod:`cavity` (resonator model and loss inversion), :mod:`spectra`
(synthetic data, calibration, Airy fits), :mod:`cqed` (figures of merit)
and :mod:`cli`.
"""

__version__ = "0.1.0"

from .cavity import (
    CavityModel,
    Mirror,
    PathSection,
    cavity_response,
    finesse_from_rho,
    free_spectral_range,
    infer_mirror_parameters,
    optical_path_length,
    projected_finesse,
    rho_from_finesse,
    round_trip_amplitude,
    strain_tune,
    taper_transmission_from_finesses,
)
from .cqed import CqedInputs, CqedReport, cqed_report, design_scan, scaling_with_length
from .fbg import FBGSpec, fbg_reflectivity
from .fibermode import (
    FiberGeometry,
    ModeSolution,
    effective_cross_section,
    field_intensity,
    refractive_index_silica,
    solve_he11,
    v_number,
)
from .spectra import AiryFit, Spectrum, calibrate_axis, find_resonances, fit_airy, synth_spectrum

__all__ = [
    "CavityModel",
    "Mirror",
    "PathSection",
    "cavity_response",
    "finesse_from_rho",
    "free_spectral_range",
    "infer_mirror_parameters",
    "optical_path_length",
    "projected_finesse",
    "rho_from_finesse",
    "round_trip_amplitude",
    "strain_tune",
    "taper_transmission_from_finesses",
    "CqedInputs",
    "CqedReport",
    "cqed_report",
    "design_scan",
    "scaling_with_length",
    "FBGSpec",
    "fbg_reflectivity",
    "FiberGeometry",
    "ModeSolution",
    "effective_cross_section",
    "field_intensity",
    "refractive_index_silica",
    "solve_he11",
    "v_number",
    "AiryFit",
    "Spectrum",
    "calibrate_axis",
    "find_resonances",
    "fit_airy",
    "synth_spectrum",
]
