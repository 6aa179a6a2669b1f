"""
Fabry-Perot resonator formed by two fiber Bragg gratings around a taper.

The round-trip amplitude is rho = r1 r2 tc^2 and the finesse follows

    F = pi sqrt(rho) / (1 - rho).

Finesse measurements before (tc = 1) and after tapering therefore fix the
single-pass taper power transmission tc^2 = rho(F1) / rho(F0).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .constants import C0
from .errors import DomainError, InconsistentInputsError, NonphysicalGainError
from .fbg import FBGSpec, fbg_reflectivity

MIRROR_TOL = 1e-12


@dataclass(frozen=True)
class Mirror:
    """
    Partially transmitting mirror with power loss A = 1 - r^2 - t^2.

    ``r_amp`` and ``t_amp`` are the values at the stop-band center. When
    ``fbg`` is given its peak reflectivity must equal ``r_amp**2`` and the
    reflectivity follows the grating envelope away from the center; the loss
    is held frequency-flat.
    """

    r_amp: float
    t_amp: float
    fbg: Optional[FBGSpec] = None

    def __post_init__(self) -> None:
        if not (0 <= self.r_amp <= 1 and 0 <= self.t_amp <= 1):
            raise DomainError(f"r_amp, t_amp must lie in [0, 1]: {self.r_amp}, {self.t_amp}")
        if self.r_amp**2 + self.t_amp**2 > 1 + MIRROR_TOL:
            raise DomainError("r^2 + t^2 exceeds 1")
        if self.fbg is not None and abs(self.fbg.peak_power_reflectivity - self.r_amp**2) > 1e-9:
            raise DomainError("fbg peak reflectivity must equal r_amp**2")

    @classmethod
    def from_loss(cls, r_amp: float, loss: float = 0.0, fbg: Optional[FBGSpec] = None) -> "Mirror":
        t2 = 1.0 - r_amp**2 - loss
        if t2 < -MIRROR_TOL:
            raise DomainError("r^2 + loss exceeds 1")
        return cls(r_amp, float(np.sqrt(max(t2, 0.0))), fbg)

    @property
    def loss(self) -> float:
        return max(0.0, 1.0 - self.r_amp**2 - self.t_amp**2)

    def reflectivity(self, nu) -> np.ndarray:
        """Power reflectivity at optical frequency ``nu`` [Hz]."""
        nu = np.asarray(nu, dtype=float)
        if self.fbg is None:
            return np.full(nu.shape, self.r_amp**2)
        return np.asarray(fbg_reflectivity(C0 / nu, self.fbg))


@dataclass(frozen=True)
class PathSection:
    """
    Intracavity fiber section.

    Parameters
    ----------
    label : str
    length : float
        Physical length [m].
    n_eff : float
        Effective (phase) index; beta = n_eff * k0.
    area : float, optional
        Effective cross-section referenced to the emitter position [m^2],
        needed only for mode-volume calculations.
    """

    label: str
    length: float
    n_eff: float
    area: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.length > 0:
            raise DomainError(f"section {self.label!r}: length must be positive")
        if not self.n_eff >= 1:
            raise DomainError(f"section {self.label!r}: n_eff must be >= 1")
        if self.area is not None and not self.area > 0:
            raise DomainError(f"section {self.label!r}: area must be positive")


@dataclass(frozen=True)
class CavityModel:
    """
    Two-mirror fiber resonator.

    Attributes
    ----------
    mirror1, mirror2 : Mirror
    sections : tuple of PathSection
    t_c : float
        Single-pass intracavity amplitude transmission.
    birefringent_splitting : float
        Frequency offset of the second polarization comb [Hz].
    background_transmission : float
        Broadband in/outcoupling power transmission applied to all outputs.
    resonance_frequency : float
        Frequency of one mode-a resonance [Hz]; fixes the comb phase.
    """

    mirror1: Mirror
    mirror2: Mirror
    sections: tuple
    t_c: float = 1.0
    birefringent_splitting: float = 0.0
    background_transmission: float = 0.90
    resonance_frequency: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "sections", tuple(self.sections))
        if not self.sections:
            raise DomainError("cavity needs at least one path section")
        if not 0 < self.t_c <= 1:
            raise DomainError(f"t_c must lie in (0, 1], got {self.t_c}")
        if not 0 < self.background_transmission <= 1:
            raise DomainError("background_transmission must lie in (0, 1]")

    @property
    def l_opt(self) -> float:
        return optical_path_length(self.sections)

    @property
    def fsr(self) -> float:
        return free_spectral_range(self.l_opt)

    @property
    def rho(self) -> float:
        return round_trip_amplitude(self.mirror1, self.mirror2, self.t_c)

    @property
    def finesse(self) -> float:
        """Finesse at the stop-band center."""
        return finesse_from_rho(self.rho)


def round_trip_amplitude(m1: Mirror, m2: Mirror, t_c: float) -> float:
    """rho = r1 r2 tc^2; raises NonphysicalGainError for rho >= 1."""
    rho = m1.r_amp * m2.r_amp * t_c**2
    if rho >= 1:
        raise NonphysicalGainError(f"round-trip amplitude {rho} >= 1")
    if rho < 0:
        raise DomainError("negative round-trip amplitude")
    return float(rho)


def finesse_from_rho(rho):
    """F = pi sqrt(rho) / (1 - rho)."""
    r = np.asarray(rho, dtype=float)
    if np.any(r < 0) or np.any(r >= 1):
        raise DomainError(f"rho must lie in [0, 1), got {rho}")
    F = np.pi * np.sqrt(r) / (1.0 - r)
    return float(F) if F.ndim == 0 else F


def rho_from_finesse(F):
    """Invert the finesse relation: rho = ((-pi + sqrt(pi^2 + 4F^2)) / (2F))^2."""
    F = np.asarray(F, dtype=float)
    if np.any(~(F > 0)):
        raise DomainError(f"finesse must be positive, got {F}")
    # sqrt(rho) = 2F / (pi + sqrt(pi^2 + 4F^2)), cancellation-free form
    sq = 2 * F / (np.pi + np.sqrt(np.pi**2 + 4 * F**2))
    rho = sq**2
    return float(rho) if rho.ndim == 0 else rho


def taper_transmission_from_finesses(F0, F1):
    """Single-pass power transmission tc^2 inferred from finesses before/after tapering.

    Evaluates

        tc^2 = F0^2 (2F1^2 + pi^2 - pi sqrt(4F1^2 + pi^2))
               / (F1^2 (2F0^2 + pi^2 - pi sqrt(4F0^2 + pi^2)))
    """
    F0 = np.asarray(F0, dtype=float)
    F1 = np.asarray(F1, dtype=float)
    if np.any(~(F1 > 0)) or np.any(~(F0 > 0)):
        raise DomainError("finesses must be positive")
    if np.any(F1 > F0):
        raise InconsistentInputsError("F1 > F0 implies intracavity gain")
    pi2 = np.pi**2

    def bracket(F):
        # 2F^2 + pi^2 - pi sqrt(4F^2 + pi^2), rationalized to avoid cancellation
        return 4 * F**4 / (2 * F**2 + pi2 + np.pi * np.sqrt(4 * F**2 + pi2))

    tc2 = F0**2 * bracket(F1) / (F1**2 * bracket(F0))
    tc2 = np.minimum(tc2, 1.0)  # F1 <= F0, so anything above 1 is rounding
    return float(tc2) if tc2.ndim == 0 else tc2


def projected_finesse(F0, tc2):
    """Finesse expected after inserting a loss tc^2 into a cavity of finesse F0."""
    tc2 = np.asarray(tc2, dtype=float)
    if np.any(~(tc2 > 0)) or np.any(tc2 > 1):
        raise DomainError("tc^2 must lie in (0, 1]")
    return finesse_from_rho(rho_from_finesse(F0) * tc2)


def optical_path_length(sections: Sequence[PathSection]) -> float:
    """L_opt = sum(n_eff_i * length_i) [m]."""
    if len(sections) == 0:
        raise DomainError("empty section list")
    return float(sum(s.n_eff * s.length for s in sections))


def free_spectral_range(l_opt: float) -> float:
    """c0 / (2 L_opt) [Hz]."""
    if not l_opt > 0:
        raise DomainError("L_opt must be positive")
    return C0 / (2.0 * l_opt)


def path_length_from_fsr(fsr: float) -> float:
    """Optical path length [m] giving the free spectral range ``fsr``."""
    if not fsr > 0:
        raise DomainError("fsr must be positive")
    return C0 / (2.0 * fsr)


def _single_comb(nu, model: CavityModel, comb_offset: float):
    m1, m2 = model.mirror1, model.mirror2
    R1 = m1.reflectivity(nu)
    R2 = m2.reflectivity(nu)
    r1, r2 = np.sqrt(R1), np.sqrt(R2)
    t1sq = np.clip(1.0 - R1 - m1.loss, 0.0, None)
    t2sq = np.clip(1.0 - R2 - m2.loss, 0.0, None)
    tc2 = model.t_c**2
    delta = 2 * np.pi * (nu - model.resonance_frequency - comb_offset) / model.fsr
    e = np.exp(1j * delta)
    den = 1.0 - r1 * r2 * tc2 * e
    T = t1sq * t2sq * tc2 / np.abs(den) ** 2
    # mirror loss placed on the cavity side of mirror 1 keeps R + T <= 1
    r_amp = (-r1 + r2 * tc2 * (R1 + t1sq) * e) / den
    R = np.abs(r_amp) ** 2
    B = model.background_transmission
    return B * T, B * R


def cavity_response(nu, model: CavityModel, polarization: str = "a", angle: float = np.pi / 4):
    """Power transmission and reflection spectra.

    Parameters
    ----------
    nu : float or array_like
        Optical frequency [Hz].
    polarization : {"a", "b", "mixed"}
        Mode a, mode b (offset by ``birefringent_splitting``), or a mixture
        with weights cos^2(angle), sin^2(angle).

    Returns
    -------
    T, R : ndarray
        Fractions of the incident power. On each comb
        T = T_peak / (1 + (2F/pi)^2 sin^2(pi (nu - nu_res) / FSR)).
    """
    nu = np.asarray(nu, dtype=float)
    if polarization == "a":
        T, R = _single_comb(nu, model, 0.0)
    elif polarization == "b":
        T, R = _single_comb(nu, model, model.birefringent_splitting)
    elif polarization == "mixed":
        wa = np.cos(angle) ** 2
        Ta, Ra = _single_comb(nu, model, 0.0)
        Tb, Rb = _single_comb(nu, model, model.birefringent_splitting)
        T, R = wa * Ta + (1 - wa) * Tb, wa * Ra + (1 - wa) * Rb
    else:
        raise DomainError(f"unknown polarization {polarization!r}")
    if T.ndim == 0:
        return float(T), float(R)
    return T, R


@dataclass(frozen=True)
class MirrorInference:
    """Mirror and taper parameters inferred from two finesses and T_res."""

    r1r2: float
    tc2: float
    t1sq_t2sq: float
    loss: float
    r_amp: tuple
    t_sq: tuple
    rho1: float


def lossless_resonant_transmission(F0, F1) -> float:
    """On-resonance transmission if both mirrors were lossless (r^2 + t^2 = 1)."""
    rho0 = rho_from_finesse(F0)
    rho1 = rho_from_finesse(F1)
    tc2 = taper_transmission_from_finesses(F0, F1)
    return (1 - rho0) ** 2 * tc2 / (1 - rho1) ** 2


def infer_mirror_parameters(
    F0: float,
    F1: float,
    T_res: float,
    symmetric: bool = True,
    r_ratio: float = 1.0,
    background_transmission: float = 1.0,
) -> MirrorInference:
    """Infer r1 r2, tc^2, t1^2 t2^2 and per-mirror loss.

    The untapered cavity is taken to be free of intracavity loss, so
    r1 r2 = rho(F0). ``T_res`` is divided by ``background_transmission``
    before inversion. For asymmetric mirrors ``r_ratio = r1 / r2`` must be
    supplied and equal per-mirror losses are assumed.
    """
    if F1 > F0:
        raise InconsistentInputsError("F1 > F0 implies intracavity gain")
    if not 0 < T_res < 1:
        raise DomainError("T_res must lie in (0, 1)")
    T_int = T_res / background_transmission
    rho0 = rho_from_finesse(F0)
    rho1 = rho_from_finesse(F1)
    tc2 = taper_transmission_from_finesses(F0, F1)
    t12 = T_int * (1 - rho1) ** 2 / tc2
    if symmetric or r_ratio == 1.0:
        r = np.sqrt(rho0)
        t_sq = np.sqrt(t12)
        loss = 1.0 - rho0 - t_sq
        r_amps, t_sqs = (r, r), (t_sq, t_sq)
    else:
        r1 = np.sqrt(rho0 * r_ratio)
        r2 = np.sqrt(rho0 / r_ratio)
        if r1 >= 1 or r2 >= 1:
            raise InconsistentInputsError("r_ratio gives a reflectivity >= 1")
        a1, a2 = 1 - r1**2, 1 - r2**2
        # (a1 - A)(a2 - A) = t12, smaller root
        loss = 0.5 * ((a1 + a2) - np.sqrt((a1 - a2) ** 2 + 4 * t12))
        r_amps, t_sqs = (r1, r2), (a1 - loss, a2 - loss)
    if loss < -1e-12:
        raise InconsistentInputsError(
            f"T_res above the lossless prediction {lossless_resonant_transmission(F0, F1):.4f}"
        )
    loss = max(loss, 0.0)
    return MirrorInference(
        r1r2=rho0, tc2=tc2, t1sq_t2sq=t12, loss=float(loss),
        r_amp=tuple(float(x) for x in r_amps), t_sq=tuple(float(x) for x in t_sqs),
        rho1=rho1,
    )


def model_from_inference(
    inf: MirrorInference,
    sections: Sequence[PathSection],
    fbg: Optional[FBGSpec] = None,
    birefringent_splitting: float = 0.0,
    background_transmission: float = 1.0,
    resonance_frequency: float = 0.0,
) -> CavityModel:
    """Build a CavityModel from inferred mirror parameters."""
    mirrors = []
    for r in inf.r_amp:
        spec = None if fbg is None else replace(fbg, peak_power_reflectivity=r**2)
        mirrors.append(Mirror.from_loss(r, inf.loss, spec))
    return CavityModel(
        mirrors[0], mirrors[1], tuple(sections), t_c=float(np.sqrt(inf.tc2)),
        birefringent_splitting=birefringent_splitting,
        background_transmission=background_transmission,
        resonance_frequency=resonance_frequency,
    )


def symmetric_model(
    finesse: float,
    fsr: float,
    tc2: float = 1.0,
    mirror_loss: float = 0.0,
    n_eff: float = 1.0,
    **kwargs,
) -> CavityModel:
    """Cavity with identical frequency-flat mirrors and a given finesse and FSR.

    A single section of index ``n_eff`` carries the required optical path.
    """
    rho = rho_from_finesse(finesse)
    r = np.sqrt(rho / tc2)
    if r >= 1:
        raise NonphysicalGainError("finesse not reachable with this tc^2")
    m = Mirror.from_loss(float(r), mirror_loss)
    length = path_length_from_fsr(fsr) / n_eff
    sec = PathSection("cavity", length, n_eff)
    return CavityModel(m, m, (sec,), t_c=float(np.sqrt(tc2)), **kwargs)


def strain_tune(model: CavityModel, delta_l_opt, nu0: float):
    """First-order resonance shift -nu0 * dL / L_opt [Hz] for a path change dL [m]."""
    return -nu0 * np.asarray(delta_l_opt, dtype=float) / model.l_opt


def strain_for_shift(model: CavityModel, delta_nu: float, nu0: float) -> float:
    """Path change [m] needed for a first-order shift ``delta_nu``."""
    return -delta_nu * model.l_opt / nu0


def tuning_range_in_fsr(delta_nu: float, fsr: float) -> float:
    """Number of free spectral ranges covered by a tuning range."""
    return delta_nu / fsr


def _drho_dF(F):
    rho = rho_from_finesse(F)
    return 2 * np.sqrt(rho) * (1 - rho) ** 2 / (np.pi * (1 + rho))


def taper_transmission_uncertainty(F0, F0_err, F1, F1_err):
    """tc^2 and its 1-sigma from first-order propagation of independent errors."""
    rho0, rho1 = rho_from_finesse(F0), rho_from_finesse(F1)
    tc2 = taper_transmission_from_finesses(F0, F1)
    d0 = -rho1 * _drho_dF(F0) / rho0**2
    d1 = _drho_dF(F1) / rho0
    return tc2, float(np.hypot(d0 * F0_err, d1 * F1_err))


def taper_transmission_mc(F0, F0_err, F1, F1_err, n: int = 100_000, seed=None):
    """Monte Carlo mean and standard deviation of tc^2 for Gaussian finesse errors.

    Draws with F1 > F0 or non-positive finesse are rejected.
    """
    rng = np.random.default_rng(seed)
    f0 = rng.normal(F0, F0_err, n)
    f1 = rng.normal(F1, F1_err, n)
    ok = (f0 > 0) & (f1 > 0) & (f1 <= f0)
    tc2 = rho_from_finesse(f1[ok]) / rho_from_finesse(f0[ok])
    return float(np.mean(tc2)), float(np.std(tc2, ddof=1))
