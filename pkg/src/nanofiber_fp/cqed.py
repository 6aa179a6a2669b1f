"""
Cavity-QED figures of merit of the nanofiber resonator.

Conventions
-----------
* 2*kappa is the cavity photon (energy) decay rate, so
  kappa = pi * FSR / F in angular units (kappa/2pi = FSR / (2F)).
* 2*gamma is the free-space spontaneous emission rate of the emitter.
* The field per photon E0 is fixed by eps0 * int n^2 |E|^2 dV = hbar*omega/2,
  i.e. E0 = sqrt(hbar*omega / (2 eps0 V_eff)).
* V_eff = 1/2 * sum(A_i * L_i); the 1/2 is the longitudinal standing-wave
  average and A_i the effective cross-section referenced to the emitter
  position (the fiber surface at the waist).
* Cooperativity C = 3 eps0 E0^2 F / (hbar beta^3 FSR) for a two-level
  emitter, and g = sqrt(2 kappa gamma C).

All rates are angular frequencies [rad/s] unless the name ends in
``_over_2pi``.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .cavity import PathSection, optical_path_length
from .constants import C0, CS_D2_GAMMA_OVER_2PI, EPS0, HBAR
from .errors import DomainError, IncompleteModelError, RootAmbiguityWarning
from .fibermode import (
    FiberGeometry,
    ModeSolution,
    effective_cross_section,
    group_index,
    solve_he11,
)

TWO_PI = 2 * np.pi
DEFAULT_GAMMA = TWO_PI * CS_D2_GAMMA_OVER_2PI
REGIMES = ("coherent", "fast-cavity", "bad-emitter", "weak")


def _positive(**kw):
    for k, v in kw.items():
        if not np.all(np.asarray(v) > 0):
            raise DomainError(f"{k} must be positive, got {v}")


def kappa(finesse, fsr):
    """Cavity field decay rate kappa = pi * FSR / F [rad/s]."""
    _positive(finesse=finesse, fsr=fsr)
    return np.pi * fsr / finesse


def quality_factor(nu0, finesse, fsr):
    """Q = nu0 * F / FSR = nu0 / FWHM."""
    _positive(nu0=nu0, finesse=finesse, fsr=fsr)
    return nu0 * finesse / fsr


def mode_volume(sections: Sequence[PathSection], wavelength: float):
    """Effective mode volume and its value in units of lambda^3.

    Returns
    -------
    V_eff : float
        1/2 * sum(area_i * length_i) [m^3].
    V_tilde : float
        V_eff / wavelength^3.
    """
    if not sections:
        raise IncompleteModelError("no sections")
    missing = [s.label for s in sections if s.area is None]
    if missing:
        raise IncompleteModelError(f"sections without cross-section: {missing}")
    v = 0.5 * sum(s.area * s.length for s in sections)
    return v, v / wavelength**3


def field_per_photon(v_eff, nu0):
    """E0 = sqrt(hbar * 2 pi nu0 / (2 eps0 V_eff)) [V/m]."""
    _positive(v_eff=v_eff, nu0=nu0)
    return np.sqrt(HBAR * TWO_PI * nu0 / (2 * EPS0 * v_eff))


def cooperativity(e0, beta, finesse, fsr):
    """C = 3 eps0 E0^2 F / (hbar beta^3 FSR), FSR in Hz."""
    _positive(e0=e0, beta=beta, finesse=finesse, fsr=fsr)
    return 3 * EPS0 * e0**2 * finesse / (HBAR * beta**3 * fsr)


def coupling_from_cooperativity(C, kappa_, gamma):
    """g = sqrt(2 kappa gamma C)."""
    _positive(C=C, kappa=kappa_, gamma=gamma)
    return np.sqrt(2 * kappa_ * gamma * C)


def cooperativity_from_coupling(g, kappa_, gamma):
    """C = g^2 / (2 kappa gamma)."""
    _positive(g=g, kappa=kappa_, gamma=gamma)
    return g**2 / (2 * kappa_ * gamma)


def classify_regime(g, kappa_, gamma, dominance_factor: float = 2.0) -> str:
    """Label the dominant rate.

    coherent: g >= f * max(kappa, gamma); fast-cavity: kappa >= f * max(g, gamma);
    bad-emitter: gamma >= f * max(g, kappa); otherwise weak (intermediate).
    """
    _positive(g=g, kappa=kappa_, gamma=gamma, dominance_factor=dominance_factor)
    f = dominance_factor
    if g >= f * max(kappa_, gamma):
        return "coherent"
    if kappa_ >= f * max(g, gamma):
        return "fast-cavity"
    if gamma >= f * max(g, kappa_):
        return "bad-emitter"
    return "weak"


@dataclass(frozen=True)
class CqedReport:
    """
    Figures of merit of one cavity configuration.

    Rates ``kappa``, ``gamma`` and ``g`` are angular [rad/s].
    """

    finesse: float
    fsr: float
    nu0: float
    l_opt: float
    beta: float
    kappa: float
    gamma: float
    Q: float
    V_eff: float
    V_tilde: float
    E0_surface: float
    C: float
    g: float
    regime: str
    dipole_factor: float = 1.0
    dominance_factor: float = 2.0

    @property
    def wavelength(self) -> float:
        return C0 / self.nu0

    @property
    def Q_over_V(self) -> float:
        return self.Q / self.V_tilde

    @property
    def g_over_kappa(self) -> float:
        return self.g / self.kappa

    @property
    def g_over_gamma(self) -> float:
        return self.g / self.gamma

    def rates_over_2pi(self) -> dict:
        return {k: getattr(self, k) / TWO_PI for k in ("g", "kappa", "gamma")}

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(
            Q_over_V=self.Q_over_V,
            g_over_2pi=self.g / TWO_PI,
            kappa_over_2pi=self.kappa / TWO_PI,
            gamma_over_2pi=self.gamma / TWO_PI,
        )
        return d


def cqed_report(
    finesse: float,
    fsr: float,
    nu0: float,
    beta: float,
    v_eff: float,
    gamma: float = DEFAULT_GAMMA,
    l_opt: Optional[float] = None,
    dipole_factor: float = 1.0,
    dominance_factor: float = 2.0,
) -> CqedReport:
    """Assemble the figure-of-merit chain from cavity and mode quantities.

    ``dipole_factor`` scales the two-level cooperativity to a specific
    transition (1 = ideal two-level emitter); it multiplies C and g^2.
    """
    _positive(dipole_factor=dipole_factor)
    k = kappa(finesse, fsr)
    e0 = field_per_photon(v_eff, nu0)
    C = dipole_factor * cooperativity(e0, beta, finesse, fsr)
    g = coupling_from_cooperativity(C, k, gamma)
    lam = C0 / nu0
    return CqedReport(
        finesse=float(finesse), fsr=float(fsr), nu0=float(nu0),
        l_opt=float(C0 / (2 * fsr) if l_opt is None else l_opt),
        beta=float(beta), kappa=float(k), gamma=float(gamma),
        Q=float(quality_factor(nu0, finesse, fsr)),
        V_eff=float(v_eff), V_tilde=float(v_eff / lam**3),
        E0_surface=float(e0), C=float(C), g=float(g),
        regime=classify_regime(g, k, gamma, dominance_factor),
        dipole_factor=float(dipole_factor), dominance_factor=float(dominance_factor),
    )


@dataclass(frozen=True)
class CqedInputs:
    """
    Inputs of the figure-of-merit chain.

    ``sections`` must carry effective cross-sections referenced to the
    emitter position; ``mode`` supplies beta at the emitter.
    """

    finesse: float
    fsr: float
    nu0: float
    mode: ModeSolution
    sections: tuple
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self) -> None:
        _positive(finesse=self.finesse, fsr=self.fsr, nu0=self.nu0, gamma=self.gamma)
        object.__setattr__(self, "sections", tuple(self.sections))


def report_from_inputs(inp: CqedInputs, dipole_factor: float = 1.0, dominance_factor: float = 2.0) -> CqedReport:
    v_eff, _ = mode_volume(inp.sections, C0 / inp.nu0)
    return cqed_report(
        inp.finesse, inp.fsr, inp.nu0, inp.mode.beta, v_eff, inp.gamma,
        l_opt=optical_path_length(inp.sections),
        dipole_factor=dipole_factor, dominance_factor=dominance_factor,
    )


def scaling_with_length(baseline: CqedReport, length: float) -> CqedReport:
    """Rescale a report to optical path length ``length``.

    Taper loss is length-independent, so F stays fixed: kappa ~ 1/L,
    g ~ 1/sqrt(L), V_eff ~ L, gamma and C unchanged.
    """
    _positive(length=length)
    ratio = baseline.l_opt / length
    k = baseline.kappa * ratio
    g = baseline.g * np.sqrt(ratio)
    v = baseline.V_eff / ratio
    return replace(
        baseline,
        l_opt=float(length), fsr=baseline.fsr * ratio, kappa=float(k), g=float(g),
        Q=baseline.Q / ratio, V_eff=float(v), V_tilde=baseline.V_tilde / ratio,
        E0_surface=baseline.E0_surface * np.sqrt(ratio),
        regime=classify_regime(g, k, baseline.gamma, baseline.dominance_factor),
    )


DESIGN_COLUMNS = ("l_opt", "g_over_2pi", "kappa_over_2pi", "g_over_kappa", "g_over_gamma", "C", "regime")


def design_scan(baseline: CqedReport, lengths, target: Optional[str] = None) -> list:
    """Tabulate the scaled figures of merit over cavity lengths.

    Rows are sorted by length. With ``target`` set to a regime label each
    row gains a ``meets_target`` flag.
    """
    if target is not None and target not in REGIMES:
        raise DomainError(f"target must be one of {REGIMES}")
    rows = []
    for L in sorted(float(x) for x in np.atleast_1d(lengths)):
        r = scaling_with_length(baseline, L)
        row = {
            "l_opt": L,
            "g_over_2pi": r.g / TWO_PI,
            "kappa_over_2pi": r.kappa / TWO_PI,
            "g_over_kappa": r.g_over_kappa,
            "g_over_gamma": r.g_over_gamma,
            "C": r.C,
            "regime": r.regime,
        }
        if target is not None:
            row["meets_target"] = r.regime == target
        rows.append(row)
    return rows


def regime_boundaries(baseline: CqedReport) -> dict:
    """Lengths where g = f*kappa and g = f*gamma under the scaling laws."""
    f = baseline.dominance_factor
    L0 = baseline.l_opt
    return {
        "g_eq_f_kappa": L0 * (f * baseline.kappa / baseline.g) ** 2,
        "g_eq_f_gamma": L0 * (baseline.g / (f * baseline.gamma)) ** 2,
        "kappa_eq_f_g": L0 * (baseline.kappa / (f * baseline.g)) ** 2,
    }


def surface_referenced_sections(
    waist: ModeSolution,
    waist_length: float,
    others: Sequence[tuple],
) -> tuple:
    """Sections whose cross-sections are referenced to the waist surface field.

    The guided power is conserved along the fiber, so the energy per unit
    length of section i scales with its group index. Referenced to the waist
    surface field, a section of group index n_g,i has area
    A_waist * n_g,i / n_g,waist.

    Parameters
    ----------
    others : sequence of (label, length, n_eff, n_group)
    """
    a_w = effective_cross_section(waist, "surface")
    ng_w = group_index(waist.geometry)
    secs = [PathSection("waist", waist_length, waist.n_eff, a_w)]
    for label, length, n_eff, n_g in others:
        secs.append(PathSection(label, length, n_eff, a_w * n_g / ng_w))
    return tuple(secs)


# Taper profile is unpublished; plausible split of the remaining path
# (fiber index 1.4525 at 852 nm, group index 1.4676) so that L_opt = 10.12 cm.
UNTAPERED_N_EFF = 1.4525
UNTAPERED_N_GROUP = 1.4676


def default_sections(
    waist_diameter: float = 500e-9,
    wavelength: float = 852.53e-9,
    waist_length: float = 5e-3,
    l_opt: float = C0 / (2 * 1.48084e9),
    taper_fraction: float = 0.6,
    taper_n_eff: float = 1.40,
    taper_n_group: float = 1.47,
) -> tuple:
    """Default section table: waist, two tapers and untapered fiber.

    The tapers share ``taper_fraction`` of the non-waist optical path and are
    described by average effective and group indices; the untapered fiber
    fills the remainder so that the total optical path equals ``l_opt``.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RootAmbiguityWarning)
        waist = solve_he11(FiberGeometry.silica(waist_diameter, wavelength))
    rest = l_opt - waist.n_eff * waist_length
    if rest <= 0:
        raise DomainError("waist alone exceeds the optical path length")
    taper_opt = taper_fraction * rest
    fiber_opt = rest - taper_opt
    others = [
        ("taper-1", 0.5 * taper_opt / taper_n_eff, taper_n_eff, taper_n_group),
        ("taper-2", 0.5 * taper_opt / taper_n_eff, taper_n_eff, taper_n_group),
        ("untapered", fiber_opt / UNTAPERED_N_EFF, UNTAPERED_N_EFF, UNTAPERED_N_GROUP),
    ]
    return surface_referenced_sections(waist, waist_length, others)
