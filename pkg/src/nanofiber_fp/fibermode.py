"""
Fundamental HE11 mode of a vacuum-clad step-index silica nanofiber.

The exact vectorial two-layer dispersion relation for azimuthal order l = 1
is solved in the transverse core parameter u = a*sqrt(k0^2 n1^2 - beta^2),
with w = a*sqrt(beta^2 - k0^2 n2^2) and u^2 + w^2 = V^2:

    (J'/(uJ) + K'/(wK)) * (n1^2 J'/(uJ) + n2^2 K'/(wK))
        = (1/u^2 + 1/w^2) * (n1^2/u^2 + n2^2/w^2)

Field expressions follow F. Le Kien et al., Opt. Commun. 242, 445 (2004);
the silica index uses the Malitson three-term Sellmeier fit,
I. H. Malitson, J. Opt. Soc. Am. 55, 1205 (1965).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate, optimize
from scipy.special import jv, jvp, kv, kvp, jn_zeros

from .errors import (
    AmbiguousRootError,
    DomainError,
    NoGuidedModeError,
    RootAmbiguityWarning,
)

# Malitson (1965) fused silica, wavelengths in micrometres.
SELLMEIER_B = (0.6961663, 0.4079426, 0.8974794)
SELLMEIER_C = (0.0684043**2, 0.1162414**2, 9.896161**2)
SELLMEIER_WINDOW = (0.3e-6, 2.0e-6)

# HE11 always has u below the first zero of J0.
J0_FIRST_ZERO = float(jn_zeros(0, 1)[0])

N_BRACKET_INTERVALS = 2000
BRACKET_MARGIN = 1e-6


def refractive_index_silica(wavelength):
    """Fused-silica refractive index from the three-term Sellmeier relation.

    Parameters
    ----------
    wavelength : float or array_like
        Vacuum wavelength [m], inside 0.3-2 um.

    Returns
    -------
    float or ndarray
        Refractive index.
    """
    lam = np.asarray(wavelength, dtype=float)
    lo, hi = SELLMEIER_WINDOW
    if np.any(~np.isfinite(lam)) or np.any(lam < lo) or np.any(lam > hi):
        raise DomainError(
            f"wavelength outside Sellmeier window [{lo:g}, {hi:g}] m: {wavelength}"
        )
    x = (lam * 1e6) ** 2
    n2 = 1.0 + sum(b * x / (x - c) for b, c in zip(SELLMEIER_B, SELLMEIER_C))
    n = np.sqrt(n2)
    return float(n) if n.ndim == 0 else n


@dataclass(frozen=True)
class FiberGeometry:
    """
    Nanofiber cross-section.

    Parameters
    ----------
    diameter : float
        Fiber diameter [m].
    core_index : float
        Refractive index of the silica core.
    clad_index : float
        Refractive index of the surrounding medium (vacuum = 1).
    wavelength : float
        Vacuum wavelength [m].
    """

    diameter: float
    core_index: float
    clad_index: float = 1.0
    wavelength: float = 852.53e-9

    def __post_init__(self) -> None:
        if not self.diameter > 0:
            raise DomainError(f"diameter must be positive, got {self.diameter}")
        if not self.wavelength > 0:
            raise DomainError(f"wavelength must be positive, got {self.wavelength}")
        if not self.clad_index >= 1.0:
            raise DomainError(f"clad_index must be >= 1, got {self.clad_index}")
        if not self.core_index > self.clad_index:
            raise DomainError(
                f"core_index ({self.core_index}) must exceed clad_index ({self.clad_index})"
            )

    @classmethod
    def silica(cls, diameter: float, wavelength: float, clad_index: float = 1.0):
        """Silica fiber with the core index taken from the Sellmeier fit."""
        return cls(diameter, refractive_index_silica(wavelength), clad_index, wavelength)

    @property
    def radius(self) -> float:
        return 0.5 * self.diameter

    @property
    def k0(self) -> float:
        return 2.0 * np.pi / self.wavelength


def v_number(g: FiberGeometry) -> float:
    """Normalized frequency V = (pi d / lambda) sqrt(n1^2 - n2^2)."""
    return float(np.pi * g.diameter / g.wavelength * np.sqrt(g.core_index**2 - g.clad_index**2))


def is_single_mode(g: FiberGeometry) -> bool:
    """True when V is below the TE01/TM01/HE21 cutoff (first zero of J0)."""
    return v_number(g) < J0_FIRST_ZERO


def _he11_terms(u, V, n1, n2):
    """Return (lhs, rhs) of the l = 1 eigenvalue equation in ratio form."""
    u = np.asarray(u, dtype=float)
    w = np.sqrt(V * V - u * u)
    a = jvp(1, u) / (u * jv(1, u))
    b = kvp(1, w) / (w * kv(1, w))
    lhs = (a + b) * (n1**2 * a + n2**2 * b)
    rhs = (1.0 / u**2 + 1.0 / w**2) * (n1**2 / u**2 + n2**2 / w**2)
    return lhs, rhs


def characteristic_function(u, V, n1, n2=1.0):
    """Pole-free form of the l = 1 eigenvalue equation.

    The ratio form is multiplied by (u J1(u) w K1(w))^2, which removes the
    poles at zeros of J1 without introducing new sign changes.
    """
    u = np.asarray(u, dtype=float)
    w = np.sqrt(V * V - u * u)
    J, Jp, K, Kp = jv(1, u), jvp(1, u), kv(1, w), kvp(1, w)
    p = w * K * Jp
    q = u * J * Kp
    uw = u * J * w * K
    return (p + q) * (n1**2 * p + n2**2 * q) - uw**2 * (
        (1.0 / u**2 + 1.0 / w**2) * (n1**2 / u**2 + n2**2 / w**2)
    )


@dataclass(frozen=True)
class ModeSolution:
    """
    Solved HE11 mode.

    Attributes
    ----------
    beta : float
        Propagation constant [rad/m].
    n_eff : float
        Effective index beta / k0.
    geometry : FiberGeometry
    u, w : float
        Core and cladding transverse parameters (u^2 + w^2 = V^2).
    s : float
        Hybrid-mode mixing parameter of the field expressions.
    other_roots : tuple of float
        Effective indices of further l = 1 guided modes, if any.
    """

    beta: float
    n_eff: float
    geometry: FiberGeometry
    u: float
    w: float
    s: float
    other_roots: tuple = field(default=())

    @property
    def profile_params(self) -> dict:
        return {"u": self.u, "w": self.w, "s": self.s, "beta": self.beta}

    @property
    def residual(self) -> float:
        """Normalized residual |lhs - rhs| / |rhs| of the eigenvalue equation."""
        g = self.geometry
        lhs, rhs = _he11_terms(self.u, v_number(g), g.core_index, g.clad_index)
        return float(abs(lhs - rhs) / abs(rhs))

    @cached_property
    def _max_location(self):
        return _locate_maximum(self)

    @property
    def max_intensity(self) -> float:
        """Maximum of the (amplitude = 1) intensity over the cross-section."""
        return self._max_location[0]

    @property
    def surface_intensity(self) -> float:
        """Intensity just outside the surface, at the orientation-maximal angle."""
        er, ep, ez = field_components(self, self.geometry.radius * (1 + 1e-12))
        return float(max(er**2 + ez**2, ep**2))

    @property
    def surface_ratio(self) -> float:
        """Surface intensity divided by the cross-section maximum."""
        return self.surface_intensity / self.max_intensity


def _scan_roots(V, n1, n2, u_lo, u_hi, n_intervals):
    us = np.linspace(u_lo, u_hi, n_intervals + 1)
    f = characteristic_function(us, V, n1, n2)
    idx = np.nonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0)[0]
    roots = []
    for i in idx:
        roots.append(
            optimize.brentq(
                characteristic_function, us[i], us[i + 1], args=(V, n1, n2),
                xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500,
            )
        )
    return roots


def solve_he11(g: FiberGeometry) -> ModeSolution:
    """Solve the HE11 propagation constant of a step-index fiber.

    The bracket spans n_eff in (n2 + 1e-6, n1 - 1e-6), mapped onto u and
    clipped to u < j_{0,1}, and is scanned with 2000 intervals before
    Brent refinement.

    Raises
    ------
    NoGuidedModeError
        If no sign change is found.
    AmbiguousRootError
        If more than one candidate root lies in the HE11 window.
    """
    V = v_number(g)
    if not V > 0:
        raise DomainError("V must be positive")
    n1, n2, k0, a = g.core_index, g.clad_index, g.k0, g.radius
    ka = k0 * a

    def u_of(n):
        return ka * np.sqrt(max(n1**2 - n**2, 0.0))

    u_lo = u_of(n1 - BRACKET_MARGIN)
    u_hi = min(u_of(n2 + BRACKET_MARGIN), J0_FIRST_ZERO * (1 - 1e-12), V * (1 - 1e-15))
    if not u_hi > u_lo:
        raise NoGuidedModeError(f"empty search bracket for V = {V:.4g}")
    roots = _scan_roots(V, n1, n2, u_lo, u_hi, N_BRACKET_INTERVALS)
    if not roots:
        raise NoGuidedModeError(
            f"no HE11 root with n_eff in ({n2 + BRACKET_MARGIN}, {n1 - BRACKET_MARGIN}) at V = {V:.4g}"
        )
    n_of = lambda u: float(np.sqrt(n1**2 - (u / ka) ** 2))
    if len(roots) > 1:
        raise AmbiguousRootError(
            f"{len(roots)} HE11 candidates at V = {V:.4g}", [n_of(u) for u in roots]
        )
    u = roots[0]
    w = float(np.sqrt(V * V - u * u))
    n_eff = n_of(u)

    others = ()
    if V > J0_FIRST_ZERO:
        # higher l = 1 modes (EH11, HE12, ...) for information only
        extra = _scan_roots(V, n1, n2, J0_FIRST_ZERO, V * (1 - 1e-12), 20 * N_BRACKET_INTERVALS)
        others = tuple(n_of(x) for x in extra)
        if others:
            warnings.warn(
                f"fiber supports {len(others)} further l=1 mode(s); returning HE11",
                RootAmbiguityWarning,
                stacklevel=2,
            )

    jr = jvp(1, u) / (u * jv(1, u))
    kr = kvp(1, w) / (w * kv(1, w))
    s = (1.0 / u**2 + 1.0 / w**2) / (jr + kr)
    return ModeSolution(
        beta=n_eff * k0, n_eff=n_eff, geometry=g, u=float(u), w=w, s=float(s),
        other_roots=others,
    )


def field_components(m: ModeSolution, r, amplitude: float = 1.0):
    """Radial amplitude functions (e_r, e_phi, e_z) of the HE11 mode.

    For the quasi-linearly polarized mode the intensity at (r, phi) is
    e_r^2 cos^2(phi) + e_phi^2 sin^2(phi) + e_z^2 cos^2(phi); e_z is in
    quadrature with the transverse part, so squares add.
    """
    r = np.asarray(r, dtype=float)
    a = m.geometry.radius
    u, w, s, beta = m.u, m.w, m.s, m.beta
    h, q = u / a, w / a
    inside = r < a
    er = np.empty_like(r)
    ep = np.empty_like(r)
    ez = np.empty_like(r)

    ri = r[inside]
    er[inside] = beta / (2 * h) * ((1 - s) * jv(0, h * ri) - (1 + s) * jv(2, h * ri))
    ep[inside] = beta / (2 * h) * ((1 - s) * jv(0, h * ri) + (1 + s) * jv(2, h * ri))
    ez[inside] = jv(1, h * ri)

    ro = r[~inside]
    c = jv(1, u) / kv(1, w)
    er[~inside] = c * beta / (2 * q) * ((1 - s) * kv(0, q * ro) + (1 + s) * kv(2, q * ro))
    ep[~inside] = c * beta / (2 * q) * ((1 - s) * kv(0, q * ro) - (1 + s) * kv(2, q * ro))
    ez[~inside] = c * kv(1, q * ro)

    out = (er * amplitude, ep * amplitude, ez * amplitude)
    if r.ndim == 0:
        return tuple(float(x) for x in out)
    return out


def _intensity(m, r, phi, amplitude=1.0):
    er, ep, ez = field_components(m, r, amplitude)
    c2 = np.cos(phi) ** 2
    return (er**2 + ez**2) * c2 + ep**2 * (1 - c2)


def _locate_maximum(m: ModeSolution):
    """Cross-section maximum of the intensity (over r and phi)."""
    a = m.geometry.radius

    def best(r):
        er, ep, ez = field_components(m, r)
        return np.maximum(er**2 + ez**2, ep**2)

    # intensity peaks either on axis, inside the core, or at the outer surface
    rs = np.linspace(0.0, a * (1 - 1e-12), 2001)
    vals = best(rs)
    i = int(np.argmax(vals))
    r_best, v_best = rs[i], vals[i]
    if 0 < i < len(rs) - 1:
        res = optimize.minimize_scalar(
            lambda x: -float(best(np.array([x]))[0]),
            bounds=(rs[i - 1], rs[i + 1]), method="bounded",
            options={"xatol": a * 1e-10},
        )
        if -res.fun > v_best:
            r_best, v_best = res.x, -res.fun
    v_out = float(best(np.array([a * (1 + 1e-12)]))[0])
    if v_out > v_best:
        r_best, v_best = a, v_out
    return float(v_best), float(r_best)


@dataclass(frozen=True)
class FieldSample:
    """Relative intensity |E|^2 / max at (r, phi)."""

    r: np.ndarray
    phi: np.ndarray
    intensity_rel: np.ndarray


def field_intensity(m: ModeSolution, r, phi=0.0, average: bool = False) -> FieldSample:
    """Intensity of the quasi-linearly polarized HE11 mode.

    Normalized so the cross-section maximum is 1. With ``average=True`` the
    azimuthal average (e_r^2 + e_phi^2 + e_z^2) / 2 is returned instead, which
    does not depend on ``phi``.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("r must be non-negative")
    phi = np.broadcast_to(np.asarray(phi, dtype=float), r.shape) if r.ndim else np.asarray(phi, dtype=float)
    if average:
        er, ep, ez = field_components(m, r)
        val = 0.5 * (np.asarray(er) ** 2 + np.asarray(ep) ** 2 + np.asarray(ez) ** 2)
        val = np.broadcast_to(val, np.broadcast(val, phi).shape)
    else:
        val = _intensity(m, r, phi)
    return FieldSample(r=r, phi=phi, intensity_rel=np.asarray(val) / m.max_intensity)


def energy_integral(m: ModeSolution, amplitude: float = 1.0, cutoff_decay_lengths: float = 40.0) -> float:
    """Integral of n^2 |E|^2 over the transverse plane [m^2 * field^2].

    The azimuthal integral of cos^2 and sin^2 is pi each, so only a radial
    quadrature remains. The outer integral is truncated at
    ``cutoff_decay_lengths`` intensity decay lengths 1/(2q) beyond the surface.
    """
    g = m.geometry
    a = g.radius
    q = m.w / a

    def radial(r):
        er, ep, ez = field_components(m, r, amplitude)
        return np.pi * (er**2 + ep**2 + ez**2) * r

    opts = dict(epsabs=0.0, epsrel=1e-12, limit=200)
    core, _ = integrate.quad(radial, 0.0, a * (1 - 1e-15), **opts)
    r_max = a + cutoff_decay_lengths / (2 * q)
    # split the evanescent tail so quad resolves the fast near-surface decay
    knots = a + np.array([0.0, 1.0, 4.0, 12.0]) / (2 * q)
    knots = np.append(knots[knots < r_max], r_max)
    clad = sum(integrate.quad(radial, x0, x1, **opts)[0] for x0, x1 in zip(knots[:-1], knots[1:]))
    total = g.core_index**2 * core + g.clad_index**2 * clad
    if not np.isfinite(total) or total <= 0:
        raise FloatingPointError("energy integral did not converge")
    return float(total)


def effective_cross_section(
    m: ModeSolution,
    reference: str = "surface",
    amplitude: float = 1.0,
    cutoff_decay_lengths: float = 40.0,
) -> float:
    """Effective area  int n^2 |E|^2 dA / |E(r_ref)|^2  [m^2].

    Parameters
    ----------
    reference : {"surface", "surface-average", "maximum"}
        "surface" uses the orientation-maximal point just outside the fiber,
        "surface-average" the azimuthally averaged surface intensity and
        "maximum" the cross-section maximum.
    """
    num = energy_integral(m, amplitude, cutoff_decay_lengths)
    a = m.geometry.radius
    if reference == "surface":
        ref = m.surface_intensity
    elif reference == "surface-average":
        er, ep, ez = field_components(m, a * (1 + 1e-12))
        ref = 0.5 * (er**2 + ep**2 + ez**2)
    elif reference == "maximum":
        ref = m.max_intensity
    else:
        raise DomainError(f"unknown reference {reference!r}")
    return num / (ref * amplitude**2)


def group_index(g: FiberGeometry, material_dispersion: bool = True, rel_step: float = 1e-4) -> float:
    """Group index n_g = n_eff - lambda dn_eff/dlambda by central differences.

    With ``material_dispersion`` the core index follows the silica Sellmeier
    relation at the shifted wavelengths; otherwise it is held fixed.
    """
    lam = g.wavelength
    dl = lam * rel_step

    def neff(wl):
        n1 = refractive_index_silica(wl) if material_dispersion else g.core_index
        return solve_he11(FiberGeometry(g.diameter, n1, g.clad_index, wl)).n_eff

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RootAmbiguityWarning)
        n0 = neff(lam)
        slope = (neff(lam + dl) - neff(lam - dl)) / (2 * dl)
    return float(n0 - lam * slope)
