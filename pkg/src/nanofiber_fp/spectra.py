"""
Synthetic measurement traces, frequency-axis calibration and Airy fits.

Raw laser scans are linearized with the fringes of a length-stabilized
etalon (equal spacing in frequency) and anchored to an absolute reference
line. Resonances are fitted with

    y(nu) = offset + T_peak / (1 + (2F/pi)^2 sin^2(pi (nu - nu0) / FSR))

(or ``offset - depth * Airy`` for reflection dips).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import optimize, signal
from scipy.interpolate import PchipInterpolator

from .cavity import CavityModel, cavity_response
from .constants import C0, CS_D2_FREQUENCY
from .errors import (
    BoundaryWarning,
    DomainError,
    FitFailureError,
    InsufficientCalibrationError,
    ScanDirectionError,
)

CHANNELS = ("transmission", "reflection", "etalon", "reference")
POWER_RANGE = (0.0, 1.5)


@dataclass
class Spectrum:
    """
    Frequency (or raw-sample) axis with named power channels.

    ``metadata`` keys: ``calibrated`` (bool), ``source`` (str) and
    ``wavelength_anchor`` (m, optional).
    """

    axis: np.ndarray
    channels: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.axis = np.asarray(self.axis, dtype=float)
        self.channels = {k: np.asarray(v, dtype=float) for k, v in self.channels.items()}
        self.metadata = {"calibrated": False, "source": "", **self.metadata}
        n = self.axis.shape[0]
        for name, arr in self.channels.items():
            if arr.shape != (n,):
                raise DomainError(f"channel {name!r} has shape {arr.shape}, axis has {n}")
            lo, hi = POWER_RANGE
            if np.any(arr < lo) or np.any(arr > hi):
                raise DomainError(f"channel {name!r} leaves the power range [{lo}, {hi}]")
        if self.calibrated and np.any(np.diff(self.axis) <= 0):
            raise DomainError("calibrated axis must be strictly increasing")

    @property
    def calibrated(self) -> bool:
        return bool(self.metadata.get("calibrated", False))

    def __len__(self) -> int:
        return self.axis.shape[0]

    def window(self, center: float, span: float) -> "Spectrum":
        """Sub-spectrum with |axis - center| <= span / 2."""
        sel = np.abs(self.axis - center) <= 0.5 * span
        return Spectrum(
            self.axis[sel], {k: v[sel] for k, v in self.channels.items()}, dict(self.metadata)
        )


def _noisy(values, sigma, rng):
    if sigma == 0:
        return values
    return values * (1.0 + sigma * rng.standard_normal(values.shape))


def synth_spectrum(
    model: CavityModel,
    nu_start: float,
    nu_stop: float,
    n_points: int,
    sigma: float = 0.0,
    seed: Optional[int] = None,
    polarization: str = "a",
    angle: float = np.pi / 4,
) -> Spectrum:
    """Transmission and reflection traces of ``model`` with multiplicative noise.

    Each call draws from its own generator seeded with ``seed``.
    """
    if not nu_start < nu_stop:
        raise DomainError("nu_start must be below nu_stop")
    if n_points < 2:
        raise DomainError("need at least 2 points")
    nu = np.linspace(nu_start, nu_stop, int(n_points))
    T, R = cavity_response(nu, model, polarization, angle)
    rng = np.random.default_rng(seed)
    T = np.clip(_noisy(T, sigma, rng), *POWER_RANGE)
    R = np.clip(_noisy(R, sigma, rng), *POWER_RANGE)
    meta = {
        "calibrated": True,
        "source": f"synth(seed={seed}, sigma={sigma})",
        "wavelength_anchor": C0 / (0.5 * (nu_start + nu_stop)),
    }
    return Spectrum(nu, {"transmission": T, "reflection": R}, meta)


def synth_raw_scan(
    model: CavityModel,
    nu_start: float,
    nu_stop: float,
    n_points: int,
    etalon_fsr: float,
    distortion: float = 0.0,
    etalon_finesse: float = 3.0,
    etalon_phase_frequency: Optional[float] = None,
    reference_line: float = CS_D2_FREQUENCY,
    reference_width: float = 380e6,
    reference_depth: float = 0.4,
    sigma: float = 0.0,
    seed: Optional[int] = None,
    polarization: str = "a",
):
    """Uncalibrated laser scan with etalon and absorption-reference channels.

    The laser frequency at normalized sample position s in [0, 1] is
    ``nu_start + (nu_stop - nu_start) * (s + distortion * s * (s - 1))``,
    a quadratic sweep nonlinearity (monotone for |distortion| < 1).

    Returns
    -------
    Spectrum
        Raw spectrum whose axis is the sample index.
    ndarray
        True optical frequency of every sample [Hz].
    """
    if abs(distortion) >= 1:
        raise DomainError("|distortion| must be below 1 to keep the sweep monotone")
    x = np.arange(int(n_points), dtype=float)
    s = x / (n_points - 1)
    nu = nu_start + (nu_stop - nu_start) * (s + distortion * s * (s - 1))
    T, R = cavity_response(nu, model, polarization)
    nu_e = nu_start if etalon_phase_frequency is None else etalon_phase_frequency
    c_e = (2 * etalon_finesse / np.pi) ** 2
    etalon = 1.0 / (1.0 + c_e * np.sin(np.pi * (nu - nu_e) / etalon_fsr) ** 2)
    # Doppler-broadened absorption dip (Gaussian FWHM reference_width)
    ref = 1.0 - reference_depth * np.exp(
        -4 * np.log(2) * ((nu - reference_line) / reference_width) ** 2
    )
    rng = np.random.default_rng(seed)
    chans = {
        "transmission": np.clip(_noisy(T, sigma, rng), *POWER_RANGE),
        "reflection": np.clip(_noisy(R, sigma, rng), *POWER_RANGE),
        "etalon": np.clip(_noisy(etalon, sigma, rng), *POWER_RANGE),
        "reference": np.clip(_noisy(ref, sigma, rng), *POWER_RANGE),
    }
    spec = Spectrum(x, chans, {"calibrated": False, "source": f"synth_raw(seed={seed})"})
    return spec, nu


def _parabolic_peak(y, i):
    """Sub-sample vertex of the parabola through y[i-1], y[i], y[i+1]."""
    if i <= 0 or i >= len(y) - 1:
        return float(i), float(y[i])
    a, b, c = y[i - 1], y[i], y[i + 1]
    den = a - 2 * b + c
    if den == 0:
        return float(i), float(b)
    d = 0.5 * (a - c) / den
    return i + d, b - 0.25 * (a - c) * d


def _index_to_axis(axis, idx):
    return np.interp(idx, np.arange(len(axis)), axis)


def detect_etalon_fringes(spectrum: Spectrum, channel: str = "etalon", min_fringes: int = 3) -> np.ndarray:
    """Sub-sample raw-axis positions of the etalon transmission maxima."""
    if channel not in spectrum.channels:
        raise InsufficientCalibrationError(f"spectrum has no {channel!r} channel")
    y = spectrum.channels[channel]
    contrast = float(y.max() - y.min())
    if contrast <= 0:
        raise InsufficientCalibrationError("flat etalon channel")
    peaks, _ = signal.find_peaks(y, prominence=0.3 * contrast)
    if len(peaks) < min_fringes:
        raise InsufficientCalibrationError(f"found {len(peaks)} fringes, need {min_fringes}")
    spacing = float(np.median(np.diff(peaks))) if len(peaks) > 1 else float(len(y))
    m = max(1, int(spacing // 40))
    idx = [_fringe_center(y, int(i), m, int(spacing)) for i in peaks]
    return _index_to_axis(spectrum.axis, np.array(idx))


def _half_height_crossing(y, i, level, step, m):
    """Sub-sample position where y crosses ``level`` walking from i by ``step``."""
    j = i
    while 0 <= j + step < len(y) and y[j + step] > level:
        j += step
    if not 0 <= j + step < len(y):
        return None
    # local linear fit over +-m samples around the bracketing pair
    c = j if step > 0 else j - 1
    lo, hi = max(c - m + 1, 0), min(c + m + 1, len(y) - 1)
    t = np.arange(lo, hi + 1, dtype=float)
    slope, icpt = np.polyfit(t, y[lo : hi + 1], 1)
    if slope == 0:
        return None
    return (level - icpt) / slope


def _fringe_center(y, i, m, spacing):
    """Midpoint of the half-height crossings around peak i.

    Falls back to a three-point parabola when a crossing is missing.
    """
    left_min = float(np.min(y[max(0, i - spacing) : i + 1]))
    right_min = float(np.min(y[i : i + spacing + 1]))
    level = 0.5 * (y[i] + 0.5 * (left_min + right_min))
    xl = _half_height_crossing(y, i, level, -1, m)
    xr = _half_height_crossing(y, i, level, 1, m)
    if xl is None or xr is None:
        return _parabolic_peak(y, i)[0]
    return 0.5 * (xl + xr)


def locate_reference_line(spectrum: Spectrum, channel: str = "reference") -> float:
    """Raw-axis position of the absorption minimum in the reference channel."""
    y = spectrum.channels[channel]
    k = max(3, len(y) // 200)
    smooth = np.convolve(y, np.ones(k) / k, mode="same")
    i0 = int(np.argmin(smooth[k:-k])) + k
    base = float(np.median(y))
    half = base - 0.5 * (base - smooth[i0])
    # least-squares parabola over the contiguous half-depth core of the dip
    lo = i0
    while lo > 0 and smooth[lo - 1] < half:
        lo -= 1
    hi = i0
    while hi < len(y) - 1 and smooth[hi + 1] < half:
        hi += 1
    if hi - lo < 4:
        pos, _ = _parabolic_peak(-y, int(np.argmin(y)))
    else:
        idx = np.arange(lo, hi + 1, dtype=float)
        a, b, _ = np.polyfit(idx - i0, y[lo : hi + 1], 2)
        pos = i0 - b / (2 * a) if a > 0 else float(i0)
    return float(_index_to_axis(spectrum.axis, pos))


class FrequencyMapping:
    """Monotone raw-sample -> frequency map.

    PCHIP through the fringe anchors, linear continuation (end slopes)
    outside them, and a global offset.
    """

    def __init__(self, raw, freq, offset: float = 0.0):
        self.raw = np.asarray(raw, dtype=float)
        self.freq = np.asarray(freq, dtype=float)
        self.offset = float(offset)
        self._pchip = PchipInterpolator(self.raw, self.freq, extrapolate=False)
        d = self._pchip.derivative()
        self._slopes = (float(d(self.raw[0])), float(d(self.raw[-1])))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self._pchip(x)
        lo, hi = x < self.raw[0], x > self.raw[-1]
        out = np.where(lo, self.freq[0] + self._slopes[0] * (x - self.raw[0]), out)
        out = np.where(hi, self.freq[-1] + self._slopes[1] * (x - self.raw[-1]), out)
        out = out + self.offset
        return float(out) if out.ndim == 0 else out


@dataclass
class CalibrationResult:
    """Raw -> Hz mapping built from etalon fringes and a reference line."""

    mapping: FrequencyMapping
    anchor_frequency: float
    etalon_fsr: float
    residual_rms: float
    fringe_positions: np.ndarray


def calibrate_axis(
    spectrum: Spectrum,
    etalon_fsr: float,
    reference_line: float = CS_D2_FREQUENCY,
    reference_raw_position: Optional[float] = None,
    direction: int = 1,
):
    """Calibrate a raw scan axis to absolute optical frequency.

    Consecutive fringes are assigned frequencies spaced by ``etalon_fsr``
    (``direction = -1`` for down-scans), joined by a monotone cubic, and the
    whole map is shifted so that ``reference_raw_position`` lands on
    ``reference_line``. When the position is omitted it is located in the
    ``reference`` channel.

    ``residual_rms`` is the leave-one-out rms error of the interpolant at the
    interior anchors [Hz]; it vanishes for a linear scan.

    Returns
    -------
    CalibrationResult, Spectrum
    """
    if direction not in (1, -1):
        raise DomainError("direction must be +1 or -1")
    fr = detect_etalon_fringes(spectrum)
    if np.any(np.diff(fr) <= 0):
        raise ScanDirectionError("raw fringe positions are not strictly increasing")
    if reference_raw_position is None:
        reference_raw_position = locate_reference_line(spectrum)
    lo, hi = spectrum.axis.min(), spectrum.axis.max()
    if not lo <= reference_raw_position <= hi:
        raise DomainError("reference position outside the scan window")

    freq = direction * etalon_fsr * np.arange(len(fr), dtype=float)
    base = FrequencyMapping(fr, freq)
    offset = reference_line - base(reference_raw_position)
    mapping = FrequencyMapping(fr, freq, offset)

    loo = []
    for k in range(1, len(fr) - 1):
        keep = np.ones(len(fr), bool)
        keep[k] = False
        loo.append(FrequencyMapping(fr[keep], freq[keep])(fr[k]) - freq[k])
    resid = float(np.sqrt(np.mean(np.square(loo)))) if loo else 0.0

    nu = mapping(spectrum.axis)
    order = np.argsort(nu) if direction == -1 else slice(None)
    nu = nu[order]
    if np.any(np.diff(nu) <= 0):
        raise ScanDirectionError("calibrated axis is not strictly monotone")
    meta = dict(spectrum.metadata)
    meta.update(calibrated=True, wavelength_anchor=C0 / reference_line)
    cal = Spectrum(nu, {k: v[order] for k, v in spectrum.channels.items()}, meta)
    result = CalibrationResult(mapping, float(reference_line), float(etalon_fsr), resid, fr)
    return result, cal


@dataclass(frozen=True)
class Resonance:
    center: float
    height: float
    width: float


def find_resonances(spectrum: Spectrum, channel: str = "transmission", prominence: float = 0.05) -> list:
    """Locate resonance peaks (or reflection dips) by prominence.

    Widths are full widths at half prominence in axis units.
    """
    y = spectrum.channels[channel]
    sig = -y if channel == "reflection" else y
    peaks, props = signal.find_peaks(sig, prominence=prominence)
    if len(peaks) == 0:
        return []
    w = signal.peak_widths(sig, peaks, rel_height=0.5)
    left = _index_to_axis(spectrum.axis, w[2])
    right = _index_to_axis(spectrum.axis, w[3])
    return [
        Resonance(float(spectrum.axis[p]), float(y[p]), float(r - l))
        for p, l, r in zip(peaks, left, right)
    ]


PARAM_NAMES = ("offset", "T_peak", "finesse", "nu0", "fsr")


@dataclass
class AiryFit:
    """Result of an Airy-function fit.

    ``nu0`` is the first resonance inside the fit window. ``covariance`` is
    ordered as ``param_names``; ``fsr_err`` is 0 when the FSR was held fixed.
    """

    finesse: float
    finesse_err: float
    fsr: float
    fsr_err: float
    nu0: float
    nu0_err: float
    centers: list
    peak_transmission: float
    offset: float
    residual_rms: float
    covariance: np.ndarray
    param_names: tuple
    n_points: int
    window: tuple
    dip: bool = False
    nfev: int = 0

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "finesse", "finesse_err", "fsr", "fsr_err", "nu0", "nu0_err",
            "peak_transmission", "offset", "residual_rms", "n_points", "dip", "nfev")}
        d["centers"] = [float(c) for c in self.centers]
        d["window"] = [float(w) for w in self.window]
        d["param_names"] = list(self.param_names)
        d["covariance"] = np.asarray(self.covariance).tolist()
        return d


def airy(nu, offset, T_peak, finesse, nu0, fsr, dip: bool = False):
    """Airy lineshape with offset; ``dip`` subtracts the resonant part."""
    c = (2 * finesse / np.pi) ** 2
    shape = T_peak / (1.0 + c * np.sin(np.pi * (np.asarray(nu) - nu0) / fsr) ** 2)
    return offset - shape if dip else offset + shape


def fit_airy(
    spectrum: Spectrum,
    window: Optional[tuple] = None,
    initial: Optional[list] = None,
    channel: str = "transmission",
    fixed_fsr: Optional[float] = None,
    weights: Optional[np.ndarray] = None,
    offset_max: Optional[float] = None,
    prominence: Optional[float] = None,
    max_nfev: int = 2000,
) -> AiryFit:
    """Weighted nonlinear least-squares Airy fit.

    Parameters
    ----------
    window : (center, span), optional
        Frequency window; the whole spectrum when omitted.
    initial : list of Resonance, optional
        Starting resonances; detected with :func:`find_resonances` if omitted.
    fixed_fsr : float, optional
        Hold the FSR fixed at this value. Required when the window holds a
        single resonance, where FSR and finesse are otherwise degenerate.
    weights : array, optional
        Per-point weights (1/sigma); uniform by default.
    offset_max : float, optional
        Upper bound on the offset. Defaults to twice the smallest data value
        in the window (peaks) or 1.5 (dips).

    Raises
    ------
    FitFailureError
        When the optimizer does not converge within ``max_nfev`` evaluations.
    """
    sp = spectrum if window is None else spectrum.window(*window)
    nu = sp.axis
    if len(nu) < 6:
        raise FitFailureError("too few points in window", {"n_points": len(nu)})
    y = sp.channels[channel]
    dip = channel == "reflection"
    span = float(nu[-1] - nu[0])
    ref = float(nu[0] + 0.5 * span)

    if initial is None:
        contrast = float(y.max() - y.min())
        initial = find_resonances(sp, channel, prominence if prominence is not None else 0.3 * contrast)
    if not initial:
        raise FitFailureError("no resonance found in window", {"window": window})
    centers0 = sorted(r.center for r in initial)
    if fixed_fsr is not None:
        fsr0 = fixed_fsr
    elif len(centers0) >= 2:
        fsr0 = float(np.median(np.diff(centers0)))
    else:
        raise FitFailureError(
            "single resonance in window: declare fixed_fsr", {"window": window}
        )
    best = max(initial, key=lambda r: -r.height if dip else r.height)
    base = float(np.median(y)) if dip else float(y.min())
    amp0 = abs(best.height - base) if dip else max(best.height - base, 1e-6)
    F0 = max(fsr0 / max(best.width, span / len(nu)), 1.0)

    if offset_max is None:
        offset_max = 1.5 if dip else max(2.0 * float(y.min()), 1e-9)
    off0 = min(max(base if dip else 0.5 * float(y.min()), 0.0), offset_max)

    # scaled parameters: nu0 and fsr in units of fsr0 relative to ref
    p0 = [off0, amp0, F0, (best.center - ref) / fsr0, 1.0]
    lo = [0.0, 0.0, 0.05, p0[3] - 0.5, 0.2]
    hi = [offset_max, 2.0, 1e6, p0[3] + 0.5, 5.0]
    free = [True, True, True, True, fixed_fsr is None]
    x = (nu - ref) / fsr0
    w = np.ones_like(y) if weights is None else np.asarray(weights, float)[: len(y)]

    def unpack(q):
        full = np.array(p0, float)
        full[np.array(free)] = q
        return full

    def resid(q):
        o, a, F, d, f = unpack(q)
        return w * (airy(x, o, a, F, d, f, dip) - y)

    q0 = np.array(p0)[free]
    qlo = np.array(lo)[free]
    qhi = np.array(hi)[free]
    q0 = np.clip(q0, qlo + 1e-12 * (qhi - qlo), qhi - 1e-12 * (qhi - qlo))
    res = optimize.least_squares(
        resid, q0, bounds=(qlo, qhi), method="trf", x_scale="jac",
        xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=max_nfev,
    )
    if res.status <= 0:
        raise FitFailureError(
            f"Airy fit did not converge: {res.message}",
            {"nfev": res.nfev, "cost": float(res.cost), "x": res.x.tolist()},
        )
    # bound check (ignore the intentionally one-sided offset >= 0)
    at_bound = (np.isclose(res.x, qlo, rtol=0, atol=1e-9 * (qhi - qlo)) |
                np.isclose(res.x, qhi, rtol=0, atol=1e-9 * (qhi - qlo)))
    names = [n for n, fr in zip(PARAM_NAMES, free) if fr]
    for n, b in zip(names, at_bound):
        if b and n != "offset":
            warnings.warn(f"fit parameter {n!r} at its bound", BoundaryWarning, stacklevel=2)

    o, a, F, d, f = unpack(res.x)
    r = res.fun / w
    dof = max(len(y) - len(res.x), 1)
    J = res.jac
    # sandwich (HC1) covariance: the noise is multiplicative, so residual
    # variance differs strongly between resonance and wings
    bread = np.linalg.pinv(J.T @ J)
    meat = (J * res.fun[:, None] ** 2).T @ J
    cov_q = bread @ meat @ bread * (len(y) / dof)
    # back to physical units
    scale_all = np.array([1.0, 1.0, 1.0, fsr0, fsr0])[free]
    cov = cov_q * np.outer(scale_all, scale_all)
    err = dict(zip(names, np.sqrt(np.clip(np.diag(cov), 0, None))))

    fsr = f * fsr0
    nu0 = ref + d * fsr0
    kmin = int(np.ceil((nu[0] - nu0) / fsr))
    kmax = int(np.floor((nu[-1] - nu0) / fsr))
    centers = [nu0 + k * fsr for k in range(kmin, kmax + 1)]
    # report nu0 as the first resonance in the window so it does not depend
    # on which peak seeded the fit
    if kmin != 0 and centers:
        i_nu, i_f = names.index("nu0"), (names.index("fsr") if "fsr" in names else None)
        T = np.eye(len(names))
        if i_f is not None:
            T[i_nu, i_f] = kmin
        cov = T @ cov @ T.T
        nu0 = centers[0]
        err = dict(zip(names, np.sqrt(np.clip(np.diag(cov), 0, None))))
    return AiryFit(
        finesse=float(F), finesse_err=float(err["finesse"]),
        fsr=float(fsr), fsr_err=float(err.get("fsr", 0.0)),
        nu0=float(nu0), nu0_err=float(err["nu0"]),
        centers=centers, peak_transmission=float(a), offset=float(o),
        residual_rms=float(np.sqrt(np.mean(r**2))), covariance=cov,
        param_names=tuple(names), n_points=int(len(y)),
        window=(ref, span), dip=dip, nfev=int(res.nfev),
    )


def finesse_vs_detuning(
    spectrum: Spectrum,
    channel: str = "transmission",
    prominence: float = 0.02,
    unit: str = "Hz",
    fit_kwargs: Optional[dict] = None,
) -> list:
    """Per-FSR Airy fits across a multi-FSR spectrum.

    Each resonance is fitted over one FSR centered on it, with the FSR held
    at the median resonance spacing. Detuning is zero
    at the resonance of maximum fitted finesse; with ``unit="nm"`` it is
    the vacuum-wavelength difference lambda - lambda_max.
    """
    res = find_resonances(spectrum, channel, prominence)
    if len(res) < 2:
        raise FitFailureError("need at least two resonances to infer the FSR")
    centers = np.array([r.center for r in res])
    fsr = float(np.median(np.diff(centers)))
    nu = spectrum.axis
    out = []
    for r in res:
        if r.center - 0.5 * fsr < nu[0] or r.center + 0.5 * fsr > nu[-1]:
            continue
        fit = fit_airy(spectrum, (r.center, fsr), [r], channel, fixed_fsr=fsr, **(fit_kwargs or {}))
        out.append(fit)
    if not out:
        raise FitFailureError("no complete FSR window inside the spectrum")
    k = int(np.argmax([f.finesse for f in out]))
    nu_max = out[k].nu0
    if unit == "Hz":
        det = [f.nu0 - nu_max for f in out]
    elif unit == "nm":
        det = [(C0 / f.nu0 - C0 / nu_max) * 1e9 for f in out]
    else:
        raise DomainError("unit must be 'Hz' or 'nm'")
    return list(zip(det, out))
