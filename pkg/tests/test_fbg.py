import numpy as np
import pytest

from nanofiber_fp.errors import DomainError
from nanofiber_fp.fbg import (
    GAUSS_SIGMA_FRACTION,
    FBGSpec,
    fbg_detuning,
    fbg_reflectivity,
)

from oracles import cmt_ode_reflectivity, rho_by_bisection

LAM = 852.53e-9
WIDTH = 0.2e-9


def spec(profile="gaussian", R=0.9803):
    return FBGSpec(LAM, WIDTH, R, profile=profile)


@pytest.mark.parametrize("profile", ["uniform", "gaussian"])
def test_peak_at_bragg_wavelength(profile):
    s = spec(profile)
    assert fbg_reflectivity(LAM, s) == pytest.approx(s.peak_power_reflectivity, rel=1e-9)


@pytest.mark.parametrize("profile", ["uniform", "gaussian"])
def test_fwhm_calibration(profile):
    s = spec(profile)
    lam = np.linspace(LAM - 0.5e-9, LAM + 0.5e-9, 200_001)
    R = fbg_reflectivity(lam, s)
    above = lam[R >= 0.5 * s.peak_power_reflectivity]
    # main lobe only: contiguous region around the center
    assert above[-1] - above[0] == pytest.approx(WIDTH, rel=1e-3)


def test_symmetric_peak_from_round_trip_amplitude():
    rho0 = rho_by_bisection(158.0)
    R = np.sqrt(rho0)
    assert R == pytest.approx(0.9901, abs=1e-4)
    assert rho0 == pytest.approx(0.9803, abs=1e-4)


def test_gaussian_sidelobes_below_one_percent():
    s = spec()
    peak = s.peak_power_reflectivity
    assert fbg_reflectivity(LAM + 0.3e-9, s) < 0.01 * peak
    far = np.concatenate([np.linspace(LAM - 2e-9, LAM - 0.3e-9, 5000), np.linspace(LAM + 0.3e-9, LAM + 2e-9, 5000)])
    assert np.max(fbg_reflectivity(far, s)) < 0.01 * peak


def test_uniform_grating_sidelobes_exceed_one_percent():
    # documented reason for the apodized default
    s = spec("uniform")
    far = np.linspace(LAM + 0.3e-9, LAM + 1e-9, 5000)
    assert np.max(fbg_reflectivity(far, s)) > 0.01 * s.peak_power_reflectivity


@pytest.mark.parametrize("offset", [0.0, 0.05e-9, 0.1e-9, 0.17e-9, 0.4e-9])
def test_uniform_closed_form_against_ode(offset):
    s = spec("uniform")
    delta = float(fbg_detuning(LAM + offset, s))
    kap = s.coupling_area / s.length
    ref = cmt_ode_reflectivity(delta, lambda z: kap, s.length)
    assert fbg_reflectivity(LAM + offset, s) == pytest.approx(min(ref, s.peak_power_reflectivity), rel=1e-7, abs=1e-12)


@pytest.mark.parametrize("offset", [0.03e-9, 0.1e-9, 0.2e-9])
def test_gaussian_transfer_matrix_against_ode(offset):
    # continuous Gaussian profile; the transfer matrix uses 120 uniform pieces
    s = spec()
    L = s.length
    sig = GAUSS_SIGMA_FRACTION * L
    z = np.linspace(0, L, 200_001)
    shape = np.exp(-0.5 * ((z - L / 2) / sig) ** 2)
    norm = s.coupling_area / np.trapezoid(shape, z)
    kap = lambda zz: norm * np.exp(-0.5 * ((zz - L / 2) / sig) ** 2)
    delta = float(fbg_detuning(LAM + offset, s))
    ref = cmt_ode_reflectivity(delta, kap, L)
    assert fbg_reflectivity(LAM + offset, s) == pytest.approx(ref, rel=2e-3, abs=1e-7)


def test_reflectivity_bounded_and_symmetric():
    s = spec()
    d = np.linspace(0, 1e-9, 500)
    Rp = fbg_reflectivity(LAM + d, s)
    Rm = fbg_reflectivity(1 / (2 / LAM - 1 / (LAM + d)), s)  # mirrored detuning
    assert np.all((Rp >= 0) & (Rp <= s.peak_power_reflectivity))
    np.testing.assert_allclose(Rp, Rm, rtol=1e-6, atol=1e-12)


@pytest.mark.parametrize("kw", [
    dict(stopband_width=0.0),
    dict(peak_power_reflectivity=1.0),
    dict(peak_power_reflectivity=0.0),
    dict(profile="sinc"),
])
def test_spec_validation(kw):
    base = dict(center_wavelength=LAM, stopband_width=WIDTH, peak_power_reflectivity=0.9)
    base.update(kw)
    with pytest.raises(DomainError):
        FBGSpec(**base)
