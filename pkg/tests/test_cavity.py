import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nanofiber_fp.cavity import (
    CavityModel,
    Mirror,
    PathSection,
    cavity_response,
    finesse_from_rho,
    free_spectral_range,
    infer_mirror_parameters,
    lossless_resonant_transmission,
    model_from_inference,
    optical_path_length,
    path_length_from_fsr,
    projected_finesse,
    rho_from_finesse,
    round_trip_amplitude,
    strain_for_shift,
    strain_tune,
    symmetric_model,
    taper_transmission_from_finesses,
    taper_transmission_mc,
    taper_transmission_uncertainty,
    tuning_range_in_fsr,
)
from nanofiber_fp.constants import C0
from nanofiber_fp.errors import DomainError, InconsistentInputsError, NonphysicalGainError
from nanofiber_fp.fbg import FBGSpec

from oracles import rho_by_bisection

FSR = 1.48084e9
NU0 = C0 / 852.53e-9


def one_section(L=0.1):
    return (PathSection("fiber", L, 1.0),)


# -- round trip and finesse ------------------------------------------------

def test_round_trip_amplitude_examples():
    m = Mirror.from_loss(0.99011)
    rho0 = round_trip_amplitude(m, m, 1.0)
    assert rho0 == pytest.approx(0.98031, abs=1e-5)
    assert round_trip_amplitude(m, m, np.sqrt(0.983)) == pytest.approx(0.9637, abs=3e-4)
    with pytest.raises(NonphysicalGainError):
        round_trip_amplitude(Mirror(1.0, 0.0), Mirror(1.0, 0.0), 1.0)


def test_finesse_examples_against_bisection():
    assert finesse_from_rho(0.0) == 0.0
    assert finesse_from_rho(0.98031) == pytest.approx(158.0, abs=0.05)
    # 0.9639 is rounded to 4 decimals; dF/drho ~ 4700 turns half an ulp into 0.24
    assert finesse_from_rho(0.9639) == pytest.approx(85.6, abs=0.25)
    for F in (158.0, 85.6, 85.56):
        assert rho_from_finesse(F) == pytest.approx(rho_by_bisection(F), abs=1e-14)
    assert rho_from_finesse(85.56) == pytest.approx(0.96395, abs=1e-5)
    assert rho_from_finesse(1e6) > 1 - 1e-5


@pytest.mark.parametrize("rho", [-0.1, 1.0, 1.2])
def test_finesse_domain(rho):
    with pytest.raises(DomainError):
        finesse_from_rho(rho)


@pytest.mark.parametrize("F", [0.0, -3.0])
def test_rho_domain(F):
    with pytest.raises(DomainError):
        rho_from_finesse(F)


@pytest.mark.parametrize("F", [1.0, 10.0, 100.0, 1000.0])
def test_finesse_rho_inverse_pair(F):
    assert finesse_from_rho(rho_from_finesse(F)) == pytest.approx(F, rel=1e-12)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.01, 0.9999))
def test_rho_finesse_inverse_pair(rho):
    assert rho_from_finesse(finesse_from_rho(rho)) == pytest.approx(rho, rel=1e-9)


# -- taper transmission ----------------------------------------------------

def test_taper_transmission_reference_value():
    assert taper_transmission_from_finesses(158.0, 85.6) == pytest.approx(0.983, abs=1e-3)
    assert taper_transmission_from_finesses(158.0, 158.0) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(InconsistentInputsError):
        taper_transmission_from_finesses(80.0, 85.6)


def test_taper_transmission_equals_bisection_ratio():
    rng = np.random.default_rng(7)
    for _ in range(100):
        F0 = rng.uniform(2, 5000)
        F1 = rng.uniform(1, F0)
        ratio = rho_by_bisection(F1) / rho_by_bisection(F0)
        assert taper_transmission_from_finesses(F0, F1) == pytest.approx(ratio, rel=1e-10)


@settings(max_examples=300, deadline=None)
@given(st.floats(1.0, 1e5), st.floats(0.001, 1.0))
def test_projection_closure(F0, frac):
    F1 = max(F0 * frac, 1e-3)
    tc2 = taper_transmission_from_finesses(F0, F1)
    assert projected_finesse(F0, tc2) == pytest.approx(F1, rel=1e-9)


def test_projected_finesse_examples():
    assert projected_finesse(158.0, 1.0) == pytest.approx(158.0, rel=1e-12)
    tc2 = np.linspace(0.5, 1.0, 200)
    assert np.all(np.diff(projected_finesse(158.0, tc2)) > 0)
    # with the unrounded taper transmission the projection lands on F1
    assert projected_finesse(158.0, taper_transmission_from_finesses(158.0, 85.6)) == pytest.approx(85.6, rel=1e-12)


def test_uncertainty_first_order_against_monte_carlo():
    tc2, sig = taper_transmission_uncertainty(158, 8, 85.6, 0.6)
    assert tc2 == pytest.approx(0.983, abs=1e-3)
    assert sig == pytest.approx(0.001, abs=3e-4)
    mean, sd = taper_transmission_mc(158, 8, 85.6, 0.6, n=100_000, seed=1)
    assert mean == pytest.approx(tc2, abs=2e-4)
    assert sd == pytest.approx(sig, rel=0.2)


# -- path length -----------------------------------------------------------

def test_optical_path_length():
    assert optical_path_length([PathSection("a", 0.05, 1.0)]) == 0.05
    secs = [PathSection("a", 0.03, 1.45), PathSection("b", 0.005, 1.1), PathSection("c", 0.06, 1.44)]
    assert optical_path_length(secs) == pytest.approx(optical_path_length(secs[::-1]), rel=1e-15)
    with pytest.raises(DomainError):
        optical_path_length([])


def test_free_spectral_range_examples():
    assert free_spectral_range(0.102) == pytest.approx(1.4696e9, rel=5e-5)
    assert path_length_from_fsr(FSR) == pytest.approx(0.10122, abs=1e-5)
    assert free_spectral_range(0.204) == pytest.approx(free_spectral_range(0.102) / 2, rel=1e-15)


# -- response --------------------------------------------------------------

def test_impedance_matched_lossless_resonance():
    m = Mirror.from_loss(0.99)
    model = CavityModel(m, m, one_section(), t_c=1.0, background_transmission=1.0)
    T, R = cavity_response(0.0, model)
    assert T == pytest.approx(1.0, abs=1e-12)
    assert R == pytest.approx(0.0, abs=1e-12)


def test_lossless_energy_equality():
    m = Mirror.from_loss(0.95)
    model = CavityModel(m, m, one_section(), t_c=1.0, background_transmission=1.0)
    nu = np.linspace(0, 3 * model.fsr, 5001)
    T, R = cavity_response(nu, model)
    np.testing.assert_allclose(T + R, 1.0, atol=1e-12)


def test_energy_bound_random_models():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(2000):
        r1, r2 = rng.uniform(0, 0.9999, 2)
        A1 = rng.uniform(0, 1 - r1**2)
        A2 = rng.uniform(0, 1 - r2**2)
        model = CavityModel(
            Mirror.from_loss(r1, A1), Mirror.from_loss(r2, A2), one_section(),
            t_c=rng.uniform(0.01, 1.0), background_transmission=rng.uniform(0.01, 1.0),
        )
        nu = rng.uniform(0, model.fsr, 50)
        T, R = cavity_response(nu, model)
        assert np.all(T >= 0) and np.all(R >= 0)
        worst = max(worst, float(np.max(T + R)))
    assert worst <= 1 + 1e-12


def test_periodic_in_fsr():
    model = symmetric_model(85.56, FSR, tc2=0.983, mirror_loss=0.0076)
    nu = np.linspace(-0.5 * FSR, 0.5 * FSR, 1001)
    T0, R0 = cavity_response(nu, model)
    T1, R1 = cavity_response(nu + 7 * FSR, model)
    np.testing.assert_allclose(T0, T1, rtol=1e-7, atol=1e-12)
    np.testing.assert_allclose(R0, R1, rtol=1e-7, atol=1e-12)


def test_airy_lineshape():
    model = symmetric_model(85.56, FSR, background_transmission=1.0)
    nu = np.linspace(-FSR, FSR, 2001)
    T, _ = cavity_response(nu, model)
    ref = 1 / (1 + (2 * 85.56 / np.pi) ** 2 * np.sin(np.pi * nu / FSR) ** 2)
    np.testing.assert_allclose(T, ref, rtol=1e-10)


def test_polarization_combs_offset_by_splitting():
    split = 0.3 * FSR
    model = symmetric_model(85.56, FSR, birefringent_splitting=split, resonance_frequency=1e6)
    nu = np.linspace(0, FSR, 400_001)
    Ta, _ = cavity_response(nu, model, "a")
    Tb, _ = cavity_response(nu, model, "b")
    dnu = nu[1] - nu[0]
    assert nu[np.argmax(Tb)] - nu[np.argmax(Ta)] == pytest.approx(split, abs=dnu)
    Tm, _ = cavity_response(nu, model, "mixed", np.pi / 4)
    peaks = np.nonzero((Tm[1:-1] > Tm[:-2]) & (Tm[1:-1] > Tm[2:]) & (Tm[1:-1] > 0.2))[0]
    assert len(peaks) == 2


def test_unknown_polarization():
    with pytest.raises(DomainError):
        cavity_response(0.0, symmetric_model(50, FSR), "c")


def test_fbg_envelope_reduces_finesse_off_center():
    lam0 = C0 / NU0
    fbg = FBGSpec(lam0, 0.2e-9, 0.98)
    m = Mirror.from_loss(np.sqrt(0.98), 0.0, fbg)
    model = CavityModel(m, m, one_section(0.1), background_transmission=1.0, resonance_frequency=NU0)
    R_center = m.reflectivity(NU0)
    R_off = m.reflectivity(C0 / (lam0 + 0.08e-9))
    assert R_center == pytest.approx(0.98, rel=1e-9)
    assert R_off < R_center
    # lower mirror reflectivity lifts the off-resonance floor
    span = np.linspace(0, model.fsr, 2001)
    floor_center = cavity_response(NU0 + span, model)[0].min()
    floor_off = cavity_response(C0 / (lam0 + 0.08e-9) + span, model)[0].min()
    assert floor_off > floor_center
    with pytest.raises(DomainError):
        Mirror(0.9, 0.1, fbg)


# -- mirror inference ------------------------------------------------------

def test_mirror_inference_reference_example():
    inf = infer_mirror_parameters(158.0, 85.6, 0.11)
    assert inf.t1sq_t2sq == pytest.approx(1.46e-4, rel=0.01)
    assert inf.t_sq[0] == pytest.approx(1.21e-2, rel=0.01)
    assert inf.loss == pytest.approx(0.0075, abs=2e-4)
    model = model_from_inference(inf, one_section(0.1))
    T, R = cavity_response(0.0, model)
    assert T == pytest.approx(0.11, abs=1e-6)
    assert model.finesse == pytest.approx(85.6, rel=1e-9)


def test_mirror_inference_lossless_limit():
    T0 = lossless_resonant_transmission(158.0, 85.6)
    assert T0 == pytest.approx(0.293, abs=1e-3)
    # forward formula written independently
    rho0, rho1 = rho_by_bisection(158.0), rho_by_bisection(85.6)
    assert T0 == pytest.approx((1 - rho0) ** 2 * (rho1 / rho0) / (1 - rho1) ** 2, rel=1e-10)
    inf = infer_mirror_parameters(158.0, 85.6, T0 * (1 - 1e-12))
    assert inf.loss == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(InconsistentInputsError):
        infer_mirror_parameters(158.0, 85.6, T0 * 1.01)


def test_mirror_inference_asymmetric_closure():
    inf = infer_mirror_parameters(158.0, 85.6, 0.11, symmetric=False, r_ratio=1.002)
    assert inf.r_amp[0] * inf.r_amp[1] == pytest.approx(inf.r1r2, rel=1e-12)
    assert inf.t_sq[0] * inf.t_sq[1] == pytest.approx(inf.t1sq_t2sq, rel=1e-10)
    T, _ = cavity_response(0.0, model_from_inference(inf, one_section()))
    assert T == pytest.approx(0.11, abs=1e-6)


def test_background_transmission_in_inference():
    inf = infer_mirror_parameters(158.0, 85.6, 0.11, background_transmission=0.9)
    model = model_from_inference(inf, one_section(), background_transmission=0.9)
    assert cavity_response(0.0, model)[0] == pytest.approx(0.11, abs=1e-9)


# -- strain tuning ---------------------------------------------------------

def test_strain_tuning():
    model = CavityModel(Mirror.from_loss(0.99), Mirror.from_loss(0.99), (PathSection("f", 0.1012, 1.0),))
    nu0 = 3.5164e14
    assert strain_tune(model, 0.0, nu0) == 0.0
    dL = strain_for_shift(model, 62e9, nu0)
    assert abs(dL) == pytest.approx(17.8e-6, rel=0.01)
    assert strain_tune(model, dL, nu0) == pytest.approx(62e9, rel=1e-12)
    assert strain_tune(model, 2e-6, nu0) == pytest.approx(2 * strain_tune(model, 1e-6, nu0), rel=1e-15)
    assert tuning_range_in_fsr(62e9, FSR) == pytest.approx(41.9, abs=0.05)


def test_model_validation():
    with pytest.raises(DomainError):
        Mirror(0.9, 0.5)
    with pytest.raises(DomainError):
        CavityModel(Mirror.from_loss(0.9), Mirror.from_loss(0.9), (), t_c=1.0)
    with pytest.raises(DomainError):
        CavityModel(Mirror.from_loss(0.9), Mirror.from_loss(0.9), one_section(), t_c=0.0)
    with pytest.raises(DomainError):
        PathSection("x", 0.1, 0.9)
    assert Mirror.from_loss(0.9, 0.01).loss == pytest.approx(0.01, abs=1e-12)
