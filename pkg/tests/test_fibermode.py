import warnings

import numpy as np
import pytest

from nanofiber_fp.errors import DomainError, NoGuidedModeError
from nanofiber_fp.fibermode import (
    FiberGeometry,
    effective_cross_section,
    energy_integral,
    field_components,
    field_intensity,
    group_index,
    is_single_mode,
    refractive_index_silica,
    solve_he11,
    v_number,
)

from oracles import he11_grid_oracle, j0_first_zero, polar_grid_area

LAM = 852.53e-9


@pytest.fixture(scope="module")
def waist():
    return solve_he11(FiberGeometry.silica(500e-9, LAM))


# -- index -----------------------------------------------------------------

@pytest.mark.parametrize("lam, n_tab", [(632.8e-9, 1.45702), (1064e-9, 1.44963), (1550e-9, 1.44402)])
def test_silica_index_matches_tabulated_data(lam, n_tab):
    assert refractive_index_silica(lam) == pytest.approx(n_tab, abs=2e-4)


def test_silica_index_at_cs_d2_line():
    assert 1.452 <= refractive_index_silica(LAM) <= 1.453


def test_silica_index_normal_dispersion():
    lam = np.linspace(0.5e-6, 1.6e-6, 200)
    n = refractive_index_silica(lam)
    assert np.all(np.diff(n) < 0)


@pytest.mark.parametrize("lam", [0.1e-6, 2.5e-6])
def test_silica_index_outside_window(lam):
    with pytest.raises(DomainError):
        refractive_index_silica(lam)


# -- V number --------------------------------------------------------------

def test_v_number_hand_arithmetic():
    n1 = refractive_index_silica(LAM)
    g = FiberGeometry(500e-9, n1, 1.0, LAM)
    assert v_number(g) == pytest.approx(np.pi * 500e-9 / LAM * np.sqrt(n1**2 - 1), rel=1e-14)
    assert v_number(g) == pytest.approx(1.93, abs=0.015)


def test_v_number_vanishes_with_diameter():
    assert v_number(FiberGeometry(1e-30, 1.45, 1.0, LAM)) == pytest.approx(0.0, abs=1e-20)
    with pytest.raises(DomainError):
        FiberGeometry(0.0, 1.45, 1.0, LAM)


def test_single_mode_flag_against_bessel_zero():
    j01 = j0_first_zero()
    assert j01 == pytest.approx(2.404825557695773, abs=1e-12)
    g = FiberGeometry.silica(500e-9, LAM)
    assert v_number(g) < j01
    assert is_single_mode(g)
    assert not is_single_mode(FiberGeometry.silica(1000e-9, LAM))


# -- eigenvalue ------------------------------------------------------------

@pytest.mark.parametrize("d", [300e-9, 400e-9, 500e-9, 700e-9, 1000e-9])
def test_solver_matches_grid_oracle(d):
    g = FiberGeometry.silica(d, LAM)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        m = solve_he11(g)
    ref = he11_grid_oracle(d, LAM, g.core_index)
    assert abs(m.n_eff - ref) < 1e-8
    assert m.residual < 1e-10
    assert g.clad_index < m.n_eff < g.core_index


def test_reference_waist_index_range(waist):
    assert 1.05 <= waist.n_eff <= 1.15
    assert waist.beta == pytest.approx(waist.n_eff * 2 * np.pi / LAM, rel=1e-15)
    assert waist.u**2 + waist.w**2 == pytest.approx(v_number(waist.geometry) ** 2, rel=1e-12)


def test_large_core_limit():
    g = FiberGeometry(50e-6, 1.45, 1.0, LAM)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        m = solve_he11(g)
    assert g.core_index - 1e-3 < m.n_eff < g.core_index


def test_near_cutoff_limit():
    # V ~ 0.85 at 1.55 um; the HE11 index approaches the vacuum cladding
    g = FiberGeometry.silica(400e-9, 1.55e-6)
    m = solve_he11(g)
    assert 1.0 < m.n_eff < 1.0 + 1e-2
    assert m.n_eff - 1 == pytest.approx(he11_grid_oracle(400e-9, 1.55e-6, g.core_index) - 1, rel=1e-6)


def test_no_root_inside_bracket():
    # n_eff - 1 below the 1e-6 bracket margin
    with pytest.raises(NoGuidedModeError):
        solve_he11(FiberGeometry.silica(250e-9, 1.55e-6))


def test_higher_modes_reported_for_multimode_fiber():
    g = FiberGeometry.silica(1000e-9, LAM)
    with pytest.warns(UserWarning):
        m = solve_he11(g)
    assert len(m.other_roots) >= 1
    assert all(r < m.n_eff for r in m.other_roots)


# -- fields ----------------------------------------------------------------

def test_tangential_continuity_and_normal_jump(waist):
    a = waist.geometry.radius
    n1 = waist.geometry.core_index
    ins = field_components(waist, a * (1 - 1e-12))
    out = field_components(waist, a * (1 + 1e-12))
    assert ins[1] == pytest.approx(out[1], rel=1e-9)  # e_phi
    assert ins[2] == pytest.approx(out[2], rel=1e-9)  # e_z
    assert out[0] / ins[0] == pytest.approx(n1**2, rel=1e-9)  # D_r continuous


def test_evanescent_decay_dense_sampling(waist):
    a = waist.geometry.radius
    r = np.linspace(a * (1 + 1e-9), 4 * a, 5000)
    for phi in (0.0, np.pi / 4, np.pi / 2):
        I = field_intensity(waist, r, phi).intensity_rel
        assert np.all(np.diff(I) < 0)
    assert field_intensity(waist, a * (1 + 1e-9)).intensity_rel > field_intensity(waist, 4 * a).intensity_rel
    assert field_intensity(waist, 200 * a).intensity_rel < 1e-60


def test_intensity_normalized_to_maximum(waist):
    r = np.linspace(0, 3 * waist.geometry.radius, 3001)
    best = 0.0
    for phi in np.linspace(0, np.pi / 2, 31):
        I = field_intensity(waist, r, phi).intensity_rel
        assert np.all(I >= 0)
        best = max(best, I.max())
    assert best == pytest.approx(1.0, abs=1e-6)
    assert best <= 1 + 1e-9


def test_azimuthal_average_is_phi_independent(waist):
    r = np.linspace(0, 2 * waist.geometry.radius, 50)
    I0 = field_intensity(waist, r, 0.0, average=True).intensity_rel
    I1 = field_intensity(waist, r, 1.1, average=True).intensity_rel
    np.testing.assert_array_equal(I0, I1)
    phis = np.linspace(0, 2 * np.pi, 721)[:-1]
    brute = np.mean([field_intensity(waist, r, p).intensity_rel for p in phis], axis=0)
    np.testing.assert_allclose(I0, brute, rtol=1e-12)


# -- effective area --------------------------------------------------------

def test_effective_area_against_polar_quadrature(waist):
    # Richardson extrapolation of the Simpson (h^4) polar-grid integral
    I1 = polar_grid_area(waist, field_components, 100)
    I2 = polar_grid_area(waist, field_components, 200)
    extrap = I2 + (I2 - I1) / 15
    ref = extrap / waist.surface_intensity
    A = effective_cross_section(waist, "surface")
    assert A == pytest.approx(ref, rel=1e-8)
    assert 0.2e-12 <= A <= 1.5e-12


def test_effective_area_reference_ordering(waist):
    assert waist.surface_intensity < waist.max_intensity
    assert effective_cross_section(waist, "maximum") < effective_cross_section(waist, "surface")


def test_effective_area_cutoff_convergence(waist):
    a1 = effective_cross_section(waist, cutoff_decay_lengths=20)
    a2 = effective_cross_section(waist, cutoff_decay_lengths=40)
    assert abs(a2 / a1 - 1) < 1e-5


def test_effective_area_amplitude_invariance(waist):
    a1 = effective_cross_section(waist)
    a2 = effective_cross_section(waist, amplitude=1e3)
    assert a2 == pytest.approx(a1, rel=1e-12)
    assert energy_integral(waist, 1e3) == pytest.approx(1e6 * energy_integral(waist), rel=1e-12)


def test_unknown_reference(waist):
    with pytest.raises(DomainError):
        effective_cross_section(waist, "edge")


def test_group_index_exceeds_phase_index(waist):
    ng = group_index(waist.geometry)
    assert ng > waist.n_eff
    assert 1.3 < ng < 1.7
