import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whichpath.interference import (
    ModeSelectionError,
    distinguishability,
    egy_check,
    fringe_extrema,
    fringe_law,
    normalization_constant,
    normalize,
    phase_sweep,
    select_modes,
    simulate_fringes,
    theory_extrema,
    visibility,
)
from whichpath.spectral import (
    FilterProfile,
    IncompatibleSpectraError,
    SpectralDensity,
    SpectralGrid,
    transmission,
)

GRID = SpectralGrid()


def flat(value, grid=GRID):
    return SpectralDensity(grid, np.full(grid.size, value))


def gaussian_arm(center, fwhm=3.0, height=1.0, grid=GRID):
    return SpectralDensity(grid, height * transmission(FilterProfile(center, fwhm), grid.wavelengths))


def test_balanced_arms_cancel_at_pi():
    scan = simulate_fringes(flat(0.25), flat(0.25), 1.0, [0.0, math.pi])
    np.testing.assert_allclose(scan.intensity[:, 0], 1.0)
    np.testing.assert_allclose(scan.intensity[:, 1], 0.0, atol=1e-15)


def test_single_arm_has_no_fringe():
    scan = simulate_fringes(flat(0.25), flat(0.0), 1.0)
    np.testing.assert_allclose(scan.intensity, 0.25)


def test_partial_overlap_minimum():
    # 0.5 - 0.98 * 0.5
    scan = simulate_fringes(flat(0.25), flat(0.25), 0.98, [math.pi])
    np.testing.assert_allclose(scan.intensity, 0.01, rtol=1e-12)


def test_port_two_dark_at_zero_phase():
    scan = simulate_fringes(flat(0.25), flat(0.25), 1.0, [0.0], port=2)
    np.testing.assert_allclose(scan.intensity, 0.0, atol=1e-15)


def test_mismatched_grids_rejected():
    with pytest.raises(IncompatibleSpectraError):
        simulate_fringes(flat(1.0), flat(1.0, SpectralGrid(step=0.1)))


@pytest.mark.parametrize("mu", [-0.1, 1.1])
def test_overlap_range(mu):
    with pytest.raises(ValueError):
        simulate_fringes(flat(1.0), flat(1.0), mu)


def test_extrema_examples():
    hi, lo = fringe_extrema(simulate_fringes(flat(0.25), flat(0.25), 1.0))
    np.testing.assert_allclose(hi.values, 1.0)
    np.testing.assert_allclose(lo.values, 0.0, atol=1e-15)
    # (sqrt 0.2 + sqrt 0.05)^2 = 0.45 and (sqrt 0.2 - sqrt 0.05)^2 = 0.05
    hi, lo = fringe_extrema(simulate_fringes(flat(0.2), flat(0.05), 1.0))
    np.testing.assert_allclose(hi.values, 0.45, rtol=1e-12)
    np.testing.assert_allclose(lo.values, 0.05, rtol=1e-12)


def test_sparse_sweep_rejected():
    scan = simulate_fringes(flat(0.2), flat(0.05), 1.0, [0.0, 0.5])
    with pytest.raises(ValueError):
        fringe_extrema(scan)


def test_sampled_and_refined_extrema_agree():
    a1, a2 = gaussian_arm(826), gaussian_arm(821.1, height=0.7)
    scan = simulate_fringes(a1, a2, 0.9, phase_sweep(64))
    for r, s in zip(fringe_extrema(scan), fringe_extrema(scan, refine=False)):
        np.testing.assert_allclose(r.values, s.values, rtol=1e-9, atol=1e-15)


def test_theory_extrema_is_unit_overlap():
    a1, a2 = gaussian_arm(826), gaussian_arm(822)
    for t, r in zip(theory_extrema(a1, a2), fringe_extrema(simulate_fringes(a1, a2, 1.0))):
        np.testing.assert_allclose(t.values, r.values, rtol=1e-12, atol=1e-15)


def test_visibility_examples():
    assert visibility(0.902, 0.014) == pytest.approx(0.888 / 0.916, rel=1e-12)
    assert visibility(0.902, 0.014) == pytest.approx(0.97, abs=0.01)
    assert visibility(1.0, 0.0) == 1.0
    assert math.isnan(visibility(0.0, 0.0))


def test_visibility_nan_below_floor():
    v = visibility(np.array([1.0, 1e-8]), np.array([0.5, 0.0]))
    assert v[0] == pytest.approx(1 / 3)
    assert math.isnan(v[1])


def test_distinguishability_examples():
    assert distinguishability(0.25, 0.25) == 0.0
    assert distinguishability(0.25, 0.0) == 1.0
    assert distinguishability(0.3, 0.1) == pytest.approx(0.5)
    assert math.isnan(distinguishability(0.0, 0.0))


def test_egy_check_examples():
    rec = egy_check(0.71, 0.66)
    assert rec.sum_of_squares == pytest.approx(0.9397)
    assert rec.passed
    assert not egy_check(0.8, 0.8).passed
    assert egy_check(0.6, 0.8).passed


def test_normalization():
    arm = gaussian_arm(826, height=0.5)
    assert normalization_constant(arm) == pytest.approx(2.0)
    assert normalize(1.0, arm) == pytest.approx(0.5)
    assert normalize(arm, arm).peak() == pytest.approx(0.25)
    with pytest.raises(ValueError):
        normalization_constant(flat(0.0))


@settings(max_examples=200, deadline=None)
@given(i1=st.floats(1e-6, 10), i2=st.floats(1e-6, 10))
def test_duality_saturates_for_perfect_overlap(i1, i2):
    v = visibility(*[float(x) for x in fringe_law([i1], [i2], 1.0, [0.0, math.pi])[0]])
    d = distinguishability(i1, i2)
    assert v * v + d * d == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(i1=st.floats(1e-6, 10), i2=st.floats(1e-6, 10), mu=st.floats(0, 1))
def test_duality_inequality(i1, i2, mu):
    hi, lo = fringe_law([i1], [i2], mu, [0.0, math.pi])[0]
    v, d = visibility(hi, lo), distinguishability(i1, i2)
    assert v * v + d * d <= 1.0 + 1e-12


@settings(max_examples=100, deadline=None)
@given(i1=st.floats(0, 10), i2=st.floats(0, 10), mu=st.floats(0, 1), phi=st.floats(0, 2 * math.pi))
def test_ports_conserve_energy(i1, i2, mu, phi):
    # I1, I2 are single-arm intensities at one port, so the arms carry 2 (I1 + I2)
    p1 = fringe_law([i1], [i2], mu, [phi], port=1)[0, 0]
    p2 = fringe_law([i1], [i2], mu, [phi], port=2)[0, 0]
    assert p1 + p2 == pytest.approx(2 * (i1 + i2), rel=1e-9, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(scale=st.floats(1e-3, 1e3))
def test_visibility_and_distinguishability_scale_free(scale):
    a1, a2 = gaussian_arm(826), gaussian_arm(823)
    hi, lo = theory_extrema(a1, a2)
    hs, ls = theory_extrema(a1.scaled(scale), a2.scaled(scale))
    np.testing.assert_allclose(visibility(hs, ls), visibility(hi, lo), rtol=1e-9)
    np.testing.assert_allclose(
        distinguishability(a1.scaled(scale), a2.scaled(scale)), distinguishability(a1, a2), rtol=1e-9
    )


def _modes(center2, mu=1.0, **kw):
    a1, a2 = gaussian_arm(826), gaussian_arm(center2)
    hi, lo = fringe_extrema(simulate_fringes(a1, a2, mu))
    return select_modes(visibility(hi, lo), a1, a2, **kw)


def test_mode_e_at_balance_point():
    # equal gaussians at 826 and 821.1 balance half way between
    m = _modes(821.1)
    assert m.lambda_E == pytest.approx(823.55, abs=1e-9)
    assert m.V_E == pytest.approx(1.0, abs=1e-9)
    assert m.D_E == pytest.approx(0.0, abs=1e-9)
    assert m.lambda_B < m.lambda_E < m.lambda_A
    assert m.method == "marked"


def test_mode_e_visibility_is_overlap():
    m = _modes(821.1, mu=0.98)
    assert m.V_E == pytest.approx(0.98, abs=1e-9)


def test_modes_mark_dominant_arms():
    m = _modes(821.1)
    assert m.D_A > 0.5 and m.D_B > 0.5
    assert m.V_A**2 + m.D_A**2 == pytest.approx(1.0, abs=1e-9)


def test_identical_arms_have_no_modes():
    with pytest.raises(ModeSelectionError):
        _modes(826.0)


def test_interior_minima_preferred():
    # a dip in the coherence on each side of the balance point
    a1, a2 = gaussian_arm(826), gaussian_arm(821.1)
    wl = GRID.wavelengths
    V = 0.6 + 0.4 * np.cos(2 * np.pi * (wl - 823.6) / 4.0)  # minima at 821.6 and 825.6
    m = select_modes(V, a1, a2, method="auto")
    assert m.method == "minima"
    assert m.lambda_A == pytest.approx(825.6, abs=1e-9)
    assert m.lambda_B == pytest.approx(821.6, abs=1e-9)
    with pytest.raises(ModeSelectionError):
        select_modes(visibility(*theory_extrema(a1, a2)), a1, a2, method="minima")


@pytest.mark.parametrize("dl", [1.4, 2.4, 4.9, 6.5])
def test_distinguishability_grows_with_shift(dl):
    small, big = _modes(826 - dl), _modes(826 - dl - 0.6)
    assert big.D_A >= small.D_A - 1e-12
