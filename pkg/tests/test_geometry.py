import numpy as np
import pytest

from core.errors import ParameterError
from lab.geometry import GeometryProfile, japanese_bracket, smooth_cutoff, taylor_bounds


@pytest.mark.parametrize("m", [1, 2, 3])
def test_warp_at_trapped_set(m):
    a, da, dda = GeometryProfile(m).warp(0.0)
    assert a == 1.0
    assert da == 0.0
    if m == 1:
        assert dda == pytest.approx(1.0)
    else:
        assert dda == 0.0


def test_warp_hyperbolic_is_japanese_bracket():
    x = np.linspace(-5, 5, 101)
    a, da, _ = GeometryProfile(1).warp(x)
    np.testing.assert_allclose(a, japanese_bracket(x), rtol=1e-14)
    np.testing.assert_allclose(da, x / japanese_bracket(x), rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_derivatives_match_finite_differences(m):
    profile = GeometryProfile(m)
    x = np.linspace(-3, 3, 6001)
    h = x[1] - x[0]
    a, da, dda = profile.warp(x)
    np.testing.assert_allclose(np.gradient(a, h)[1:-1], da[1:-1], atol=1e-5)
    np.testing.assert_allclose(np.gradient(da, h)[1:-1], dda[1:-1], atol=1e-4)

    ell, dell, ddell = profile.log_derivative(x)
    np.testing.assert_allclose(ell, da / a, atol=1e-14)
    np.testing.assert_allclose(np.gradient(ell, h)[1:-1], dell[1:-1], atol=1e-4)
    np.testing.assert_allclose(np.gradient(dell, h)[1:-1], ddell[1:-1], atol=1e-3)


def test_warp_large_argument_precision():
    x = np.array([1e3, 1e6])
    a = GeometryProfile(2).warp(x)[0]
    np.testing.assert_allclose(a / x, (1.0 + x ** -4.0) ** 0.25, rtol=1e-15)


@pytest.mark.parametrize("m", [1, 2, 4])
def test_trap_profile(m):
    profile = GeometryProfile(m)
    x = np.linspace(-4, 4, 801)
    b = profile.trap_profile(x)
    assert profile.trap_profile(0.0) == 0.0
    assert np.all(b >= 0) and np.all(b < 1)
    np.testing.assert_allclose(b, 1.0 - profile.warp(x)[0] ** -2, atol=1e-14)

    db, ddb = profile.trap_derivatives(x)
    h = x[1] - x[0]
    np.testing.assert_allclose(np.gradient(b, h)[1:-1], db[1:-1], atol=1e-3)
    np.testing.assert_allclose(np.gradient(db, h)[1:-1], ddb[1:-1], atol=1e-2)


def test_trap_profile_tiny_argument():
    # b ~ x^{2m}/m near the trapped set
    x = 1e-3
    assert GeometryProfile(2).trap_profile(x) == pytest.approx(x ** 4 / 2, rel=1e-6)


def test_potential():
    profile = GeometryProfile(2)
    assert profile.potential(0.0, 3.0, 2.0) == pytest.approx(4.0 - 9.0)
    x = np.array([0.5, 2.0])
    expected = (1.0 - 2.0j) ** 2 - 16.0 / profile.warp(x)[0] ** 2
    np.testing.assert_allclose(profile.potential(x, 4.0, 1.0 - 2.0j), expected, rtol=1e-13)


def test_le_weight():
    profile = GeometryProfile(3)
    assert profile.le_weight(0.0) == 0.0
    assert profile.le_weight(1e4) == pytest.approx(1.0, rel=1e-7)
    x = np.array([-2.0, 0.5, 3.0])
    np.testing.assert_allclose(profile.le_weight(x), (np.abs(x) / np.sqrt(1.0 + x ** 2)) ** 3, rtol=1e-14)


@pytest.mark.parametrize("m", [0, -1, 1.5, True])
def test_invalid_degeneracy(m):
    with pytest.raises(ParameterError):
        GeometryProfile(m)


def test_smooth_cutoff_shape():
    rho = np.linspace(0, 1.5, 1501)
    beta = smooth_cutoff(rho)
    assert np.all(beta[rho <= 0.5] == 1.0)
    assert np.all(beta[rho >= 1.0] == 0.0)
    assert np.all(np.diff(beta) <= 0)
    assert smooth_cutoff(0.75) == pytest.approx(0.5)


def test_smooth_cutoff_derivatives():
    rho = np.linspace(0, 1.5, 30001)
    h = rho[1] - rho[0]
    # the fourth derivative jumps at the blend ends
    away = (np.abs(rho - 0.5) > 1e-3) & (np.abs(rho - 1.0) > 1e-3)
    away[[0, -1]] = False
    for order in (1, 2, 3):
        numeric = np.gradient(smooth_cutoff(rho, order - 1), h)
        np.testing.assert_allclose(numeric[away], smooth_cutoff(rho, order)[away], atol=1e-2)
    with pytest.raises(ParameterError):
        smooth_cutoff(0.7, order=4)


def test_taylor_bounds():
    x = np.linspace(-1, 1, 201)
    assert taylor_bounds(GeometryProfile(1), x) == pytest.approx((1.0, 1.0))
    c1, c2 = taylor_bounds(GeometryProfile(2), x)
    # ((s+1)^{1/2} - 1)/s on (0, 1]
    assert c1 == pytest.approx(np.sqrt(2.0) - 1.0)
    assert c2 == pytest.approx(0.5, rel=1e-6)


def test_potential_near_cancellation():
    a = (0.3 ** 4 + 1.0) ** 0.25
    expected = 190.0 ** 2 - 200.0 ** 2 / a ** 2
    assert GeometryProfile(2).potential(0.3, 200.0, 190.0) == pytest.approx(expected, rel=1e-12)
