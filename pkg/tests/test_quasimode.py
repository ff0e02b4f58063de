import numpy as np
import pytest

from core.errors import GridError, ParameterError
from lab.discretization import Grid
from lab.quasimode import (
    OscillatorProfile, build_quasimode, growth_factor, growth_gap, growth_gap_series,
    profile_norm_squared, quasimode_grid, tau_root,
)
from sweeps.fitting import fit_exponent


@pytest.mark.parametrize("m", [2, 3])
def test_support_and_mass(m):
    lam = 256.0
    mode = build_quasimode(lam, m)
    outside = np.abs(mode.grid.x) >= mode.support_radius * (1.0 + 1e-9)
    assert np.all(mode.u[outside] == 0)
    assert mode.support_radius == pytest.approx(2.0 * lam ** (-1.0 / (m + 1)))
    assert mode.normalized_mass == pytest.approx(profile_norm_squared("polynomial", m), rel=1e-6)


@pytest.mark.parametrize("m", [2, 3])
def test_residual_scaling(m):
    lams = [64.0, 256.0, 1024.0, 4096.0]
    pairs = []
    for lam in lams:
        mode = build_quasimode(lam, m)
        pairs.append((lam, mode.norm_residual / mode.norm_u))
    fit = fit_exponent(pairs)
    assert fit.slope == pytest.approx(-2.0 * m / (m + 1), abs=0.1)


def test_shift_scaling():
    mode = build_quasimode(64.0, 2, alpha=0.5, beta=-1.0)
    assert mode.E == pytest.approx(complex(0.5, -1.0) * 64.0 ** (-4.0 / 3))


def test_quasimode_preconditions():
    with pytest.raises(ParameterError):
        build_quasimode(8.0, 2)
    with pytest.raises(GridError):
        build_quasimode(64.0, 2, grid=Grid(1.0, 101))
    with pytest.raises(ParameterError):
        build_quasimode(64.0, 2, profile="gaussian")


def test_quasimode_grid_resolution():
    grid = quasimode_grid(1024.0, 2, nodes_across_support=128)
    radius = 2.0 * 1024.0 ** (-1.0 / 3)
    assert np.count_nonzero(np.abs(grid.x) <= radius) >= 128


def test_oscillator_profile():
    harmonic = OscillatorProfile(1)
    assert harmonic.energy == pytest.approx(1.0, rel=1e-4)
    assert harmonic(0.0) == pytest.approx(1.0)
    assert harmonic(2.5) == 0.0
    mode = build_quasimode(64.0, 2, profile="oscillator")
    assert mode.profile_energy > 0


def test_tau_root():
    E = complex(0.0, -1.0) * 64.0 ** (-4.0 / 3)
    tau = tau_root(64.0, E)
    assert tau.imag <= 0
    assert tau ** 2 == pytest.approx(64.0 ** 2 * (1 + E))


def test_growth_factor():
    assert growth_factor(0.0, 3.0) == 1.0
    assert growth_factor(1.0, 1.0) == pytest.approx(np.e - 1.0)
    np.testing.assert_allclose(growth_factor(np.array([0.0, 2.0]), 0.5), [1.0, np.e - 1.0])


def test_growth_gap_lower_bound():
    s = np.linspace(0.0, 5.0, 501)
    gap = growth_gap(s)
    assert gap.min() == pytest.approx(0.25)
    assert np.all(np.diff(gap) > 0)
    np.testing.assert_allclose(growth_gap_series(s), gap, rtol=1e-10)
