import math

import numpy as np
import pytest
from scipy import integrate

from core.errors import GridError
from lab.discretization import (
    FluxLaplacian, Grid, dyadic_partition, flux_laplacian, gradient, grid_for, make_grid, masked_weights,
    quadrature, resolution, second_derivative,
)
from lab.geometry import GeometryProfile


def test_grid_is_symmetric():
    grid = Grid(3.0, 61)
    assert grid.x[grid.center] == 0.0
    np.testing.assert_array_equal(grid.x, -grid.x[::-1])
    assert grid.h == pytest.approx(0.1)
    assert grid.X == 3.0
    assert len(grid) == 61


@pytest.mark.parametrize("half_width, n", [(1.0, 4), (1.0, 1), (0.0, 11), (-1.0, 11)])
def test_invalid_grids(half_width, n):
    with pytest.raises(GridError):
        Grid(half_width, n)


def test_grid_arrays_read_only():
    grid = Grid(1.0, 11)
    with pytest.raises(ValueError):
        grid.x[0] = 5.0


def test_check_rejects_mismatch():
    grid = Grid(1.0, 11)
    with pytest.raises(GridError):
        grid.check(np.zeros(12))
    bad = np.zeros(11)
    bad[3] = np.nan
    with pytest.raises(GridError):
        grid.check(bad)


def test_refine_halves_spacing():
    grid = Grid(2.0, 41)
    fine = grid.refine(2)
    assert fine.n == 81
    assert fine.h == pytest.approx(grid.h / 2)
    np.testing.assert_allclose(fine.x[::2], grid.x, atol=1e-15)


def test_support_radius():
    grid = Grid(2.0, 41)
    u = np.where(np.abs(grid.x) <= 0.5 + 1e-12, 1.0, 0.0)
    assert grid.support_radius(u) == pytest.approx(0.5)
    assert grid.support_radius(np.zeros(41)) == 0.0


def test_resolution_rule():
    n = resolution(4.0, 100.0, points_per_wavelength=8, h_cap=1.0 / 64)
    assert n % 2 == 1
    assert 8.0 / (n - 1) <= 1.0 / 800 + 1e-15
    assert grid_for(4.0, 0.0).h <= 1.0 / 64 + 1e-15


@pytest.mark.parametrize("m", [1, 2, 3])
def test_flux_laplacian_is_symmetric(m):
    grid = Grid(4.0, 81)
    operator = FluxLaplacian(grid, GeometryProfile(m))
    rng = np.random.default_rng(7)
    u, v = rng.standard_normal((2, grid.n))
    lhs = np.sum(operator.node_weights * u * operator(v))
    rhs = np.sum(operator.node_weights * v * operator(u))
    assert lhs == pytest.approx(rhs, rel=1e-12)


@pytest.mark.parametrize("m", [1, 2])
def test_flux_laplacian_second_order(m):
    profile = GeometryProfile(m)

    def error(n):
        grid = Grid(6.0, n)
        x = grid.x
        u = np.exp(-x ** 2)
        ell = profile.log_derivative(x)[0]
        exact = (4 * x ** 2 - 2) * u + 2 * ell * (-2 * x * u)
        return np.max(np.abs(flux_laplacian(u, grid, profile) - exact))

    order = math.log2(error(241) / error(481))
    assert order == pytest.approx(2.0, abs=0.1)


def test_spectral_bound_dominates():
    grid = Grid(3.0, 61)
    operator = FluxLaplacian(grid, GeometryProfile(2))
    dense = np.diag(operator.diagonal) + np.diag(operator.upper[:-1], 1) + np.diag(operator.lower[1:], -1)
    assert np.max(np.abs(np.linalg.eigvals(dense))) <= operator.spectral_bound() * (1 + 1e-12)


def test_gradient_and_second_derivative():
    grid = Grid(2.0, 401)
    u = np.sin(grid.x) * np.exp(-4 * grid.x ** 2)
    du = (np.cos(grid.x) - 8 * grid.x * np.sin(grid.x)) * np.exp(-4 * grid.x ** 2)
    np.testing.assert_allclose(gradient(u, grid), du, atol=5e-3)
    d2u = np.gradient(du, grid.h)
    np.testing.assert_allclose(second_derivative(u, grid)[2:-2], d2u[2:-2], atol=1e-2)


def test_quadrature_against_gaussian():
    grid = Grid(6.0, 601)
    profile = GeometryProfile(2)
    a = profile.warp(grid.x)[0]
    value = quadrature(np.exp(-grid.x ** 2), a ** -2, grid, profile)
    assert value == pytest.approx(math.sqrt(math.pi), rel=1e-10)
    half = quadrature(np.exp(-grid.x ** 2), a ** -2, grid, profile, mask=grid.x >= 0)
    assert half == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-10)


def test_dyadic_partition_covers_grid_once():
    grid = Grid(20.0, 401)
    parts = dyadic_partition(grid)
    assert len(parts) == int(math.floor(math.log2(math.sqrt(1 + 20.0 ** 2)))) + 1
    joined = np.sort(np.concatenate(parts))
    np.testing.assert_array_equal(joined, np.arange(grid.n))


def test_make_grid_matches_constructor():
    grid = make_grid(2.5, 51)
    assert isinstance(grid, Grid)
    assert grid.x[grid.center] == 0.0
    np.testing.assert_array_equal(grid.x, Grid(2.5, 51).x)
    with pytest.raises(GridError):
        make_grid(1.0, 10)


def test_masked_weights():
    grid = Grid(1.0, 11)
    weights = masked_weights(grid, grid.x >= -1e-12)
    assert weights[grid.center] == pytest.approx(0.5 * grid.h)
    assert weights[-1] == pytest.approx(0.5 * grid.h)
    np.testing.assert_allclose(weights[grid.center + 1:-1], grid.h)
    assert np.all(weights[:grid.center] == 0)
    np.testing.assert_allclose(masked_weights(grid, np.ones(grid.n, dtype=bool)), grid.weights)

    isolated = np.zeros(grid.n, dtype=bool)
    isolated[3] = True
    assert not masked_weights(grid, isolated).any()
    with pytest.raises(GridError):
        masked_weights(grid, np.ones(grid.n + 1, dtype=bool))


def test_masked_quadrature_is_second_order():
    profile = GeometryProfile(2)

    def error(n):
        grid = Grid(2.0, n)
        a = profile.warp(grid.x)[0]
        mask = (grid.x >= -1e-12) & (grid.x <= 1.0 + 1e-12)
        value = quadrature(np.exp(grid.x), a ** -2, grid, profile, mask=mask)
        return value - (math.e - 1.0), grid.h

    coarse, h = error(41)
    fine, _ = error(81)
    # trapezoid leading term h^2/12 (f'(1) - f'(0))
    assert coarse == pytest.approx(h ** 2 / 12.0 * (math.e - 1.0), rel=2e-2)
    assert coarse / fine == pytest.approx(4.0, rel=1e-2)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_volume_quadrature_against_adaptive_oracle(m):
    grid = Grid(1.0, 8193)
    profile = GeometryProfile(m)
    value = quadrature(np.ones(grid.n), 1.0, grid, profile)
    exact, _ = integrate.quad(lambda x: (x ** (2 * m) + 1.0) ** (1.0 / m), -1.0, 1.0, epsabs=1e-14, epsrel=1e-14)
    assert value == pytest.approx(exact, rel=1e-8)


def test_gradient_exact_on_linear_functions():
    grid = Grid(3.0, 31)
    np.testing.assert_allclose(gradient(grid.x, grid), np.ones(grid.n), atol=1e-12)
    np.testing.assert_allclose(gradient(2.0 - 0.5 * grid.x, grid), np.full(grid.n, -0.5), atol=1e-12)


def test_gradient_second_order_up_to_the_ends():
    def error(n):
        grid = Grid(math.pi, n)
        return np.max(np.abs(gradient(np.sin(grid.x), grid) - np.cos(grid.x)))

    errors = [error(n) for n in (101, 201, 401)]
    orders = [math.log2(errors[i] / errors[i + 1]) for i in range(2)]
    for order in orders:
        assert order == pytest.approx(2.0, abs=0.1)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_flux_laplacian_is_nonpositive(m):
    grid = Grid(4.0, 81)
    operator = FluxLaplacian(grid, GeometryProfile(m))
    rng = np.random.default_rng(11)
    for u in rng.standard_normal((5, grid.n)):
        assert np.sum(operator.node_weights * u * operator(u)) <= 0.0
