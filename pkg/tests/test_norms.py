import math

import numpy as np
import pytest

from core.errors import GridError, SupportError, UndefinedRatioError
from lab.discretization import Grid
from lab.evolution import ModeState, Trajectory
from lab.geometry import GeometryProfile, smooth_cutoff
from lab.multipliers import multiplier_preset
from lab.norms import (
    hardy_ratio, ibp_residual, ibp_terms, le1_norm, le_dual_norm, le_norm, mode_energy,
)
from sweeps.identity_experiments import bump_cosine_trajectory
from utils.sampling import random_bumps


def test_mode_energy_parts():
    grid = Grid(6.0, 1201)
    profile = GeometryProfile(1)
    phi = np.exp(-grid.x ** 2)
    report = mode_energy(ModeState(phi, np.zeros_like(phi)), 1.0, grid, profile)
    assert report.kinetic == 0.0
    # a^2 cancels the lambda^2/a^2 weight
    assert report.angular == pytest.approx(math.sqrt(math.pi / 2), rel=1e-10)
    assert report.total == pytest.approx(report.radial + report.angular)
    assert set(report.as_dict()) == {"kinetic", "radial", "angular", "total"}


def test_le_norm_of_constant_field():
    grid = Grid(1.0, 41)
    profile = GeometryProfile(2)
    ones = np.ones((2, grid.n))
    a2 = profile.warp(grid.x)[0] ** 2
    expected = math.sqrt(np.sum(grid.weights * a2))
    assert le_norm(ones, grid, profile, dt=1.0) == pytest.approx(expected)
    assert le_norm(ones[:1], grid, profile) == 0.0


def test_le_dual_dominates_le():
    grid = Grid(10.0, 401)
    profile = GeometryProfile(2)
    rng = np.random.default_rng(3)
    samples = rng.standard_normal((5, grid.n))
    assert le_dual_norm(samples, grid, profile, dt=0.1) >= le_norm(samples, grid, profile, dt=0.1)


def _le_by_loops(samples, dt, grid, profile, sign):
    a = profile.warp(grid.x)[0]
    top = int(math.floor(math.log2(math.sqrt(1.0 + grid.half_width ** 2))))
    terms = []
    for j in range(top + 1):
        per_time = []
        for sample in samples:
            total = 0.0
            for i, x in enumerate(grid.x):
                level = min(max(int(math.floor(math.log2(math.sqrt(1.0 + x * x)))), 0), top)
                if level == j:
                    total += grid.weights[i] * a[i] ** 2 * abs(sample[i]) ** 2
            per_time.append(total)
        integral = sum(0.5 * dt * (per_time[k] + per_time[k + 1]) for k in range(len(per_time) - 1))
        terms.append(2.0 ** (sign * 0.5 * j) * math.sqrt(integral))
    return max(terms) if sign < 0 else sum(terms)


def test_le_norms_against_annulus_loops():
    grid = Grid(9.0, 181)
    profile = GeometryProfile(3)
    rng = np.random.default_rng(5)
    samples = rng.standard_normal((4, grid.n))
    assert le_norm(samples, grid, profile, dt=0.2) == pytest.approx(
        _le_by_loops(samples, 0.2, grid, profile, -1), rel=1e-12)
    assert le_dual_norm(samples, grid, profile, dt=0.2) == pytest.approx(
        _le_by_loops(samples, 0.2, grid, profile, 1), rel=1e-12)


def test_le_norms_are_homogeneous():
    grid = Grid(9.0, 181)
    profile = GeometryProfile(2)
    samples = np.random.default_rng(6).standard_normal((4, grid.n))
    for norm in (le_norm, le_dual_norm):
        single = norm(samples, grid, profile, dt=0.1)
        assert norm(2.0 * samples, grid, profile, dt=0.1) == pytest.approx(2.0 * single, rel=1e-12)
        assert norm(-3.0j * samples, grid, profile, dt=0.1) == pytest.approx(3.0 * single, rel=1e-12)


def test_raw_series_needs_dt():
    grid = Grid(1.0, 11)
    with pytest.raises(GridError):
        le_norm(np.ones((3, grid.n)), grid, GeometryProfile(1))


def test_le1_norm_positive():
    grid = Grid(6.0, 241)
    trajectory = bump_cosine_trajectory(grid, 5.0, 1.0, 0.025)
    assert le1_norm(trajectory, 2.0, grid, GeometryProfile(2)) > 0.0
    with pytest.raises(GridError):
        le1_norm(Trajectory(grid, 0.1, []), 2.0, grid, GeometryProfile(2))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_hardy_ratio_bounded(m):
    grid = Grid(8.0, 4001)
    profile = GeometryProfile(m)
    rng = np.random.default_rng([0, m])
    ratios = [hardy_ratio(u, grid, profile) for u in random_bumps(rng, grid, 50)]
    assert all(np.isfinite(ratios))
    assert max(ratios) <= 4.0


def test_hardy_ratio_errors():
    grid = Grid(2.0, 41)
    profile = GeometryProfile(2)
    with pytest.raises(UndefinedRatioError):
        hardy_ratio(np.zeros(grid.n), grid, profile)
    with pytest.raises(SupportError):
        hardy_ratio(np.ones(grid.n), grid, profile)


@pytest.mark.parametrize("preset", ["exterior", "interior", "lagrangian"])
def test_ibp_identity_second_order(preset):
    profile = GeometryProfile(2)
    residuals = []
    for n in (161, 321, 641):
        grid = Grid(6.0, n)
        trajectory = bump_cosine_trajectory(grid, 5.0, 1.0, 0.5 * grid.h)
        pair = multiplier_preset(preset, {}, grid, profile)
        residuals.append(ibp_residual(trajectory, pair, 1.0, grid, profile))
    order = math.log2(residuals[-2] / residuals[-1])
    assert order == pytest.approx(2.0, abs=0.2)


def test_ibp_terms_balance():
    grid = Grid(6.0, 641)
    profile = GeometryProfile(2)
    trajectory = bump_cosine_trajectory(grid, 5.0, 1.0, 0.5 * grid.h)
    pair = multiplier_preset("exterior", {}, grid, profile)
    terms = ibp_terms(trajectory, pair, 1.0, grid, profile)
    bulk = terms["time"] + terms["radial"] + terms["angular"] + terms["lower"]
    assert terms["rhs"] == pytest.approx(terms["boundary"] + bulk)
    assert abs(terms["lhs"] - terms["rhs"]) <= 1e-2 * max(abs(terms["lhs"]), 1.0)


def test_ibp_requirements():
    grid = Grid(6.0, 161)
    profile = GeometryProfile(2)
    pair = multiplier_preset("lagrangian", {}, grid, profile)
    short = bump_cosine_trajectory(grid, 5.0, 1.0, 0.5)
    with pytest.raises(GridError):
        ibp_terms(Trajectory(grid, 0.1, short.states[:2]), pair, 1.0, grid, profile)
    wide = smooth_cutoff(np.abs(grid.x) / 6.0)
    states = [ModeState(wide, np.zeros(grid.n), t) for t in (0.0, 0.1, 0.2)]
    with pytest.raises(SupportError):
        ibp_terms(Trajectory(grid, 0.1, states), pair, 1.0, grid, profile)
