import math
import logging

import numpy as np

from core.config import config
from core.experiment_base import Experiment
from lab.discretization import grid_for, make_grid
from lab.evolution import ModeState, Trajectory
from lab.geometry import GeometryProfile
from lab.multipliers import MultiplierPair, coercivity_violations, multiplier_preset
from lab.norms import hardy_ratio, ibp_residual
from sweeps.report import make_row
from utils.sampling import random_bumps

logger = logging.getLogger("identity_experiments")

IBP_PRESETS = ("exterior", "interior", "lagrangian", "custom")


def bump_cosine_trajectory(grid, support, duration, dt):
    """
    Exact samples of w = (1 - (x/s)^2)^6 cos t on |x| <= s

    Args:
        grid (Grid): Grid with X > s
        support (float): s
        duration (float): Final time
        dt (float): Sample spacing; duration/dt is rounded to whole steps

    Returns:
        Trajectory: Every-step samples of w and w_t
    """
    steps = max(2, int(round(duration / dt)))
    dt = duration / steps
    x = grid.x
    profile = np.where(np.abs(x) < support, (1.0 - (x / support) ** 2) ** 6, 0.0)
    states = [ModeState(profile * math.cos(n * dt), -profile * math.sin(n * dt), n * dt)
              for n in range(steps + 1)]
    return Trajectory(grid, dt, states)


def custom_pair(grid, profile, support):
    """
    User-style pair f = x * bump, g = bump with discrete derivatives, bump = (1 - (x/s)^2)^8
    """
    y = grid.x / support
    bump = np.where(np.abs(y) < 1.0, (1.0 - y ** 2) ** 8, 0.0)
    return MultiplierPair.from_samples(grid.x * bump, bump, grid, profile, {"preset": "custom"})


class IbpCheck(Experiment):
    """
    Refinement study of the multiplier identity and sign checks of the interior bulk coefficients
    """
    kind = "ibp-check"

    def points(self):
        points = [("ibp", m, preset) for m in self.config.m for preset in IBP_PRESETS]
        radii = self.config.options.get("coercivity_radii", [8.0, 16.0, 32.0])
        points.extend(("coercivity", m, float(r)) for m in self.config.m if m >= 2 for r in radii)
        return points

    def run_point(self, point):
        check, m, arg = point
        profile = GeometryProfile(m)
        if check == "coercivity":
            return self._coercivity(m, arg, profile)

        table = {**config.section('ibp'), **self.config.options.get("ibp", {})}
        lam = float(table.get("lam", 1.0))
        half_width = float(table.get("half_width", 6.0))
        support = float(table.get("support", 5.0))
        cfl = float(table.get("cfl", 0.5))
        base = make_grid(half_width, int(table.get("n_base", 161)))
        residuals = []
        rows = []
        for level in range(int(table.get("levels", 3))):
            grid = base.refine(2 ** level) if level else base
            trajectory = bump_cosine_trajectory(grid, support, float(table.get("duration", 1.0)), cfl * grid.h)
            if arg == "custom":
                pair = custom_pair(grid, profile, support)
            else:
                pair = multiplier_preset(arg, self.config.options.get(f"{arg}_params", {}), grid, profile)
            residual = ibp_residual(trajectory, pair, lam, grid, profile)
            residuals.append(residual)
            rows.append(make_row(m, lam, None, None, None, f"ibp_residual:{arg}:level{level}", residual))
        if len(residuals) >= 2 and residuals[-1] > 0:
            order = math.log2(residuals[-2] / residuals[-1])
            rows.append(make_row(m, lam, None, None, None, f"ibp_order:{arg}", order))
        return rows

    def _coercivity(self, m, radius, profile):
        grid = grid_for(radius, 0.0, h_cap=self.config.grid_policy.get("h_cap", 1.0 / 64))
        params = {"r": radius, "delta": self.config.options.get("coercivity_delta", 0.01)}
        pair = multiplier_preset("interior", params, grid, profile)
        violations = coercivity_violations(pair, profile, grid.x, radius,
                                           self.config.tolerance("coercivity_rel", 1e-12))
        count = sum(len(nodes) for nodes in violations.values())
        return [make_row(m, None, None, None, None, f"coercivity_violations:R={radius:g}", count)]

    def failed_rows(self, point, error):
        check, m, arg = point
        return [make_row(m, None, None, None, None, f"{check}:{arg}", None, type(error).__name__)]

    def evaluate(self, rows):
        flags = {}
        target = self.config.tolerance("ibp_order", 2.0)
        tol = self.config.tolerance("ibp_order_tol", 0.2)
        for r in rows:
            name = r["value_kind"]
            if name.startswith("ibp_order:"):
                flags[f"{name.replace(':', '_')}_m{r['m']}"] = \
                    r["value"] is not None and abs(r["value"] - target) <= tol
            elif name.startswith("coercivity_violations:"):
                flags[f"coercive_{name.split(':')[1]}_m{r['m']}"] = r["value"] == 0
            elif r["value"] is None:
                flags[f"{name.replace(':', '_')}_m{r['m']}"] = False
        return {}, flags


class HardyCheck(Experiment):
    """
    Randomized search for the Hardy constant over seeded smooth bumps
    """
    kind = "hardy-check"

    def points(self):
        return [(m,) for m in self.config.m]

    def run_point(self, point):
        (m,) = point
        table = config.section('hardy')
        samples = int(self.config.options.get("samples", table.get("samples", 50)))
        grid = make_grid(float(table.get("half_width", 8.0)), int(table.get("n", 4001)))
        profile = GeometryProfile(m)
        rng = np.random.default_rng([self.config.seed, m])
        return [make_row(m, None, None, None, None, "hardy_ratio", hardy_ratio(u, grid, profile))
                for u in random_bumps(rng, grid, samples)]

    def evaluate(self, rows):
        flags = {}
        limit = self.config.tolerance("hardy_max", 4.0)
        for m in self.config.m:
            ratios = [r["value"] for r in rows if r["m"] == m and r["value"] is not None]
            if ratios:
                flags[f"hardy_bounded_m{m}"] = max(ratios) <= limit
        return {}, flags
