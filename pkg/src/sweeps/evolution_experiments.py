import logging

import numpy as np

from core.config import config
from core.experiment_base import Experiment
from lab.discretization import grid_for
from lab.evolution import ModeState, self_convergence
from lab.geometry import GeometryProfile
from lab.quasimode import build_quasimode, growth_gap, growth_gap_series, polynomial_bump, tau_root
from lab.saturation import saturation_experiment
from sweeps.fitting import fit_if_possible
from sweeps.report import make_row

logger = logging.getLogger("evolution_experiments")


def _values(rows, m, kind):
    return [(r["lambda"], r["value"]) for r in rows
            if r["m"] == m and r["value_kind"] == kind and r["value"] is not None]


def growth_gap_rows(m):
    """
    Minimum of the growth-factor gap on s in [0, 5] and the error of its series
    """
    samples = np.linspace(0.0, 5.0, 501)
    gap = growth_gap(samples)
    series_error = float(np.max(np.abs(gap - growth_gap_series(samples)) / gap))
    return [make_row(m, None, None, None, None, "growth_gap_min", float(np.min(gap))),
            make_row(m, None, None, None, None, "growth_series_error", series_error)]


def growth_gap_flags(rows, m, sweep_config, flags):
    for r in rows:
        if r["m"] == m and r["value_kind"] == "growth_gap_min" and r["value"] is not None:
            flags[f"growth_gap_m{m}"] = \
                r["value"] >= sweep_config.tolerance("growth_lower_bound", 0.25) - 1e-12


def convergence_row(m):
    """
    Self-convergence order of the leapfrog scheme on compact polynomial data
    """
    lam = config.get('saturation', 'convergence_lambda', 8.0)
    grid = grid_for(config.get('saturation', 'convergence_half_width', 3.0), lam)

    def initial(level):
        return ModeState(polynomial_bump(2.0 * level.x) ** 2, np.zeros(level.n))

    order, _ = self_convergence(initial, lam, config.get('saturation', 'convergence_time', 1.0),
                                grid, GeometryProfile(m), cfl=0.5, levels=3)
    return make_row(m, lam, None, None, None, "convergence_order", order)


class QuasimodeScan(Experiment):
    """
    Quasimode residual scaling, measured constant and mass normalization over lambda
    """
    kind = "quasimode"

    def points(self):
        points = [(m, lam) for m in self.config.m for lam in self.config.lambdas]
        points.extend((m, None) for m in self.config.m)
        return points

    def run_point(self, point):
        m, lam = point
        if lam is None:
            return growth_gap_rows(m)

        mode = build_quasimode(lam, m, profile=self.config.options.get("profile", "polynomial"))
        tau = tau_root(lam, mode.E)
        return [
            make_row(m, lam, None, tau, None, "residual_ratio", mode.norm_residual / mode.norm_u),
            make_row(m, lam, None, tau, None, "c_measured", mode.c_measured),
            make_row(m, lam, None, tau, None, "normalized_mass", mode.normalized_mass),
        ]

    def failed_rows(self, point, error):
        m, lam = point
        return [make_row(m, lam, None, None, None, "residual_ratio", None, type(error).__name__)]

    def evaluate(self, rows):
        fits = {}
        flags = {}
        for m in self.config.m:
            fit = fit_if_possible(_values(rows, m, "residual_ratio"), self.config.fit_upper_half)
            if fit is not None:
                fits[f"residual_m{m}"] = fit.as_dict()
                flags[f"residual_slope_m{m}"] = \
                    abs(fit.slope + 2.0 * m / (m + 1)) <= self.config.tolerance("quasimode_slope_tol", 0.1)

            constants = [value for _, value in _values(rows, m, "c_measured")]
            if len(constants) > 1:
                flags[f"c_measured_bounded_m{m}"] = \
                    max(constants) <= self.config.tolerance("quasimode_c_ratio_max", 2.0) * min(constants)
            masses = [value for _, value in _values(rows, m, "normalized_mass")]
            if len(masses) > 1:
                flags[f"mass_normalized_m{m}"] = \
                    (max(masses) - min(masses)) / min(masses) <= self.config.tolerance("quasimode_mass_rel", 1e-6)

            growth_gap_flags(rows, m, self.config, flags)
        return fits, flags


class SaturationSweep(Experiment):
    """
    Saturation of the lossy estimate by quasimode data, one evolution per lambda
    """
    kind = "saturation"

    def points(self):
        points = [(m, lam) for m in self.config.m for lam in self.config.lambdas]
        points.extend((m, None) for m in self.config.m)
        return points

    def run_point(self, point):
        m, lam = point
        if lam is None:
            return growth_gap_rows(m) + [convergence_row(m)]
        result = saturation_experiment(lam, m, self.config.eps_t, self.config.grid_policy,
                                       profile=self.config.options.get("profile", "polynomial"))
        values = result.as_dict()
        return [make_row(m, lam, None, result.tau, None, kind, values[kind])
                for kind in ("ratio", "lhs", "rhs", "b2t_prediction", "c_measured", "energy_drift")]

    def failed_rows(self, point, error):
        m, lam = point
        if lam is None:
            return [make_row(m, None, None, None, None, "growth_gap_min", None, type(error).__name__)]
        return [make_row(m, lam, None, None, None, "ratio", None, type(error).__name__)]

    def evaluate(self, rows):
        fits = {}
        flags = {}
        for m in self.config.m:
            ratios = sorted(_values(rows, m, "ratio"))
            fit = fit_if_possible(ratios, self.config.fit_upper_half)
            if fit is not None:
                fits[f"saturation_m{m}"] = fit.as_dict()
                flags[f"saturation_slope_m{m}"] = fit.slope >= self.config.tolerance("saturation_slope_min", -0.05)
            if len(ratios) > 1:
                floor = self.config.tolerance("saturation_floor", 0.5) * ratios[0][1]
                flags[f"saturation_floor_m{m}"] = min(value for _, value in ratios) >= floor

            drifts = [value for _, value in _values(rows, m, "energy_drift")]
            if drifts:
                flags[f"energy_conserved_m{m}"] = max(drifts) <= self.config.tolerance("energy_drift", 1e-8)

            lhs = dict(_values(rows, m, "lhs"))
            predictions = dict(_values(rows, m, "b2t_prediction"))
            limit = self.config.tolerance("saturation_prediction_rel", 0.5)
            checked = [abs(lhs[lam] - predictions[lam]) / predictions[lam] <= limit
                       for lam in sorted(lhs) if lam in predictions and lam >= 256]
            if checked:
                flags[f"prediction_agrees_m{m}"] = all(checked)

            orders = [value for _, value in _values(rows, m, "convergence_order")]
            if orders:
                flags[f"convergence_order_m{m}"] = \
                    abs(orders[0] - self.config.tolerance("convergence_order", 2.0)) \
                    <= self.config.tolerance("convergence_order_tol", 0.2)
            growth_gap_flags(rows, m, self.config, flags)
        return fits, flags
