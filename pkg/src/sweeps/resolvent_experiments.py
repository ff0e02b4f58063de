import logging

from core.config import config
from core.errors import NearResonanceError
from core.experiment_base import Experiment
from lab.geometry import GeometryProfile
from lab.resolvent import (
    ModeParams, RegimeLabel, classify_regime, eps_grid, estimate_ratios, make_forcing,
    resolvent_grid, solve_resolvent, sup_over_eps,
)
from lab.wkb import degenerate_quadrature, trapping_scale
from sweeps.fitting import fit_if_possible
from sweeps.report import make_row
from utils.sampling import log_spaced

logger = logging.getLogger("resolvent_experiments")

UNIFORM_CASES = {"I": RegimeLabel.CASE_I, "II": RegimeLabel.CASE_II, "III": RegimeLabel.CASE_III}


def _flag_for(error):
    if isinstance(error, NearResonanceError):
        return "near_resonance"
    return type(error).__name__


class ResolventSweep(Experiment):
    """
    Estimate ratios across the four frequency regimes

    Case IV measures sup over eps of (|tau|+lambda)||phi||/||g|| for every
    lambda in the sweep grid; Cases I-III run their own log-spaced designs
    from the [resolvent.case_*] tables.
    """
    kind = "resolvent"

    def _grid_kwargs(self):
        policy = self.config.grid_policy
        return {"points_per_wavelength": policy.get("points_per_wavelength"), "h_cap": policy.get("h_cap")}

    def _design(self, case):
        table = {**config.section(f"resolvent.case_{case.lower()}"),
                 **self.config.options.get(f"case_{case.lower()}", {})}
        if case == "I":
            lams = log_spaced(table["lam_min"], table["lam_max"], table["points_per_decade"])
            pairs = [(lam, table.get("tau_over_lam", 1.0) * lam) for lam in lams]
        else:
            taus = log_spaced(table["tau_min"], table["tau_max"], table["points_per_decade"])
            pairs = [(table["lam"], tau) for tau in taus]
        return table, pairs

    def points(self):
        cases = self.config.options.get("cases", config.get('resolvent', 'cases', ["IV"]))
        points = []
        for m in self.config.m:
            for case in cases:
                if case == "IV":
                    points.extend(("IV", m, lam, None) for lam in self.config.lambdas)
                else:
                    _, pairs = self._design(case)
                    points.extend((case, m, float(lam), float(tau)) for lam, tau in pairs)
        return points

    def run_point(self, point):
        case, m, lam, tau = point
        profile = GeometryProfile(m)
        if case == "IV":
            return self._run_case_iv(m, lam, profile)

        table, _ = self._design(case)
        params = ModeParams(lam, tau)
        grid = resolvent_grid(params, **self._grid_kwargs())
        g = make_forcing(table.get("forcing", "bump"), grid, params, m)
        sol = solve_resolvent(g, params, grid, profile, closure=table.get("closure", "dirichlet"))
        r_main, r_strong, r_weighted = estimate_ratios(sol, m, self.config.delta)
        regime = classify_regime(params, m)
        return [make_row(m, lam, params.eps, params.tau, regime, kind, value)
                for kind, value in (("r_strong", r_strong), ("r_main", r_main), ("r_weighted", r_weighted))]

    def _run_case_iv(self, m, lam, profile):
        table = {**config.section("resolvent.case_iv"), **self.config.options.get("case_iv", {})}
        values = eps_grid(lam, m, **self.config.eps_grid)
        result = sup_over_eps(lam, m, profile, values, closure=table.get("closure", "outgoing"),
                              forcing=table.get("forcing", "concentrated"), grid_kwargs=self._grid_kwargs())
        skipped = sum(1 for _, ratio, _ in result["points"] if ratio is None)
        flag = f"near_resonance={skipped}" if skipped else ""
        if result["sup"] is None:
            return [make_row(m, lam, None, None, None, "sup_ratio", None, flag or "no_points")]
        params = ModeParams.from_eps(lam, result["eps_at_sup"])
        regime = classify_regime(params, m)
        return [make_row(m, lam, result["eps_at_sup"], params.tau, regime, "sup_ratio", result["sup"], flag)]

    def failed_rows(self, point, error):
        case, m, lam, tau = point
        kind = "sup_ratio" if case == "IV" else "r_strong"
        return [make_row(m, lam, None, tau, None, kind, None, _flag_for(error))]

    def evaluate(self, rows):
        fits = {}
        flags = {}
        upper = self.config.fit_upper_half
        for m in self.config.m:
            target = (m - 1.0) / (m + 1)
            pairs = [(r["lambda"], r["value"]) for r in rows
                     if r["m"] == m and r["value_kind"] == "sup_ratio" and r["value"] is not None]
            fit = fit_if_possible(pairs, upper)
            if fit is not None:
                fits[f"case_iv_m{m}"] = fit.as_dict()
                flags[f"case_iv_slope_m{m}"] = abs(fit.slope - target) <= self.config.tolerance("case_iv_slope_tol", 0.07)

            for case, label in UNIFORM_CASES.items():
                x_column = "lambda" if case == "I" else "tau_re"
                pairs = [(abs(r[x_column]), r["value"]) for r in rows
                         if r["m"] == m and r["value_kind"] == "r_strong" and r["regime"] == str(label)
                         and r["value"] is not None]
                fit = fit_if_possible(pairs, upper)
                if fit is not None:
                    fits[f"case_{case.lower()}_m{m}"] = fit.as_dict()
                    flags[f"case_{case.lower()}_uniform_m{m}"] = \
                        abs(fit.slope) <= self.config.tolerance("uniform_slope_tol", 0.05)
        return fits, flags


class QuadratureLemmas(Experiment):
    """
    Degenerate-well integrals normalized by their predicted growth in lambda
    """
    kind = "quadrature-lemmas"

    def _series(self):
        """
        (label, fixed eps, scaled constant) per eps series

        A fixed series holds eps constant over lambda; a scaled series sets
        eps = c lambda^{-2m/(m+1)} at every lambda.
        """
        options = self.config.options
        series = [(f"eps{float(e):g}", float(e), None)
                  for e in options.get("eps_values", config.get('quadrature', 'eps_values', [0.0]))]
        series.extend((f"scaled{float(c):g}", None, float(c))
                      for c in options.get("scaled_eps", config.get('quadrature', 'scaled_eps', [])))
        return series

    def points(self):
        series = self._series()
        points = []
        for m in self.config.m:
            if m < 2:
                self.logger.warning(f"Skipping m={m}: the degenerate-well integrals need m >= 2")
                continue
            for label, eps, scaled in series:
                for lam in self.config.lambdas:
                    value = eps if scaled is None else scaled * trapping_scale(lam, m)
                    points.append((m, lam, value, label))
        return points

    def run_point(self, point):
        m, lam, eps, label = point
        params = ModeParams.from_eps(lam, eps)
        regime = classify_regime(params, m)
        rows = []
        for kind, q in (("quad_q0", 0.0), ("quad_weighted", m - 1.0 + self.config.delta)):
            value, comparator = degenerate_quadrature(lam, eps, m, q)
            rows.append(make_row(m, lam, eps, params.tau, regime, f"{kind}_{label}", value / comparator))
        return rows

    def failed_rows(self, point, error):
        m, lam, eps, label = point
        return [make_row(m, lam, eps, None, None, f"quad_q0_{label}", None, _flag_for(error))]

    def evaluate(self, rows):
        flags = {}
        limit = self.config.tolerance("quad_ratio_max", 4.0)
        groups = {}
        for r in rows:
            if r["value"] is not None:
                groups.setdefault((r["m"], r["value_kind"]), []).append(r["value"])
        for (m, kind), values in sorted(groups.items()):
            if len(values) > 1:
                flags[f"{kind}_bounded_m{m}"] = max(values) / min(values) <= limit
        return {}, flags

