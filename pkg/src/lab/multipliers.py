import logging

import numpy as np

from core.errors import ParameterError, GridError
from lab.discretization import gradient, flux_laplacian
from lab.geometry import smooth_cutoff

logger = logging.getLogger("multipliers")


class MultiplierPair:
    """
    Radial multiplier f and Lagrangian weight g sampled on a grid

    Besides f and g the pair carries f', g' and the flux term
    a^{-2}(a^2 g')', which enter the bulk coefficients of the
    multiplier identity.

    Attributes:
        f, g (ndarray): Multiplier and weight
        f_x, g_x (ndarray): First derivatives
        g_flux (ndarray): a^{-2}(a^2 g')' = g'' + 2 (a'/a) g'
        meta (dict): Preset name and parameters
    """
    def __init__(self, f, g, f_x, g_x, g_flux, meta=None):
        arrays = {"f": f, "g": g, "f_x": f_x, "g_x": g_x, "g_flux": g_flux}
        for name, values in arrays.items():
            values = np.asarray(values, dtype=float)
            if not np.all(np.isfinite(values)):
                raise GridError(f"Multiplier component {name} has non-finite entries")
            setattr(self, name, values)
        self.meta = dict(meta or {})

    @property
    def name(self):
        return self.meta.get("preset", "custom")

    @classmethod
    def from_samples(cls, f, g, grid, profile, meta=None):
        """
        Build a pair from sampled f, g with discrete derivatives

        f' uses the second-order gradient and a^{-2}(a^2 g')' the flux-form
        operator; both are O(h^2) in the interior.
        """
        f = grid.check(np.asarray(f, dtype=float), "f")
        g = grid.check(np.asarray(g, dtype=float), "g")
        meta = dict(meta or {})
        meta.setdefault("preset", "custom")
        return cls(f, g, gradient(f, grid), gradient(g, grid), flux_laplacian(g, grid, profile), meta)

    def bulk_coefficients(self, profile, x):
        """
        Coefficients of the four bulk integrals of the multiplier identity

        Args:
            profile (GeometryProfile): Geometry
            x (ndarray): Nodes the pair is sampled on

        Returns:
            dict: 'time' (|w_t|^2), 'radial' (|w_x|^2), 'angular'
                  ((lambda^2/a^2)|w|^2) and 'lower' (|w|^2) coefficient arrays
        """
        ell = profile.log_derivative(x)[0]
        half_div = 0.5 * self.f_x + self.f * ell
        return {
            "time": half_div - self.g,
            "radial": self.f_x + self.g - half_div,
            "angular": self.f * ell + self.g - half_div,
            "lower": -0.5 * self.g_flux,
        }


def _exterior(params, grid, profile):
    rho = float(params.get("rho", 8.0))
    r1 = float(params.get("r1", 2.0))
    big_r = float(params.get("r", rho))
    if not 0.5 * big_r >= r1 >= 2.0:
        raise ParameterError(f"Exterior preset needs R/2 >= R1 >= 2, got R={big_r:g}, R1={r1:g}")
    if rho < big_r:
        raise ParameterError(f"Exterior preset needs rho >= R, got rho={rho:g}, R={big_r:g}")

    x = grid.x
    ax = np.abs(x)
    sgn = np.sign(x)
    ell, dell, ddell = profile.log_derivative(x)

    rr = ax / r1
    q = 1.0 - smooth_cutoff(rr)
    q1 = -smooth_cutoff(rr, 1) * sgn / r1
    q2 = -smooth_cutoff(rr, 2) / r1 ** 2
    q3 = -smooth_cutoff(rr, 3) * sgn / r1 ** 3

    h = x / (ax + rho)
    h1 = rho / (ax + rho) ** 2
    h2 = -2.0 * rho * sgn / (ax + rho) ** 3

    # P = a^{-2} (q a^2)' and its derivatives
    p0 = q1 + 2.0 * q * ell
    p1 = q2 + 2.0 * q1 * ell + 2.0 * q * dell
    p2 = q3 + 2.0 * q2 * ell + 4.0 * q1 * dell + 2.0 * q * ddell

    f = q * h
    f_x = q1 * h + q * h1
    g = 0.5 * h * p0
    g_x = 0.5 * (h1 * p0 + h * p1)
    g_xx = 0.5 * (h2 * p0 + 2.0 * h1 * p1 + h * p2)
    meta = {"preset": "exterior", "rho": rho, "r1": r1, "r": big_r}
    return MultiplierPair(f, g, f_x, g_x, g_xx + 2.0 * ell * g_x, meta)


def _interior(params, grid, profile):
    big_r = float(params.get("r", 16.0))
    delta = float(params.get("delta", 0.1))
    if big_r < 2.0:
        raise ParameterError(f"Interior preset needs R >= 2, got R={big_r:g}")
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"Interior preset needs 0 < delta < 1, got delta={delta:g}")

    m = profile.m
    x = grid.x
    ell, dell, ddell = profile.log_derivative(x)
    y = x / big_r ** 2
    big_y = y ** (2 * m)
    inv_a = (1.0 + big_y) ** (-1.0 / (2 * m))

    # f = x / (R a(x/R^2)); f' collapses to (1 + y^{2m})^{-1-1/2m} / R
    f = x * inv_a / big_r
    f_x = inv_a / (big_r * (1.0 + big_y))
    f_xx = -(2 * m + 1) * y ** (2 * m - 1) * (1.0 + big_y) ** (-(4 * m + 1) / (2.0 * m)) / big_r ** 3
    f_xxx = (
        -(2 * m + 1) / big_r ** 5 * y ** (2 * m - 2)
        * (1.0 + big_y) ** (-(6 * m + 1) / (2.0 * m))
        * ((2 * m - 1) - (2 * m + 2) * big_y)
    )

    kappa = delta / big_r ** (4 * m)
    g = 0.5 * f_x + kappa * ell * f
    g_x = 0.5 * f_xx + kappa * (dell * f + ell * f_x)
    g_xx = 0.5 * f_xxx + kappa * (ddell * f + 2.0 * dell * f_x + ell * f_xx)
    meta = {"preset": "interior", "r": big_r, "delta": delta}
    return MultiplierPair(f, g, f_x, g_x, g_xx + 2.0 * ell * g_x, meta)


def _lagrangian(params, grid, profile):
    x = grid.x
    a = profile.warp(x)[0]
    ell, dell, _ = profile.log_derivative(x)
    g = 1.0 / a
    g_x = -ell / a
    g_xx = (ell ** 2 - dell) / a
    zeros = np.zeros_like(x)
    return MultiplierPair(zeros, g, zeros, g_x, g_xx + 2.0 * ell * g_x, {"preset": "lagrangian"})


PRESETS = {
    "exterior": _exterior,
    "interior": _interior,
    "lagrangian": _lagrangian,
}


def multiplier_preset(name, params, grid, profile):
    """
    Sample one of the closed-form multiplier pairs on a grid

    Args:
        name (str): 'exterior' (rho, r1, r), 'interior' (r, delta) or 'lagrangian'
        params (dict): Preset parameters; missing keys take the defaults above
        grid (Grid): Grid
        profile (GeometryProfile): Geometry

    Returns:
        MultiplierPair: f, g and their analytic derivatives
    """
    builder = PRESETS.get(name)
    if builder is None:
        raise ParameterError(f"Unknown multiplier preset '{name}', expected one of {sorted(PRESETS)}")
    pair = builder(dict(params or {}), grid, profile)
    logger.debug(f"Built {name} multiplier pair with {pair.meta} on {grid}")
    return pair


def lagrangian_lower_coefficient(profile, x):
    """
    Closed form of the lower-order coefficient for f = 0, g = 1/a:
    (2m-1)/2 * x^{2m-2} / ((1+x^{2m})^2 a)
    """
    m = profile.m
    x = np.asarray(x, dtype=float)
    a = profile.warp(x)[0]
    return 0.5 * (2 * m - 1) * x ** (2 * m - 2) / ((1.0 + x ** (2 * m)) ** 2 * a)


def coercivity_violations(pair, profile, x, radius, rel_tol=1e-12):
    """
    Nodes with |x| < radius where a bulk coefficient is negative beyond tolerance

    A node violates when coef < -rel_tol * max|coef| over the region.

    Returns:
        dict: Coefficient name -> array of offending node indices (empty when coercive)
    """
    inside = np.abs(np.asarray(x)) < radius
    violations = {}
    for name, coef in pair.bulk_coefficients(profile, x).items():
        region = coef[inside]
        scale = float(np.max(np.abs(region))) if region.size else 0.0
        bad = np.flatnonzero(inside & (coef < -rel_tol * scale))
        violations[name] = bad
        if bad.size:
            logger.warning(f"{pair.name} preset: {name} coefficient negative at {bad.size} nodes")
    return violations
