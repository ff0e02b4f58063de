import logging

import numpy as np

from core.errors import ParameterError

logger = logging.getLogger("geometry")


def japanese_bracket(x):
    """
    Smoothed absolute value <x> = sqrt(1 + x^2)
    """
    return np.sqrt(1.0 + np.square(x))


class GeometryProfile:
    """
    Warped-product surface of revolution with generating function
    a(x) = (x^{2m} + 1)^{1/2m}

    All evaluations are closed form and vectorized over x. The degeneracy m is
    half the vanishing order of a' at the trapped set x = 0; m = 1 is the
    hyperbolic case and m >= 2 the degenerate one.
    """
    def __init__(self, m):
        """
        Initialize the profile

        Args:
            m (int): Degeneracy parameter, m >= 1
        """
        if isinstance(m, bool) or int(m) != m or m < 1:
            raise ParameterError(f"Degeneracy m must be a positive integer, got {m}")
        self.m = int(m)

    def __repr__(self):
        return f"GeometryProfile(m={self.m})"

    def log_derivative(self, x):
        """
        Evaluate l = a'/a = x^{2m-1}/(1+x^{2m}) and its first two derivatives

        Args:
            x (float or ndarray): Positions

        Returns:
            tuple: (l, l', l'')
        """
        m = self.m
        x = np.asarray(x, dtype=float)
        s = x ** (2 * m)
        ell = x ** (2 * m - 1) / (1.0 + s)
        dell = x ** (2 * m - 2) * (2 * m - 1 - s) / (1.0 + s) ** 2
        # the x^{2m-3} term drops out for m = 1
        ddell = (
            -(4 * m - 2) * x ** (4 * m - 3) / (1.0 + s) ** 2
            - 4 * m * (2 * m - 1) * x ** (4 * m - 3) / (1.0 + s) ** 3
            + 4 * m * x ** (6 * m - 3) / (1.0 + s) ** 3
        )
        if m > 1:
            ddell = ddell + (2 * m - 2) * (2 * m - 1) * x ** (2 * m - 3) / (1.0 + s) ** 2
        return ell, dell, ddell

    def warp(self, x):
        """
        Evaluate the warp a(x) and its exact first and second derivatives

        Args:
            x (float or ndarray): Positions

        Returns:
            tuple: (a, a', a'')
        """
        x = np.asarray(x, dtype=float)
        a = self._warp_value(x)
        ell, dell, _ = self.log_derivative(x)
        return a, a * ell, a * (dell + ell ** 2)

    def _warp_value(self, x):
        m = self.m
        ax = np.abs(x)
        # factor out |x| for large arguments so a/|x| keeps full precision
        with np.errstate(divide='ignore', over='ignore', invalid='ignore'):
            large = ax * (1.0 + ax ** (-2 * m)) ** (1.0 / (2 * m))
        small = (ax ** (2 * m) + 1.0) ** (1.0 / (2 * m))
        return np.where(ax > 1.0, large, small)

    def trap_profile(self, x):
        """
        Evaluate b(x) = 1 - (x^{2m}+1)^{-1/m} = 1 - a(x)^{-2}
        """
        x = np.asarray(x, dtype=float)
        # -expm1(-log1p(s)/m) keeps b accurate where s = x^{2m} is tiny
        return -np.expm1(-np.log1p(x ** (2 * self.m)) / self.m)

    def trap_derivatives(self, x):
        """
        Evaluate b'(x) = 2 a^{-2} l and b''(x) = 2 a^{-2}(l' - 2 l^2)

        Returns:
            tuple: (b', b'')
        """
        a = self._warp_value(np.asarray(x, dtype=float))
        ell, dell, _ = self.log_derivative(x)
        inv_a2 = a ** -2
        return 2.0 * inv_a2 * ell, 2.0 * inv_a2 * (dell - 2.0 * ell ** 2)

    def potential(self, x, lam, tau):
        """
        Evaluate V = tau^2 - lambda^2/a^2 = tau^2 - lambda^2 + lambda^2 b(x)

        Args:
            x (float or ndarray): Positions
            lam (float): Angular parameter, lam >= 0
            tau (complex): Temporal frequency

        Returns:
            complex ndarray: Potential values
        """
        lam2 = float(lam) ** 2
        return complex(tau) ** 2 - lam2 + lam2 * self.trap_profile(x)

    def le_weight(self, x):
        """
        Evaluate |x|^m/<x>^m, the local-energy weight vanishing at the trapped set
        """
        x = np.asarray(x, dtype=float)
        return (np.abs(x) / japanese_bracket(x)) ** self.m


# Hermite blend coefficients of S(t) = 35t^4 - 84t^5 + 70t^6 - 20t^7
def _blend(t, order):
    if order == 0:
        return t ** 4 * (35.0 - 84.0 * t + 70.0 * t ** 2 - 20.0 * t ** 3)
    if order == 1:
        return 140.0 * t ** 3 * (1.0 - t) ** 3
    if order == 2:
        return 420.0 * t ** 2 * (1.0 - t) ** 2 * (1.0 - 2.0 * t)
    if order == 3:
        return 840.0 * t * (1.0 - t) * (1.0 - 5.0 * t + 5.0 * t ** 2)
    raise ParameterError(f"Cutoff derivatives are available through order 3, got {order}")


def smooth_cutoff(rho, order=0):
    """
    Monotone C^3 cutoff: 1 for rho <= 1/2, 0 for rho >= 1, a degree-7
    Hermite blend in between

    Args:
        rho (float or ndarray): Argument
        order (int): Derivative order, 0 to 3

    Returns:
        float or ndarray: beta^(order)(rho)
    """
    rho = np.asarray(rho, dtype=float)
    t = np.clip(2.0 * rho - 1.0, 0.0, 1.0)
    if order == 0:
        value = 1.0 - _blend(t, 0)
    else:
        # chain rule dt/drho = 2; derivatives vanish identically off [1/2, 1]
        inside = (rho > 0.5) & (rho < 1.0)
        value = np.where(inside, -(2.0 ** order) * _blend(t, order), 0.0)
    return value if value.ndim else float(value)


def taylor_bounds(profile, x):
    """
    Measured constants c1 <= ((x^{2m}+1)^{1/m} - 1)/|x|^{2m} <= c2 on the sample

    Args:
        profile (GeometryProfile): Geometry
        x (ndarray): Sample points with 0 < |x| <= 1

    Returns:
        tuple: (c1, c2)
    """
    x = np.asarray(x, dtype=float)
    x = x[(x != 0.0) & (np.abs(x) <= 1.0)]
    s = x ** (2 * profile.m)
    ratio = np.expm1(np.log1p(s) / profile.m) / s
    return float(ratio.min()), float(ratio.max())
