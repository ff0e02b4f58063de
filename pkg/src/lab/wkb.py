import logging

import numpy as np
from scipy.integrate import quad

from core.config import config
from core.errors import ParameterError, WKBRegionError
from lab.discretization import gradient

logger = logging.getLogger("wkb")

VARIANTS = ("A-i", "A-ii", "B-i", "B-ii")


def trapping_scale(lam, m):
    """
    lambda^{-2m/(1+m)}, the width in b of the degenerate well seen at frequency lambda
    """
    return lam ** (-2.0 * m / (1 + m))


def turning_scale(lam, eps, m):
    """
    lambda^{-2/3} |eps|^{(2m-1)/3m}, the Airy scale at a turning point b = -eps
    """
    return lam ** (-2.0 / 3.0) * abs(eps) ** ((2 * m - 1) / (3.0 * m))


def wkb_region(variant, x, lam, eps, profile, constant=None):
    """
    Boolean mask of the nodes where a WKB functional is valid

    A-i: b + eps >= 2C lambda^{-2m/(1+m)}; A-ii: b <= 2C lambda^{-2m/(1+m)};
    B-i: b + eps >= 2C alpha; B-ii: |b + eps| <= C alpha, alpha the Airy scale.
    """
    constant = config.get('resolvent', 'wkb_region_constant', 1.0) if constant is None else constant
    b = profile.trap_profile(x)
    m = profile.m
    if variant == "A-i":
        return b + eps >= 2.0 * constant * trapping_scale(lam, m)
    if variant == "A-ii":
        return b <= 2.0 * constant * trapping_scale(lam, m)
    if variant in ("B-i", "B-ii"):
        if eps == 0:
            raise ParameterError(f"Variant {variant} needs eps != 0")
        alpha = turning_scale(lam, eps, m)
        if variant == "B-i":
            return b + eps >= 2.0 * constant * alpha
        return np.abs(b + eps) <= constant * alpha
    raise ParameterError(f"Unknown WKB variant '{variant}', expected one of {VARIANTS}")


def wkb_energy(phi, params, m, variant, grid, profile, nodes=None, constant=None):
    """
    Pointwise WKB energy functional of a real solution

    Args:
        phi (ndarray): Real GridFunction
        params (ModeParams): lambda and eps (real tau)
        m (int): Degeneracy, must match the profile
        variant (str): One of 'A-i', 'A-ii', 'B-i', 'B-ii'
        grid (Grid): Grid
        profile (GeometryProfile): Geometry
        nodes (ndarray, optional): Indices to evaluate; default |x| <= 1
        constant (float, optional): Region constant C (config resolvent.wkb_region_constant)

    Returns:
        ndarray: E[phi] at the requested nodes
    """
    if m != profile.m:
        raise ParameterError(f"m={m} does not match {profile}")
    phi = np.real(grid.check(phi, "phi"))
    phi_x = gradient(phi, grid)
    if nodes is None:
        nodes = np.flatnonzero(np.abs(grid.x) <= 1.0)
    nodes = np.asarray(nodes, dtype=int)
    lam = params.lam
    eps = float(np.real(params.eps))
    x = grid.x[nodes]

    inside = wkb_region(variant, x, lam, eps, profile, constant)
    if not np.all(inside):
        raise WKBRegionError(variant, nodes[~inside])

    u = phi[nodes]
    du = phi_x[nodes]
    if variant in ("A-i", "B-i"):
        shifted = profile.trap_profile(x) + eps
        b1 = profile.trap_derivatives(x)[0]
        return (lam ** 2 * np.sqrt(shifted) * u ** 2 + du ** 2 / np.sqrt(shifted)
                + 0.5 * b1 * shifted ** -1.5 * u * du)
    if variant == "A-ii":
        return lam ** ((m + 2.0) / (m + 1)) * u ** 2 + lam ** (m / (m + 1.0)) * du ** 2
    airy = lam ** (1.0 / 3.0) * abs(eps) ** (-(2 * m - 1) / (6.0 * m))
    return lam ** 2 / airy * u ** 2 + airy * du ** 2


def turning_point(eps, m):
    """
    Positive x with b(x) = -eps, for -1 < eps < 0
    """
    if not -1.0 < eps < 0.0:
        return None
    return ((1.0 + eps) ** (-m) - 1.0) ** (1.0 / (2 * m))


def degenerate_quadrature(lam, eps, m, weight_exponent, c_reg=None, half=None):
    """
    Integral over |x| <= 1 of |x|^q / (scale + |b(x) + eps|)^{1/2}

    scale is lambda^{-2m/(1+m)} when eps > -C lambda^{-2m/(1+m)} and the Airy
    scale lambda^{-2/3}|eps|^{(2m-1)/3m} otherwise.

    Args:
        lam (float): lambda >= 1
        eps (float): eps > -1
        m (int): Degeneracy m >= 2
        weight_exponent (float): q = 0 or q > m - 1
        c_reg (float, optional): Threshold constant C (config regime.c_reg)
        half (str, optional): 'left' or 'right' to integrate one half only

    Returns:
        tuple: (value, comparator) with comparator lambda^{(m-1)/(m+1)} for q = 0 and 1 otherwise
    """
    c_reg = config.get('regime', 'c_reg', 1.0) if c_reg is None else c_reg
    if m < 2:
        raise ParameterError(f"Degenerate-well quadrature needs m >= 2, got {m}")
    if lam < 1:
        raise ParameterError(f"Degenerate-well quadrature needs lambda >= 1, got {lam}")
    if not eps > -1.0:
        raise ParameterError(f"eps must exceed -1, got {eps}")
    q = float(weight_exponent)
    if not (q == 0 or q > m - 1):
        raise ParameterError(f"Weight exponent must be 0 or exceed m - 1 = {m - 1}, got {q:g}")
    if half not in (None, "left", "right"):
        raise ParameterError(f"half must be 'left', 'right' or None, got {half!r}")

    well = trapping_scale(lam, m)
    if eps > -c_reg * well:
        scale = well
    else:
        rim = 1.0 - 2.0 ** (-1.0 / m)
        if -eps >= rim:
            raise ParameterError(
                f"Turning point for eps={eps:g} lies outside the unit well (needs -eps < {rim:.4f} at m={m})"
            )
        scale = turning_scale(lam, eps, m)

    def integrand(x):
        s = x ** (2 * m)
        b = -np.expm1(-np.log1p(s) / m)
        return abs(x) ** q / np.sqrt(scale + abs(b + eps))

    breaks = [p for p in (turning_point(eps, m), lam ** (-1.0 / (m + 1))) if p is not None and 0 < p < 1]
    right = 0.0
    left = 0.0
    if half in (None, "right"):
        right = quad(integrand, 0.0, 1.0, points=breaks or None, limit=200)[0]
    if half in (None, "left"):
        left = quad(integrand, -1.0, 0.0, points=[-p for p in breaks] or None, limit=200)[0]
    comparator = lam ** ((m - 1.0) / (m + 1)) if q == 0 else 1.0
    value = left + right
    logger.debug(f"Quadrature lam={lam:g} eps={eps:g} q={q:g}: {value:.6g} (comparator {comparator:.6g})")
    return value, comparator
