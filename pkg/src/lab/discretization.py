import math
import logging

import numpy as np

from core.errors import GridError
from lab.geometry import japanese_bracket

logger = logging.getLogger("discretization")

# Angular measure of the unit sphere and of the equatorial circle. Quadratures
# return integrals against a(x)^2 dx only; reports state which constant applies.
SPHERE_MEASURE = 4.0 * math.pi
EQUATOR_MEASURE = 2.0 * math.pi


class Grid:
    """
    Uniform symmetric mesh on [-X, X] with an odd number of nodes

    Node (n-1)/2 sits exactly at x = 0. Arrays are read-only after construction.
    """
    def __init__(self, half_width, n):
        """
        Initialize the grid

        Args:
            half_width (float): X > 0
            n (int): Odd node count, n >= 3
        """
        if not half_width > 0:
            raise GridError(f"Half width must be positive, got {half_width}")
        if int(n) != n or n < 3:
            raise GridError(f"Grid needs at least 3 nodes, got {n}")
        if n % 2 == 0:
            raise GridError(f"Grid needs an odd point count for symmetry, got {n}")
        self.half_width = float(half_width)
        self.n = int(n)
        self.h = 2.0 * self.half_width / (self.n - 1)
        self.center = (self.n - 1) // 2

        x = -self.half_width + self.h * np.arange(self.n)
        # mirror so the grid is exactly symmetric and hits 0
        x[self.center:] = -x[self.center::-1].copy()
        x[self.center] = 0.0
        x.flags.writeable = False
        self.x = x

        weights = np.full(self.n, self.h)
        weights[0] = weights[-1] = 0.5 * self.h
        weights.flags.writeable = False
        self.weights = weights

    @property
    def X(self):
        return self.half_width

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"Grid(X={self.half_width:g}, n={self.n}, h={self.h:.3e})"

    def check(self, u, name="u"):
        """
        Validate that u is a GridFunction on this grid

        Returns:
            ndarray: u as an array
        """
        u = np.asarray(u)
        if u.shape != (self.n,):
            raise GridError(f"{name} has shape {u.shape}, grid expects ({self.n},)")
        if not np.all(np.isfinite(u)):
            raise GridError(f"{name} has non-finite entries")
        return u

    def refine(self, factor=2):
        """
        Grid with spacing h/factor on the same interval
        """
        return Grid(self.half_width, (self.n - 1) * factor + 1)

    def support_radius(self, *fields):
        """
        Largest |x| where any of the fields is nonzero (0 when all vanish)
        """
        mask = np.zeros(self.n, dtype=bool)
        for u in fields:
            if u is not None:
                mask |= np.asarray(u) != 0
        return float(np.abs(self.x[mask]).max()) if mask.any() else 0.0


def make_grid(half_width, n):
    """
    Build a symmetric grid with node 0 at the centre
    """
    return Grid(half_width, n)


def resolution(half_width, wavenumber, points_per_wavelength=8, h_cap=1.0 / 64):
    """
    Smallest odd node count with h <= min(1/(ppw * k), h_cap)

    Args:
        half_width (float): X
        wavenumber (float): Largest local wavenumber, e.g. max(lambda, |tau|)
        points_per_wavelength (float): Resolution factor
        h_cap (float): Upper bound on h regardless of wavenumber

    Returns:
        int: Odd node count
    """
    h_max = h_cap
    if wavenumber > 0:
        h_max = min(h_max, 1.0 / (points_per_wavelength * wavenumber))
    intervals = math.ceil(2.0 * half_width / h_max - 1e-9)
    intervals += intervals % 2
    return int(intervals) + 1


def grid_for(half_width, wavenumber, points_per_wavelength=8, h_cap=1.0 / 64):
    """
    Grid on [-X, X] obeying the default resolution rule
    """
    return make_grid(half_width, resolution(half_width, wavenumber, points_per_wavelength, h_cap))


class FluxLaplacian:
    """
    Flux-form operator (Lu)_i = [a^2_{i+1/2}(u_{i+1}-u_i) - a^2_{i-1/2}(u_i-u_{i-1})]/(a_i^2 h^2)

    Values outside the grid are Dirichlet-0 ghosts. L is symmetric in the
    inner product sum_i a_i^2 h u_i v_i over all nodes.
    """
    def __init__(self, grid, profile):
        self.grid = grid
        self.profile = profile
        x = grid.x
        h = grid.h
        a_node = profile.warp(x)[0]
        mid = np.concatenate(([x[0] - 0.5 * h], 0.5 * (x[:-1] + x[1:]), [x[-1] + 0.5 * h]))
        a_mid2 = profile.warp(mid)[0] ** 2
        denom = a_node ** 2 * h ** 2
        self.upper = a_mid2[1:] / denom
        self.lower = a_mid2[:-1] / denom
        self.diagonal = -(self.upper + self.lower)
        self.node_weights = a_node ** 2 * h

    def __call__(self, u):
        return self.apply(self.grid.check(u))

    def apply(self, u):
        """
        Apply L without validation (hot loops)
        """
        out = self.diagonal * u
        out[:-1] += self.upper[:-1] * u[1:]
        out[1:] += self.lower[1:] * u[:-1]
        return out

    def spectral_bound(self):
        """
        Gershgorin bound on the spectral radius of L
        """
        return float(np.max(np.abs(self.diagonal) + self.upper + self.lower))


def flux_laplacian(u, grid, profile):
    """
    Apply the flux-form operator a^{-2} d/dx (a^2 d/dx) with Dirichlet ghosts
    """
    return FluxLaplacian(grid, profile)(u)


def gradient(u, grid):
    """
    Second-order derivative: central in the interior, one-sided at the ends
    """
    u = grid.check(u)
    return np.gradient(u, grid.h, edge_order=2)


def second_derivative(u, grid):
    """
    Plain three-point second difference with Dirichlet-0 ghosts
    """
    u = grid.check(u)
    out = -2.0 * u
    out[:-1] += u[1:]
    out[1:] += u[:-1]
    return out / grid.h ** 2


def masked_weights(grid, mask):
    """
    Trapezoid weights of the segments [x_i, x_{i+1}] with both ends in mask

    Nodes on the edge of a masked interval get h/2, so the masked integral
    keeps second order. An isolated masked node gets weight 0.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (grid.n,):
        raise GridError(f"mask has shape {mask.shape}, grid expects ({grid.n},)")
    segment = 0.5 * grid.h * (mask[:-1] & mask[1:])
    weights = np.zeros(grid.n)
    weights[:-1] += segment
    weights[1:] += segment
    return weights


def quadrature(u, weight, grid, profile, mask=None):
    """
    Trapezoid rule for the integral of u * weight * a^2 dx over the grid

    Args:
        u (ndarray): Integrand samples
        weight (ndarray or float): Extra weight samples (scalar allowed)
        grid (Grid): Grid
        profile (GeometryProfile): Geometry supplying a^2
        mask (ndarray, optional): Boolean node mask; the rule runs over the masked segments

    Returns:
        complex or float: Quadrature value
    """
    u = grid.check(u)
    weight = np.broadcast_to(np.asarray(weight), u.shape)
    if weight.shape != u.shape:
        raise GridError(f"weight has shape {weight.shape}, grid expects ({grid.n},)")
    a2 = profile.warp(grid.x)[0] ** 2
    w = grid.weights if mask is None else masked_weights(grid, mask)
    return np.sum(w * a2 * weight * u)


def dyadic_partition(grid):
    """
    Index sets A_j = {i : 2^j <= <x_i> < 2^{j+1}} for j = 0..floor(log2 <X>)

    Returns:
        list: One integer index array per annulus
    """
    levels = np.floor(np.log2(japanese_bracket(grid.x))).astype(int)
    top = int(math.floor(math.log2(math.sqrt(1.0 + grid.half_width ** 2))))
    levels = np.clip(levels, 0, top)
    return [np.flatnonzero(levels == j) for j in range(top + 1)]
