import math
import logging

import numpy as np

from core.errors import ConfigError
from lab.geometry import smooth_cutoff

logger = logging.getLogger("sampling")


def log_spaced(minimum, maximum, points_per_decade):
    """
    Log-spaced values from minimum to maximum, both endpoints included

    Args:
        minimum (float): Smallest value, > 0
        maximum (float): Largest value, >= minimum
        points_per_decade (float): Density of the grid

    Returns:
        ndarray: Increasing values
    """
    if not 0 < minimum <= maximum:
        raise ConfigError(f"Log grid needs 0 < min <= max, got [{minimum}, {maximum}]")
    if points_per_decade <= 0:
        raise ConfigError(f"points_per_decade must be positive, got {points_per_decade}")
    if minimum == maximum:
        return np.array([float(minimum)])
    decades = math.log10(maximum / minimum)
    count = max(2, int(round(decades * points_per_decade)) + 1)
    return np.logspace(math.log10(minimum), math.log10(maximum), count)


def quantized_lambdas(values):
    """
    Replace each lambda by sqrt(l(l+1)) for the nearest integer degree l >= 1

    Returns:
        ndarray: Sorted unique quantized values
    """
    values = np.asarray(values, dtype=float)
    degrees = np.maximum(1, np.round(np.sqrt(values ** 2 + 0.25) - 0.5)).astype(int)
    return np.unique(np.sqrt(degrees * (degrees + 1.0)))


def random_bumps(rng, grid, count, max_radius=None):
    """
    Seeded compactly supported C^3 bumps well inside the grid

    Each bump is a sum of one to three smooth cutoffs with random centres,
    widths and signed amplitudes.

    Args:
        rng (numpy.random.Generator): Random source
        grid (Grid): Grid
        count (int): Number of bumps
        max_radius (float, optional): Support bound, default X - 1

    Returns:
        list: GridFunctions vanishing at both grid ends
    """
    max_radius = grid.half_width - 1.0 if max_radius is None else max_radius
    bumps = []
    for _ in range(count):
        u = np.zeros(grid.n)
        for _ in range(int(rng.integers(1, 4))):
            width = rng.uniform(0.2, 0.5 * max_radius)
            centre = rng.uniform(-(max_radius - width), max_radius - width)
            amplitude = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0)
            u += amplitude * smooth_cutoff(np.abs(grid.x - centre) / width)
        if not np.any(u != 0):
            u = smooth_cutoff(np.abs(grid.x) / max_radius)
        bumps.append(u)
    return bumps
