import math
import logging

import numpy as np
from scipy.stats import linregress

from core.errors import FitError

logger = logging.getLogger("fitting")


class FitResult:
    """
    Log-log least-squares fit y = e^intercept * x^slope
    """
    def __init__(self, slope, intercept, stderr_slope, points_used):
        self.slope = float(slope)
        self.intercept = float(intercept)
        self.stderr_slope = float(stderr_slope)
        self.points_used = int(points_used)

    def as_dict(self):
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "stderr": self.stderr_slope,
            "points_used": self.points_used,
        }

    def __repr__(self):
        return f"FitResult(slope={self.slope:.4f} +- {self.stderr_slope:.2e}, n={self.points_used})"


def fit_exponent(pairs):
    """
    Ordinary least squares on (log x, log y)

    Args:
        pairs (iterable): (x, y) with x, y > 0, at least 3 distinct x

    Returns:
        FitResult: Slope, intercept and the slope's standard error
    """
    pairs = list(pairs)
    if len(pairs) < 3:
        raise FitError(f"Exponent fit needs at least 3 points, got {len(pairs)}")
    x = np.array([p[0] for p in pairs], dtype=float)
    y = np.array([p[1] for p in pairs], dtype=float)
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(y)) or np.any(x <= 0) or np.any(y <= 0):
        raise FitError("Exponent fit needs finite positive values")
    if np.unique(x).size < 2:
        raise FitError("Exponent fit needs at least two distinct x values")
    result = linregress(np.log(x), np.log(y))
    stderr = 0.0 if not math.isfinite(result.stderr) else result.stderr
    return FitResult(result.slope, result.intercept, stderr, len(pairs))


def upper_half(pairs):
    """
    Points in the upper half of the log x range, or all points when fewer than 3 remain
    """
    pairs = sorted(pairs)
    if not pairs:
        return pairs
    logs = [math.log(p[0]) for p in pairs]
    middle = 0.5 * (logs[0] + logs[-1])
    kept = [p for p, lx in zip(pairs, logs) if lx >= middle - 1e-12]
    return kept if len(kept) >= 3 else pairs


def fit_if_possible(pairs, restrict_upper_half=False):
    """
    fit_exponent on the (optionally restricted) pairs, or None with fewer than 3 points
    """
    pairs = [p for p in pairs if p[1] is not None and p[1] > 0]
    if restrict_upper_half:
        pairs = upper_half(pairs)
    if len(pairs) < 3:
        return None
    return fit_exponent(pairs)
