import math
import cmath
import logging

import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigh_tridiagonal

from core.config import config
from core.errors import GridError, ParameterError
from lab.discretization import Grid, second_derivative
from lab.geometry import smooth_cutoff

logger = logging.getLogger("quasimode")

PROFILES = ("polynomial", "oscillator")


def polynomial_bump(y):
    """
    chi(y) = (1 - (y/2)^2)^4 on |y| <= 2, zero outside
    """
    y = np.asarray(y, dtype=float)
    return np.where(np.abs(y) < 2.0, (1.0 - 0.25 * y ** 2) ** 4, 0.0)


class OscillatorProfile:
    """
    Ground state of -d^2/dy^2 + y^{2m}/m, truncated by the smooth cutoff beta(|y|/2)

    The eigenproblem is solved once on a fine symmetric grid and interpolated.
    """
    def __init__(self, m, half_width=4.0, n=4001):
        y = np.linspace(-half_width, half_width, n)
        h = y[1] - y[0]
        diagonal = 2.0 / h ** 2 + y ** (2 * m) / m
        off = np.full(n - 1, -1.0 / h ** 2)
        energies, vectors = eigh_tridiagonal(diagonal, off, select='i', select_range=(0, 0))
        ground = vectors[:, 0]
        ground = ground if ground[n // 2] > 0 else -ground
        self.m = m
        self.energy = float(energies[0])
        self.y = y
        self.values = ground / ground[n // 2] * smooth_cutoff(np.abs(y) / 2.0)
        logger.debug(f"Oscillator ground energy {self.energy:.8f} for m={m}")

    def __call__(self, y):
        return np.interp(np.asarray(y, dtype=float), self.y, self.values, left=0.0, right=0.0)


def _profile_function(kind, m):
    if kind == "polynomial":
        return polynomial_bump, None
    if kind == "oscillator":
        oscillator = OscillatorProfile(m)
        return oscillator, oscillator.energy
    raise ParameterError(f"Unknown quasimode profile '{kind}', expected one of {PROFILES}")


def profile_norm_squared(kind, m):
    """
    ||chi||^2 over [-2, 2]
    """
    chi, _ = _profile_function(kind, m)
    return quad(lambda y: float(chi(y)) ** 2, -2.0, 2.0, limit=200)[0]


class Quasimode:
    """
    Approximate trapped mode concentrated at scale lambda^{-1/(m+1)}

    Attributes:
        u (ndarray): The profile u~ on the grid
        E (complex): (alpha + i beta) lambda^{-2m/(m+1)}
        alpha, beta (float): Spectral shift parameters
        support_radius (float): 2 lambda^{-1/(m+1)}
        residual (ndarray): (E + x^{2m}/m) u~ + lambda^{-2} u~''
        c_measured (float): ||R|| / (lambda^{-2m/(m+1)} ||u~||)
        profile_energy (float or None): Ground energy of the oscillator profile
    """
    def __init__(self, lam, m, alpha, beta, grid, u, residual, support_radius, profile, profile_energy=None):
        self.lam = lam
        self.m = m
        self.alpha = alpha
        self.beta = beta
        self.grid = grid
        self.u = u
        self.residual = residual
        self.support_radius = support_radius
        self.profile = profile
        self.profile_energy = profile_energy
        self.E = complex(alpha, beta) * lam ** (-2.0 * m / (m + 1))
        self.norm_u = float(np.sqrt(np.sum(grid.weights * np.abs(u) ** 2)))
        self.norm_residual = float(np.sqrt(np.sum(grid.weights * np.abs(residual) ** 2)))
        self.c_measured = self.norm_residual / (lam ** (-2.0 * m / (m + 1)) * self.norm_u)

    @property
    def normalized_mass(self):
        """
        ||u~||^2 / lambda^{(m-1)/(m+1)}, equal to ||chi||^2 up to quadrature error
        """
        return self.norm_u ** 2 / self.lam ** ((self.m - 1.0) / (self.m + 1))


def quasimode_grid(lam, m, nodes_across_support=None, half_width=1.0):
    """
    Grid on [-X, X] with the requested node count across the quasimode support
    """
    nodes_across_support = config.get('quasimode', 'nodes_across_support', 256) \
        if nodes_across_support is None else nodes_across_support
    radius = 2.0 * lam ** (-1.0 / (m + 1))
    h = 2.0 * radius / nodes_across_support
    intervals = math.ceil(2.0 * half_width / h - 1e-9)
    intervals += intervals % 2
    return Grid(half_width, intervals + 1)


def build_quasimode(lam, m, alpha=None, beta=None, grid=None, profile="polynomial"):
    """
    Build u~(x) = lambda^{m/(2(m+1))} chi(lambda^{1/(m+1)} x) and its residual

    Args:
        lam (float): lambda >= 16
        m (int): Degeneracy
        alpha (float, optional): Real part of the shift (config quasimode.alpha)
        beta (float, optional): Imaginary part of the shift (config quasimode.beta)
        grid (Grid, optional): Grid with at least 64 nodes across the support
        profile (str): 'polynomial' or 'oscillator'

    Returns:
        Quasimode: Profile, residual and measured constant
    """
    if lam < 16:
        raise ParameterError(f"Quasimode needs lambda >= 16, got {lam}")
    alpha = config.get('quasimode', 'alpha', 0.0) if alpha is None else alpha
    beta = config.get('quasimode', 'beta', -1.0) if beta is None else beta
    grid = quasimode_grid(lam, m) if grid is None else grid

    radius = 2.0 * lam ** (-1.0 / (m + 1))
    across = int(np.count_nonzero(np.abs(grid.x) <= radius))
    if across < 64:
        raise GridError(f"Quasimode support |x|<={radius:.4g} holds {across} nodes, need at least 64")
    if radius > grid.half_width - grid.h:
        raise GridError(f"Quasimode support {radius:.4g} does not fit inside {grid}")

    chi, profile_energy = _profile_function(profile, m)
    scale = lam ** (1.0 / (m + 1))
    u = lam ** (m / (2.0 * (m + 1))) * chi(scale * grid.x)
    E = complex(alpha, beta) * lam ** (-2.0 * m / (m + 1))
    residual = (E + grid.x ** (2 * m) / m) * u + second_derivative(u, grid) / lam ** 2
    mode = Quasimode(lam, m, alpha, beta, grid, u, residual, radius, profile, profile_energy)
    logger.debug(f"Quasimode lambda={lam:g} m={m}: C_measured={mode.c_measured:.4f}")
    return mode


def tau_root(lam, E):
    """
    tau = lambda sqrt(1 + E) with the sign chosen so that Im tau <= 0
    """
    tau = lam * cmath.sqrt(1.0 + complex(E))
    return -tau if tau.imag > 0 else tau


def growth_factor(T, im_tau_abs):
    """
    B(T) = (e^{T|Im tau|} - 1) / (T|Im tau|), with B = 1 at T|Im tau| = 0
    """
    s = np.asarray(T, dtype=float) * np.asarray(im_tau_abs, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        value = np.where(s == 0, 1.0, np.expm1(s) / np.where(s == 0, 1.0, s))
    return value if value.ndim else float(value)


def growth_gap(s):
    """
    1/2 B(2T) - 1/4 B(T)^2 as a function of s = T|Im tau|
    """
    s = np.asarray(s, dtype=float)
    value = 0.5 * growth_factor(2.0 * s, 1.0) - 0.25 * np.square(growth_factor(s, 1.0))
    return value if np.ndim(value) else float(value)


def growth_gap_series(s, terms=80):
    """
    Power series 1/2 sum_{k>=2} ((k-2) 2^{k-2} + 1) s^{k-2} / k! of growth_gap
    """
    s = np.asarray(s, dtype=float)
    total = np.zeros_like(s)
    power = np.ones_like(s)
    for k in range(2, terms + 2):
        total = total + 0.5 * ((k - 2) * 2.0 ** (k - 2) + 1.0) / math.factorial(k) * power
        power = power * s
    return total if total.ndim else float(total)
