import cmath
import enum
import logging

import numpy as np
import scipy.linalg

from core.config import config
from core.errors import GridError, NearResonanceError, ParameterError, SupportError, UndefinedRatioError
from lab.discretization import grid_for, gradient
from lab.geometry import japanese_bracket, smooth_cutoff

logger = logging.getLogger("resolvent")

CLOSURES = ("dirichlet", "outgoing")
FORCINGS = ("bump", "wave_packet", "concentrated")


class RegimeLabel(enum.Enum):
    CASE_I = "CaseI"
    CASE_II = "CaseII"
    CASE_III = "CaseIII"
    CASE_IVA = "CaseIVA"
    CASE_IVB = "CaseIVB"

    @property
    def is_case_iv(self):
        return self in (RegimeLabel.CASE_IVA, RegimeLabel.CASE_IVB)

    def __str__(self):
        return self.value


class ModeParams:
    """
    Angular parameter lambda and temporal frequency tau of one separated mode
    """
    def __init__(self, lam, tau):
        lam = float(lam)
        if not lam >= 0:
            raise ParameterError(f"lambda must be nonnegative, got {lam}")
        self.lam = lam
        self.tau = complex(tau)

    @classmethod
    def from_eps(cls, lam, eps):
        """
        Real tau = lambda sqrt(1 + eps), for eps >= -1
        """
        if eps < -1:
            raise ParameterError(f"eps must be >= -1 for a real tau, got {eps}")
        return cls(lam, lam * np.sqrt(1.0 + eps))

    @property
    def eps(self):
        """
        tau^2/lambda^2 - 1, or None when lambda = 0
        """
        if self.lam == 0:
            return None
        eps = self.tau ** 2 / self.lam ** 2 - 1.0
        return eps.real if self.tau.imag == 0 else eps

    @property
    def wavenumber(self):
        return max(self.lam, abs(self.tau))

    def __repr__(self):
        return f"ModeParams(lam={self.lam:g}, tau={self.tau:g})"


def classify_regime(params, m, c_reg=None, factor=None):
    """
    Sort a (lambda, tau) point into the four frequency regimes

    Complex tau is classified by |tau|. Case IV splits into A and B by the
    sign of eps + c_reg * lambda^{-2m/(1+m)}.

    Args:
        params (ModeParams): Mode parameters
        m (int): Degeneracy
        c_reg (float, optional): Case IV threshold constant (config regime.c_reg)
        factor (float, optional): Separation factor for Cases II/III (config regime.factor)

    Returns:
        RegimeLabel: The regime
    """
    c_reg = config.get('regime', 'c_reg', 1.0) if c_reg is None else c_reg
    factor = config.get('regime', 'factor', 4.0) if factor is None else factor
    lam = params.lam
    tau = abs(params.tau)
    if lam <= 1 and tau <= 1:
        return RegimeLabel.CASE_I
    if lam < tau / factor and tau > 1:
        return RegimeLabel.CASE_II
    if tau < lam / factor and lam > 1:
        return RegimeLabel.CASE_III
    eps = tau ** 2 / lam ** 2 - 1.0
    if eps + c_reg * lam ** (-2.0 * m / (1 + m)) >= 0:
        return RegimeLabel.CASE_IVA
    return RegimeLabel.CASE_IVB


def resolvent_grid(params, x_res=None, points_per_wavelength=None, h_cap=None):
    """
    Grid on [-X_res, X_res] resolving max(lambda, |tau|)
    """
    x_res = config.get('resolvent', 'x_res', 1.0) if x_res is None else x_res
    ppw = config.get('grid', 'points_per_wavelength', 8) if points_per_wavelength is None \
        else points_per_wavelength
    h_cap = config.get('grid', 'h_cap', 1.0 / 64) if h_cap is None else h_cap
    return grid_for(x_res, params.wavenumber, ppw, h_cap)


def make_forcing(kind, grid, params, m, radius=None):
    """
    Real forcing supported in |x| <= X/2

    Args:
        kind (str): 'bump' (smooth cutoff of width radius), 'wave_packet'
            (bump * cos(|tau| x)) or 'concentrated' (cutoff at scale lambda^{-1/(m+1)})
        grid (Grid): Grid
        params (ModeParams): Mode parameters
        m (int): Degeneracy
        radius (float, optional): Support radius, default X/2

    Returns:
        ndarray: Forcing samples
    """
    radius = 0.5 * grid.half_width if radius is None else radius
    x = grid.x
    if kind == "bump":
        return smooth_cutoff(np.abs(x) / radius)
    if kind == "wave_packet":
        return smooth_cutoff(np.abs(x) / radius) * np.cos(abs(params.tau) * x)
    if kind == "concentrated":
        if params.lam <= 0:
            raise ParameterError("Concentrated forcing needs lambda > 0")
        width = min(params.lam ** (-1.0 / (m + 1)), radius)
        return smooth_cutoff(np.abs(x) / width)
    raise ParameterError(f"Unknown forcing '{kind}', expected one of {FORCINGS}")


class ResolventSolution:
    """
    Solution phi of phi'' + V phi = g on one grid

    Attributes:
        phi (ndarray): Complex solution
        g (ndarray): Forcing
        params (ModeParams): Mode parameters
        closure (str): Boundary closure used
        diagnostics (dict): Norms and the relative residual
    """
    def __init__(self, phi, g, params, grid, closure, diagonal, pivot):
        self.phi = phi
        self.g = g
        self.params = params
        self.grid = grid
        self.closure = closure
        self.min_pivot = pivot
        self._diagonal = diagonal
        self.diagnostics = {
            "norm_phi": l2_norm(phi, grid),
            "norm_phi_x": l2_norm(gradient(phi, grid), grid),
            "norm_g": l2_norm(g, grid),
        }
        self.diagnostics["residual"] = self.residual()

    def apply(self, u):
        """
        Apply the discrete operator including its boundary rows
        """
        h2 = self.grid.h ** 2
        out = self._diagonal * u
        upper = np.full(self.grid.n - 1, 1.0 / h2, dtype=complex)
        lower = upper.copy()
        if self.closure == "outgoing":
            upper[0] = 2.0 / h2
            lower[-1] = 2.0 / h2
        out[:-1] += upper * u[1:]
        out[1:] += lower * u[:-1]
        return out

    def residual(self):
        """
        ||phi'' + V phi - g|| / ||g|| on the solved rows
        """
        rows = slice(1, -1) if self.closure == "dirichlet" else slice(None)
        diff = (self.apply(self.phi) - self.g)[rows]
        norm_g = float(np.linalg.norm(self.g[rows]))
        return float(np.linalg.norm(diff)) / norm_g if norm_g else float(np.linalg.norm(diff))


def l2_norm(u, grid, weight=None):
    """
    Plain L^2(dx) norm by the trapezoid rule
    """
    density = np.abs(u) ** 2 if weight is None else weight * np.abs(u) ** 2
    return float(np.sqrt(np.sum(grid.weights * density)))


def _outgoing_wavenumber(v_end):
    k = cmath.sqrt(v_end)
    return -k if k.imag > 0 else k


def min_pivot(lower, diagonal, upper):
    """
    Smallest |U_ii| of the partially pivoted LU factorization (LAPACK gttrf)

    A near-singularity indicator, not a condition number: a tiny pivot
    flags a (lambda, tau) point close to a discrete eigenvalue.

    Args:
        lower (ndarray): Subdiagonal a_1..a_{n-1}
        diagonal (ndarray): Diagonal b_0..b_{n-1}
        upper (ndarray): Superdiagonal c_0..c_{n-2}

    Returns:
        float: min |U_ii|, 0 when the factorization hits an exact zero pivot
    """
    dtype = np.result_type(lower, diagonal, upper, np.float64)
    lower, diagonal, upper = (np.array(band, dtype=dtype) for band in (lower, diagonal, upper))
    gttrf, = scipy.linalg.get_lapack_funcs(("gttrf",), (diagonal,))
    _, u_diagonal, _, _, _, info = gttrf(lower, diagonal, upper)
    if info > 0:
        return 0.0
    return float(np.min(np.abs(u_diagonal)))


def solve_resolvent(g, params, grid, profile, closure="dirichlet", pivot_tolerance=None):
    """
    Solve phi'' + (tau^2 - lambda^2/a^2) phi = g with a three-point stencil

    The Dirichlet closure pins phi(+-X) = 0. The outgoing closure uses the
    ghost values phi_{-1} = phi_1 - 2ihk phi_0 and its mirror at the right
    end, k = sqrt(V(+-X)) with Im k <= 0 (time factor e^{i tau t}).

    Args:
        g (ndarray): Forcing supported in |x| <= X/2
        params (ModeParams): Mode parameters
        grid (Grid): Grid on [-X, X]
        profile (GeometryProfile): Geometry
        closure (str): 'dirichlet' or 'outgoing'
        pivot_tolerance (float, optional): Relative pivot floor (config resolvent.pivot_tolerance)

    Returns:
        ResolventSolution: The solution and its diagnostics
    """
    if closure not in CLOSURES:
        raise ParameterError(f"Unknown closure '{closure}', expected one of {CLOSURES}")
    g = grid.check(g, "g").astype(complex)
    support = grid.support_radius(g)
    if support > 0.5 * grid.half_width + 1e-12:
        raise SupportError(f"Forcing reaches |x|={support:.4g}, beyond X/2={0.5 * grid.half_width:.4g}",
                           radius=support, limit=0.5 * grid.half_width)
    if pivot_tolerance is None:
        pivot_tolerance = config.get('resolvent', 'pivot_tolerance', 1e-12)

    h2 = grid.h ** 2
    potential = profile.potential(grid.x, params.lam, params.tau)
    diagonal = -2.0 / h2 + potential
    n = grid.n
    off = np.full(n - 1, 1.0 / h2, dtype=complex)

    if closure == "outgoing":
        diagonal = diagonal.copy()
        k_left = _outgoing_wavenumber(potential[0])
        k_right = _outgoing_wavenumber(potential[-1])
        diagonal[0] -= 2j * k_left / grid.h
        diagonal[-1] -= 2j * k_right / grid.h
        upper = off.copy()
        lower = off.copy()
        upper[0] = 2.0 / h2
        lower[-1] = 2.0 / h2
        rows = slice(None)
    else:
        upper = off[1:-1]
        lower = off[1:-1]
        rows = slice(1, -1)

    diag_rows = diagonal[rows]
    scale = float(np.max(np.abs(diag_rows)))
    pivot = min_pivot(lower, diag_rows, upper)
    if pivot < pivot_tolerance * scale:
        logger.warning(f"Near resonance at {params}: pivot {pivot:.3e}")
        raise NearResonanceError(params.lam, params.tau, pivot, scale)

    banded = np.zeros((3, diag_rows.size), dtype=complex)
    banded[0, 1:] = upper
    banded[1] = diag_rows
    banded[2, :-1] = lower
    phi = np.zeros(n, dtype=complex)
    phi[rows] = scipy.linalg.solve_banded((1, 1), banded, g[rows])
    if not np.all(np.isfinite(phi)):
        raise GridError(f"Resolvent solve produced non-finite values at {params}")
    return ResolventSolution(phi, g, params, grid, closure, diagonal, pivot)


def estimate_ratios(sol, m, delta=None):
    """
    Estimate ratios measured on one solved system

    Args:
        sol (ResolventSolution): Solved system
        m (int): Degeneracy
        delta (float, optional): Weight exponent offset (config resolvent.delta)

    Returns:
        tuple: (r_main, r_strong, r_weighted)
    """
    delta = config.get('resolvent', 'delta', 0.1) if delta is None else delta
    grid = sol.grid
    norm_g = sol.diagnostics["norm_g"]
    if norm_g == 0:
        raise UndefinedRatioError(f"Forcing vanishes at {sol.params}")
    norm_phi = sol.diagnostics["norm_phi"]
    norm_phi_x = sol.diagnostics["norm_phi_x"]
    freq = abs(sol.params.tau) + sol.params.lam
    loss = japanese_bracket(sol.params.lam) ** ((m - 1) / (2.0 * (m + 1)))

    r_strong = (norm_phi_x + freq * norm_phi) / norm_g
    numerator = freq * norm_phi / loss + norm_phi_x
    r_main = numerator / (loss * norm_g)

    # the origin node is excluded (principal value)
    x = grid.x
    weight = np.zeros_like(x)
    away = x != 0
    weight[away] = (japanese_bracket(x[away]) / np.abs(x[away])) ** (m - 1 + delta)
    weighted_g = l2_norm(sol.g, grid, weight)
    if weighted_g == 0:
        raise UndefinedRatioError(f"Weighted forcing vanishes at {sol.params}")
    r_weighted = numerator / weighted_g
    return float(r_main), float(r_strong), float(r_weighted)


def growth_ratio(sol):
    """
    (|tau| + lambda) ||phi|| / ||g||
    """
    norm_g = sol.diagnostics["norm_g"]
    if norm_g == 0:
        raise UndefinedRatioError(f"Forcing vanishes at {sol.params}")
    return (abs(sol.params.tau) + sol.params.lam) * sol.diagnostics["norm_phi"] / norm_g


def eps_grid(lam, m, coarse_min=None, coarse_max=None, coarse_points=None,
             fine_width_factor=None, fine_points=None):
    """
    Union of a coarse eps grid and a fine grid of width factor*lambda^{-2m/(m+1)} around 0

    Returns:
        ndarray: Sorted unique eps values, all > -1
    """
    table = config.section('resolvent.eps_grid')
    coarse_min = table.get('coarse_min', -0.5) if coarse_min is None else coarse_min
    coarse_max = table.get('coarse_max', 0.5) if coarse_max is None else coarse_max
    coarse_points = table.get('coarse_points', 21) if coarse_points is None else coarse_points
    fine_width_factor = table.get('fine_width_factor', 10.0) if fine_width_factor is None else fine_width_factor
    fine_points = table.get('fine_points', 41) if fine_points is None else fine_points

    half = 0.5 * fine_width_factor * lam ** (-2.0 * m / (m + 1))
    values = np.concatenate((
        np.linspace(coarse_min, coarse_max, int(coarse_points)),
        np.linspace(-half, half, int(fine_points)),
    ))
    values = values[values > -1.0]
    return np.unique(values)


def sup_over_eps(lam, m, profile, eps_values=None, closure="outgoing", forcing="concentrated",
                 grid_kwargs=None):
    """
    sup over eps of (|tau| + lambda) ||phi|| / ||g|| at tau = lambda sqrt(1 + eps)

    Near-resonant points are recorded and the grid is densified by a quarter
    of the local spacing on either side.

    Returns:
        dict: 'sup', 'eps_at_sup', 'points' (list of (eps, ratio or None, flag))
    """
    eps_values = eps_grid(lam, m) if eps_values is None else np.asarray(eps_values, dtype=float)
    grid_kwargs = dict(grid_kwargs or {})
    points = []
    pending = list(eps_values)
    spacing = np.diff(eps_values).min() if eps_values.size > 1 else 0.0
    seen = set()

    def evaluate(eps):
        params = ModeParams.from_eps(lam, eps)
        grid = resolvent_grid(params, **grid_kwargs)
        g = make_forcing(forcing, grid, params, m)
        sol = solve_resolvent(g, params, grid, profile, closure=closure)
        return growth_ratio(sol)

    while pending:
        eps = float(pending.pop(0))
        if eps in seen:
            continue
        seen.add(eps)
        try:
            points.append((eps, evaluate(eps), ""))
        except NearResonanceError as e:
            points.append((eps, None, "near_resonance"))
            if spacing > 0:
                logger.info(f"Densifying eps grid around {eps:.6g} at lambda={lam:g}")
                pending.extend(v for v in (eps - 0.25 * spacing, eps + 0.25 * spacing) if v > -1.0)
            logger.debug(f"Skipped {e}")

    points.sort(key=lambda item: item[0])
    measured = [(eps, ratio) for eps, ratio, _ in points if ratio is not None]
    if not measured:
        return {"sup": None, "eps_at_sup": None, "points": points}
    eps_best, best = max(measured, key=lambda item: item[1])
    logger.info(f"lambda={lam:g}: sup ratio {best:.6g} at eps={eps_best:.6g}")
    return {"sup": best, "eps_at_sup": eps_best, "points": points}
