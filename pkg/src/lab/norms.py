import logging

import numpy as np
from scipy.integrate import trapezoid

from core.errors import GridError, SupportError, UndefinedRatioError
from lab.discretization import FluxLaplacian, gradient, quadrature, dyadic_partition
from lab.geometry import japanese_bracket

logger = logging.getLogger("norms")


class EnergyReport:
    """
    Kinetic, radial and angular parts of the mode energy
    """
    def __init__(self, kinetic, radial, angular):
        self.kinetic = float(kinetic)
        self.radial = float(radial)
        self.angular = float(angular)

    @property
    def total(self):
        return self.kinetic + self.radial + self.angular

    def as_dict(self):
        return {
            "kinetic": self.kinetic,
            "radial": self.radial,
            "angular": self.angular,
            "total": self.total,
        }

    def __repr__(self):
        return (f"EnergyReport(kinetic={self.kinetic:.6e}, radial={self.radial:.6e}, "
                f"angular={self.angular:.6e})")


def mode_energy(state, lam, grid, profile):
    """
    Energy of one angular mode against dV = a^2 dx

    Args:
        state (ModeState): Field and velocity
        lam (float): Angular parameter
        grid (Grid): Grid
        profile (GeometryProfile): Geometry

    Returns:
        EnergyReport: int |phi_t|^2, int |phi_x|^2 and int (lambda^2/a^2)|phi|^2
    """
    phi = grid.check(state.phi, "phi")
    phi_t = grid.check(state.phi_t, "phi_t")
    a = profile.warp(grid.x)[0]
    kinetic = quadrature(np.abs(phi_t) ** 2, 1.0, grid, profile)
    radial = quadrature(np.abs(gradient(phi, grid)) ** 2, 1.0, grid, profile)
    angular = quadrature(np.abs(phi) ** 2, float(lam) ** 2 / a ** 2, grid, profile)
    return EnergyReport(kinetic, radial, angular)


def _series(series, dt):
    """
    Normalize a Trajectory or a stack of samples to (array, dt)
    """
    if hasattr(series, "states"):
        if len(series) == 0:
            raise GridError("Empty trajectory")
        return series.fields(), series.dt
    samples = np.asarray(series)
    if samples.size == 0:
        raise GridError("Empty series")
    if samples.ndim == 1:
        samples = samples[None, :]
    if dt is None and samples.shape[0] > 1:
        raise GridError("A raw series needs its sample spacing dt")
    return samples, dt


def _annulus_integrals(density, dt, grid, profile):
    """
    Time integrals of the spatial a^2 dx quadrature of density over each annulus

    Annuli partition the nodes and each node keeps its full-line trapezoid
    weight, so the annulus integrals sum to the full-line quadrature. An
    annulus edge falls between nodes, which makes a single annulus
    first order in h.

    Args:
        density (ndarray): (n_times, n) nonnegative samples

    Returns:
        ndarray: One value per dyadic annulus
    """
    a2 = profile.warp(grid.x)[0] ** 2
    values = []
    for index in dyadic_partition(grid):
        spatial = density[:, index] @ (grid.weights[index] * a2[index])
        if density.shape[0] == 1:
            values.append(0.0)
        else:
            values.append(trapezoid(spatial, dx=dt))
    return np.array(values)


def _le_from_density(density, dt, grid, profile):
    integrals = _annulus_integrals(density, dt, grid, profile)
    scales = 2.0 ** (-0.5 * np.arange(len(integrals)))
    return float(np.max(scales * np.sqrt(integrals)))


def le_norm(series, grid, profile, dt=None):
    """
    Local-energy norm sup_j 2^{-j/2} ||u||_{L^2 L^2(A_j)}

    Args:
        series (Trajectory or ndarray): Uniformly sampled u(t)
        grid (Grid): Grid
        profile (GeometryProfile): Geometry supplying dV = a^2 dx
        dt (float, optional): Sample spacing for raw arrays

    Returns:
        float: LE norm over the sampled time window
    """
    samples, dt = _series(series, dt)
    return _le_from_density(np.abs(samples) ** 2, dt, grid, profile)


def le_dual_norm(series, grid, profile, dt=None):
    """
    Dual local-energy norm sum_j 2^{j/2} ||F||_{L^2 L^2(A_j)}
    """
    samples, dt = _series(series, dt)
    integrals = _annulus_integrals(np.abs(samples) ** 2, dt, grid, profile)
    scales = 2.0 ** (0.5 * np.arange(len(integrals)))
    return float(np.sum(scales * np.sqrt(integrals)))


def le1_norm(series, lam, grid, profile):
    """
    LE norm of (phi_t, phi_x, (lambda/a) phi, <x>^{-1} phi) combined in quadrature

    Args:
        series (Trajectory): Sampled ModeStates
        lam (float): Angular parameter
        grid (Grid): Grid
        profile (GeometryProfile): Geometry

    Returns:
        float: LE^1 norm
    """
    if len(series) == 0:
        raise GridError("Empty trajectory")
    phi = series.fields()
    phi_t = series.velocities()
    a = profile.warp(grid.x)[0]
    phi_x = np.gradient(phi, grid.h, axis=1, edge_order=2)
    weight = (float(lam) / a) ** 2 + japanese_bracket(grid.x) ** -2
    density = np.abs(phi_t) ** 2 + np.abs(phi_x) ** 2 + weight * np.abs(phi) ** 2
    return _le_from_density(density, series.dt, grid, profile)


def hardy_ratio(u, grid, profile):
    """
    Ratio int a^{-2} u^2 dV / int (u_x)^2 dV for compactly supported u
    """
    u = grid.check(u)
    if not np.any(u != 0):
        raise UndefinedRatioError("Hardy ratio is undefined for u = 0")
    if u[0] != 0 or u[-1] != 0:
        raise SupportError("Hardy ratio needs u to vanish at both ends of the grid",
                           radius=grid.support_radius(u), limit=grid.half_width)
    a = profile.warp(grid.x)[0]
    numerator = quadrature(np.abs(u) ** 2, a ** -2, grid, profile)
    denominator = quadrature(np.abs(gradient(u, grid)) ** 2, 1.0, grid, profile)
    if denominator == 0:
        raise UndefinedRatioError("Hardy ratio has a vanishing gradient term")
    return float(numerator / denominator)


def _apply_rows(operator, w):
    out = operator.diagonal * w
    out[:, :-1] += operator.upper[:-1] * w[:, 1:]
    out[:, 1:] += operator.lower[1:] * w[:, :-1]
    return out


def ibp_terms(w, pair, lam, grid, profile, dt=None):
    """
    Both sides of the multiplier identity for a sampled trajectory

    LHS is -Re int int box(w) conj(f w_x + g w) dV dt with the discrete wave
    operator; RHS is the time-boundary term Re int w_t conj(f w_x + g w) dV
    evaluated at the endpoint states plus the four bulk integrals.

    Args:
        w (Trajectory): Every-step samples of w and w_t
        pair (MultiplierPair): f, g on the grid
        lam (float): Angular parameter
        grid (Grid): Grid
        profile (GeometryProfile): Geometry
        dt (float, optional): Overrides the trajectory's sample spacing

    Returns:
        dict: 'lhs', 'rhs', 'boundary' and the four bulk integrals
    """
    if len(w) < 3:
        raise GridError(f"Multiplier identity needs at least 3 time samples, got {len(w)}")
    dt = float(dt or w.dt)
    phi = w.fields()
    phi_t = w.velocities()
    support = max(grid.support_radius(state.phi, state.phi_t) for state in w.states)
    if support > grid.half_width - 2.0 * grid.h:
        raise SupportError(f"w reaches |x|={support:.4g}, within 2h of the boundary",
                           radius=support, limit=grid.half_width - 2.0 * grid.h)
    for name in ("f", "g"):
        grid.check(getattr(pair, name), name)

    a = profile.warp(grid.x)[0]
    node = grid.weights * a ** 2
    angular = float(lam) ** 2 / a ** 2

    phi_tt = np.gradient(phi_t, dt, axis=0, edge_order=2)
    phi_x = np.gradient(phi, grid.h, axis=1, edge_order=2)
    box = -phi_tt + _apply_rows(FluxLaplacian(grid, profile), phi) - angular * phi
    multiplier = pair.f * phi_x + pair.g * phi

    def space_time(density):
        return trapezoid(np.real(density) @ node, dx=dt)

    lhs = -space_time(box * np.conj(multiplier))
    boundary_density = np.real(phi_t * np.conj(multiplier)) @ node
    boundary = boundary_density[-1] - boundary_density[0]

    coefficients = pair.bulk_coefficients(profile, grid.x)
    bulk = {
        "time": space_time(coefficients["time"] * np.abs(phi_t) ** 2),
        "radial": space_time(coefficients["radial"] * np.abs(phi_x) ** 2),
        "angular": space_time(coefficients["angular"] * angular * np.abs(phi) ** 2),
        "lower": space_time(coefficients["lower"] * np.abs(phi) ** 2),
    }
    rhs = boundary + sum(bulk.values())
    return {"lhs": float(lhs), "rhs": float(rhs), "boundary": float(boundary),
            **{key: float(value) for key, value in bulk.items()}}


def ibp_residual(w, pair, lam, grid, profile, dt=None):
    """
    |LHS - RHS| of the multiplier identity; vanishes at O(h^2) + O(dt^2)
    """
    terms = ibp_terms(w, pair, lam, grid, profile, dt)
    residual = abs(terms["lhs"] - terms["rhs"])
    logger.debug(f"ibp residual {residual:.3e} for {pair.name} pair on {grid}")
    return residual
