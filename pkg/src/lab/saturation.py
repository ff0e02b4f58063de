import math
import time
import logging

import numpy as np

from core.config import config
from core.errors import ParameterError
from lab.discretization import grid_for
from lab.evolution import ModeState, MAX_CFL, evolve
from lab.geometry import GeometryProfile, japanese_bracket, smooth_cutoff
from lab.quasimode import build_quasimode, growth_factor, tau_root

logger = logging.getLogger("saturation")


class SaturationResult:
    """
    Outcome of one saturation run at fixed lambda
    """
    def __init__(self, lam, m, eps_t, T, lhs, rhs, b2t_prediction, c_measured, energy_drift, tau):
        self.lam = lam
        self.m = m
        self.eps_t = eps_t
        self.T = T
        self.lhs = lhs
        self.rhs = rhs
        self.ratio = lhs / rhs
        self.b2t_prediction = b2t_prediction
        self.c_measured = c_measured
        self.energy_drift = energy_drift
        self.tau = tau

    def as_dict(self):
        return {
            "m": self.m, "lambda": self.lam, "eps_t": self.eps_t, "T": self.T,
            "lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio,
            "b2t_prediction": self.b2t_prediction, "c_measured": self.c_measured,
            "energy_drift": self.energy_drift,
        }


class TimeIntegral:
    """
    Observer accumulating the trapezoid rule of lambda^2 int beta(|x|)^2 |phi|^2 dx over time
    """
    def __init__(self, weight, steps, dt):
        self.weight = weight
        self.steps = steps
        self.dt = dt
        self.total = 0.0

    def __call__(self, n, t, phi, phi_t):
        factor = 0.5 if n in (0, self.steps) else 1.0
        self.total += factor * self.dt * float(np.sum(self.weight * np.abs(phi) ** 2))


def saturation_experiment(lam, m, eps_t=None, grid_policy=None, alpha=None, beta=None, profile="polynomial"):
    """
    Evolve quasimode data and compare trapped mass with the initial energy

    Args:
        lam (float): lambda >= 64
        m (int): Degeneracy
        eps_t (float, optional): T = eps_t * lambda^{(m-1)/(m+1)} (config saturation.eps_t)
        grid_policy (dict, optional): points_per_wavelength, h_cap and cfl overrides
        alpha, beta (float, optional): Quasimode shift (config saturation.alpha/beta)
        profile (str): Quasimode profile

    Returns:
        SaturationResult: lhs, rhs, ratio and the B(2T) prediction with diagnostics
    """
    if lam < 64:
        raise ParameterError(f"Saturation experiment needs lambda >= 64, got {lam}")
    eps_t = config.get('saturation', 'eps_t', 0.25) if eps_t is None else eps_t
    alpha = config.get('saturation', 'alpha', 0.0) if alpha is None else alpha
    beta = config.get('saturation', 'beta', -1.0) if beta is None else beta
    policy = {**config.section('grid'), **(grid_policy or {})}
    ppw = policy.get('points_per_wavelength', 8)
    h_cap = policy.get('h_cap', 1.0 / 64)
    cfl = min(policy.get('cfl', MAX_CFL), MAX_CFL)

    started = time.time()
    geometry = GeometryProfile(m)
    exponent = (m - 1.0) / (m + 1)
    T = eps_t * lam ** exponent
    grid = grid_for(2.0 + T + 1.0, lam, ppw, h_cap)

    mode = build_quasimode(lam, m, alpha, beta, grid, profile)
    tau = tau_root(lam, mode.E)
    a = geometry.warp(grid.x)[0]
    psi0 = mode.u / a
    psi1 = 1j * tau * psi0

    steps = max(1, math.ceil(T / (cfl * grid.h) - 1e-9))
    dt = T / steps
    observer = TimeIntegral(lam ** 2 * smooth_cutoff(np.abs(grid.x)) ** 2 * grid.weights, steps, dt)
    trajectory = evolve(ModeState(psi0, psi1), lam, None, T, grid, geometry, cfl=cfl,
                        observers=(observer,), steps=steps, store=False)

    potential_mass = lam ** 2 * float(np.sum(grid.weights * np.abs(psi0) ** 2))
    kinetic_mass = float(np.sum(grid.weights * a ** 2 * np.abs(psi1) ** 2))
    lhs = observer.total
    rhs = japanese_bracket(lam) ** exponent * (potential_mass + kinetic_mass)
    prediction = eps_t * growth_factor(2.0 * T, abs(tau.imag)) * lam ** exponent * potential_mass

    result = SaturationResult(lam, m, eps_t, T, lhs, rhs, prediction, mode.c_measured,
                              trajectory.energy_drift(), tau)
    logger.info(f"Saturation lambda={lam:g} m={m}: ratio={result.ratio:.5f}, "
                f"lhs/prediction={lhs / prediction:.4f} ({time.time() - started:.1f}s)")
    return result
