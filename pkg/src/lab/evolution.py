import math
import time
import logging

import numpy as np

from core.errors import StabilityError, SupportError, GridError
from lab.discretization import FluxLaplacian

logger = logging.getLogger("evolution")

MAX_CFL = 0.9


class ModeState:
    """
    Field and velocity of one angular mode at time t
    """
    def __init__(self, phi, phi_t, t=0.0):
        phi = np.asarray(phi, dtype=complex)
        phi_t = np.asarray(phi_t, dtype=complex)
        if phi.shape != phi_t.shape:
            raise GridError(f"phi and phi_t differ in shape: {phi.shape} vs {phi_t.shape}")
        if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(phi_t))):
            raise GridError("ModeState has non-finite entries")
        self.phi = phi
        self.phi_t = phi_t
        self.t = float(t)

    @classmethod
    def zeros(cls, grid, t=0.0):
        return cls(np.zeros(grid.n, dtype=complex), np.zeros(grid.n, dtype=complex), t)


class Trajectory:
    """
    Uniformly sampled time history of ModeStates

    Attributes:
        dt (float): Sample spacing
        step_dt (float): Leapfrog time step (dt = stride * step_dt)
        energy (ndarray): Discrete energy at every half step, if recorded
    """
    def __init__(self, grid, dt, states, step_dt=None, energy=None):
        if not dt > 0:
            raise GridError(f"Trajectory needs dt > 0, got {dt}")
        self.grid = grid
        self.dt = float(dt)
        self.step_dt = float(step_dt or dt)
        self.states = list(states)
        for state in self.states:
            grid.check(state.phi, "phi")
        self.energy = None if energy is None else np.asarray(energy)

    def __len__(self):
        return len(self.states)

    @property
    def times(self):
        return np.array([state.t for state in self.states])

    @property
    def final(self):
        return self.states[-1]

    def fields(self):
        return np.array([state.phi for state in self.states])

    def velocities(self):
        return np.array([state.phi_t for state in self.states])

    def energy_drift(self):
        """
        Maximum relative deviation of the discrete energy from its first value
        """
        if self.energy is None or len(self.energy) == 0:
            return 0.0
        reference = abs(self.energy[0])
        if reference == 0.0:
            return float(np.max(np.abs(self.energy)))
        return float(np.max(np.abs(self.energy - self.energy[0])) / reference)


class ModeOperator:
    """
    Spatial part of the mode equation: A u = L u - (lambda^2/a^2) u
    """
    def __init__(self, lam, grid, profile):
        self.lam = float(lam)
        self.grid = grid
        self.laplacian = FluxLaplacian(grid, profile)
        self.angular = self.lam ** 2 / profile.warp(grid.x)[0] ** 2
        self.weights = self.laplacian.node_weights

    def apply(self, u):
        return self.laplacian.apply(u) - self.angular * u

    def spectral_bound(self):
        return self.laplacian.spectral_bound() + float(self.angular.max())

    def inner(self, u, v):
        """
        Real part of sum_i a_i^2 h conj(u_i) v_i
        """
        return float(np.real(np.sum(self.weights * np.conj(u) * v)))


def discrete_energy(operator, previous, current, dt):
    """
    Leapfrog-compatible energy at the half step between two levels:
    ||(u^{n+1}-u^n)/dt||^2 - <u^{n+1}, A u^n>, conserved exactly without forcing
    """
    diff = (current - previous) / dt
    return operator.inner(diff, diff) - operator.inner(current, operator.apply(previous))


def _forcing_at(forcing, t, n):
    if forcing is None:
        return None
    values = np.asarray(forcing(t), dtype=complex)
    if values.shape != (n,):
        raise GridError(f"forcing returned shape {values.shape}, grid expects ({n},)")
    return values


def evolve(state0, lam, forcing, T, grid, profile, cfl=MAX_CFL, stride=1, observers=(),
           forcing_support=0.0, steps=None, store=True):
    """
    Leapfrog evolution of -phi_tt + a^{-2}(a^2 phi_x)_x - (lambda^2/a^2) phi = f

    Args:
        state0 (ModeState): Initial field and velocity
        lam (float): Angular parameter
        forcing (callable or None): t -> GridFunction f(t)
        T (float): Final time
        grid (Grid): Spatial grid
        profile (GeometryProfile): Geometry
        cfl (float): Target dt/h, at most 0.9
        stride (int): Store every stride-th step
        observers (iterable): Callables obs(n, t, phi, phi_t) run at every step
        forcing_support (float): Radius containing the forcing support
        steps (int, optional): Exact number of steps; dt = T/steps must respect cfl
        store (bool): Keep sampled states; False keeps only the endpoints

    Returns:
        Trajectory: Sampled states and the discrete energy at every half step
    """
    grid.check(state0.phi, "phi")
    grid.check(state0.phi_t, "phi_t")
    if cfl > MAX_CFL or cfl <= 0:
        raise StabilityError(f"cfl must lie in (0, {MAX_CFL}], got {cfl}", cfl=cfl)
    if T < 0:
        raise StabilityError(f"Final time must be nonnegative, got {T}")

    support = max(grid.support_radius(state0.phi, state0.phi_t), float(forcing_support))
    limit = grid.half_width - T - 2.0 * grid.h
    if support > limit:
        raise SupportError(
            f"Data supported in |x|<={support:.4g} reach the boundary before T={T:g}; "
            f"need X >= {support + T + 2.0 * grid.h:.4g}, have {grid.half_width:.4g}",
            radius=support, limit=limit,
        )

    if steps is None:
        steps = max(1, math.ceil(T / (cfl * grid.h) - 1e-9))
    dt = T / steps if T > 0 else cfl * grid.h
    if dt > cfl * grid.h * (1.0 + 1e-12):
        raise StabilityError(f"{steps} steps give dt/h={dt / grid.h:.4f} above cfl={cfl}", cfl=dt / grid.h)

    operator = ModeOperator(lam, grid, profile)
    if dt ** 2 * operator.spectral_bound() / 4.0 >= 1.0:
        raise StabilityError(
            f"dt={dt:.3e} violates the leapfrog bound for lambda={lam:g}, h={grid.h:.3e}",
            cfl=dt / grid.h,
        )

    started = time.time()
    t0 = state0.t
    phi_prev = state0.phi.copy()
    f0 = _forcing_at(forcing, t0, grid.n)
    a_prev = operator.apply(phi_prev)
    accel = a_prev if f0 is None else a_prev - f0
    jerk = operator.apply(state0.phi_t)
    if f0 is not None:
        # f_t by a forward difference over the first step
        jerk = jerk - (_forcing_at(forcing, t0 + dt, grid.n) - f0) / dt
    phi_curr = phi_prev + dt * state0.phi_t + 0.5 * dt ** 2 * accel + dt ** 3 / 6.0 * jerk

    states = [ModeState(phi_prev, state0.phi_t, t0)]
    energy = [discrete_energy(operator, phi_prev, phi_curr, dt)]
    for observer in observers:
        observer(0, t0, phi_prev, state0.phi_t)

    final_state = states[0]
    for n in range(1, steps + 1):
        t = t0 + n * dt
        a_curr = operator.apply(phi_curr)
        f = _forcing_at(forcing, t, grid.n)
        accel = a_curr if f is None else a_curr - f
        phi_next = 2.0 * phi_curr - phi_prev + dt ** 2 * accel
        energy.append(
            (operator.inner(phi_next - phi_curr, phi_next - phi_curr) / dt ** 2)
            - operator.inner(phi_next, a_curr)
        )
        phi_t = (phi_next - phi_prev) / (2.0 * dt)
        for observer in observers:
            observer(n, t, phi_curr, phi_t)
        if n == steps or (store and n % stride == 0):
            final_state = ModeState(phi_curr, phi_t, t)
            states.append(final_state)
        phi_prev, phi_curr = phi_curr, phi_next

    if not store and len(states) > 1:
        states = [states[0], final_state]
    elapsed = time.time() - started
    logger.debug(f"Evolved lambda={lam:g} over T={T:g} in {steps} steps ({elapsed:.2f}s)")

    sample_dt = dt * stride if store else T
    return Trajectory(grid, sample_dt if sample_dt > 0 else dt, states, step_dt=dt,
                      energy=np.array(energy))


def causal_leak(trajectory, support):
    """
    Largest |phi| at nodes beyond support + t + 2h over the stored states
    """
    grid = trajectory.grid
    leak = 0.0
    for state in trajectory.states:
        outside = np.abs(grid.x) > support + state.t + 2.0 * grid.h
        if outside.any():
            leak = max(leak, float(np.max(np.abs(state.phi[outside]))))
    return leak


def self_convergence(initial_state, lam, T, grid, profile, cfl=0.5, levels=3):
    """
    Richardson self-convergence of evolve under h -> h/2 refinement

    Args:
        initial_state (callable): Grid -> ModeState on that grid
        lam (float): Angular parameter
        T (float): Final time
        grid (Grid): Coarsest grid
        profile (GeometryProfile): Geometry
        cfl (float): dt/h on the coarsest level
        levels (int): Number of grids, at least 3

    Returns:
        tuple: (order, differences) where differences[k] = ||phi_k - phi_{k+1}|| on coarse nodes
    """
    base_steps = max(1, math.ceil(T / (cfl * grid.h) - 1e-9))
    finals = []
    for k in range(levels):
        level = grid.refine(2 ** k) if k else grid
        trajectory = evolve(initial_state(level), lam, None, T, level, profile, cfl=cfl,
                            steps=base_steps * 2 ** k, store=False)
        finals.append(trajectory.final.phi[:: 2 ** k])
    differences = [
        math.sqrt(grid.h) * float(np.linalg.norm(finals[k] - finals[k + 1]))
        for k in range(levels - 1)
    ]
    order = math.log2(differences[-2] / differences[-1])
    logger.info(f"Self-convergence order {order:.3f} from differences {differences}")
    return order, differences
