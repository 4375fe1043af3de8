"""Reference trajectories from a flat position output.

Given a C^3 position curve the vehicle state and inputs follow in closed
form: thrust from the required specific force, thrust direction from its
normalisation, and the angular velocity with zero component along ``eta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .vehicle import E3, Input, Params, State

# Coefficient of eta_d in omega_d; zero picks the minimum-norm angular rate.
BETA = 0.0
FREE_FALL_GUARD = 1e-6


class FreeFallSingularity(ValueError):
    """Required specific force vanishes, so the thrust direction is undefined."""

    def __init__(self, t, norm):
        super().__init__(f"specific force norm {norm:.3e} below guard at t = {t}")
        self.t = t


class FlatCurve:
    """Position curve with its first three derivatives.

    Subclasses implement ``jets(t)`` returning ``(x, x', x'', x''')``, each
    shaped ``t.shape + (3,)``.
    """

    name = "curve"

    def jets(self, t):
        raise NotImplementedError


class Helix(FlatCurve):
    """``x(t) = (r cos wt, r sin wt, c t)``; defaults give the reference helix."""

    name = "helix"

    def __init__(self, radius=0.5, rate=1.0, climb=1.0):
        self.radius, self.rate, self.climb = radius, rate, climb

    def jets(self, t):
        t = np.asarray(t, dtype=float)
        r, w, c = self.radius, self.rate, self.climb
        cs, sn = np.cos(w * t), np.sin(w * t)
        zero = np.zeros_like(t)
        x = np.stack([r * cs, r * sn, c * t], axis=-1)
        xd = np.stack([-r * w * sn, r * w * cs, c + zero], axis=-1)
        xdd = np.stack([-r * w**2 * cs, -r * w**2 * sn, zero], axis=-1)
        xddd = np.stack([r * w**3 * sn, -r * w**3 * cs, zero], axis=-1)
        return x, xd, xdd, xddd


class Hover(FlatCurve):
    name = "hover"

    def __init__(self, position=(0.0, 0.0, 0.0)):
        self.position = np.asarray(position, dtype=float)

    def jets(self, t):
        t = np.asarray(t, dtype=float)
        x = np.broadcast_to(self.position, t.shape + (3,)).copy()
        z = np.zeros(t.shape + (3,))
        return x, z, z.copy(), z.copy()


class Polynomial(FlatCurve):
    """``x(t) = sum_k coeffs[k] t^k`` with ``coeffs`` shaped ``(K, 3)``."""

    name = "polynomial"

    def __init__(self, coeffs):
        self.coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))

    def jets(self, t):
        t = np.asarray(t, dtype=float)
        c = self.coeffs
        out = []
        for _ in range(4):
            out.append(np.moveaxis(P.polyval(t, c), 0, -1))
            c = P.polyder(c, axis=0)
        return tuple(out)


@dataclass(frozen=True)
class DesiredPoint:
    state: State
    input: Input
    time: float


def flat_outputs(curve: FlatCurve, t, p: Params) -> dict:
    """Vectorised flat map over an array of times.

    Returns arrays keyed ``eta, eta_dot, vel, pos, acc, omega, thrust,
    thrust_dot``.
    """
    t = np.asarray(t, dtype=float)
    x, v, a, j = curve.jets(t)
    m, g = p.mass, p.gravity
    force = -a + g * E3
    norm = np.linalg.norm(force, axis=-1)
    if np.any(norm <= FREE_FALL_GUARD):
        k = np.flatnonzero(np.atleast_1d(norm) <= FREE_FALL_GUARD)[0]
        raise FreeFallSingularity(float(np.atleast_1d(t)[k]), float(np.atleast_1d(norm)[k]))
    thrust = m * norm
    # d/dt |force| = j.(a - g e3)/|force|
    thrust_dot = m * np.einsum("...i,...i->...", j, a - g * E3) / norm
    eta = m * force / thrust[..., None]
    eta_dot = (m * thrust_dot / thrust**2)[..., None] * (a - g * E3) - m * j / thrust[..., None]
    omega = np.cross(eta_dot, eta) + BETA * eta
    return dict(eta=eta, eta_dot=eta_dot, vel=v, pos=x, acc=a, omega=omega,
                thrust=thrust, thrust_dot=thrust_dot)


def flat_to_state(curve: FlatCurve, t: float, p: Params) -> DesiredPoint:
    o = flat_outputs(curve, np.array(float(t)), p)
    return DesiredPoint(
        State(o["eta"], o["vel"], o["pos"]),
        Input(o["omega"], float(o["thrust"])),
        float(t),
    )


@dataclass
class DesiredSchedule:
    """Desired states and inputs sampled on a uniform time grid.

    ``curve`` and ``params`` are kept so that callers needing off-grid
    samples (integrator stages) can evaluate them exactly.
    """

    times: np.ndarray
    eta: np.ndarray
    vel: np.ndarray
    pos: np.ndarray
    omega: np.ndarray
    thrust: np.ndarray
    curve: FlatCurve | None = None
    params: Params | None = field(default=None)

    def __len__(self):
        return len(self.times)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    def point(self, i: int) -> DesiredPoint:
        return DesiredPoint(
            State(self.eta[i].copy(), self.vel[i].copy(), self.pos[i].copy()),
            Input(self.omega[i].copy(), float(self.thrust[i])),
            float(self.times[i]),
        )

    def states(self) -> np.ndarray:
        """``(N, 9)`` array of stacked ``(eta, v, x)``."""
        return np.hstack([self.eta, self.vel, self.pos])

    def inputs_at(self, t) -> tuple[np.ndarray, np.ndarray]:
        """``(omega, thrust)`` at arbitrary times, exact when the curve is known."""
        t = np.asarray(t, dtype=float)
        if self.curve is not None:
            o = flat_outputs(self.curve, t, self.params)
            return o["omega"], o["thrust"]
        om = np.stack([np.interp(t, self.times, self.omega[:, k]) for k in range(3)], axis=-1)
        return om, np.interp(t, self.times, self.thrust)


def uniform_grid(t0: float, tf: float, dt: float) -> np.ndarray:
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not tf > t0:
        raise ValueError(f"need tf > t0, got t0={t0}, tf={tf}")
    n = int(round((tf - t0) / dt))
    if not np.isclose(t0 + n * dt, tf, rtol=0.0, atol=1e-9 * max(1.0, abs(tf))):
        raise ValueError(f"(tf - t0) = {tf - t0} is not a multiple of dt = {dt}")
    return t0 + dt * np.arange(n + 1)


def sample_trajectory(curve: FlatCurve, t0: float, tf: float, dt: float, p: Params) -> DesiredSchedule:
    times = uniform_grid(t0, tf, dt)
    o = flat_outputs(curve, times, p)
    return DesiredSchedule(times, o["eta"], o["vel"], o["pos"], o["omega"], o["thrust"],
                           curve=curve, params=p)


TRAJECTORY_HEADER = ["t", "eta_1", "eta_2", "eta_3", "v_1", "v_2", "v_3",
                     "x_1", "x_2", "x_3", "omega_1", "omega_2", "omega_3", "thrust"]


def trajectory_table(schedule: DesiredSchedule) -> np.ndarray:
    return np.column_stack([schedule.times, schedule.eta, schedule.vel, schedule.pos,
                            schedule.omega, schedule.thrust])
