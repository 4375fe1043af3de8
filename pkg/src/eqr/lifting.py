"""Lifting desired trajectories from S^2 x R^3 x R^3 onto SE_2(3)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .flatness import DesiredSchedule
from .geometry import GroupElement, compose, exp, exp_so3, inverse, log
from .vehicle import E3, ORIGIN, Input, Params, State


class OutOfRange(ValueError):
    pass


def minimal_rotation(eta) -> np.ndarray:
    """Smallest rotation taking ``e3`` to the unit vector ``eta``.

    For ``eta = -e3`` the axis is undefined and ``e1`` is used.
    """
    eta = np.asarray(eta, dtype=float)
    axis = np.cross(E3, eta)
    s = float(np.linalg.norm(axis))
    angle = math.atan2(s, float(eta @ E3))
    if s == 0.0:
        return np.eye(3) if eta[2] > 0.0 else exp_so3(np.array([math.pi, 0.0, 0.0]))
    return exp_so3(angle * axis / s)


def initial_element(xi_d0: State, origin: State = ORIGIN) -> GroupElement:
    """Group element mapping the origin onto ``xi_d0``.

    Only defined for the standard origin ``(e3, 0, 0)``; the result is unique
    up to a rotation about ``e3`` applied on the right.
    """
    if not (np.allclose(origin.eta, E3) and not origin.vel.any() and not origin.pos.any()):
        raise ValueError("initial_element supports the origin (e3, 0, 0) only")
    return GroupElement(minimal_rotation(xi_d0.eta), np.array(xi_d0.vel, dtype=float),
                        np.array(xi_d0.pos, dtype=float))


@dataclass(frozen=True)
class LiftedTrajectory:
    """Group-valued trajectory on a uniform grid with the inputs that drive it."""

    times: np.ndarray
    rotations: np.ndarray
    v_slots: np.ndarray
    x_slots: np.ndarray
    omega: np.ndarray
    thrust: np.ndarray
    origin: State = ORIGIN

    def __len__(self):
        return len(self.times)

    def element(self, i: int) -> GroupElement:
        return GroupElement(self.rotations[i], self.v_slots[i], self.x_slots[i])

    def input(self, i: int) -> Input:
        return Input(self.omega[i], float(self.thrust[i]))

    def projected_states(self) -> np.ndarray:
        """``(N, 9)`` array of ``act(X_d(t_i), origin)``."""
        o = self.origin
        eta = self.rotations @ o.eta
        v = self.rotations @ o.vel + self.v_slots
        x = self.rotations @ o.pos + self.x_slots
        return np.hstack([eta, v, x])

    def at(self, t: float) -> tuple[GroupElement, Input]:
        """Geodesic interpolation of the element, linear for the input."""
        t0, tf = self.times[0], self.times[-1]
        if not t0 <= t <= tf:
            raise OutOfRange(f"t = {t} outside [{t0}, {tf}]")
        n = len(self.times)
        if n == 1:
            return self.element(0), self.input(0)
        h = (tf - t0) / (n - 1)
        i = min(int((t - t0) / h), n - 2)
        s = (t - self.times[i]) / h
        Xi = self.element(i)
        if s == 0.0:
            return Xi, self.input(i)
        if s == 1.0:
            return self.element(i + 1), self.input(i + 1)
        step = log(compose(self.element(i + 1), inverse(Xi)))
        X = compose(exp(s * step), Xi)
        om = (1.0 - s) * self.omega[i] + s * self.omega[i + 1]
        th = (1.0 - s) * self.thrust[i] + s * self.thrust[i + 1]
        return X, Input(om, float(th))


def lift_trajectory(desired: DesiredSchedule, origin: State = ORIGIN,
                    p: Params | None = None) -> LiftedTrajectory:
    """Integrate the lifted system along ``desired`` with RKMK4 steps.

    Stage inputs at half steps come from the schedule's curve when present,
    otherwise from linear interpolation (which drops the scheme to 2nd order).
    """
    if len(desired) < 1:
        raise ValueError("empty desired schedule")
    p = p or desired.params or Params()
    times = np.asarray(desired.times, dtype=float)
    X0 = initial_element(desired.point(0).state, origin)
    if len(times) == 1:
        return LiftedTrajectory(times, X0.rotation[None], X0.v_slot[None], X0.x_slot[None],
                                desired.omega.copy(), desired.thrust.copy(), origin)
    h = float(times[1] - times[0])
    half = times[0] + 0.5 * h * np.arange(2 * len(times) - 1)
    omega, thrust = desired.inputs_at(half)
    R, v, x = kernels.lift_rkmk4(X0.rotation, X0.v_slot, X0.x_slot,
                                 np.ascontiguousarray(omega), np.ascontiguousarray(thrust),
                                 h, p.mass, p.gravity)
    return LiftedTrajectory(times, R, v, x, desired.omega.copy(), desired.thrust.copy(), origin)


def projection_error(traj: LiftedTrajectory, desired: DesiredSchedule) -> float:
    """Max over nodes of the embedded distance between projection and target."""
    diff = traj.projected_states() - desired.states()
    return float(np.max(np.linalg.norm(diff, axis=1)))


LIFTED_HEADER = (["t"] + [f"R_{r}{c}" for r in range(1, 4) for c in range(1, 4)]
                 + ["vX_1", "vX_2", "vX_3", "xX_1", "xX_2", "xX_3"])


def lifted_table(traj: LiftedTrajectory) -> np.ndarray:
    return np.column_stack([traj.times, traj.rotations.reshape(-1, 9), traj.v_slots, traj.x_slots])
