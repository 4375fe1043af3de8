"""Thrust-vectored vehicle on S^2 x R^3 x R^3 with its SE_2(3) symmetry.

State ``(eta, v, x)``: reduced attitude (unit thrust direction), velocity and
position.  Inputs are body angular velocity ``omega`` and scalar thrust.
Gravity acts along ``+e3``::

    eta' = eta x omega
    v'   = -(T / m) eta + g e3
    x'   = v

Tangent vectors and Jacobians use the embedded 9-vector layout
``(eta, v, x)``; chart coordinates are the 8-vector ``(sigma(eta), v, x)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import AlgebraElement, GroupElement, hat

E3 = np.array([0.0, 0.0, 1.0])
# chart() refuses eta3 <= -1 + ANTIPODE_GUARD.
ANTIPODE_GUARD = 1e-6


class ChartSingularity(ValueError):
    """Point too close to the antipode of the chart centre."""


@dataclass(frozen=True)
class Params:
    mass: float = 1.2
    gravity: float = 9.81

    def __post_init__(self):
        if not self.mass > 0.0:
            raise ValueError(f"mass must be positive, got {self.mass}")


@dataclass(frozen=True)
class State:
    eta: np.ndarray
    vel: np.ndarray
    pos: np.ndarray

    @classmethod
    def from_vector(cls, vec) -> "State":
        vec = np.asarray(vec, dtype=float)
        return cls(vec[0:3].copy(), vec[3:6].copy(), vec[6:9].copy())

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.eta, self.vel, self.pos])


@dataclass(frozen=True)
class Input:
    omega: np.ndarray
    thrust: float

    @classmethod
    def from_vector(cls, vec) -> "Input":
        vec = np.asarray(vec, dtype=float)
        return cls(vec[0:3].copy(), float(vec[3]))

    def as_vector(self) -> np.ndarray:
        return np.append(self.omega, self.thrust)


ORIGIN = State(E3.copy(), np.zeros(3), np.zeros(3))


def hover_input(p: Params) -> Input:
    return Input(np.zeros(3), p.mass * p.gravity)


def dynamics(xi: State, u: Input, p: Params) -> np.ndarray:
    """Vector field as a 9-vector ``(eta', v', x')``."""
    eta_dot = np.cross(xi.eta, u.omega)
    v_dot = -(u.thrust / p.mass) * xi.eta + p.gravity * E3
    return np.concatenate([eta_dot, v_dot, xi.vel])


def input_field(xi: State, p: Params) -> np.ndarray:
    """The 9x4 input matrix ``g(xi)`` of the affine system."""
    g = np.zeros((9, 4))
    g[0:3, 0:3] = hat(xi.eta)
    g[3:6, 3] = -xi.eta / p.mass
    return g


def act(X: GroupElement, xi: State) -> State:
    R = X.rotation
    return State(R @ xi.eta, R @ xi.vel + X.v_slot, R @ xi.pos + X.x_slot)


def act_state_jacobian(X: GroupElement) -> np.ndarray:
    """Differential of ``xi -> act(X, xi)``; independent of the base point."""
    J = np.zeros((9, 9))
    for k in range(3):
        J[3 * k:3 * k + 3, 3 * k:3 * k + 3] = X.rotation
    return J


def act_group_jacobian(xi: State) -> np.ndarray:
    """Differential of ``X -> act(X, xi)`` at the identity, on ``(w, a, b)``."""
    J = np.zeros((9, 9))
    J[0:3, 0:3] = -hat(xi.eta)
    J[3:6, 0:3] = -hat(xi.vel)
    J[3:6, 3:6] = np.eye(3)
    J[6:9, 0:3] = -hat(xi.pos)
    J[6:9, 6:9] = np.eye(3)
    return J


def stereo(eta) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    d = eta[2] + 1.0
    if d <= ANTIPODE_GUARD:
        raise ChartSingularity(f"eta = {eta.tolist()} is at the chart antipode")
    return np.array([eta[0] / d, eta[1] / d])


def stereo_inv(s) -> np.ndarray:
    s1, s2 = float(s[0]), float(s[1])
    q = 1.0 + s1 * s1 + s2 * s2
    return np.array([2.0 * s1 / q, 2.0 * s2 / q, 2.0 / q - 1.0])


def stereo_jacobian(eta) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    d = eta[2] + 1.0
    if d <= ANTIPODE_GUARD:
        raise ChartSingularity(f"eta = {eta.tolist()} is at the chart antipode")
    return np.array([
        [1.0 / d, 0.0, -eta[0] / (d * d)],
        [0.0, 1.0 / d, -eta[1] / (d * d)],
    ])


def stereo_inv_jacobian(s) -> np.ndarray:
    s1, s2 = float(s[0]), float(s[1])
    q = 1.0 + s1 * s1 + s2 * s2
    q2 = q * q
    return np.array([
        [2.0 / q - 4.0 * s1 * s1 / q2, -4.0 * s1 * s2 / q2],
        [-4.0 * s1 * s2 / q2, 2.0 / q - 4.0 * s2 * s2 / q2],
        [-4.0 * s1 / q2, -4.0 * s2 / q2],
    ])


def chart(xi: State) -> np.ndarray:
    return np.concatenate([stereo(xi.eta), xi.vel, xi.pos])


def chart_inv(eps) -> State:
    eps = np.asarray(eps, dtype=float)
    return State(stereo_inv(eps[0:2]), eps[2:5].copy(), eps[5:8].copy())


def chart_jacobian(xi: State) -> np.ndarray:
    """8x9 differential of the chart at ``xi``."""
    J = np.zeros((8, 9))
    J[0:2, 0:3] = stereo_jacobian(xi.eta)
    J[2:8, 3:9] = np.eye(6)
    return J


def chart_inv_jacobian(eps) -> np.ndarray:
    """9x8 differential of the inverse chart at ``eps``."""
    J = np.zeros((9, 8))
    J[0:3, 0:2] = stereo_inv_jacobian(np.asarray(eps)[0:2])
    J[3:9, 2:8] = np.eye(6)
    return J


def lift(xi: State, u: Input, p: Params) -> AlgebraElement:
    """Lie-algebra lift whose infinitesimal action reproduces ``dynamics``.

    Not unique: anything in the stabiliser direction of ``xi`` may be added.
    This is the choice ``(-omega^, omega x v - (T/m) eta + g e3, omega x x + v)``.
    """
    om = u.omega
    return AlgebraElement(
        -om,
        np.cross(om, xi.vel) - (u.thrust / p.mass) * xi.eta + p.gravity * E3,
        np.cross(om, xi.pos) + xi.vel,
    )


def lift_state_jacobian(u: Input, p: Params) -> np.ndarray:
    """Differential of ``xi -> lift(xi, u)``; the lift is affine in ``xi``."""
    W = hat(u.omega)
    J = np.zeros((9, 9))
    J[3:6, 0:3] = -(u.thrust / p.mass) * np.eye(3)
    J[3:6, 3:6] = W
    J[6:9, 3:6] = np.eye(3)
    J[6:9, 6:9] = W
    return J


def lifted_field(X: GroupElement, u: Input, p: Params, origin: State = ORIGIN) -> AlgebraElement:
    """Right-trivialised lifted vector field: ``X' = lifted_field(X) X``."""
    return lift(act(X, origin), u, p)
