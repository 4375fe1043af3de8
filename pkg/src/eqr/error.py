"""Intrinsic tracking error, its local coordinates and linearisations.

With a lifted reference ``X_d`` the error state is ``xi_e = act(X_d^-1, xi)``,
which sits at the origin exactly when ``xi`` is on the reference.  Local
coordinates ``eps = chart(xi_e)`` live in a single chart at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import GroupElement, adjoint, adjoint_matrix, hat, inverse
from .vehicle import (
    ORIGIN,
    Input,
    Params,
    State,
    act,
    act_group_jacobian,
    act_state_jacobian,
    chart,
    chart_inv,
    chart_inv_jacobian,
    chart_jacobian,
    input_field,
    lift,
    lift_state_jacobian,
)


@dataclass(frozen=True)
class LinearizationPair:
    """``eps' ~ A eps + B u_tilde``; B columns are ``(omega_tilde, thrust_tilde)``."""

    A: np.ndarray
    B: np.ndarray
    time: float = 0.0


def error_state(X_d: GroupElement, xi: State) -> State:
    return act(inverse(X_d), xi)


def local_error(X_d: GroupElement, xi: State) -> np.ndarray:
    return chart(error_state(X_d, xi))


def nonlinear_error_rate(eps, X_d: GroupElement, xi_d: State, u_d: Input, u_tilde,
                         p: Params) -> np.ndarray:
    """Exact time derivative of the local error coordinates.

    ``u_tilde`` is the 4-vector ``(omega - omega_d, T - T_d)``.
    """
    u_tilde = np.asarray(u_tilde, dtype=float)
    xi_e = chart_inv(eps)
    xi = act(X_d, xi_e)
    X_inv = inverse(X_d)
    lam_diff = lift(xi, u_d, p) - lift(xi_d, u_d, p)
    drift = act_group_jacobian(xi_e) @ adjoint(X_inv, lam_diff).as_vector()
    forced = act_state_jacobian(X_inv) @ (input_field(xi, p) @ u_tilde)
    return chart_jacobian(xi_e) @ (drift + forced)


def linearize_generic(X_d: GroupElement, xi_d: State, u_d: Input, p: Params,
                      time: float = 0.0) -> LinearizationPair:
    """First-order error dynamics at ``(eps, u_tilde) = (0, 0)`` via the
    differential chain of chart, action, adjoint and lift."""
    X_inv = inverse(X_d)
    chart_d = chart_jacobian(ORIGIN)
    A = (chart_d
         @ act_group_jacobian(ORIGIN)
         @ adjoint_matrix(X_inv)
         @ lift_state_jacobian(u_d, p)
         @ act_state_jacobian(X_d)
         @ chart_inv_jacobian(np.zeros(8)))
    B = chart_d @ act_state_jacobian(X_inv) @ input_field(xi_d, p)
    return LinearizationPair(A, B, time)


def linearize_closed_form(omega_d, thrust_d: float, p: Params, time: float = 0.0) -> LinearizationPair:
    """Hand-derived block form of the linearisation.

    Agrees with ``linearize_generic`` when ``X_d`` is the identity; elsewhere
    the generic angular-rate terms are expressed in the rotated frame.
    """
    W = hat(omega_d)
    A = np.zeros((8, 8))
    A[2:5, 0:2] = -(thrust_d / p.mass) * np.array([[2.0, 0.0], [0.0, 2.0], [0.0, 0.0]])
    A[2:5, 2:5] = W
    A[5:8, 2:5] = np.eye(3)
    A[5:8, 5:8] = W
    B = np.zeros((8, 4))
    B[0:2, 0:3] = [[0.0, -0.5, 0.0], [0.5, 0.0, 0.0]]
    B[4, 3] = -1.0 / p.mass
    return LinearizationPair(A, B, time)


def finite_difference_jacobians(X_d: GroupElement, xi_d: State, u_d: Input, p: Params,
                                h: float = 1e-5) -> tuple[np.ndarray, np.ndarray]:
    """Central differences of ``nonlinear_error_rate`` at the origin."""
    A = np.zeros((8, 8))
    B = np.zeros((8, 4))
    zero_u = np.zeros(4)
    for k in range(8):
        d = np.zeros(8)
        d[k] = h
        A[:, k] = (nonlinear_error_rate(d, X_d, xi_d, u_d, zero_u, p)
                   - nonlinear_error_rate(-d, X_d, xi_d, u_d, zero_u, p)) / (2 * h)
    for k in range(4):
        d = np.zeros(4)
        d[k] = h
        B[:, k] = (nonlinear_error_rate(np.zeros(8), X_d, xi_d, u_d, d, p)
                   - nonlinear_error_rate(np.zeros(8), X_d, xi_d, u_d, -d, p)) / (2 * h)
    return A, B


LINEARIZATION_HEADER = (["t"] + [f"A_{r}{c}" for r in range(8) for c in range(8)]
                        + [f"B_{r}{c}" for r in range(8) for c in range(4)])


def linearization_table(pairs) -> np.ndarray:
    return np.array([np.concatenate([[lp.time], lp.A.ravel(), lp.B.ravel()]) for lp in pairs])
