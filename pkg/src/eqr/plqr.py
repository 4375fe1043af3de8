"""Projected-LQR baseline on the embedded element-wise error.

The error ``(eta - eta_d, v - v_d, x - x_d)`` lives in R^9; the projector
removes the component of the attitude error normal to the sphere at
``eta_d`` before it enters the cost and the feedback.
"""

from __future__ import annotations

import numpy as np

from .flatness import DesiredPoint, DesiredSchedule
from .geometry import hat
from .lqr import GainSchedule, WeightSet, solve_riccati
from .vehicle import Input, Params, State


def projector(eta_d) -> np.ndarray:
    eta_d = np.asarray(eta_d, dtype=float)
    Pr = np.eye(9)
    Pr[0:3, 0:3] -= np.outer(eta_d, eta_d)
    return Pr


def embedded_error(xi: State, xi_d: State) -> np.ndarray:
    return xi.as_vector() - xi_d.as_vector()


def linearize_plqr(xi_d: State, u_d: Input, p: Params, flip_attitude_sign: bool = False):
    """``(A, B)`` of the embedded error dynamics composed with the projector.

    The attitude block is ``-omega_d^ (I - eta_d eta_d')``, the Jacobian of
    ``eta x omega``.  ``flip_attitude_sign=True`` uses ``+omega_d^ (...)``
    instead, for comparing against that sign convention.
    """
    eta = xi_d.eta
    Pe = np.eye(3) - np.outer(eta, eta)
    W = hat(u_d.omega)
    A = np.zeros((9, 9))
    A[0:3, 0:3] = (W if flip_attitude_sign else -W) @ Pe
    A[3:6, 0:3] = -(u_d.thrust / p.mass) * Pe
    A[6:9, 3:6] = np.eye(3)
    B = np.zeros((9, 4))
    B[0:3, 0:3] = hat(eta)
    B[3:6, 3] = -eta / p.mass
    return A, B


def plqr_gains(desired: DesiredSchedule, weights: WeightSet, p: Params,
               interleaved: bool = False, flip_attitude_sign: bool = False) -> GainSchedule:
    """Gain schedule for the projected cost ``(P e)' Q (P e)``.

    With ``interleaved`` the odd rows of ``desired`` are RK4 midpoints and the
    gain grid is ``desired.times[::2]``.
    """
    n = len(desired)
    As = np.empty((n, 9, 9))
    Bs = np.empty((n, 9, 4))
    Qs = np.empty((n, 9, 9))
    for i in range(n):
        pt = desired.point(i)
        As[i], Bs[i] = linearize_plqr(pt.state, pt.input, p, flip_attitude_sign)
        Pr = projector(pt.state.eta)
        Qs[i] = Pr @ weights.Q @ Pr
    Pr_f = projector(desired.eta[-1])
    F = Pr_f @ weights.F @ Pr_f
    times = desired.times[::2] if interleaved else desired.times
    return solve_riccati(times, As, Bs, Qs, F, weights.S)


def plqr_control(xi: State, desired_at_t: DesiredPoint, K_t) -> Input:
    """``u = u_d - K P (xi - xi_d)`` with the thrust clamped at zero."""
    xi_d = desired_at_t.state
    err = projector(xi_d.eta) @ embedded_error(xi, xi_d)
    du = -np.asarray(K_t) @ err
    u_d = desired_at_t.input
    return Input(u_d.omega + du[0:3], max(u_d.thrust + du[3], 0.0))
