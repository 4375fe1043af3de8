"""Pure-Python reference kernels.

Same signatures and results as the compiled ``_ckernels`` module; used when
the extension is unavailable or ``EQR_PURE_PYTHON=1`` is set.

Tables passed to ``simulate`` are sampled on the half-step grid of the plant
integrator: row ``2k`` is node ``k`` and row ``2k + 1`` the RK4 midpoint.
"""

import math

import numpy as np

from .geometry import hat

MODE_EQR = 0
MODE_PLQR = 1

STATUS_OK = 0
STATUS_CHART = 1
STATUS_BLOWUP = 2

ANTIPODE_GUARD = 1e-6
BLOWUP_LIMIT = 1e6
SMALL_ANGLE = 1e-6
JACOBIAN_SERIES_ANGLE = 1e-3


class _ChartHit(Exception):
    pass


def _exp_se23(w, a, b):
    theta = math.sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2])
    t2 = theta * theta
    if theta < SMALL_ANGLE:
        c1, c2, c3 = 1.0 - t2 / 6.0, 0.5 - t2 / 24.0, 1.0 / 6.0 - t2 / 120.0
    else:
        half = math.sin(0.5 * theta)
        c1 = math.sin(theta) / theta
        c2 = 2.0 * half * half / t2
        if theta < JACOBIAN_SERIES_ANGLE:
            c3 = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
        else:
            c3 = (theta - math.sin(theta)) / (t2 * theta)
    W = hat(w)
    W2 = W @ W
    R = np.eye(3) + c1 * W + c2 * W2
    J = np.eye(3) + c2 * W + c3 * W2
    return R, J @ a, J @ b


def _lift_field(R, v, x, om, thrust, mass, gravity):
    """Algebra vector ``(w, a, b)`` of the lift at ``act(X, origin)``."""
    eta = R[:, 2]
    w = -om
    a = np.cross(om, v) - (thrust / mass) * eta
    a[2] += gravity
    b = np.cross(om, x) + v
    return np.concatenate([w, a, b])


def _bracket(U, V):
    return np.concatenate([
        np.cross(U[0:3], V[0:3]),
        np.cross(U[0:3], V[3:6]) - np.cross(V[0:3], U[3:6]),
        np.cross(U[0:3], V[6:9]) - np.cross(V[0:3], U[6:9]),
    ])


def _left_mult(U, R, v, x):
    """``exp(U) X`` for ``X = (R, v, x)``."""
    Re, ve, xe = _exp_se23(U[0:3], U[3:6], U[6:9])
    return Re @ R, Re @ v + ve, Re @ x + xe


def lift_rkmk4(R0, v0, x0, omega, thrust, h, mass, gravity):
    """Integrate the right-trivialised lifted system with RKMK4.

    ``omega``/``thrust`` hold ``2N + 1`` input samples at spacing ``h / 2``.
    Returns ``(R, v, x)`` node arrays with ``N + 1`` rows.
    """
    omega = np.asarray(omega, dtype=float)
    thrust = np.asarray(thrust, dtype=float)
    n = (len(thrust) - 1) // 2
    Rs = np.empty((n + 1, 3, 3))
    vs = np.empty((n + 1, 3))
    xs = np.empty((n + 1, 3))
    R = np.array(R0, dtype=float)
    v = np.array(v0, dtype=float)
    x = np.array(x0, dtype=float)
    Rs[0], vs[0], xs[0] = R, v, x
    for k in range(n):
        i = 2 * k
        k1 = h * _lift_field(R, v, x, omega[i], thrust[i], mass, gravity)
        Y = _left_mult(0.5 * k1, R, v, x)
        k2 = h * _lift_field(*Y, omega[i + 1], thrust[i + 1], mass, gravity)
        Y = _left_mult(0.5 * k2 - 0.125 * _bracket(k1, k2), R, v, x)
        k3 = h * _lift_field(*Y, omega[i + 1], thrust[i + 1], mass, gravity)
        Y = _left_mult(k3, R, v, x)
        k4 = h * _lift_field(*Y, omega[i + 2], thrust[i + 2], mass, gravity)
        theta = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0 - _bracket(k1, k4) / 12.0
        R, v, x = _left_mult(theta, R, v, x)
        # first-order polar correction; removes accumulated orthogonality drift
        R = 0.5 * R @ (3.0 * np.eye(3) - R.T @ R)
        Rs[k + 1], vs[k + 1], xs[k + 1] = R, v, x
    return Rs, vs, xs


def _control(mode, s, j, tab):
    """Feedback input at table row ``j``; returns ``(u[4], eps_norm)``."""
    rot_d, vx_d, xx_d, eta_d, vel_d, pos_d, omega_d, thrust_d, gains = tab
    if mode == MODE_EQR:
        R = rot_d[j].reshape(3, 3)
        e_eta = R.T @ s[0:3]
        d = e_eta[2] + 1.0
        if not d > ANTIPODE_GUARD:
            raise _ChartHit
        err = np.empty(8)
        err[0] = e_eta[0] / d
        err[1] = e_eta[1] / d
        err[2:5] = R.T @ (s[3:6] - vx_d[j])
        err[5:8] = R.T @ (s[6:9] - xx_d[j])
        K = gains[j].reshape(4, 8)
    else:
        ed = eta_d[j]
        err = np.empty(9)
        de = s[0:3] - ed
        err[0:3] = de - ed * (ed @ de)
        err[3:6] = s[3:6] - vel_d[j]
        err[6:9] = s[6:9] - pos_d[j]
        K = gains[j].reshape(4, 9)
    du = -(K @ err)
    u = np.empty(4)
    u[0:3] = omega_d[j] + du[0:3]
    u[3] = max(thrust_d[j] + du[3], 0.0)
    return u, math.sqrt(err @ err)


def _plant(s, u, mass, gravity):
    eta = s[0:3]
    ds = np.empty(9)
    ds[0:3] = np.cross(eta, u[0:3])
    ds[3:6] = -(u[3] / mass) * eta
    ds[5] += gravity
    ds[6:9] = s[3:6]
    return ds


def simulate(mode, state0, h, n_steps, rot_d, vx_d, xx_d, eta_d, vel_d, pos_d,
             omega_d, thrust_d, gains, mass, gravity, states_out, inputs_out, eps_out):
    """Fixed-step RK4 closed loop; feedback re-evaluated at every stage.

    Fills the output buffers row by row and returns ``(status, rows_written)``.
    """
    tab = (rot_d, vx_d, xx_d, eta_d, vel_d, pos_d, omega_d, thrust_d, gains)
    s = np.array(state0, dtype=float)
    for k in range(n_steps + 1):
        j = 2 * k
        try:
            u1, en = _control(mode, s, j, tab)
        except _ChartHit:
            return STATUS_CHART, k
        states_out[k] = s
        inputs_out[k] = u1
        eps_out[k] = en
        if k == n_steps:
            break
        try:
            d1 = _plant(s, u1, mass, gravity)
            s2 = s + 0.5 * h * d1
            d2 = _plant(s2, _control(mode, s2, j + 1, tab)[0], mass, gravity)
            s3 = s + 0.5 * h * d2
            d3 = _plant(s3, _control(mode, s3, j + 1, tab)[0], mass, gravity)
            s4 = s + h * d3
            d4 = _plant(s4, _control(mode, s4, j + 2, tab)[0], mass, gravity)
        except _ChartHit:
            return STATUS_CHART, k + 1
        s = s + (h / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4)
        s[0:3] /= math.sqrt(s[0:3] @ s[0:3])
        if not np.all(np.isfinite(s)) or np.max(np.abs(s)) > BLOWUP_LIMIT:
            return STATUS_BLOWUP, k + 1
    return STATUS_OK, n_steps + 1
