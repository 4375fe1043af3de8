# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled closed-loop and lifting kernels.

Line-for-line port of ``_pykernels``; see that module for the table layout.
"""

from libc.math cimport sin, cos, sqrt, fabs, isfinite

import numpy as np

cdef int MODE_EQR = 0
cdef int STATUS_OK = 0
cdef int STATUS_CHART = 1
cdef int STATUS_BLOWUP = 2

cdef double ANTIPODE_GUARD = 1e-6
cdef double BLOWUP_LIMIT = 1e6
cdef double SMALL_ANGLE = 1e-6
cdef double JACOBIAN_SERIES_ANGLE = 1e-3


cdef inline void cross(const double* a, const double* b, double* out) noexcept nogil:
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]


cdef inline void matvec(const double* M, const double* v, double* out) noexcept nogil:
    cdef int r
    for r in range(3):
        out[r] = M[3 * r] * v[0] + M[3 * r + 1] * v[1] + M[3 * r + 2] * v[2]


cdef inline void matTvec(const double* M, const double* v, double* out) noexcept nogil:
    cdef int r
    for r in range(3):
        out[r] = M[r] * v[0] + M[3 + r] * v[1] + M[6 + r] * v[2]


cdef inline void matmul(const double* A, const double* B, double* out) noexcept nogil:
    cdef int r, c
    for r in range(3):
        for c in range(3):
            out[3 * r + c] = A[3 * r] * B[c] + A[3 * r + 1] * B[3 + c] + A[3 * r + 2] * B[6 + c]


cdef void exp_se23(const double* U, double* Re, double* ve, double* xe) noexcept nogil:
    """Exponential of the algebra 9-vector ``U = (w, a, b)``."""
    cdef double W[9]
    cdef double W2[9]
    cdef double J[9]
    cdef double theta, t2, c1, c2, c3, half
    cdef int i
    theta = sqrt(U[0] * U[0] + U[1] * U[1] + U[2] * U[2])
    t2 = theta * theta
    if theta < SMALL_ANGLE:
        c1 = 1.0 - t2 / 6.0
        c2 = 0.5 - t2 / 24.0
        c3 = 1.0 / 6.0 - t2 / 120.0
    else:
        half = sin(0.5 * theta)
        c1 = sin(theta) / theta
        c2 = 2.0 * half * half / t2
        if theta < JACOBIAN_SERIES_ANGLE:
            c3 = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
        else:
            c3 = (theta - sin(theta)) / (t2 * theta)
    W[0] = 0.0; W[1] = -U[2]; W[2] = U[1]
    W[3] = U[2]; W[4] = 0.0; W[5] = -U[0]
    W[6] = -U[1]; W[7] = U[0]; W[8] = 0.0
    matmul(W, W, W2)
    for i in range(9):
        Re[i] = c1 * W[i] + c2 * W2[i]
        J[i] = c2 * W[i] + c3 * W2[i]
    Re[0] += 1.0; Re[4] += 1.0; Re[8] += 1.0
    J[0] += 1.0; J[4] += 1.0; J[8] += 1.0
    matvec(J, &U[3], ve)
    matvec(J, &U[6], xe)


cdef void left_mult(const double* U, const double* R, const double* v, const double* x,
                    double* Ro, double* vo, double* xo) noexcept nogil:
    cdef double Re[9]
    cdef double ve[3]
    cdef double xe[3]
    cdef int i
    exp_se23(U, Re, ve, xe)
    matmul(Re, R, Ro)
    matvec(Re, v, vo)
    matvec(Re, x, xo)
    for i in range(3):
        vo[i] += ve[i]
        xo[i] += xe[i]


cdef void lift_field(const double* R, const double* v, const double* x, const double* om,
                     double thrust, double mass, double gravity, double h, double* out) noexcept nogil:
    """``h`` times the lift at ``act(X, origin)`` as an algebra 9-vector."""
    cdef double c[3]
    cdef int i
    cross(om, v, c)
    for i in range(3):
        out[i] = -h * om[i]
        out[3 + i] = h * (c[i] - (thrust / mass) * R[3 * i + 2])
    out[5] += h * gravity
    cross(om, x, c)
    for i in range(3):
        out[6 + i] = h * (c[i] + v[i])


cdef void reorthonormalise(double* R) noexcept nogil:
    """First-order polar correction ``R <- R (3I - R^T R) / 2``."""
    cdef double G[9]
    cdef double out[9]
    cdef int r, c, i
    for r in range(3):
        for c in range(3):
            G[3 * r + c] = -(R[r] * R[c] + R[3 + r] * R[3 + c] + R[6 + r] * R[6 + c])
    G[0] += 3.0; G[4] += 3.0; G[8] += 3.0
    matmul(R, G, out)
    for i in range(9):
        R[i] = 0.5 * out[i]


cdef void bracket(const double* U, const double* V, double* out) noexcept nogil:
    cdef double c1[3]
    cdef double c2[3]
    cdef int i
    cross(U, V, out)
    cross(U, &V[3], c1)
    cross(V, &U[3], c2)
    for i in range(3):
        out[3 + i] = c1[i] - c2[i]
    cross(U, &V[6], c1)
    cross(V, &U[6], c2)
    for i in range(3):
        out[6 + i] = c1[i] - c2[i]


def lift_rkmk4(R0, v0, x0, omega, thrust, double h, double mass, double gravity):
    cdef double[:, ::1] om = np.ascontiguousarray(omega, dtype=np.float64)
    cdef double[::1] th = np.ascontiguousarray(thrust, dtype=np.float64)
    cdef Py_ssize_t n = (th.shape[0] - 1) // 2
    Rs_arr = np.empty((n + 1, 3, 3))
    vs_arr = np.empty((n + 1, 3))
    xs_arr = np.empty((n + 1, 3))
    cdef double[:, ::1] Rs = Rs_arr.reshape(n + 1, 9)
    cdef double[:, ::1] vs = vs_arr
    cdef double[:, ::1] xs = xs_arr
    cdef double R[9]
    cdef double v[3]
    cdef double x[3]
    cdef double YR[9]
    cdef double Yv[3]
    cdef double Yx[3]
    cdef double k1[9]
    cdef double k2[9]
    cdef double k3[9]
    cdef double k4[9]
    cdef double U[9]
    cdef double br[9]
    cdef double[:, ::1] R0v = np.ascontiguousarray(R0, dtype=np.float64).reshape(3, 3)
    cdef double[::1] v0v = np.ascontiguousarray(v0, dtype=np.float64)
    cdef double[::1] x0v = np.ascontiguousarray(x0, dtype=np.float64)
    cdef Py_ssize_t k, i, q
    for i in range(9):
        R[i] = R0v[i // 3, i % 3]
    for i in range(3):
        v[i] = v0v[i]
        x[i] = x0v[i]
    with nogil:
        for i in range(9):
            Rs[0, i] = R[i]
        for i in range(3):
            vs[0, i] = v[i]
            xs[0, i] = x[i]
        for k in range(n):
            q = 2 * k
            lift_field(R, v, x, &om[q, 0], th[q], mass, gravity, h, k1)
            for i in range(9):
                U[i] = 0.5 * k1[i]
            left_mult(U, R, v, x, YR, Yv, Yx)
            lift_field(YR, Yv, Yx, &om[q + 1, 0], th[q + 1], mass, gravity, h, k2)
            bracket(k1, k2, br)
            for i in range(9):
                U[i] = 0.5 * k2[i] - 0.125 * br[i]
            left_mult(U, R, v, x, YR, Yv, Yx)
            lift_field(YR, Yv, Yx, &om[q + 1, 0], th[q + 1], mass, gravity, h, k3)
            left_mult(k3, R, v, x, YR, Yv, Yx)
            lift_field(YR, Yv, Yx, &om[q + 2, 0], th[q + 2], mass, gravity, h, k4)
            bracket(k1, k4, br)
            for i in range(9):
                U[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0 - br[i] / 12.0
            left_mult(U, R, v, x, YR, Yv, Yx)
            reorthonormalise(YR)
            for i in range(9):
                R[i] = YR[i]
                Rs[k + 1, i] = R[i]
            for i in range(3):
                v[i] = Yv[i]
                x[i] = Yx[i]
                vs[k + 1, i] = v[i]
                xs[k + 1, i] = x[i]
    return Rs_arr, vs_arr, xs_arr


cdef struct Tables:
    double* rot_d
    double* vx_d
    double* xx_d
    double* eta_d
    double* vel_d
    double* pos_d
    double* omega_d
    double* thrust_d
    double* gains


cdef int control(int mode, const double* s, Py_ssize_t j, Tables* tab,
                 double* u, double* eps_norm) noexcept nogil:
    """Feedback input at table row ``j``; returns 0, or 1 on chart singularity."""
    cdef double err[9]
    cdef double tmp[3]
    cdef double e[3]
    cdef double* R
    cdef double* K
    cdef double* ed
    cdef double d, acc, proj
    cdef int n, r, c
    if mode == MODE_EQR:
        n = 8
        R = &tab.rot_d[9 * j]
        matTvec(R, s, e)
        d = e[2] + 1.0
        if not d > ANTIPODE_GUARD:
            return 1
        err[0] = e[0] / d
        err[1] = e[1] / d
        for r in range(3):
            tmp[r] = s[3 + r] - tab.vx_d[3 * j + r]
        matTvec(R, tmp, &err[2])
        for r in range(3):
            tmp[r] = s[6 + r] - tab.xx_d[3 * j + r]
        matTvec(R, tmp, &err[5])
    else:
        n = 9
        ed = &tab.eta_d[3 * j]
        proj = 0.0
        for r in range(3):
            tmp[r] = s[r] - ed[r]
            proj += ed[r] * tmp[r]
        for r in range(3):
            err[r] = tmp[r] - ed[r] * proj
            err[3 + r] = s[3 + r] - tab.vel_d[3 * j + r]
            err[6 + r] = s[6 + r] - tab.pos_d[3 * j + r]
    K = &tab.gains[4 * n * j]
    for r in range(4):
        acc = 0.0
        for c in range(n):
            acc += K[n * r + c] * err[c]
        if r < 3:
            u[r] = tab.omega_d[3 * j + r] - acc
        else:
            u[3] = tab.thrust_d[j] - acc
            if u[3] < 0.0:
                u[3] = 0.0
    acc = 0.0
    for c in range(n):
        acc += err[c] * err[c]
    eps_norm[0] = sqrt(acc)
    return 0


cdef inline void plant(const double* s, const double* u, double mass, double gravity,
                       double* ds) noexcept nogil:
    cdef int i
    cross(s, u, ds)
    for i in range(3):
        ds[3 + i] = -(u[3] / mass) * s[i]
        ds[6 + i] = s[3 + i]
    ds[5] += gravity


def simulate(int mode, state0, double h, Py_ssize_t n_steps,
             double[:, ::1] rot_d, double[:, ::1] vx_d, double[:, ::1] xx_d,
             double[:, ::1] eta_d, double[:, ::1] vel_d, double[:, ::1] pos_d,
             double[:, ::1] omega_d, double[::1] thrust_d, double[:, ::1] gains,
             double mass, double gravity,
             double[:, ::1] states_out, double[:, ::1] inputs_out, double[::1] eps_out):
    cdef Tables tab
    tab.rot_d = &rot_d[0, 0]
    tab.vx_d = &vx_d[0, 0]
    tab.xx_d = &xx_d[0, 0]
    tab.eta_d = &eta_d[0, 0]
    tab.vel_d = &vel_d[0, 0]
    tab.pos_d = &pos_d[0, 0]
    tab.omega_d = &omega_d[0, 0]
    tab.thrust_d = &thrust_d[0]
    tab.gains = &gains[0, 0]
    cdef double[::1] s0 = np.ascontiguousarray(state0, dtype=np.float64)
    cdef double s[9]
    cdef double st[9]
    cdef double d1[9]
    cdef double d2[9]
    cdef double d3[9]
    cdef double d4[9]
    cdef double u[4]
    cdef double us[4]
    cdef double en, dummy, nrm
    cdef Py_ssize_t k, j, i
    cdef int status = STATUS_OK
    cdef Py_ssize_t rows = n_steps + 1
    for i in range(9):
        s[i] = s0[i]
    with nogil:
        for k in range(n_steps + 1):
            j = 2 * k
            if control(mode, s, j, &tab, u, &en):
                status = STATUS_CHART
                rows = k
                break
            for i in range(9):
                states_out[k, i] = s[i]
            for i in range(4):
                inputs_out[k, i] = u[i]
            eps_out[k] = en
            if k == n_steps:
                break
            plant(s, u, mass, gravity, d1)
            for i in range(9):
                st[i] = s[i] + 0.5 * h * d1[i]
            if control(mode, st, j + 1, &tab, us, &dummy):
                status = STATUS_CHART
                rows = k + 1
                break
            plant(st, us, mass, gravity, d2)
            for i in range(9):
                st[i] = s[i] + 0.5 * h * d2[i]
            if control(mode, st, j + 1, &tab, us, &dummy):
                status = STATUS_CHART
                rows = k + 1
                break
            plant(st, us, mass, gravity, d3)
            for i in range(9):
                st[i] = s[i] + h * d3[i]
            if control(mode, st, j + 2, &tab, us, &dummy):
                status = STATUS_CHART
                rows = k + 1
                break
            plant(st, us, mass, gravity, d4)
            for i in range(9):
                s[i] = s[i] + (h / 6.0) * (d1[i] + 2.0 * d2[i] + 2.0 * d3[i] + d4[i])
            nrm = sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2])
            for i in range(3):
                s[i] = s[i] / nrm
            for i in range(9):
                if not isfinite(s[i]) or fabs(s[i]) > BLOWUP_LIMIT:
                    status = STATUS_BLOWUP
                    break
            if status == STATUS_BLOWUP:
                rows = k + 1
                break
    return status, rows
