"""Finite-horizon time-varying LQR by backward Riccati integration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import GroupElement
from .vehicle import act_state_jacobian, chart_inv_jacobian

BLOWUP_NORM = 1e12
DEFAULT_STATE_WEIGHTS = (1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 0.1, 0.1, 0.1)
DEFAULT_INPUT_WEIGHTS = (0.5, 0.5, 0.5, 0.5)


class RiccatiBlowup(RuntimeError):
    pass


class OutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class WeightSet:
    """Embedded-coordinate weights: terminal ``F``, running ``Q`` (9x9), input ``S`` (4x4)."""

    F: np.ndarray
    Q: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        for name in ("F", "Q", "S"):
            M = getattr(self, name)
            if not np.allclose(M, M.T, rtol=0.0, atol=1e-12):
                raise ValueError(f"{name} is not symmetric")
        for name in ("F", "Q"):
            if np.linalg.eigvalsh(getattr(self, name)).min() < -1e-12:
                raise ValueError(f"{name} is not positive semi-definite")
        if np.linalg.eigvalsh(self.S).min() < 1e-9:
            raise ValueError("S is not positive definite")

    @classmethod
    def default(cls) -> "WeightSet":
        Q = np.diag(DEFAULT_STATE_WEIGHTS)
        return cls(Q.copy(), Q, np.diag(DEFAULT_INPUT_WEIGHTS))


@dataclass(frozen=True)
class GainSchedule:
    times: np.ndarray
    K: np.ndarray
    P: np.ndarray


def transform_weights(W, X_d: GroupElement) -> np.ndarray:
    """Pull a 9x9 embedded weight back to the 8 local error coordinates at ``X_d``."""
    M = act_state_jacobian(X_d) @ chart_inv_jacobian(np.zeros(8))
    out = M.T @ np.asarray(W, dtype=float) @ M
    return 0.5 * (out + out.T)


def _riccati_rhs(P, A, B, Q, S_inv):
    # P stays symmetric, so PA is the transpose of A'P
    PB = P @ B
    AtP = A.T @ P
    return PB @ S_inv @ PB.T - AtP - AtP.T - Q


def solve_riccati(times, A, B, Q, F, S) -> GainSchedule:
    """Integrate ``P' = -A'P - PA + PBS^-1B'P - Q`` backwards from ``P(tf) = F``.

    ``A``, ``B``, ``Q`` are stacked per time sample.  With ``len(times)`` rows
    the RK4 midpoints are taken as averages of neighbouring nodes; with
    ``2 len(times) - 1`` rows the odd rows are used as exact midpoint values.
    """
    times = np.asarray(times, dtype=float)
    A, B, Q = (np.asarray(M, dtype=float) for M in (A, B, Q))
    n = len(times)
    if n < 1:
        raise ValueError("empty time grid")
    if len(A) == n:
        interleaved = False
    elif len(A) == 2 * n - 1:
        interleaved = True
    else:
        raise ValueError(f"coefficient length {len(A)} matches neither {n} nor {2 * n - 1}")
    S = np.asarray(S, dtype=float)
    S_inv = np.linalg.inv(S)

    def coeffs(k, mid=False):
        if interleaved:
            i = 2 * k + (1 if mid else 0)
            return A[i], B[i], Q[i]
        if mid:
            return 0.5 * (A[k] + A[k + 1]), 0.5 * (B[k] + B[k + 1]), 0.5 * (Q[k] + Q[k + 1])
        return A[k], B[k], Q[k]

    dim = A.shape[1]
    Ps = np.empty((n, dim, dim))
    Ks = np.empty((n, B.shape[2], dim))
    P = np.array(F, dtype=float)
    Ps[-1] = P
    Ks[-1] = S_inv @ coeffs(n - 1)[1].T @ P
    for k in range(n - 2, -1, -1):
        dt = times[k + 1] - times[k]
        c_hi, c_mid, c_lo = coeffs(k + 1), coeffs(k, mid=True), coeffs(k)
        f1 = _riccati_rhs(P, *c_hi, S_inv)
        f2 = _riccati_rhs(P - 0.5 * dt * f1, *c_mid, S_inv)
        f3 = _riccati_rhs(P - 0.5 * dt * f2, *c_mid, S_inv)
        f4 = _riccati_rhs(P - dt * f3, *c_lo, S_inv)
        P = P - (dt / 6.0) * (f1 + 2.0 * f2 + 2.0 * f3 + f4)
        P = 0.5 * (P + P.T)
        if not np.all(np.isfinite(P)) or np.abs(P).max() > BLOWUP_NORM:
            raise RiccatiBlowup(f"|P| exceeded {BLOWUP_NORM:g} at t = {times[k]}")
        Ps[k] = P
        Ks[k] = S_inv @ c_lo[1].T @ P
    return GainSchedule(times, Ks, Ps)


def gain_at(schedule: GainSchedule, t: float) -> np.ndarray:
    times = schedule.times
    if not times[0] <= t <= times[-1]:
        raise OutOfRange(f"t = {t} outside [{times[0]}, {times[-1]}]")
    if len(times) == 1:
        return schedule.K[0].copy()
    i = min(int(np.searchsorted(times, t, side="right")) - 1, len(times) - 2)
    s = (t - times[i]) / (times[i + 1] - times[i])
    return (1.0 - s) * schedule.K[i] + s * schedule.K[i + 1]


def gains_on_grid(schedule: GainSchedule, t) -> np.ndarray:
    """Vectorised ``gain_at`` returning ``(len(t), 4 * n)`` flattened gains."""
    t = np.asarray(t, dtype=float)
    flat = schedule.K.reshape(len(schedule.times), -1)
    return np.column_stack([np.interp(t, schedule.times, flat[:, c]) for c in range(flat.shape[1])])


def gain_table(schedule: GainSchedule) -> tuple[list[str], np.ndarray]:
    rows, cols = schedule.K.shape[1:]
    header = ["t"] + [f"K_{r}{c}" for r in range(rows) for c in range(cols)]
    return header, np.column_stack([schedule.times, schedule.K.reshape(len(schedule.times), -1)])
