"""SO(3) and SE_2(3) primitives.

Group elements are stored as ``(R, v, x)`` with ``R`` a 3x3 rotation matrix
and ``v``, ``x`` the two translation slots.  The homogeneous embedding is the
usual 5x5 form::

    [[R, v, x],
     [0, 1, 0],
     [0, 0, 1]]

Algebra elements are ``(w, a, b)`` where ``w`` is the vee of the skew block.
All operations are pure and return fresh arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Below this angle the Rodrigues coefficients are replaced by their series.
SMALL_ANGLE = 1e-6
# log_so3 refuses rotations with trace(R) <= -1 + PI_GUARD.
PI_GUARD = 1e-9
# Jacobian coefficients cancel harder than Rodrigues; longer series below this.
JACOBIAN_SERIES_ANGLE = 1e-3


class AngleNearPi(ValueError):
    """Rotation angle too close to pi for a well defined logarithm."""


def hat(w) -> np.ndarray:
    """Skew-symmetric matrix with ``hat(w) @ u == cross(w, u)``."""
    w0, w1, w2 = float(w[0]), float(w[1]), float(w[2])
    return np.array([[0.0, -w2, w1], [w2, 0.0, -w0], [-w1, w0, 0.0]])


def vee(W) -> np.ndarray:
    return np.array([W[2, 1], W[0, 2], W[1, 0]], dtype=float)


def _so3_coeffs(theta: float):
    """Return (sin t / t, (1 - cos t) / t^2, (t - sin t) / t^3)."""
    t2 = theta * theta
    if theta < SMALL_ANGLE:
        return 1.0 - t2 / 6.0, 0.5 - t2 / 24.0, 1.0 / 6.0 - t2 / 120.0
    half = math.sin(0.5 * theta)
    a = math.sin(theta) / theta
    b = 2.0 * half * half / t2
    if theta < JACOBIAN_SERIES_ANGLE:
        c = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
    else:
        c = (theta - math.sin(theta)) / (t2 * theta)
    return a, b, c


def exp_so3(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    theta = float(np.linalg.norm(w))
    W = hat(w)
    a, b, _ = _so3_coeffs(theta)
    return np.eye(3) + a * W + b * (W @ W)


def log_so3(R) -> np.ndarray:
    """Rotation vector of ``R`` with norm <= pi.

    Raises ``AngleNearPi`` when the trace is within ``PI_GUARD`` of -1; the
    rotation axis is then not recoverable from the skew part.
    """
    R = np.asarray(R, dtype=float)
    tr = float(np.trace(R))
    if tr <= -1.0 + PI_GUARD:
        raise AngleNearPi(f"trace(R) = {tr!r} is too close to -1")
    skew_part = 0.5 * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    s = float(np.linalg.norm(skew_part))
    theta = math.atan2(s, 0.5 * (tr - 1.0))
    if theta < SMALL_ANGLE:
        return skew_part * (1.0 + theta * theta / 6.0)
    return skew_part * (theta / s)


def left_jacobian_so3(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    W = hat(w)
    _, b, c = _so3_coeffs(float(np.linalg.norm(w)))
    return np.eye(3) + b * W + c * (W @ W)


def left_jacobian_inv_so3(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    theta = float(np.linalg.norm(w))
    W = hat(w)
    t2 = theta * theta
    if theta < JACOBIAN_SERIES_ANGLE:
        d = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
    else:
        half = 0.5 * theta
        d = (1.0 - half * math.cos(half) / math.sin(half)) / t2
    return np.eye(3) - 0.5 * W + d * (W @ W)


def project_to_so3(R) -> np.ndarray:
    """Nearest rotation in the Frobenius sense (polar projection)."""
    U, _, Vt = np.linalg.svd(np.asarray(R, dtype=float))
    Q = U @ Vt
    if np.linalg.det(Q) < 0.0:
        U[:, -1] *= -1.0
        Q = U @ Vt
    return Q


@dataclass(frozen=True)
class AlgebraElement:
    """Element of se_2(3): skew vector ``w`` plus two vector parts."""

    skew: np.ndarray
    w_v: np.ndarray
    w_x: np.ndarray

    @classmethod
    def zero(cls) -> "AlgebraElement":
        return cls(np.zeros(3), np.zeros(3), np.zeros(3))

    @classmethod
    def from_vector(cls, vec) -> "AlgebraElement":
        vec = np.asarray(vec, dtype=float)
        return cls(vec[0:3].copy(), vec[3:6].copy(), vec[6:9].copy())

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.skew, self.w_v, self.w_x])

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.skew + other.skew, self.w_v + other.w_v, self.w_x + other.w_x)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.skew - other.skew, self.w_v - other.w_v, self.w_x - other.w_x)

    def __mul__(self, s: float) -> "AlgebraElement":
        return AlgebraElement(s * self.skew, s * self.w_v, s * self.w_x)

    __rmul__ = __mul__


@dataclass(frozen=True)
class GroupElement:
    """Element of SE_2(3) as ``(rotation, v_slot, x_slot)``."""

    rotation: np.ndarray
    v_slot: np.ndarray
    x_slot: np.ndarray

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls(np.eye(3), np.zeros(3), np.zeros(3))


def compose(X: GroupElement, Y: GroupElement) -> GroupElement:
    R = X.rotation
    return GroupElement(R @ Y.rotation, R @ Y.v_slot + X.v_slot, R @ Y.x_slot + X.x_slot)


def inverse(X: GroupElement) -> GroupElement:
    Rt = X.rotation.T
    return GroupElement(Rt.copy(), -Rt @ X.v_slot, -Rt @ X.x_slot)


def embed(X: GroupElement) -> np.ndarray:
    M = np.eye(5)
    M[:3, :3] = X.rotation
    M[:3, 3] = X.v_slot
    M[:3, 4] = X.x_slot
    return M


def embed_alg(U: AlgebraElement) -> np.ndarray:
    M = np.zeros((5, 5))
    M[:3, :3] = hat(U.skew)
    M[:3, 3] = U.w_v
    M[:3, 4] = U.w_x
    return M


def unembed(M) -> GroupElement:
    M = np.asarray(M, dtype=float)
    return GroupElement(M[:3, :3].copy(), M[:3, 3].copy(), M[:3, 4].copy())


def unembed_alg(M) -> AlgebraElement:
    M = np.asarray(M, dtype=float)
    return AlgebraElement(vee(M[:3, :3]), M[:3, 3].copy(), M[:3, 4].copy())


def adjoint_matrix(X: GroupElement) -> np.ndarray:
    """9x9 matrix of ``Ad_X`` acting on ``(w, a, b)`` coordinates."""
    R = X.rotation
    Ad = np.zeros((9, 9))
    Ad[0:3, 0:3] = R
    Ad[3:6, 0:3] = hat(X.v_slot) @ R
    Ad[3:6, 3:6] = R
    Ad[6:9, 0:3] = hat(X.x_slot) @ R
    Ad[6:9, 6:9] = R
    return Ad


def adjoint(X: GroupElement, U: AlgebraElement) -> AlgebraElement:
    R = X.rotation
    w = R @ U.skew
    return AlgebraElement(
        w,
        R @ U.w_v + np.cross(X.v_slot, w),
        R @ U.w_x + np.cross(X.x_slot, w),
    )


def bracket(U: AlgebraElement, V: AlgebraElement) -> AlgebraElement:
    """Matrix commutator ``UV - VU`` in se_2(3)."""
    return AlgebraElement(
        np.cross(U.skew, V.skew),
        np.cross(U.skew, V.w_v) - np.cross(V.skew, U.w_v),
        np.cross(U.skew, V.w_x) - np.cross(V.skew, U.w_x),
    )


def exp(U: AlgebraElement) -> GroupElement:
    J = left_jacobian_so3(U.skew)
    return GroupElement(exp_so3(U.skew), J @ U.w_v, J @ U.w_x)


def log(X: GroupElement) -> AlgebraElement:
    w = log_so3(X.rotation)
    Jinv = left_jacobian_inv_so3(w)
    return AlgebraElement(w, Jinv @ X.v_slot, Jinv @ X.x_slot)


def distance(X: GroupElement, Y: GroupElement) -> float:
    """Frobenius distance between the 5x5 embeddings."""
    return float(np.linalg.norm(embed(X) - embed(Y)))
