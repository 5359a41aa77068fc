"""Rotation-group primitives: hat/vee, exponential and logarithm maps,
geodesic distance, and the body-frame (left-translated) logarithm.

All rotations are plain 3x3 numpy arrays with orthonormal columns and unit
determinant; vectors are shape-(3,) arrays. Everything here is a pure
function, safe to call concurrently.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import NearCutLocus, NotSkew

# Below this angle the closed forms divide by ~0; switch to Taylor branches.
SMALL_ANGLE = 1e-6
# The logarithm is rejected within this band of the cut locus at pi.
CUT_LOCUS_MARGIN = 1e-6
# vee() refuses matrices whose symmetric part exceeds this Frobenius norm.
SKEW_TOL = 1e-8

_EYE3 = np.eye(3)


def hat(a) -> np.ndarray:
    """Skew matrix of a 3-vector, satisfying hat(a) @ b == cross(a, b)."""
    a1, a2, a3 = a
    return np.array([
        [0.0, -a3, a2],
        [a3, 0.0, -a1],
        [-a2, a1, 0.0],
    ])


def vee(A) -> np.ndarray:
    """Inverse of hat.

    The input is symmetrized first (integrator round-off produces slightly
    non-skew matrices); a symmetric part larger than SKEW_TOL raises NotSkew.
    """
    A = np.asarray(A, dtype=float)
    defect = float(np.linalg.norm(A + A.T))
    if defect > SKEW_TOL:
        raise NotSkew(f"matrix is not skew-symmetric: ||A + A^T||_F = {defect:.3e}")
    return 0.5 * np.array([A[2, 1] - A[1, 2], A[0, 2] - A[2, 0], A[1, 0] - A[0, 1]])


def exp_so3(a) -> np.ndarray:
    """Rotation by angle ||a|| about axis a/||a|| (Rodrigues form).

    Uses quadratic Taylor coefficients below SMALL_ANGLE. The matrix is
    assembled entrywise from hat(a)^2 = a a^T - ||a||^2 I, which keeps the
    result orthonormal to machine precision.
    """
    x, y, z = a
    t2 = x * x + y * y + z * z
    t = math.sqrt(t2)
    if t < SMALL_ANGLE:
        c1 = 1.0 - t2 / 6.0
        c2 = 0.5 - t2 / 24.0
    else:
        c1 = math.sin(t) / t
        c2 = (1.0 - math.cos(t)) / t2
    d = 1.0 - c2 * t2  # equals cos(t)
    return np.array([
        [d + c2 * x * x, c2 * x * y - c1 * z, c2 * x * z + c1 * y],
        [c2 * x * y + c1 * z, d + c2 * y * y, c2 * y * z - c1 * x],
        [c2 * x * z - c1 * y, c2 * y * z + c1 * x, d + c2 * z * z],
    ])


def _angle_from_trace(tr: float) -> float:
    # Floating-point trace can exceed the mathematical range by ~1e-16.
    c = 0.5 * (tr - 1.0)
    if c > 1.0:
        c = 1.0
    elif c < -1.0:
        c = -1.0
    return math.acos(c)


def log_so3(R) -> np.ndarray:
    """Rotation vector of R, with ||result|| = angle in [0, pi).

    Raises NearCutLocus for angles within CUT_LOCUS_MARGIN of pi, where the
    (R - R^T) formula degenerates.
    """
    R = np.asarray(R, dtype=float)
    phi = _angle_from_trace(R[0, 0] + R[1, 1] + R[2, 2])
    if phi >= math.pi - CUT_LOCUS_MARGIN:
        raise NearCutLocus(
            f"rotation angle {phi:.9f} is within {CUT_LOCUS_MARGIN:g} of pi", phi=phi
        )
    if phi < SMALL_ANGLE:
        s = 0.5 + phi * phi / 12.0
    else:
        s = 0.5 * phi / math.sin(phi)
    return s * np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])


def riemannian_log(y, x) -> np.ndarray:
    """Body-frame representative of the geodesic direction from y to x.

    Equals log_so3(y^T x); the geodesic t -> y @ exp_so3(t * result) runs
    from y at t=0 to x at t=1.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    return log_so3(y.T @ x)


def distance_so3(y, x) -> float:
    """Geodesic angle between two rotations, in [0, pi).

    Same NearCutLocus guard as log_so3.
    """
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    W = y.T @ x
    phi = _angle_from_trace(W[0, 0] + W[1, 1] + W[2, 2])
    if phi >= math.pi - CUT_LOCUS_MARGIN:
        raise NearCutLocus(
            f"rotation angle {phi:.9f} is within {CUT_LOCUS_MARGIN:g} of pi", phi=phi
        )
    return phi


def dexpinv_body(theta, v) -> np.ndarray:
    """Inverse differential of the exponential in body coordinates.

    Solves exp(-hat(theta)) * d/dt exp(hat(theta)) = hat(v) for theta',
    i.e. the algebra-coordinate velocity of a curve R0 @ exp_so3(theta(t))
    whose body velocity is v. Exact on so(3):

        theta' = v + (1/2) theta x v + gamma * theta x (theta x v),
        gamma  = (1 - (t/2) cot(t/2)) / t^2,  t = ||theta||.
    """
    theta = np.asarray(theta, dtype=float)
    v = np.asarray(v, dtype=float)
    t2 = float(theta @ theta)
    if t2 < 1e-8:
        gamma = 1.0 / 12.0 + t2 / 720.0
    else:
        t = math.sqrt(t2)
        gamma = (1.0 - 0.5 * t / math.tan(0.5 * t)) / t2
    c = _cross(theta, v)
    return v + 0.5 * c + gamma * _cross(theta, c)


def _cross(a, b) -> np.ndarray:
    a1, a2, a3 = a
    b1, b2, b3 = b
    return np.array([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])


def polar_project(M) -> np.ndarray:
    """Nearest rotation to M in the Frobenius norm (polar factor)."""
    U, _, Vt = np.linalg.svd(np.asarray(M, dtype=float))
    R = U @ Vt
    if np.linalg.det(R) < 0.0:
        U = U.copy()
        U[:, -1] = -U[:, -1]
        R = U @ Vt
    return R


def rotation_defect(R) -> float:
    """Frobenius distance of R^T R from the identity."""
    R = np.asarray(R, dtype=float)
    return float(np.linalg.norm(R.T @ R - _EYE3))


def require_rotation(R, tol: float = 1e-9, name: str = "R") -> np.ndarray:
    """Validate orthonormality and determinant; returns R as a float array."""
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise ValueError(f"{name} must be 3x3, got shape {R.shape}")
    defect = rotation_defect(R)
    if defect > tol:
        raise ValueError(f"{name} is not orthonormal: ||R^T R - I||_F = {defect:.3e}")
    det = float(np.linalg.det(R))
    if abs(det - 1.0) > tol:
        raise ValueError(f"{name} has determinant {det!r}, expected 1")
    return R


class AxisAngle(NamedTuple):
    """Angle in [0, pi] and unit axis; the axis is conventional (e1) at angle 0."""

    angle: float
    axis: np.ndarray


def axis_angle_of(R) -> AxisAngle:
    """Axis-angle decomposition of a rotation via the logarithm."""
    w = log_so3(R)
    angle = float(np.linalg.norm(w))
    if angle == 0.0:
        return AxisAngle(0.0, np.array([1.0, 0.0, 0.0]))
    return AxisAngle(angle, w / angle)
