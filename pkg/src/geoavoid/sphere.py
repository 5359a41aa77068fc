"""Sphere-as-quotient machinery.

Points on the unit sphere are reached from rotations through the projection
pi(R) = R e1 (the first column). Curves on the sphere are integrated as
horizontal curves upstairs, with velocities confined to the span of e2, e3;
the obstacle, a point q on the sphere, is lifted to a rotation Q with
pi(Q) = q, which leaves one fiber angle free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AntipodalLift
from .potential import Obstacle
from .so3 import exp_so3

UNIT_TOL = 1e-9
# Lift degenerates when q is this close to the antipode of e1.
ANTIPODE_GUARD = 1e-9


def project(R) -> np.ndarray:
    """Sphere point of a rotation: its first column."""
    return np.asarray(R, dtype=float)[:, 0].copy()


def sphere_distance(p, r) -> float:
    """Great-circle angle between unit vectors, in [0, pi]."""
    c = float(np.dot(p, r))
    if c > 1.0:
        c = 1.0
    elif c < -1.0:
        c = -1.0
    return math.acos(c)


def horizontal_project(w) -> np.ndarray:
    """Zero the fiber component: (w1, w2, w3) -> (0, w2, w3)."""
    w = np.asarray(w, dtype=float)
    return np.array([0.0, w[1], w[2]])


def is_horizontal(w, tol: float = 1e-9) -> bool:
    return abs(float(np.asarray(w)[0])) <= tol


@dataclass(frozen=True)
class ObstacleLiftSpec:
    """Sphere obstacle q, the free fiber angle of its lift, and strength tau."""

    q: np.ndarray
    free_angle: float
    tau: float

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.shape != (3,):
            raise ValueError(f"q must be a 3-vector, got shape {q.shape}")
        if abs(float(np.linalg.norm(q)) - 1.0) > UNIT_TOL:
            raise ValueError(f"q must be a unit vector, got norm {np.linalg.norm(q)!r}")
        object.__setattr__(self, "q", q)
        if not (self.tau > 0.0):
            raise ValueError(f"tau must be positive, got {self.tau!r}")


def lift_obstacle(spec: ObstacleLiftSpec) -> Obstacle:
    """Rotation representative of the sphere obstacle.

    Q = R_align @ exp_so3(free_angle * e1) where R_align is the minimal
    rotation taking e1 to q (identity when q = e1). The fiber rotation about
    e1 leaves the projection fixed, so pi(Q) = q for any free angle.
    """
    q = spec.q
    c = float(q[0])  # e1 . q
    if 1.0 + c <= ANTIPODE_GUARD:
        raise AntipodalLift("obstacle is antipodal to e1; minimal-rotation lift undefined")
    axis = np.array([0.0, -q[2], q[1]])  # e1 x q
    s = float(np.linalg.norm(axis))
    if s < 1e-15:
        r_align = np.eye(3)
    else:
        r_align = exp_so3((math.atan2(s, c) / s) * axis)
    Q = r_align @ exp_so3(np.array([spec.free_angle, 0.0, 0.0]))
    return Obstacle(Q=Q, tau=spec.tau)
