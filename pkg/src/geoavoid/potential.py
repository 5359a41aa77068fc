"""Repulsive obstacle potential on the rotation group.

The potential is tau / phi^2 where phi is the geodesic angle to the lifted
obstacle rotation. Its body-frame gradient is (tau / phi^4) * u with
u = riemannian_log(R, Q), so the magnitude scales as tau / phi^3 and the
vector points from R toward Q in body coordinates. The avoidance dynamics
subtract half of this gradient, which is what produces repulsion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CollisionSingularity
from .so3 import distance_so3, require_rotation, riemannian_log

# Below this geodesic angle the run is declared to have hit the obstacle.
COLLISION_EPS = 1e-9


@dataclass(frozen=True)
class Obstacle:
    """Lifted obstacle rotation Q with repulsion strength tau > 0."""

    Q: np.ndarray
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "Q", require_rotation(self.Q, name="Q"))
        if not (self.tau > 0.0):
            raise ValueError(f"tau must be positive, got {self.tau!r}")


def potential_value(R, obs: Obstacle) -> float:
    """tau / phi^2; unbounded as the state approaches the obstacle."""
    phi = distance_so3(R, obs.Q)
    if phi < COLLISION_EPS:
        raise CollisionSingularity(
            f"state within {COLLISION_EPS:g} rad of the obstacle (phi = {phi:.3e})",
            phi=phi,
        )
    return obs.tau / (phi * phi)


def grad_body(R, obs: Obstacle) -> np.ndarray:
    """Body-frame gradient (tau / phi^4) * riemannian_log(R, Q)."""
    return clearance_and_grad(R, obs)[1]


def clearance_and_grad(R, obs: Obstacle) -> tuple[float, np.ndarray]:
    """Geodesic clearance phi and the body-frame gradient, in one pass."""
    u = riemannian_log(R, obs.Q)
    phi2 = float(u @ u)
    phi = phi2 ** 0.5
    if phi < COLLISION_EPS:
        raise CollisionSingularity(
            f"state within {COLLISION_EPS:g} rad of the obstacle (phi = {phi:.3e})",
            phi=phi,
        )
    return phi, (obs.tau / (phi2 * phi2)) * u
