"""Exception types shared across the library.

Integration-time failures carry the step index at which they occurred so a
run can report exactly where it aborted.
"""

from __future__ import annotations


class GeoAvoidError(Exception):
    """Base class for all library errors."""


class ConfigError(GeoAvoidError):
    """Invalid or inconsistent configuration values."""


class NotSkew(GeoAvoidError):
    """Matrix handed to vee() is not skew-symmetric within tolerance."""


class NearCutLocus(GeoAvoidError):
    """Rotation angle is within the guard band of pi, where the logarithm
    degenerates."""

    def __init__(self, message: str, phi: float | None = None, step_index: int | None = None):
        super().__init__(message)
        self.phi = phi
        self.step_index = step_index


class CollisionSingularity(GeoAvoidError):
    """Trajectory reached the obstacle configuration; potential is unbounded."""

    def __init__(self, message: str, phi: float | None = None, step_index: int | None = None):
        super().__init__(message)
        self.phi = phi
        self.step_index = step_index


class HorizontalityViolation(GeoAvoidError):
    """Sphere dynamics received state with a nonzero fiber component."""

    def __init__(self, message: str, step_index: int | None = None):
        super().__init__(message)
        self.step_index = step_index


class AntipodalLift(GeoAvoidError):
    """Obstacle point is antipodal to the base point; minimal-rotation lift
    is undefined."""


class NoConvergence(GeoAvoidError):
    """Shooting iteration exhausted without meeting the residual tolerance."""

    def __init__(self, message: str, residual_norm: float, iterations: int):
        super().__init__(message)
        self.residual_norm = residual_norm
        self.iterations = iterations


class InfeasibleShot(GeoAvoidError):
    """Every attempted forward integration collided with the obstacle."""
