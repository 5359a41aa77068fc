"""Reduced fourth-order avoidance dynamics and fixed-step integration.

State is (R, v, a, j): a rotation plus the body velocity and its first two
time derivatives. On the full group the jerk equation is

    v''' = sigma * v' + v'' x v - (1/2) grad V,

while the horizontal sphere problem replaces the bracket term and projects
onto the span of e2, e3:

    v''' = P_m( sigma * v' + (v' x v) x v - (1/2) grad V ).

Integration is fixed-step with three schemes: a Lie Euler step (rotation
updated by exp of the body velocity), a projected additive Euler step, and
a fourth-order Runge-Kutta-Munthe-Kaas step. The RK4 variant advances the
rotation through an algebra increment corrected by the inverse differential
of exp; without that correction the commutator terms cap the rotation update
at second order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    CollisionSingularity,
    ConfigError,
    HorizontalityViolation,
    NearCutLocus,
)
from .potential import COLLISION_EPS, Obstacle, clearance_and_grad
from .so3 import _cross, dexpinv_body, distance_so3, exp_so3, hat, polar_project, require_rotation

METHODS = ("LieEuler", "ProjectedEuler", "LieRK4")
MANIFOLDS = ("so3", "sphere")

HORIZONTAL_TOL = 1e-9


@dataclass
class BodyState:
    """Rotation plus body velocity v and its derivatives a = v', j = v''."""

    R: np.ndarray
    v: np.ndarray
    a: np.ndarray
    j: np.ndarray

    def __post_init__(self):
        self.R = np.asarray(self.R, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.a = np.asarray(self.a, dtype=float)
        self.j = np.asarray(self.j, dtype=float)
        for name in ("v", "a", "j"):
            vec = getattr(self, name)
            if vec.shape != (3,):
                raise ValueError(f"{name} must be a 3-vector, got shape {vec.shape}")
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"{name} has non-finite entries: {vec!r}")
        require_rotation(self.R)

    def copy(self) -> "BodyState":
        return BodyState(self.R.copy(), self.v.copy(), self.a.copy(), self.j.copy())


@dataclass(frozen=True)
class SolverParams:
    """Tension sigma, step size h, horizon T, scheme, and optional obstacle."""

    sigma: float = 0.0
    h: float = 1e-3
    T: float = 1.0
    method: str = "LieEuler"
    horizontal: bool = False
    obstacle: Obstacle | None = None

    def __post_init__(self):
        if not (self.sigma >= 0.0):
            raise ConfigError(f"sigma must be >= 0, got {self.sigma!r}")
        if not (self.h > 0.0):
            raise ConfigError(f"h must be positive, got {self.h!r}")
        if not (self.T > 0.0):
            raise ConfigError(f"T must be positive, got {self.T!r}")
        if self.h > self.T:
            raise ConfigError(f"h = {self.h!r} exceeds horizon T = {self.T!r}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")

    @property
    def n_steps(self) -> int:
        return max(1, round(self.T / self.h))


@dataclass
class Trajectory:
    """Uniformly sampled run: times, rotations, state vectors, clearance, cost.

    clearance is the geodesic angle to the obstacle per sample and is present
    exactly when an obstacle was configured.
    """

    times: np.ndarray           # (N+1,)
    rotations: np.ndarray       # (N+1, 3, 3)
    velocities: np.ndarray      # (N+1, 3)
    accelerations: np.ndarray   # (N+1, 3)
    jerks: np.ndarray           # (N+1, 3)
    clearance: np.ndarray | None
    cost_J: float

    def __len__(self) -> int:
        return len(self.times)

    def state(self, k: int) -> BodyState:
        return BodyState(
            self.rotations[k].copy(),
            self.velocities[k].copy(),
            self.accelerations[k].copy(),
            self.jerks[k].copy(),
        )

    @property
    def sphere_points(self) -> np.ndarray:
        """Projected sphere curve: first column of each rotation, (N+1, 3)."""
        return self.rotations[:, :, 0]

    @property
    def min_clearance(self) -> float | None:
        if self.clearance is None:
            return None
        return float(self.clearance.min())


def _dj_so3(R, v, a, j, sigma, obstacle):
    dj = sigma * a + _cross(j, v)
    if obstacle is not None:
        dj = dj - 0.5 * clearance_and_grad(R, obstacle)[1]
    return dj


def _dj_sphere(R, v, a, j, sigma, obstacle):
    dj = sigma * a + _cross(_cross(a, v), v)
    if obstacle is not None:
        dj = dj - 0.5 * clearance_and_grad(R, obstacle)[1]
    dj[0] = 0.0  # the bracket terms are already horizontal; the gradient is not
    return dj


_DJ = {"so3": _dj_so3, "sphere": _dj_sphere}


def _check_horizontal(s: BodyState):
    for name in ("v", "a", "j"):
        c = abs(float(getattr(s, name)[0]))
        if c > HORIZONTAL_TOL:
            raise HorizontalityViolation(
                f"{name} has fiber component {c:.3e} > {HORIZONTAL_TOL:g}"
            )


def _resolve_manifold(p: SolverParams, manifold: str | None) -> str:
    if manifold is None:
        manifold = "sphere" if p.horizontal else "so3"
    if manifold not in MANIFOLDS:
        raise ConfigError(f"manifold must be one of {MANIFOLDS}, got {manifold!r}")
    return manifold


def rhs_so3(s: BodyState, p: SolverParams):
    """Right-hand side on the full group: (dR, dv, da, dj)."""
    dj = _dj_so3(s.R, s.v, s.a, s.j, p.sigma, p.obstacle)
    return s.R @ hat(s.v), s.a.copy(), s.j.copy(), dj


def rhs_sphere(s: BodyState, p: SolverParams):
    """Right-hand side of the horizontal sphere problem: (dR, dv, da, dj).

    Requires v, a, j horizontal (fiber component below HORIZONTAL_TOL).
    """
    _check_horizontal(s)
    dj = _dj_sphere(s.R, s.v, s.a, s.j, p.sigma, p.obstacle)
    return s.R @ hat(s.v), s.a.copy(), s.j.copy(), dj


def step(s: BodyState, p: SolverParams, manifold: str | None = None) -> BodyState:
    """Advance one step of size p.h with the scheme selected by p.method."""
    manifold = _resolve_manifold(p, manifold)
    if manifold == "sphere":
        _check_horizontal(s)
    dj_fn = _DJ[manifold]
    h = p.h
    R, v, a, j = s.R, s.v, s.a, s.j
    sigma, obstacle = p.sigma, p.obstacle

    if p.method == "LieEuler":
        dj = dj_fn(R, v, a, j, sigma, obstacle)
        R_new = R @ exp_so3(h * v)
        return BodyState(R_new, v + h * a, a + h * j, j + h * dj)

    if p.method == "ProjectedEuler":
        dj = dj_fn(R, v, a, j, sigma, obstacle)
        R_new = polar_project(R + h * (R @ hat(v)))
        return BodyState(R_new, v + h * a, a + h * j, j + h * dj)

    # LieRK4: Runge-Kutta-Munthe-Kaas. The rotation is parameterized as
    # R @ exp(theta) over the step; theta' = dexpinv_body(theta, v).
    need_R = obstacle is not None

    k1t = v
    k1v, k1a = a, j
    k1j = dj_fn(R, v, a, j, sigma, obstacle)

    t2 = 0.5 * h * k1t
    v2, a2, j2 = v + 0.5 * h * k1v, a + 0.5 * h * k1a, j + 0.5 * h * k1j
    R2 = R @ exp_so3(t2) if need_R else R
    k2t = dexpinv_body(t2, v2)
    k2v, k2a = a2, j2
    k2j = dj_fn(R2, v2, a2, j2, sigma, obstacle)

    t3 = 0.5 * h * k2t
    v3, a3, j3 = v + 0.5 * h * k2v, a + 0.5 * h * k2a, j + 0.5 * h * k2j
    R3 = R @ exp_so3(t3) if need_R else R
    k3t = dexpinv_body(t3, v3)
    k3v, k3a = a3, j3
    k3j = dj_fn(R3, v3, a3, j3, sigma, obstacle)

    t4 = h * k3t
    v4, a4, j4 = v + h * k3v, a + h * k3a, j + h * k3j
    R4 = R @ exp_so3(t4) if need_R else R
    k4t = dexpinv_body(t4, v4)
    k4v, k4a = a4, j4
    k4j = dj_fn(R4, v4, a4, j4, sigma, obstacle)

    w = h / 6.0
    theta = w * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
    return BodyState(
        R @ exp_so3(theta),
        v + w * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        a + w * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
        j + w * (k1j + 2.0 * k2j + 2.0 * k3j + k4j),
    )


def integrate(s0: BodyState, p: SolverParams, manifold: str | None = None) -> Trajectory:
    """Run round(T/h) fixed steps from s0 and record every sample.

    Clearance to the obstacle is recorded per sample when one is configured.
    Integration errors are re-raised with the offending step index attached.
    """
    manifold = _resolve_manifold(p, manifold)
    n = p.n_steps
    times = np.arange(n + 1) * p.h
    rotations = np.empty((n + 1, 3, 3))
    velocities = np.empty((n + 1, 3))
    accelerations = np.empty((n + 1, 3))
    jerks = np.empty((n + 1, 3))
    clearance = np.empty(n + 1) if p.obstacle is not None else None

    state = s0.copy()

    def record(k, st):
        rotations[k] = st.R
        velocities[k] = st.v
        accelerations[k] = st.a
        jerks[k] = st.j
        if clearance is not None:
            phi = distance_so3(st.R, p.obstacle.Q)
            clearance[k] = phi
            if phi < COLLISION_EPS:
                raise CollisionSingularity(
                    f"sample {k} within {COLLISION_EPS:g} rad of the obstacle", phi=phi
                )

    at_step = 0
    try:
        record(0, state)
        for k in range(n):
            at_step = k + 1
            state = step(state, p, manifold)
            record(at_step, state)
    except (CollisionSingularity, NearCutLocus, HorizontalityViolation) as err:
        if err.step_index is None:
            err.step_index = at_step
        raise

    cost = _cost_from_arrays(
        times, velocities, accelerations, clearance, p.sigma,
        p.obstacle.tau if p.obstacle is not None else None,
    )
    return Trajectory(times, rotations, velocities, accelerations, jerks, clearance, cost)


def _cost_from_arrays(times, velocities, accelerations, clearance, sigma, tau) -> float:
    f = 0.5 * (np.einsum("ij,ij->i", accelerations, accelerations)
               + sigma * np.einsum("ij,ij->i", velocities, velocities))
    if tau is not None and clearance is not None:
        f = f + 0.5 * tau / (clearance * clearance)
    return float(np.trapezoid(f, times))


def cost_functional(traj: Trajectory, p: SolverParams) -> float:
    """Trapezoidal value of the run cost.

    Integrand is (1/2)(||a||^2 + sigma ||v||^2 + V); the potential term is
    included exactly when p carries an obstacle. A trajectory without stored
    clearance has it recomputed from the rotations.
    """
    if len(traj) == 0:
        raise ValueError("trajectory is empty")
    clearance = traj.clearance
    tau = None
    if p.obstacle is not None:
        tau = p.obstacle.tau
        if clearance is None:
            clearance = np.array(
                [distance_so3(R, p.obstacle.Q) for R in traj.rotations]
            )
    return _cost_from_arrays(
        traj.times, traj.velocities, traj.accelerations, clearance, p.sigma, tau
    )


def params_with(p: SolverParams, **kw) -> SolverParams:
    """Convenience replace() that revalidates."""
    return replace(p, **kw)
