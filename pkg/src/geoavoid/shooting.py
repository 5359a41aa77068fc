"""Single shooting for the two-point boundary value problem.

The boundary data fixes pose and velocity at both ends; the unknowns are the
initial higher derivatives (a0, j0) in R^6, matched against the 6-vector
residual (body-frame log of R(T)^T RT, v(T) - vT) by a damped Newton
iteration with a forward-difference Jacobian.

Converged shots satisfy the first-order necessary conditions only; they are
extremals, not certified minimizers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    CollisionSingularity,
    HorizontalityViolation,
    InfeasibleShot,
    NearCutLocus,
    NoConvergence,
)
from .dynamics import BodyState, SolverParams, Trajectory, integrate
from .so3 import distance_so3, require_rotation, riemannian_log

TOL_BVP = 1e-8
MAX_ITER = 100
JACOBIAN_PROBE = 1e-6
ARMIJO_C = 1e-4
ARMIJO_FLOOR = 2.0 ** -20


@dataclass(frozen=True)
class BoundaryData:
    """Endpoint poses and velocities over horizon T."""

    R0: np.ndarray
    v0: np.ndarray
    RT: np.ndarray
    vT: np.ndarray
    T: float

    def __post_init__(self):
        object.__setattr__(self, "R0", require_rotation(self.R0, name="R0"))
        object.__setattr__(self, "RT", require_rotation(self.RT, name="RT"))
        object.__setattr__(self, "v0", np.asarray(self.v0, dtype=float))
        object.__setattr__(self, "vT", np.asarray(self.vT, dtype=float))
        if not (self.T > 0.0):
            raise ValueError(f"T must be positive, got {self.T!r}")
        # Raises NearCutLocus when the endpoints are too far apart for the
        # pose residual to be well defined.
        distance_so3(self.R0, self.RT)


@dataclass
class ShootingResult:
    a0: np.ndarray
    j0: np.ndarray
    residual_norm: float
    iterations: int
    trajectory: Trajectory


def shooting_residual(
    a0, j0, bd: BoundaryData, p: SolverParams, manifold: str | None = None
) -> np.ndarray:
    """6-vector endpoint mismatch of the forward integration from (a0, j0).

    Zero exactly when R(T) = RT and v(T) = vT; the pose part is measured in
    the body frame so that the residual lives in a fixed linear space.
    """
    traj = _shoot(a0, j0, bd, p, manifold)
    return _residual_of(traj, bd)


def _shoot(a0, j0, bd, p, manifold) -> Trajectory:
    s0 = BodyState(bd.R0, bd.v0, np.asarray(a0, float), np.asarray(j0, float))
    return integrate(s0, replace(p, T=bd.T), manifold)


def _residual_of(traj: Trajectory, bd: BoundaryData) -> np.ndarray:
    pose = riemannian_log(traj.rotations[-1], bd.RT)
    return np.concatenate([pose, traj.velocities[-1] - bd.vT])


class _Infeasible(Exception):
    pass


def solve_bvp(
    bd: BoundaryData,
    p: SolverParams,
    init: tuple | None = None,
    manifold: str | None = None,
    tol: float = TOL_BVP,
    max_iter: int = MAX_ITER,
) -> ShootingResult:
    """Damped Newton iteration on the shooting unknowns (a0, j0).

    Forward-difference Jacobian (probe step 1e-6), Armijo backtracking on the
    squared residual norm with halving down to 2^-20. Deterministic: identical
    inputs produce identical iterates. Raises NoConvergence with the best
    residual seen, or InfeasibleShot when every trial integration collided.

    The six Jacobian probes are independent integrations and could run
    concurrently; the driver itself is sequential.
    """
    trials = 0
    failures = 0

    def evaluate(x):
        nonlocal trials, failures
        trials += 1
        try:
            traj = _shoot(x[:3], x[3:], bd, p, manifold)
        except (CollisionSingularity, NearCutLocus, HorizontalityViolation) as err:
            failures += 1
            raise _Infeasible from err
        return traj, _residual_of(traj, bd)

    if init is None:
        x = np.zeros(6)
    else:
        x = np.concatenate([np.asarray(init[0], float), np.asarray(init[1], float)])

    try:
        traj, F = evaluate(x)
    except _Infeasible:
        raise InfeasibleShot(
            "initial shot collided with the obstacle and no feasible trial exists"
        ) from None

    norm = float(np.linalg.norm(F))
    best_norm = norm
    iterations = 0

    for _ in range(max_iter):
        if norm <= tol:
            return ShootingResult(
                a0=x[:3].copy(), j0=x[3:].copy(),
                residual_norm=norm, iterations=iterations, trajectory=traj,
            )

        J = np.empty((6, 6))
        try:
            for i in range(6):
                xp = x.copy()
                xp[i] += JACOBIAN_PROBE
                try:
                    _, Fp = evaluate(xp)
                    J[:, i] = (Fp - F) / JACOBIAN_PROBE
                except _Infeasible:
                    xm = x.copy()
                    xm[i] -= JACOBIAN_PROBE
                    _, Fm = evaluate(xm)  # may raise _Infeasible again
                    J[:, i] = (F - Fm) / JACOBIAN_PROBE
        except _Infeasible:
            break

        try:
            delta = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(J, -F, rcond=None)[0]

        alpha = 1.0
        accepted = False
        norm2 = norm * norm
        while alpha >= ARMIJO_FLOOR:
            try:
                traj_t, Ft = evaluate(x + alpha * delta)
            except _Infeasible:
                alpha *= 0.5
                continue
            nt = float(np.linalg.norm(Ft))
            if nt * nt <= (1.0 - 2.0 * ARMIJO_C * alpha) * norm2:
                x = x + alpha * delta
                traj, F, norm = traj_t, Ft, nt
                accepted = True
                break
            alpha *= 0.5
        iterations += 1
        if not accepted:
            break
        best_norm = min(best_norm, norm)

    if norm <= tol:
        return ShootingResult(
            a0=x[:3].copy(), j0=x[3:].copy(),
            residual_norm=norm, iterations=iterations, trajectory=traj,
        )
    if failures == trials:
        raise InfeasibleShot("every trial integration collided with the obstacle")
    raise NoConvergence(
        f"shooting stalled at residual {best_norm:.3e} after {iterations} iterations",
        residual_norm=best_norm, iterations=iterations,
    )
