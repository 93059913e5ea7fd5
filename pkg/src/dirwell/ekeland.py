"""Constructive directional Ekeland point on a finite sample.

Starting from an eps-minimizer ``x0``, iterate inside
``F(x) = {y : f(y) + sqrt(eps) T(x, y) <= f(x)}``: stop when nothing in
F(x_k) beats f(x_k), otherwise jump to a point whose value is below the
midpoint of f(x_k) and inf over F(x_k).  On a finite cloud this terminates,
and the stopping point satisfies the three Ekeland inequalities.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .cone import minimal_time, minimal_time_matrix, minimal_time_pairs
from .errors import InputError, NonConvergenceError, PreconditionError
from .sampling import SampleCloud, infimum, sample_directional_region

MAX_ITER = 10_000
TOL = 1e-9
_STOP_REL = 1e-12


@dataclass
class EkelandResult:
    x_eps: np.ndarray
    epsilon: float
    start: np.ndarray
    iterations: int
    residual_i: float
    residual_ii: float
    violations_iii: int
    iterates: list = field(default_factory=list)
    values: list = field(default_factory=list)

    def to_dict(self):
        return {"x_eps": self.x_eps.tolist(), "epsilon": self.epsilon,
                "start": self.start.tolist(), "iterations": self.iterations,
                "residual_i": self.residual_i, "residual_ii": self.residual_ii,
                "violations_iii": self.violations_iii,
                "iterates": [list(map(float, p)) for p in self.iterates],
                "values": self.values}


def _phi(problem, X):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return problem.values(np.atleast_2d(X))


def member_F(problem, x, y, sqrt_eps, tol=TOL) -> bool:
    """Whether ``y`` lies in F(x): f(y) + sqrt(eps) T(x, y) <= f(x) + tol."""
    t = minimal_time(problem.directions, x, y)
    if t == math.inf:
        return False
    fx, fy = _phi(problem, np.vstack([x, y]))
    return bool(fy + sqrt_eps * t <= fx + tol)


def default_start(problem, epsilon, cloud: SampleCloud):
    """Cloud argmin among points whose value is within eps of the infimum."""
    _, arg = infimum(cloud)
    return arg


def ekeland_point(problem, x0=None, epsilon=0.01, cloud=None) -> EkelandResult:
    """Run the halving construction from ``x0`` on the cloud of D_anchor.

    Raises
    ------
    PreconditionError
        ``x0`` is outside D_anchor or is not an eps-minimizer on the cloud.
    NonConvergenceError
        More than 10**4 iterations.
    """
    if not epsilon > 0:
        raise InputError("epsilon must be positive")
    cloud = sample_directional_region(problem) if cloud is None else cloud
    inf, _ = infimum(cloud)
    x0 = default_start(problem, epsilon, cloud) if x0 is None else \
        np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape != (problem.dimension,):
        raise InputError("x0 has the wrong dimension")
    if not problem.in_region(x0[None, :], cloud.anchor)[0]:
        raise PreconditionError("x0 is not in the directional region of the anchor")
    f0 = float(_phi(problem, x0)[0])
    if not f0 <= inf + epsilon + TOL * (1 + abs(inf) + epsilon):
        raise PreconditionError(
            f"x0 is not an eps-minimizer: f(x0)={f0!r} > inf + eps = {inf + epsilon!r}")

    s = math.sqrt(epsilon)
    Y, fY = cloud.points, cloud.values
    M = problem.directions
    xk, fk = x0.copy(), f0
    iterates, values = [xk.copy()], [fk]
    for k in range(MAX_ITER + 1):
        T = minimal_time_matrix(M, xk[None, :], Y)[0]
        with np.errstate(invalid="ignore"):
            in_F = np.isfinite(T) & (fY + s * np.where(np.isfinite(T), T, 0.0) <= fk)
        inf_F = min(fk, float(fY[in_F].min())) if in_F.any() else fk
        if inf_F >= fk - _STOP_REL * (1 + abs(fk)):
            break
        if k == MAX_ITER:
            raise NonConvergenceError(
                "iteration cap reached",
                {"iterations": k, "last_value": fk, "inf_F": inf_F,
                 "last_point": xk.tolist()})
        mid = 0.5 * (fk + inf_F)
        j = int(np.flatnonzero(in_F & (fY < mid))[0])
        xk, fk = Y[j].copy(), float(fY[j])
        iterates.append(xk.copy())
        values.append(fk)

    check = verify_conclusions(problem, x0, xk, epsilon, cloud)
    return EkelandResult(xk, float(epsilon), x0, len(iterates) - 1,
                         check["residual_i"], check["residual_ii"],
                         check["violations_iii"], iterates, values)


def verify_conclusions(problem, x0, x_eps, epsilon, cloud):
    """Recompute the three conclusions from scratch with pairwise evaluations."""
    s = math.sqrt(epsilon)
    M = problem.directions
    x0 = np.asarray(x0, float).reshape(-1)
    xe = np.asarray(x_eps, float).reshape(-1)
    t0 = minimal_time(M, x0, xe)
    f0, fe = (float(v) for v in _phi(problem, np.vstack([x0, xe])))
    res_i = s - t0
    res_ii = f0 - fe - s * t0
    Y = cloud.points
    t = minimal_time_pairs(M, np.broadcast_to(xe, Y.shape), Y)
    fY = cloud.values
    finite = np.isfinite(t)
    rhs = fY[finite] + s * t[finite]
    viol = fe > rhs + TOL * (1 + np.abs(fe) + np.abs(rhs))
    return {"residual_i": float(res_i), "residual_ii": float(res_ii),
            "violations_iii": int(viol.sum()),
            "passed": bool(res_i >= -TOL and res_ii >= -TOL and not viol.any())}


def verify_ekeland(result: EkelandResult, problem, cloud=None) -> dict:
    """Independent re-check of an :class:`EkelandResult` on a cloud."""
    cloud = sample_directional_region(problem) if cloud is None else cloud
    return verify_conclusions(problem, result.start, result.x_eps, result.epsilon, cloud)
