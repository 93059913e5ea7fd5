"""Slow reference computations for cross-checking the main code paths.

Nothing here calls the conic-hull solver in :mod:`dirwell.cone`.  Minimal
times come from a scan over a bank of unit directions of cone(M) followed by
a local zoom; level sets and Ekeland points come from exhaustive fine grids.
Only desk-scale dimensions are supported.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import InputError

INF = math.inf


@dataclass(frozen=True)
class OracleConfig:
    """Resolution knobs.

    ``direction_resolution`` is the simplex (or angle) grid density of the
    direction bank, ``t_resolution`` the points per edge-zoom round used to
    polish the best direction, ``grid_factor`` the refinement of the
    exhaustive grids relative to the main sampler.
    """

    direction_resolution: int = 96
    t_resolution: int = 200
    grid_factor: int = 10
    accept_rel: float = 1e-7

    def __post_init__(self):
        if self.direction_resolution < 64 or self.t_resolution < 64:
            raise InputError("oracle resolutions must be at least 64")


DEFAULT = OracleConfig()


def _simplex_grid(k, res):
    if k == 1:
        return np.ones((1, 1))
    rows = []

    def rec(prefix, left, parts):
        if parts == 1:
            rows.append(prefix + [left])
            return
        for a in range(left + 1):
            rec(prefix + [a], left - a, parts - 1)

    rec([], res, k)
    return np.array(rows, dtype=float) / res


def direction_bank(M, config: OracleConfig = DEFAULT):
    """Weights and unit directions sampling cone(M) ∩ S."""
    n = M.dim
    if M.full_sphere:
        if n == 1:
            return None, np.array([[1.0], [-1.0]])
        if n == 2:
            a = np.linspace(0, 2 * np.pi, 4 * config.direction_resolution, endpoint=False)
            return None, np.stack([np.cos(a), np.sin(a)], axis=1)
        if n == 3:
            m = 4 * config.direction_resolution ** 2 // 16
            i = np.arange(m) + 0.5
            phi = np.arccos(1 - 2 * i / m)
            theta = np.pi * (1 + 5 ** 0.5) * i
            return None, np.stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi),
                                   np.cos(phi)], axis=1)
        raise InputError("oracle supports dimension <= 3")
    G = np.asarray(M.generators, dtype=float)
    W = _simplex_grid(len(G), config.direction_resolution if len(G) <= 3 else 12)
    U = W @ G
    norms = np.linalg.norm(U, axis=1)
    keep = norms > 1e-12
    return W[keep], U[keep] / norms[keep, None]


def _ray_fit(d, u):
    """Best t >= 0 along u and the leftover distance to d."""
    t = max(0.0, float(d @ u))
    return t, float(np.linalg.norm(d - t * u))


def _edge_zoom(d, g, h, points, rounds=60):
    """Zoom on the edge u(l) = normalize((1-l) g + l h) for the best ray fit."""
    lo, hi = 0.0, 1.0
    best = (math.inf, 0.0)
    for _ in range(rounds):
        lam = np.linspace(lo, hi, points)
        U = (1 - lam)[:, None] * g + lam[:, None] * h
        nu = np.linalg.norm(U, axis=1)
        ok = nu > 1e-15
        U = U[ok] / nu[ok, None]
        lam = lam[ok]
        if len(lam) == 0:
            break
        ts = np.maximum(U @ d, 0.0)
        res = np.linalg.norm(d[None, :] - ts[:, None] * U, axis=1)
        i = int(np.argmin(res))
        if res[i] < best[0]:
            best = (float(res[i]), float(ts[i]))
        width = (hi - lo) / (points - 1)
        lo, hi = max(0.0, lam[i] - 2 * width), min(1.0, lam[i] + 2 * width)
        if hi - lo < 1e-16:
            break
    return best


def _polish(d, G, w, rounds):
    """Pattern search on simplex weights to shrink the ray-fit residual."""
    def cost(wt):
        u = wt @ G
        nu = np.linalg.norm(u)
        if nu < 1e-15:
            return math.inf, 0.0
        t, r = _ray_fit(d, u / nu)
        return r, t

    best_r, best_t = cost(w)
    k = len(w)
    step = 1.0 / 8
    for _ in range(rounds):
        improved = False
        for i in range(k):
            for j in range(k):
                if i == j:
                    continue
                cand = w.copy()
                move = min(step, cand[j])
                if move <= 0:
                    continue
                cand[i] += move
                cand[j] -= move
                r, t = cost(cand)
                if r < best_r:
                    w, best_r, best_t, improved = cand, r, t, True
        if not improved:
            step /= 2
            if step < 1e-17:
                break
    return best_r, best_t


def oracle_minimal_time(M, y, x, config: OracleConfig = DEFAULT) -> float:
    """Brute-force minimal time: least t with y + t*u == x for a scanned unit u in cone(M)."""
    y = np.asarray(y, dtype=float).reshape(-1)
    x = np.asarray(x, dtype=float).reshape(-1)
    if y.shape != x.shape or x.size != M.dim:
        raise InputError("dimension mismatch")
    if M.dim > 3:
        raise InputError("oracle supports dimension <= 3")
    d = x - y
    nd = float(np.linalg.norm(d))
    if nd == 0.0:
        return 0.0
    accept = config.accept_rel * (1 + nd)
    W, U = direction_bank(M, config)
    ts = np.maximum(U @ d, 0.0)
    res = np.linalg.norm(d[None, :] - ts[:, None] * U, axis=1)
    i = int(np.argmin(res))
    best_r, best_t = float(res[i]), float(ts[i])
    if M.full_sphere:
        # the sphere is the whole direction set: the exact direction d/|d| is admissible
        best_t, best_r = _ray_fit(d, d / nd)
    elif best_r > accept and W is not None and len(W[i]) > 1:
        G = np.asarray(M.generators, float)
        # in the plane an optimal direction lies on an edge between two generators
        for a in range(len(G)):
            for b in range(a + 1, len(G)):
                r, t = _edge_zoom(d, G[a], G[b], config.t_resolution)
                if r < best_r:
                    best_r, best_t = r, t
        if best_r > accept and M.dim == 3:
            r, t = _polish(d, G, W[i].copy(), 50 * config.t_resolution)
            if r < best_r:
                best_r, best_t = r, t
    return best_t if best_r <= accept else INF


# --- exhaustive grids ----------------------------------------------------------------

def _in_cone_exact_lowdim(G, D):
    """Cone membership in one or two dimensions by sign logic / Cramer's rule."""
    n = D.shape[1]
    tol = 1e-12 * (1 + np.linalg.norm(D, axis=1))
    if n == 1:
        signs = set(np.sign(G[:, 0]).tolist())
        v = D[:, 0]
        ok = np.abs(v) <= tol
        if 1.0 in signs:
            ok |= v > 0
        if -1.0 in signs:
            ok |= v < 0
        return ok
    ok = np.zeros(len(D), dtype=bool)
    for g in G:
        cross = g[0] * D[:, 1] - g[1] * D[:, 0]
        ok |= (np.abs(cross) <= tol) & (D @ g >= -tol)
    for a in range(len(G)):
        for b in range(a + 1, len(G)):
            g, h = G[a], G[b]
            det = g[0] * h[1] - g[1] * h[0]
            if abs(det) < 1e-14:
                continue
            ca = (D[:, 0] * h[1] - D[:, 1] * h[0]) / det
            cb = (g[0] * D[:, 1] - g[1] * D[:, 0]) / det
            ok |= (ca >= -tol) & (cb >= -tol)
    return ok | (np.linalg.norm(D, axis=1) <= tol)


def _fine_region(problem, anchor, factor):
    n = problem.dimension
    if n > 2:
        raise InputError("exhaustive grids support dimension <= 2")
    per_axis = max(2, int(math.floor(problem.budget ** (1.0 / n) + 1e-9)))
    fine = factor * (per_axis - 1) + 1
    axes = [np.linspace(problem.sample_lo[i], problem.sample_hi[i], fine) for i in range(n)]
    P = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    P = np.vstack([P, anchor[None, :]])
    keep = problem.feasible.contains(P)
    if not problem.directions.full_sphere:
        keep &= _in_cone_exact_lowdim(problem.directions.generators, anchor[None, :] - P)
    h = float(np.max((problem.sample_hi - problem.sample_lo) / (fine - 1)))
    return P[keep], h


def _values(problem, P):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return problem.values(P)


def _exact_diameter(P):
    if len(P) < 2:
        return 0.0
    if P.shape[1] == 1:
        return float(P[:, 0].max() - P[:, 0].min())
    try:
        P = P[ConvexHull(P).vertices]
    except QhullError:
        pass
    d2 = ((P[:, None, :] - P[None, :, :]) ** 2).sum(-1)
    return float(math.sqrt(d2.max()))


def oracle_level_diameter(problem, epsilon, anchor=None, config: OracleConfig = DEFAULT):
    """Level-set diameter on a grid ``grid_factor`` times finer than the sampler.

    Returns ``(diameter, fine_spacing)``.
    """
    anchor = problem.anchor if anchor is None else np.asarray(anchor, float).reshape(-1)
    P, h = _fine_region(problem, anchor, config.grid_factor)
    f = _values(problem, P)
    finite = np.isfinite(f)
    if not finite.any():
        return 0.0, h
    inf = float(f[finite].min())
    level = inf + epsilon
    members = P[f <= level + 1e-9 + 1e-9 * (abs(level) + np.abs(f))]
    return _exact_diameter(members), h


def _t1d(G, a, b):
    """1-D minimal time from a to each entry of b by sign logic."""
    d = b - a
    signs = set(np.sign(G[:, 0]).tolist())
    ok = d == 0
    if 1.0 in signs:
        ok = ok | (d > 0)
    if -1.0 in signs:
        ok = ok | (d < 0)
    return np.where(ok, np.abs(d), INF)


def _ekeland_ok(problem, x0, z, eps, P, fP, tol=1e-9):
    s = math.sqrt(eps)
    G = np.array([[1.0], [-1.0]]) if problem.directions.full_sphere else \
        np.asarray(problem.directions.generators)
    t0 = float(_t1d(G, x0, np.array([z]))[0])
    f0, fz = (float(v) for v in _values(problem, np.array([[x0], [z]])))
    if not t0 <= s + tol:
        return False
    if not fz + s * t0 <= f0 + tol * (1 + abs(f0) + abs(fz)):
        return False
    t = _t1d(G, z, P)
    fin = np.isfinite(t)
    rhs = fP[fin] + s * t[fin]
    return bool(np.all(fz <= rhs + tol * (1 + abs(fz) + np.abs(rhs))))


def oracle_ekeland_predicate(problem, x0, epsilon, z, config: OracleConfig = DEFAULT) -> bool:
    """Whether ``z`` satisfies the three Ekeland inequalities on the fine grid (1-D)."""
    if problem.dimension != 1:
        raise InputError("the Ekeland oracle is one-dimensional")
    x0 = float(np.asarray(x0).reshape(-1)[0])
    z = float(np.asarray(z).reshape(-1)[0])
    P, _ = _fine_region(problem, problem.anchor, config.grid_factor)
    P = P[:, 0]
    return _ekeland_ok(problem, x0, z, epsilon, P, _values(problem, P[:, None]))


def oracle_ekeland(problem, x0, epsilon, config: OracleConfig = DEFAULT) -> Optional[np.ndarray]:
    """Exhaustive 1-D search for a point satisfying all three Ekeland inequalities.

    Returns the point (lowest value first) or ``None`` when the fine grid has
    no such point.
    """
    if problem.dimension != 1:
        raise InputError("the Ekeland oracle is one-dimensional")
    x0 = float(np.asarray(x0).reshape(-1)[0])
    P, _ = _fine_region(problem, problem.anchor, config.grid_factor)
    P = np.append(P[:, 0], x0)
    fP = _values(problem, P[:, None])
    s = math.sqrt(epsilon)
    near = np.abs(P - x0) <= s + 1e-9
    for i in np.flatnonzero(near)[np.argsort(fP[near], kind="stable")]:
        if _ekeland_ok(problem, x0, P[i], epsilon, P, fP):
            return np.array([P[i]])
    return None
