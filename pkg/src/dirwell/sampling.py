"""Finite samples of the directional feasible region D = A ∩ (anchor - cone(M)).

A box grid covers full-dimensional parts of D.  When the cone is thin (a
single generator, say) the grid misses D almost surely, so rays
``anchor - t*d`` along each generator are added (none for the full sphere).  Everything is
deterministic: the same problem always yields the same cloud.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateRegionError, InputError, NoFiniteValueError

_DIAM_CHUNK = 256


@dataclass(frozen=True, eq=False)
class SampleCloud:
    """Points of D with their objective values.

    ``spacing`` is the largest nearest-neighbour distance in the cloud, a
    resolution scale used by every verdict threshold.
    """

    points: np.ndarray
    values: np.ndarray
    anchor: np.ndarray
    spacing: float
    anchor_index: int
    grid_count: int = 0
    ray_count: int = 0
    notes: tuple = field(default=())

    def __len__(self):
        return len(self.points)

    @property
    def dim(self):
        return self.points.shape[1]


def _ray_extent(anchor, d, lo, hi):
    """Largest t >= 0 with anchor - t*d inside [lo, hi] (negative if never)."""
    t = math.inf
    for a, di, l, h in zip(anchor, d, lo, hi):
        if di > 0:
            t = min(t, (a - l) / di)
        elif di < 0:
            t = min(t, (a - h) / di)
        elif not l <= a <= h:
            return -1.0
    return t


def sample_directional_region(problem, anchor=None, budget=None) -> SampleCloud:
    """Deterministic sample of D_anchor inside the problem's sample box.

    Parameters
    ----------
    problem : Problem
    anchor : array_like, optional
        Defaults to ``problem.anchor``.
    budget : int, optional
        Cap on the number of points; defaults to ``problem.budget``.
    """
    anchor = problem.anchor if anchor is None else np.asarray(anchor, float).reshape(-1)
    if anchor is None:
        raise InputError("sampling needs an anchor")
    if anchor.shape != (problem.dimension,):
        raise InputError("anchor dimension does not match the problem")
    budget = problem.budget if budget is None else int(budget)
    if budget < 2:
        raise InputError("budget must be at least 2")
    lo, hi = problem.sample_lo, problem.sample_hi
    n = problem.dimension

    per_axis = max(2, int(math.floor(budget ** (1.0 / n) + 1e-9)))
    axes = [np.linspace(lo[i], hi[i], per_axis) for i in range(n)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    grid = grid[problem.in_region(grid, anchor)]
    grid_step = float(np.max((hi - lo) / (per_axis - 1)))

    remaining = max(0, budget - len(grid) - 1)
    # the grid already covers a full-dimensional D; rays only help thin cones
    dirs = [] if problem.directions.full_sphere else problem.directions.ray_directions()
    ray_pts = []
    if remaining > 0:
        extents = [_ray_extent(anchor, d, lo, hi) for d in dirs]
        total_len = sum(t for t in extents if t > 0)
        if total_len > 0:
            step = min(grid_step, total_len / remaining)
            for d, t_max in zip(dirs, extents):
                if t_max <= 0:
                    continue
                count = int(math.floor(t_max / step + 1e-9))
                ts = step * np.arange(1, count + 1)
                ray_pts.append(anchor[None, :] - ts[:, None] * d[None, :])
    rays = np.vstack(ray_pts) if ray_pts else np.zeros((0, n))
    if len(rays):
        rays = rays[problem.in_region(rays, anchor)]
        rays = _drop_duplicates(rays, grid)
        if len(rays) > remaining:
            keep = np.linspace(0, len(rays) - 1, remaining).round().astype(int)
            rays = rays[np.unique(keep)]

    pts = np.vstack([grid, rays])
    hit = np.flatnonzero(np.all(np.abs(pts - anchor) <= 1e-12 * (1 + np.abs(anchor)), axis=1))
    if hit.size:
        anchor_index = int(hit[0])
    else:
        pts = np.vstack([pts, anchor[None, :]])
        anchor_index = len(pts) - 1
    if not problem.in_region(anchor[None, :], anchor)[0]:
        raise DegenerateRegionError("anchor is not feasible")
    if len(pts) == 0:
        raise DegenerateRegionError("no sample point lies in the directional region")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        values = problem.values(pts)
    spacing = _spacing(pts, grid_step)
    pts.setflags(write=False)
    values.setflags(write=False)
    return SampleCloud(pts, values, anchor.copy(), spacing, anchor_index,
                       grid_count=len(grid), ray_count=len(rays))


def _drop_duplicates(new, existing, decimals=9):
    if len(existing) == 0 or len(new) == 0:
        return new
    seen = {tuple(r) for r in np.round(existing, decimals)}
    mask = np.array([tuple(r) not in seen for r in np.round(new, decimals)])
    return new[mask]


def _spacing(pts, fallback):
    if len(pts) < 2:
        return float(fallback)
    dist, _ = cKDTree(pts).query(pts, k=2)
    return float(dist[:, 1].max())


def diameter(points, mask=None) -> float:
    """Largest pairwise distance of a finite point set (0 for empty or singleton)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if mask is not None:
        pts = pts[np.asarray(mask, dtype=bool)]
    if len(pts) < 2:
        return 0.0
    if pts.shape[1] == 1:
        return float(np.ptp(pts[:, 0]))
    best = 0.0
    for i in range(0, len(pts), _DIAM_CHUNK):
        block = pts[i:i + _DIAM_CHUNK]
        d2 = np.sum((block[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
        best = max(best, float(d2.max()))
    return math.sqrt(best)


def infimum(cloud: SampleCloud, values=None):
    """Smallest value over the cloud and the first point attaining it."""
    vals = cloud.values if values is None else np.asarray(values, dtype=float)
    finite = np.isfinite(vals)
    if not finite.any():
        raise NoFiniteValueError("every sampled value is +inf")
    i = int(np.argmin(np.where(finite, vals, np.inf)))
    return float(vals[i]), cloud.points[i].copy()


def local_lipschitz(cloud: SampleCloud, radius=None) -> float:
    """Largest difference quotient |f(p) - f(anchor)| / |p - anchor| near the anchor."""
    radius = 4 * cloud.spacing if radius is None else radius
    d = np.linalg.norm(cloud.points - cloud.anchor, axis=1)
    near = (d > 0) & (d <= radius * (1 + 1e-9)) & np.isfinite(cloud.values)
    f0 = cloud.values[cloud.anchor_index]
    if not near.any() or not math.isfinite(f0):
        return 0.0
    return float(np.max(np.abs(cloud.values[near] - f0) / d[near]))
