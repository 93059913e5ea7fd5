"""Directional variational inequalities.

A VI problem is an ordinary :class:`~dirwell.problem.Problem` whose document
carries a vector field ``V`` (the optional ``g`` doubles as the VI's second
term).  The R/R'/S/S' families reuse the quantifier engine of
:mod:`dirwell.certificates`.  Hemicontinuity is assumed, not checked: affine
and expression fields are continuous.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from .certificates import (DEFAULT_SCHEDULE, TOL_ABS, TOL_REL, WINDOW_NOTE, SweepReport,
                           _member, check_schedule, diameter_sweep, family_masks,
                           tolerance)
from .cone import minimal_time_matrix
from .errors import InputError, PreconditionError, UnsupportedConfigurationError
from .problem import Problem, monotonicity_spotcheck, parse_problem
from .sampling import SampleCloud, diameter, sample_directional_region

BAND = 10 * TOL_ABS


def parse_vi_problem(document) -> Problem:
    """Parse a problem document that must define ``V``."""
    p = parse_problem(document)
    if p.V is None:
        raise InputError("a VI document needs a vector field V")
    return p


def _g_values(vi, X):
    if vi.g is None:
        return np.zeros(len(X))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return vi.g.values(X)


def _g_is_zero(vi):
    return vi.g is None or vi.g.document.get("builtin") == "zero"


def solution_excess(vi, X, Y) -> np.ndarray:
    """max over y of <V(x), x - y> + g(x) - g(y) for each row x of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    VX = vi.V(X)
    gX, gY = _g_values(vi, X), _g_values(vi, Y)
    out = np.empty(len(X))
    for lo in range(0, len(X), 512):
        V = VX[lo:lo + 512]
        Xb = X[lo:lo + 512]
        lhs = np.einsum("ij,ij->i", V, Xb)[:, None] - V @ Y.T
        lhs = lhs + gX[lo:lo + 512, None] - gY[None, :]
        lhs = lhs - tolerance(lhs, 0.0)
        out[lo:lo + 512] = lhs.max(axis=1)
    return out


def directional_solution_check(vi, xbar, cloud: Optional[SampleCloud] = None) -> bool:
    """<V(xbar), xbar - y> + g(xbar) - g(y) <= tol for every sampled y in D_xbar."""
    xbar = np.asarray(xbar, dtype=float).reshape(-1)
    if not vi.feasible.contains(xbar)[0]:
        raise InputError("xbar is not feasible")
    if cloud is None:
        cloud = sample_directional_region(vi, anchor=xbar)
    return bool(solution_excess(vi, xbar[None, :], cloud.points)[0] <= 0)


def member_R(vi, x, epsilon, cloud=None) -> bool:
    return _member(vi, "R", x, epsilon, cloud)


def member_Rp(vi, x, epsilon, cloud) -> bool:
    return _member(vi, "Rp", x, epsilon, cloud)


def member_S(vi, x, epsilon, cloud=None) -> bool:
    if not _g_is_zero(vi):
        raise UnsupportedConfigurationError("S families are defined for g = 0 only")
    return _member(vi, "S", x, epsilon, cloud)


def member_Sp(vi, x, epsilon, cloud) -> bool:
    if not _g_is_zero(vi):
        raise UnsupportedConfigurationError("S families are defined for g = 0 only")
    return _member(vi, "Sp", x, epsilon, cloud)


def _box(vi):
    return vi.sample_lo, vi.sample_hi


@dataclass
class MintyResult:
    rate: float
    disagreements: int
    in_band: int
    points: int

    @property
    def all_in_band(self):
        return self.disagreements == self.in_band

    def to_dict(self):
        return {"rate": self.rate, "disagreements": self.disagreements,
                "in_band": self.in_band, "points": self.points,
                "all_in_band": self.all_in_band}


def minty_details(vi, epsilon, cloud=None, check_monotone=True, trials=200) -> MintyResult:
    """Compare R with S and R' with S' pointwise on the cloud.

    A point agrees when both pairs give the same membership; a disagreement
    whose violated side exceeds its bound by at most ``10 * 1e-9`` is counted
    as agreement (it sits inside the tolerance band).
    """
    if check_monotone and not monotonicity_spotcheck(vi.V, _box(vi), trials, vi.seed).passed:
        raise PreconditionError("vector field failed the monotonicity spot check")
    cloud = sample_directional_region(vi) if cloud is None else cloud
    agree = np.ones(len(cloud), dtype=bool)
    in_band = np.zeros(len(cloud), dtype=bool)
    for a, b in (("R", "S"), ("Rp", "Sp")):
        ma, ea = family_masks(vi, a, [epsilon], cloud)
        mb, eb = family_masks(vi, b, [epsilon], cloud)
        ma, ea, mb, eb = ma[0], ea[0], mb[0], eb[0]
        differ = ma != mb
        worst = np.where(ma, eb, ea)  # excess of whichever side failed
        band = differ & (worst <= BAND * (1 + np.abs(worst)))
        agree &= ~differ | band
        in_band |= band
    dis = int((in_band).sum() + (~agree).sum())
    rate = float(agree.mean())
    return MintyResult(rate, dis, int(in_band.sum()), len(cloud))


def minty_agreement(vi, epsilon, cloud=None) -> float:
    """Fraction of cloud points where R/S and R'/S' memberships agree."""
    return minty_details(vi, epsilon, cloud).rate


def local_lift_check(vi, xbar, epsilon, tbar, cloud=None) -> dict:
    """Local-to-global lift of the R and R' inequalities at ``xbar`` (g = 0).

    The local hypothesis is checked on sampled y with ``T(y, xbar) <= tbar``
    (resp. ``T(xbar, y) < tbar``); the conclusion on the whole sample of
    D_xbar.  Verdicts: pass, vacuous-pass (hypothesis fails), fail
    (hypothesis holds but the conclusion does not) or inconclusive (no
    sampled y in the local window).
    """
    if not tbar > 0:
        raise InputError("tbar must be positive")
    if not _g_is_zero(vi):
        raise UnsupportedConfigurationError("the lift statements assume g = 0")
    xbar = np.asarray(xbar, dtype=float).reshape(-1)
    cloud = sample_directional_region(vi, anchor=xbar) if cloud is None else cloud
    Y = cloud.points
    v = vi.V(xbar)
    lhs = (xbar - Y) @ v
    M = vi.directions
    out = {}
    for name, T, local in (
        ("R", minimal_time_matrix(M, Y, xbar[None, :])[:, 0], lambda t: t <= tbar),
        ("Rp", minimal_time_matrix(M, xbar[None, :], Y)[0], lambda t: t < tbar),
    ):
        finite = np.isfinite(T)
        rhs = epsilon * np.where(finite, T, 0.0)
        ok = ~finite | (lhs <= rhs + tolerance(lhs, rhs))
        window = finite & local(T) & (T > TOL_ABS)
        if not window.any():
            out[name] = {"verdict": "inconclusive", "note": "no sampled point in the local window"}
            continue
        hyp = bool(ok[window].all())
        concl = bool(ok.all())
        if not hyp:
            verdict = "vacuous-pass"
        elif concl:
            verdict = "pass"
        else:
            verdict = "fail"
        out[name] = {"verdict": verdict, "hypothesis": hyp, "conclusion": concl,
                     "local_points": int(window.sum())}
    # a part without local samples carries no evidence either way
    verdicts = {d["verdict"] for d in out.values()} - {"inconclusive"}
    if not verdicts:
        overall = "inconclusive"
    elif "fail" in verdicts:
        overall = "fail"
    elif verdicts == {"vacuous-pass"}:
        overall = "vacuous-pass"
    else:
        overall = "pass"
    return {"verdict": overall, "parts": out, "epsilon": epsilon, "tbar": tbar}


def cluster_points(points, radius):
    """Single-linkage clusters with merge distance ``radius``; returns a list of arrays."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if len(pts) == 0:
        return []
    if len(pts) == 1:
        return [pts]
    labels = fcluster(linkage(pts, method="single"), t=radius * (1 + 1e-9),
                      criterion="distance")
    return [pts[labels == k] for k in np.unique(labels)]


@dataclass
class VIReport:
    verdict: str
    solutions_found: list
    clusters: list
    uniqueness: bool
    R_sweep: Optional[SweepReport]
    minty_agreement_rate: Optional[float]
    candidate: Optional[list]
    monotone: dict
    schedule: list
    spacing: float
    seed: int
    approximate_solutions: bool = False
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "verdict": self.verdict, "solutions_found": self.solutions_found,
            "clusters": self.clusters, "uniqueness": self.uniqueness,
            "R_sweep": self.R_sweep.to_dict() if self.R_sweep else None,
            "minty_agreement_rate": self.minty_agreement_rate,
            "candidate": self.candidate, "monotonicity": self.monotone,
            "hemicontinuity": "assumed (continuous field)",
            "schedule": self.schedule, "spacing": self.spacing, "seed": self.seed,
            "approximate_solutions": self.approximate_solutions,
            "window": WINDOW_NOTE, "intersection": "within schedule",
            "tolerances": {"abs": TOL_ABS, "rel": TOL_REL}, "notes": self.notes,
        }

    def to_csv(self):
        return self.R_sweep.to_csv() if self.R_sweep else "epsilon,diameter,members_count\n"


def vi_wellposedness_report(vi, schedule=DEFAULT_SCHEDULE, trials=200) -> VIReport:
    """Candidate search in the intersection of R(eps), R' sweep and uniqueness check."""
    if vi.V is None:
        raise InputError("a VI problem needs a vector field V")
    if vi.anchor is None:
        raise InputError("the VI report needs an anchor")
    eps = check_schedule(schedule)
    mono = monotonicity_spotcheck(vi.V, _box(vi), trials, vi.seed)
    cloud0 = sample_directional_region(vi)
    masks, excess = family_masks(vi, "R", eps, cloud0)
    inside = masks.all(axis=0)
    notes = []
    base = dict(schedule=list(eps), spacing=cloud0.spacing, seed=vi.seed,
                monotone=mono.to_dict())
    if not inside.any():
        notes.append("no sampled point lies in every R(eps) of the schedule")
        worst = excess.max(axis=0)
        i = int(np.argmin(worst))
        notes.append(f"closest point {cloud0.points[i].tolist()} with excess {float(worst[i])!r}")
        return VIReport("not-well-posed", [], [], False, None, None, None, notes=notes, **base)
    if inside[cloud0.anchor_index]:
        cand = cloud0.points[cloud0.anchor_index]
    else:
        worst = np.where(inside, excess.max(axis=0), np.inf)
        cand = cloud0.points[int(np.argmin(worst))]
        notes.append("anchor is not in every R(eps); using the best sampled candidate")

    cloud = sample_directional_region(vi, anchor=cand)
    sweep = diameter_sweep(vi, "Rp", eps, cloud=cloud)

    sol_mask = solution_excess(vi, cloud.points, cloud.points) <= 0
    approximate = False
    if sol_mask.any():
        sols = cloud.points[sol_mask]
    else:
        m, _ = family_masks(vi, "Rp", [eps[-1]], cloud)
        sols = cloud.points[m[0]]
        approximate = True
        notes.append("no sampled point passes the strict solution test; "
                     "reporting R'(eps_min) instead")
    radius = 2 * cloud.spacing
    clusters = cluster_points(sols, radius)
    unique = len(clusters) == 1 and diameter(clusters[0]) <= radius

    rate = None
    if mono.passed and _g_is_zero(vi):
        rate = min(minty_details(vi, e, cloud, check_monotone=False).rate for e in eps[:2])

    if sweep.verdict == "shrinks" and unique:
        verdict = "well-posed"
    elif sweep.verdict == "does-not-shrink" or not unique:
        verdict = "not-well-posed"
    else:
        verdict = "inconclusive"
    cl = [{"size": len(c), "center": c.mean(axis=0).tolist(), "diameter": diameter(c)}
          for c in clusters]
    return VIReport(verdict, sols.tolist(), cl, unique, sweep, rate, cand.tolist(),
                    approximate_solutions=approximate, notes=notes, **base)
