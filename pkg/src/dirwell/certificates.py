"""Certificate sets, diameter sweeps, growth profiles and the combined verdict.

Every certificate is a quantified inequality ``lhs(x, y) <= eps * T(., .)``
checked over a finite quantifier sample.  Primed families quantify over the
cloud of D_anchor with ``T(x, y)``; unprimed families quantify over a sample
of D_x with ``T(y, x)``.  Where ``T`` is ``+inf`` the inequality is vacuous.

Family names: ``L``, ``G``, ``Gp``, ``H``, ``Hp``, ``P``, ``Pp``, ``Q``; the
variational-inequality families ``R``, ``Rp``, ``S``, ``Sp`` share the same
engine (see :mod:`dirwell.vi`).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cone import DirectionSet, minimal_time_matrix
from .errors import (GradientUndefinedError, InputError,
                     UnsupportedConfigurationError)
from .problem import (convexity_spotcheck, eval_objective, gradient_many,
                      subhomogeneity_spotcheck)
from .sampling import (SampleCloud, diameter, infimum, local_lipschitz,
                       sample_directional_region)
from .serialize import csv_text

DEFAULT_SCHEDULE = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5)
TOL_ABS = 1e-9
TOL_REL = 1e-9
WINDOW_NOTE = "within sampled window"
UNPRIMED_BUDGET = 256
HEMI_LAMBDA = 1e-10

FAMILIES = ("L", "G", "Gp", "H", "Hp", "P", "Pp", "Q")
VI_FAMILIES = ("R", "Rp", "S", "Sp")
_BLOCK = 256


def tolerance(lhs, rhs):
    """Slack allowed on ``lhs <= rhs``: absolute 1e-9 plus 1e-9 relative on each side."""
    return TOL_ABS + TOL_REL * (np.abs(lhs) + np.abs(rhs))


def leq(lhs, rhs) -> bool:
    if rhs == math.inf:
        return True
    return bool(lhs <= rhs + tolerance(lhs, rhs))


def check_schedule(schedule, min_len=4):
    eps = tuple(float(e) for e in schedule)
    if len(eps) < min_len:
        raise InputError(f"schedule needs at least {min_len} values")
    if any(not (e > 0 and math.isfinite(e)) for e in eps):
        raise InputError("schedule values must be positive and finite")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise InputError("schedule must be strictly decreasing")
    return eps


@dataclass(frozen=True)
class FamilyParams:
    family: str
    epsilon: float
    anchor: np.ndarray
    surrogate_inf: float

    def __post_init__(self):
        if self.family not in FAMILIES + VI_FAMILIES:
            raise InputError(f"unknown family {self.family!r}")
        if not self.epsilon > 0:
            raise InputError("epsilon must be positive")


# --- the quantified-inequality engine ---------------------------------------

def _require_smooth(problem):
    if not problem.f.smooth:
        raise GradientUndefinedError(
            f"objective {problem.f.name or '?'} is flagged nonsmooth; "
            "gradient families do not apply")


def _require_no_g(problem):
    g = problem.g
    if g is not None and g.document.get("builtin") != "zero":
        raise UnsupportedConfigurationError("S families are defined for g = 0 only")


def _dot_rows(A, B):
    return np.einsum("ij,ij->i", A, B)


class _Lhs:
    """Precomputes the y-dependent parts of a family's left-hand side."""

    def __init__(self, problem, kind, Y):
        self.problem, self.kind, self.Y = problem, kind, Y
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            if kind == "G":
                self.phi_y = problem.values(Y)
            elif kind in ("H", "P"):
                _require_smooth(problem)
            elif kind == "R":
                if problem.V is None:
                    raise InputError("R families need a vector field V")
            elif kind == "S":
                if problem.V is None:
                    raise InputError("S families need a vector field V")
                _require_no_g(problem)
                self.VY = problem.V(Y)
                self.VYY = _dot_rows(self.VY, Y)
            if kind in ("P", "R") and problem.g is not None and len(Y):
                self.g_y = problem.g.values(Y)
            else:
                self.g_y = None

    def matrices(self, X):
        """Left-hand sides for rows of ``X`` (a list: every entry must hold)."""
        p, Y = self.problem, self.Y
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            if self.kind == "G":
                return [p.values(X)[:, None] - self.phi_y[None, :]]
            if self.kind == "S":
                plain = X @ self.VY.T - self.VYY[None, :]
                # contraction points y_l = x - l (x - y), evaluated after dividing by l
                D = X[:, None, :] - Y[None, :, :]
                Yl = X[:, None, :] - HEMI_LAMBDA * D
                VYl = p.V(Yl.reshape(-1, p.dimension)).reshape(D.shape)
                contracted = np.einsum("ijk,ijk->ij", VYl, D)
                return [plain, contracted]
            W = gradient_many(p.f, X) if self.kind in ("H", "P") else p.V(X)
            out = _dot_rows(W, X)[:, None] - W @ Y.T
            if self.g_y is not None:
                out = out + p.g.values(X)[:, None] - self.g_y[None, :]
            return [out]


def quantified_masks(problem, kind, X, Y, epsilons, primed):
    """Evaluate a quantified family inequality.

    Returns ``(masks, excess)``: ``masks[e, i]`` says whether ``X[i]``
    satisfies the inequality for ``epsilons[e]`` against every row of ``Y``,
    and ``excess[e, i]`` is the largest ``lhs - rhs`` over finite-``T`` pairs.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float)).reshape(-1, problem.dimension)
    eps = np.atleast_1d(np.asarray(epsilons, dtype=float))
    masks = np.ones((len(eps), len(X)), dtype=bool)
    excess = np.full((len(eps), len(X)), -np.inf)
    if len(Y) == 0 or len(X) == 0:
        return masks, excess
    lhs_builder = _Lhs(problem, kind, Y)
    M = problem.directions
    for lo in range(0, len(X), _BLOCK):
        Xb = X[lo:lo + _BLOCK]
        T = minimal_time_matrix(M, Xb, Y) if primed else minimal_time_matrix(M, Y, Xb).T
        finite = np.isfinite(T)
        for lhs in lhs_builder.matrices(Xb):
            for e, ep in enumerate(eps):
                rhs = np.where(finite, ep * np.where(finite, T, 0.0), np.inf)
                with np.errstate(invalid="ignore"):
                    diff = lhs - rhs
                    ok = ~finite | (diff <= tolerance(lhs, rhs))
                masks[e, lo:lo + len(Xb)] &= ok.all(axis=1)
                worst = np.where(finite, np.nan_to_num(diff, nan=np.inf), -np.inf).max(axis=1)
                excess[e, lo:lo + len(Xb)] = np.maximum(excess[e, lo:lo + len(Xb)], worst)
    return masks, excess


def unprimed_quantifier(problem, x, cloud: Optional[SampleCloud] = None) -> np.ndarray:
    """Sample of D_x used by the unprimed families.

    On the full sphere D_x does not depend on x, so a supplied cloud is reused;
    otherwise a fresh sample anchored at ``x`` (at most 256 points) is drawn.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if not problem.feasible.contains(x)[0]:
        raise InputError("query point is not feasible")
    if problem.directions.full_sphere and cloud is not None:
        return cloud.points
    return sample_directional_region(problem, anchor=x, budget=UNPRIMED_BUDGET).points


_KIND = {"G": "G", "Gp": "G", "H": "H", "Hp": "H", "P": "P", "Pp": "P",
         "R": "R", "Rp": "R", "S": "S", "Sp": "S"}


def family_masks(problem, family, epsilons, cloud: SampleCloud, X=None):
    """Membership of ``X`` (default: the cloud points) in a family for each epsilon.

    Returns ``(masks, excess)`` shaped ``(len(epsilons), len(X))``.
    """
    eps = np.atleast_1d(np.asarray(epsilons, dtype=float))
    if np.any(eps <= 0):
        raise InputError("epsilon must be positive")
    X = cloud.points if X is None else np.atleast_2d(np.asarray(X, dtype=float))
    if family == "L":
        inf, _ = infimum(cloud)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            vals = cloud.values if X is cloud.points else problem.values(X)
        level = inf + eps[:, None]
        with np.errstate(invalid="ignore"):
            diff = vals[None, :] - level
            masks = diff <= tolerance(vals[None, :], level)
        return masks, diff
    if family == "Q":
        _require_smooth(problem)
        q = _dot_rows(gradient_many(problem.f, X), X - cloud.anchor)
        diff = q[None, :] - eps[:, None]
        return diff <= tolerance(q[None, :], eps[:, None]), diff
    if family not in _KIND:
        raise InputError(f"unknown family {family!r}")
    kind = _KIND[family]
    if family.endswith("p"):
        return quantified_masks(problem, kind, X, cloud.points, eps, primed=True)
    if problem.directions.full_sphere:
        return quantified_masks(problem, kind, X, cloud.points, eps, primed=False)
    masks = np.ones((len(eps), len(X)), dtype=bool)
    excess = np.full((len(eps), len(X)), -np.inf)
    for i, x in enumerate(X):
        Y = unprimed_quantifier(problem, x)
        m, ex = quantified_masks(problem, kind, x[None, :], Y, eps, primed=False)
        masks[:, i], excess[:, i] = m[:, 0], ex[:, 0]
    return masks, excess


def _member(problem, family, x, epsilon, cloud):
    x = np.asarray(x, dtype=float).reshape(1, -1)
    if cloud is not None:
        m, _ = family_masks(problem, family, [epsilon], cloud, X=x)
        return bool(m[0, 0])
    if family.endswith("p") or family in ("L", "Q"):
        raise InputError(f"family {family} needs a cloud of D_anchor")
    Y = unprimed_quantifier(problem, x[0])
    m, _ = quantified_masks(problem, _KIND[family], x, Y, [epsilon], primed=False)
    return bool(m[0, 0])


def member_L(problem, x, epsilon, cloud) -> bool:
    """x in L(anchor, eps): f(x) <= inf over the cloud + eps."""
    return _member(problem, "L", x, epsilon, cloud)


def member_G(problem, x, epsilon, cloud=None) -> bool:
    return _member(problem, "G", x, epsilon, cloud)


def member_Gp(problem, x, epsilon, cloud) -> bool:
    return _member(problem, "Gp", x, epsilon, cloud)


def member_H(problem, x, epsilon, cloud=None) -> bool:
    return _member(problem, "H", x, epsilon, cloud)


def member_Hp(problem, x, epsilon, cloud) -> bool:
    return _member(problem, "Hp", x, epsilon, cloud)


def member_P(problem, x, epsilon, cloud=None) -> bool:
    return _member(problem, "P", x, epsilon, cloud)


def member_Pp(problem, x, epsilon, cloud) -> bool:
    return _member(problem, "Pp", x, epsilon, cloud)


def member_Q(problem, x, epsilon, cloud) -> bool:
    """x in Q(anchor, eps): <f'(x), x - anchor> <= eps."""
    return _member(problem, "Q", x, epsilon, cloud)


# --- sweeps --------------------------------------------------------------------

def shrink_verdict(diameters, spacing):
    """Finite-sweep reading of ``diam -> 0``.

    shrinks: nonincreasing and the last diameter is at most
    ``max(4*spacing, 1e-6)``; does-not-shrink: the last diameter exceeds ten
    times that floor; otherwise inconclusive.
    """
    floor = max(4.0 * spacing, 1e-6)
    d = list(diameters)
    nonincreasing = all(b <= a + 1e-12 * (1 + a) for a, b in zip(d, d[1:]))
    if nonincreasing and d[-1] <= floor:
        return "shrinks"
    if d[-1] > 10.0 * floor:
        return "does-not-shrink"
    return "inconclusive"


@dataclass
class SweepReport:
    family: str
    epsilons: list
    diameters: list
    r_values: list
    members_count: list
    verdict: str
    spacing: float
    anchor: list
    floor: float
    window: str = WINDOW_NOTE
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "family": self.family, "epsilons": self.epsilons,
            "diameters": self.diameters, "r_values": self.r_values,
            "members_count": self.members_count, "verdict": self.verdict,
            "spacing": self.spacing, "anchor": self.anchor, "floor": self.floor,
            "window": self.window, "notes": self.notes,
            "tolerances": {"abs": TOL_ABS, "rel": TOL_REL},
        }

    def to_csv(self):
        rows = zip(self.epsilons, self.diameters, self.members_count)
        return csv_text(["epsilon", "diameter", "members_count"], rows)


def diameter_sweep(problem, family, schedule=DEFAULT_SCHEDULE, cloud=None) -> SweepReport:
    """Diameters of a certificate family along a decreasing epsilon schedule."""
    eps = check_schedule(schedule)
    if family not in FAMILIES + VI_FAMILIES:
        raise InputError(f"unknown family {family!r}")
    cloud = sample_directional_region(problem) if cloud is None else cloud
    masks, _ = family_masks(problem, family, eps, cloud)
    diams = [diameter(cloud.points, m) for m in masks]
    counts = [int(m.sum()) for m in masks]
    notes = []
    if any(c == 0 for c in counts):
        notes.append("empty certificate set counted with diameter 0")
    return SweepReport(
        family=family, epsilons=list(eps), diameters=diams,
        r_values=[d / 2 for d in diams], members_count=counts,
        verdict=shrink_verdict(diams, cloud.spacing), spacing=cloud.spacing,
        anchor=cloud.anchor.tolist(), floor=max(4 * cloud.spacing, 1e-6), notes=notes)


# --- growth profiles ----------------------------------------------------------

def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def slice_directions(M: DirectionSet, n_directions=64, seed=0) -> np.ndarray:
    """Unit directions of cone(M) used to sample the slices ``T(x, anchor) = t``.

    Generators are combined on a barycentric simplex grid; the full sphere
    uses +-1 in one dimension, equally spaced angles in two, and coordinate
    directions plus seeded random ones above that.
    """
    n = M.dim
    if M.full_sphere:
        if n == 1:
            return np.array([[1.0], [-1.0]])
        if n == 2:
            a = np.linspace(0, 2 * np.pi, n_directions, endpoint=False)
            return np.stack([np.cos(a), np.sin(a)], axis=1)
        eye = np.eye(n)
        base = np.vstack([eye, -eye])
        extra = max(0, n_directions - len(base))
        R = np.random.default_rng(seed).standard_normal((extra, n))
        R /= np.linalg.norm(R, axis=1, keepdims=True)
        return np.vstack([base, R])
    G = M.generators
    k = len(G)
    if k == 1:
        return G.copy()
    res = 1
    while math.comb(res + k - 1, k - 1) < n_directions:
        res += 1
    lam = np.array(list(_compositions(res, k)), dtype=float) / res
    U = lam @ G
    norms = np.linalg.norm(U, axis=1)
    U = U[norms > 1e-12] / norms[norms > 1e-12, None]
    _, idx = np.unique(np.round(U, 12), axis=0, return_index=True)
    return U[np.sort(idx)]


@dataclass
class AdmissibleProfile:
    which: str
    ts: list
    c_values: list
    tau: float
    verdict: str
    anchor: list
    spacing: float
    c_at_zero: float = 0.0
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {"which": self.which, "ts": self.ts, "c_values": self.c_values,
                "tau_adm": self.tau, "verdict": self.verdict, "anchor": self.anchor,
                "spacing": self.spacing, "c_at_zero": self.c_at_zero,
                "window": WINDOW_NOTE, "notes": self.notes}

    def to_csv(self):
        rows = zip(self.ts, self.c_values, [""] * len(self.ts))
        return csv_text(["t", "c_value", "members_count"], rows)


def default_t_grid(cloud: SampleCloud, cap=400):
    d = np.linalg.norm(cloud.points - cloud.anchor, axis=1)
    d = np.unique(np.round(d[d >= 10 * cloud.spacing], 12))
    if len(d) > cap:
        d = d[np.unique(np.linspace(0, len(d) - 1, cap).round().astype(int))]
    return d


def c_profile(problem, which="c0", ts=None, cloud=None, n_directions=64) -> AdmissibleProfile:
    """Growth profile t -> c(t) at the cloud's anchor.

    ``c0(t) = min f(x) - f(anchor)`` and ``c1(t) = min <f'(x), x - anchor>``
    over sampled points ``x = anchor - t*u`` with ``u`` a unit direction of
    cone(M), restricted to A and the sample box.  An empty slice gives +inf.
    """
    if which not in ("c0", "c1"):
        raise InputError("which must be 'c0' or 'c1'")
    if which == "c1":
        _require_smooth(problem)
    cloud = sample_directional_region(problem) if cloud is None else cloud
    xbar = cloud.anchor
    ts = default_t_grid(cloud) if ts is None else np.asarray(ts, dtype=float).reshape(-1)
    if np.any(ts <= 0):
        raise InputError("t grid must be positive")
    U = slice_directions(problem.directions, n_directions, problem.seed)
    f0 = eval_objective(problem.f, xbar)
    if problem.g is not None:
        f0 += eval_objective(problem.g, xbar)
    values = []
    for t in ts:
        P = xbar[None, :] - t * U
        keep = problem.feasible.contains(P) & np.all(
            (P >= problem.sample_lo - 1e-12) & (P <= problem.sample_hi + 1e-12), axis=1)
        P = P[keep]
        if len(P) == 0:
            values.append(math.inf)
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            if which == "c0":
                c = problem.values(P) - f0
            else:
                c = _dot_rows(gradient_many(problem.f, P), P - xbar)
        values.append(float(np.min(c)))
    tau = 4.0 * cloud.spacing * local_lipschitz(cloud)
    vals = np.array(values)
    notes = []
    if len(vals) == 0:
        verdict = "admissible"
        notes.append("empty t grid: trivially admissible")
    elif np.all(vals > tau):
        verdict = "admissible"
    else:
        verdict = "not-admissible"
    return AdmissibleProfile(which, [float(t) for t in ts], values, float(tau), verdict,
                             xbar.tolist(), cloud.spacing, 0.0, notes)


@dataclass
class Check:
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {"passed": self.passed, **self.details}


def scaling_inequality_check(profile: AdmissibleProfile, rel_tol=1e-6) -> Check:
    """c(s) <= (s/t) c(t) for every grid pair s < t with finite values."""
    ts = np.asarray(profile.ts, dtype=float)
    c = np.asarray(profile.c_values, dtype=float)
    ok = np.isfinite(c)
    ts, c = ts[ok], c[ok]
    order = np.argsort(ts)
    ts, c = ts[order], c[order]
    S, T = np.meshgrid(ts, ts, indexing="ij")
    CS, CT = np.meshgrid(c, c, indexing="ij")
    pair = S < T
    bound = S / T * CT
    viol = pair & (CS - bound > rel_tol * (np.abs(CS) + np.abs(bound)) + 1e-12)
    details = {"pairs": int(pair.sum()), "violations": int(viol.sum())}
    if viol.any():
        i, j = map(int, np.argwhere(viol)[0])
        details["witness"] = {"s": float(ts[i]), "t": float(ts[j]),
                              "c_s": float(c[i]), "c_t": float(c[j])}
    return Check(not viol.any(), details)


def radius_bound_check(problem, profile: AdmissibleProfile, cloud=None) -> Check:
    """t/2 - slack <= r(c0(t)) <= t + slack with slack = 2*spacing."""
    if profile.which != "c0":
        raise InputError("radius bound is stated for c0 profiles")
    cloud = sample_directional_region(problem, anchor=profile.anchor) if cloud is None else cloud
    slack = 2.0 * cloud.spacing
    rows, notes, passed = [], [], True
    for t, c in zip(profile.ts, profile.c_values):
        if not math.isfinite(c):
            notes.append(f"t={t}: c0 is +inf, skipped")
            continue
        if c <= 0:
            notes.append(f"t={t}: c0 is not positive, skipped")
            continue
        masks, _ = family_masks(problem, "L", [c], cloud)
        r = diameter(cloud.points, masks[0]) / 2
        ok = t / 2 - slack <= r <= t + slack
        passed &= ok
        rows.append({"t": t, "c0": c, "r": r, "ok": bool(ok)})
    return Check(passed, {"rows": rows, "slack": slack, "notes": notes})


_VERDICT_OF = {"shrinks": "well-posed", "does-not-shrink": "not-well-posed",
               "admissible": "well-posed", "not-admissible": "not-well-posed",
               "inconclusive": "inconclusive"}


def admissibility_crosscheck(problem, schedule=DEFAULT_SCHEDULE, cloud=None) -> Check:
    """Whether the c0 admissibility verdict matches the L-sweep verdict."""
    cloud = sample_directional_region(problem) if cloud is None else cloud
    prof = c_profile(problem, "c0", cloud=cloud)
    sweep = diameter_sweep(problem, "L", schedule, cloud=cloud)
    a, b = _VERDICT_OF[prof.verdict], _VERDICT_OF[sweep.verdict]
    if "inconclusive" in (a, b):
        agree = None
    else:
        agree = a == b
    return Check(bool(agree), {"c0_verdict": prof.verdict, "L_verdict": sweep.verdict,
                               "agree": agree})


# --- combined report -------------------------------------------------------------

@dataclass
class WellposednessReport:
    overall: str
    criteria: dict
    agreement: dict
    hard_disagreement: bool
    anchor: list
    certificate_anchor: list
    spot_checks: dict
    schedule: list
    spacing: float
    seed: int
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "overall": self.overall, "criteria": self.criteria,
            "agreement": self.agreement, "hard_disagreement": self.hard_disagreement,
            "anchor": self.anchor, "certificate_anchor": self.certificate_anchor,
            "spot_checks": self.spot_checks, "schedule": self.schedule,
            "spacing": self.spacing, "seed": self.seed, "window": WINDOW_NOTE,
            "tolerances": {"abs": TOL_ABS, "rel": TOL_REL}, "notes": self.notes,
        }


def _in_all(problem, family, x, schedule, cloud):
    masks, _ = family_masks(problem, family, schedule, cloud, X=np.asarray(x)[None, :])
    return bool(masks[:, 0].all())


def combine_verdicts(verdicts):
    """Overall verdict and pairwise agreement for a dict name -> verdict."""
    names = sorted(verdicts)
    agreement, hard = {}, False
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            va, vb = verdicts[a], verdicts[b]
            if "inconclusive" in (va, vb):
                agreement[f"{a}|{b}"] = "n/a"
            elif va == vb:
                agreement[f"{a}|{b}"] = "agree"
            else:
                agreement[f"{a}|{b}"] = "disagree"
                hard = True
    vals = set(verdicts.values())
    if vals == {"well-posed"}:
        overall = "well-posed"
    elif vals == {"not-well-posed"}:
        overall = "not-well-posed"
    else:
        overall = "inconclusive"
    return overall, agreement, hard


def wellposedness_report(problem, schedule=DEFAULT_SCHEDULE, trials=200) -> WellposednessReport:
    """Run every applicable criterion and combine the verdicts.

    The L-sweep and the c0 profile always run.  G' needs a passing convexity
    check; H' and Q additionally need a smooth objective (Q also a passing
    subhomogeneity check); P' runs when a second objective g is present.
    Primed families are anchored at the cloud minimizer ``x*`` (the anchor
    itself when it attains the sampled infimum).
    """
    if problem.anchor is None:
        raise InputError("the report needs an anchor")
    eps = check_schedule(schedule)
    cloud0 = sample_directional_region(problem)
    inf0, arg0 = infimum(cloud0)
    f_anchor = cloud0.values[cloud0.anchor_index]
    notes = []
    if leq(f_anchor, inf0):
        xstar, cloud = problem.anchor.copy(), cloud0
    else:
        xstar = arg0
        cloud = sample_directional_region(problem, anchor=xstar)
        notes.append("anchor is not a sampled minimizer; certificates use the cloud argmin")

    box = (problem.sample_lo, problem.sample_hi)
    convex = convexity_spotcheck(problem.f, box, trials, problem.seed, problem.feasible)
    g_convex = (convexity_spotcheck(problem.g, box, trials, problem.seed, problem.feasible)
                if problem.g is not None else None)
    subhom = subhomogeneity_spotcheck(problem.f, xstar, cloud.points, trials, problem.seed)
    smooth = problem.f.smooth
    spot = {"convexity": convex.to_dict(), "subhomogeneity": subhom.to_dict(),
            "smooth": smooth}
    if g_convex is not None:
        spot["g_convexity"] = g_convex.to_dict()

    criteria, verdicts = {}, {}

    def record(name, applicable, reason, verdict=None, details=None):
        criteria[name] = {"applicable": applicable, "reason": reason,
                          "verdict": verdict, "details": details}
        if applicable:
            verdicts[name] = verdict

    sweep_L = diameter_sweep(problem, "L", eps, cloud=cloud0)
    record("L", True, "always", _VERDICT_OF[sweep_L.verdict], sweep_L.to_dict())

    prof = c_profile(problem, "c0", cloud=cloud)
    record("c0", True, "always", _VERDICT_OF[prof.verdict], prof.to_dict())

    has_g = problem.g is not None
    if convex.passed:
        if _in_all(problem, "G", xstar, eps, cloud):
            sw = diameter_sweep(problem, "Gp", eps, cloud=cloud)
            record("Gp", True, "convexity passed", _VERDICT_OF[sw.verdict], sw.to_dict())
        else:
            record("Gp", True, "convexity passed", "inconclusive",
                   {"note": "x* is not in every sampled G(eps)"})
    else:
        record("Gp", False, "convexity spot check failed")

    if convex.passed and smooth and not has_g:
        if _in_all(problem, "H", xstar, eps, cloud):
            sw = diameter_sweep(problem, "Hp", eps, cloud=cloud)
            record("Hp", True, "convex and smooth", _VERDICT_OF[sw.verdict], sw.to_dict())
        else:
            record("Hp", True, "convex and smooth", "inconclusive",
                   {"note": "x* is not in every sampled H(eps)"})
    else:
        record("Hp", False, "needs convexity, smoothness and no g")

    if convex.passed and subhom.passed and smooth and not has_g:
        sw = diameter_sweep(problem, "Q", eps, cloud=cloud)
        record("Q", True, "convex, subhomogeneous and smooth",
               _VERDICT_OF[sw.verdict], sw.to_dict())
    else:
        record("Q", False, "needs convexity, subhomogeneity, smoothness and no g")

    if has_g:
        if convex.passed and g_convex.passed and smooth:
            if _in_all(problem, "P", xstar, eps, cloud):
                sw = diameter_sweep(problem, "Pp", eps, cloud=cloud)
                record("Pp", True, "f convex smooth, g convex",
                       _VERDICT_OF[sw.verdict], sw.to_dict())
            else:
                record("Pp", True, "f convex smooth, g convex", "inconclusive",
                       {"note": "x* is not in every sampled P(eps)"})
        else:
            record("Pp", False, "needs f convex and smooth, g convex")
    else:
        record("Pp", False, "no second objective g")

    overall, agreement, hard = combine_verdicts(verdicts)
    return WellposednessReport(
        overall=overall, criteria=criteria, agreement=agreement, hard_disagreement=hard,
        anchor=problem.anchor.tolist(), certificate_anchor=xstar.tolist(),
        spot_checks=spot, schedule=list(eps), spacing=cloud0.spacing,
        seed=problem.seed, notes=notes)
