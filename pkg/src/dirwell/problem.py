"""Problem data: feasible sets, objectives, vector fields and documents.

Problems are described by JSON documents (see ``PROBLEM_SCHEMA``) and parsed
into immutable objects.  Objectives evaluate on batches of points, which is
how every downstream module uses them.
"""
from __future__ import annotations

import copy
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import jsonschema
import numpy as np

from .cone import DirectionSet, domain_contains_many
from .errors import (EvaluationError, GradientUndefinedError, InputError,
                     ProblemError)
from .expressions import compile_expression

_VEC = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_SET_SCHEMA = {
    "type": "object",
    "required": ["shape"],
    "properties": {
        "shape": {"enum": ["box", "halfspaces", "ball", "whole"]},
        "lo": _VEC, "hi": _VEC,
        "A": {"type": "array", "items": _VEC}, "b": _VEC,
        "center": _VEC, "radius": {"type": "number", "exclusiveMinimum": 0},
    },
}
_OBJ_SCHEMA = {
    "type": "object",
    "properties": {
        "builtin": {"type": "string"},
        "expr": {"type": "string"},
        "grad": {"type": "array", "items": {"type": "string"}},
        "smooth": {"type": "boolean"},
        "finite_region": _SET_SCHEMA,
    },
    "oneOf": [{"required": ["builtin"]}, {"required": ["expr"]}],
}
PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["dimension", "feasible", "f", "M", "sample_box", "budget"],
    "properties": {
        "name": {"type": "string"},
        "dimension": {"type": "integer", "minimum": 1},
        "feasible": _SET_SCHEMA,
        "f": _OBJ_SCHEMA,
        "g": _OBJ_SCHEMA,
        "M": {
            "type": "object",
            "properties": {
                "generators": {"type": "array", "items": _VEC, "minItems": 1},
                "full_sphere": {"type": "boolean"},
                "tol": {"type": "number", "minimum": 0},
            },
            "oneOf": [{"required": ["generators"]},
                      {"required": ["full_sphere"]}],
        },
        "anchor": _VEC,
        "sample_box": {"type": "object", "required": ["lo", "hi"],
                       "properties": {"lo": _VEC, "hi": _VEC}},
        "budget": {"type": "integer", "minimum": 100},
        "seed": {"type": "integer", "minimum": 0},
        "notes": {"type": "array", "items": {"type": "string"}},
        "V": {
            "type": "object",
            "properties": {
                "affine": {"type": "object", "required": ["matrix", "offset"],
                           "properties": {"matrix": {"type": "array", "items": _VEC},
                                          "offset": _VEC}},
                "expr": {"type": "array", "items": {"type": "string"}},
            },
            "oneOf": [{"required": ["affine"]}, {"required": ["expr"]}],
        },
    },
}

_MEMBER_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FeasibleSet:
    """Closed convex set: a box, an intersection of halfspaces, a ball or R^n."""

    shape: str
    dim: int
    params: dict = field(default_factory=dict)

    def contains(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        p = self.params
        if self.shape == "whole":
            return np.ones(len(X), dtype=bool)
        if self.shape == "box":
            return np.all((X >= p["lo"] - _MEMBER_TOL) & (X <= p["hi"] + _MEMBER_TOL), axis=1)
        if self.shape == "halfspaces":
            lhs = X @ p["A"].T
            return np.all(lhs <= p["b"] + _MEMBER_TOL * (1 + np.abs(p["b"])), axis=1)
        if self.shape == "ball":
            r = np.linalg.norm(X - p["center"], axis=1)
            return r <= p["radius"] * (1 + _MEMBER_TOL)
        raise AssertionError(self.shape)

    @property
    def convex(self):
        return True

    def bounding_box(self):
        """An enclosing box, or ``None`` when the set is unbounded."""
        if self.shape == "box":
            return self.params["lo"].copy(), self.params["hi"].copy()
        if self.shape == "ball":
            c, r = self.params["center"], self.params["radius"]
            return c - r, c + r
        return None

    def to_dict(self):
        out = {"shape": self.shape}
        for k, v in self.params.items():
            out[k] = v.tolist() if isinstance(v, np.ndarray) else v
        return out

    @classmethod
    def from_dict(cls, doc, dim):
        shape = doc["shape"]
        params = {}
        try:
            if shape == "box":
                lo, hi = _vec(doc["lo"], dim), _vec(doc["hi"], dim)
                if np.any(lo > hi):
                    raise ProblemError("box needs lo <= hi", code="E_SCHEMA")
                params = {"lo": lo, "hi": hi}
            elif shape == "halfspaces":
                A = np.asarray(doc["A"], dtype=float)
                b = np.asarray(doc["b"], dtype=float)
                if A.ndim != 2 or A.shape[1] != dim or b.shape != (A.shape[0],):
                    raise ProblemError("halfspaces need A (m x n) and b (m)")
                params = {"A": A, "b": b}
            elif shape == "ball":
                params = {"center": _vec(doc["center"], dim), "radius": float(doc["radius"])}
        except KeyError as exc:
            raise ProblemError(f"feasible set {shape!r} missing field {exc}") from None
        return cls(shape, dim, params)


def _vec(v, dim, what="vector"):
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (dim,):
        raise ProblemError(f"{what} must have {dim} entries, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ProblemError(f"{what} must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class Objective:
    """Real-valued (or extended real-valued) function on R^n.

    ``func`` maps a batch ``(N, n)`` to ``(N,)``; ``grad_func`` (optional)
    maps ``(N, n)`` to ``(N, n)``.  When ``region`` is set the objective is
    extended: it equals ``+inf`` outside that closed set.
    """

    func: Callable
    dim: int
    grad_func: Optional[Callable] = None
    smooth: bool = True
    region: Optional[FeasibleSet] = None
    document: dict = field(default_factory=dict)
    name: str = ""

    @property
    def extended(self):
        return self.region is not None

    def values(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out = np.asarray(self.func(X), dtype=float).reshape(len(X))
        if np.isnan(out).any():
            i = int(np.flatnonzero(np.isnan(out))[0])
            raise EvaluationError(f"objective {self.name or '?'} is NaN at {X[i].tolist()}")
        if np.isneginf(out).any():
            raise EvaluationError("objective evaluated to -inf")
        if np.isposinf(out).any():
            warnings.warn(f"objective {self.name or '?'} overflowed to +inf",
                          RuntimeWarning, stacklevel=2)
        if self.region is not None:
            out = np.where(self.region.contains(X), out, math.inf)
        return out

    def __call__(self, x):
        return eval_objective(self, x)


def eval_objective(o: Objective, x) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (o.dim,):
        raise InputError(f"point has dimension {x.size}, objective expects {o.dim}")
    return float(o.values(x[None, :])[0])


def gradient_many(o: Objective, X) -> np.ndarray:
    """Gradients at each row of ``X`` (analytic if available, else central differences)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if o.region is not None and not o.region.contains(X).all():
        raise GradientUndefinedError("gradient requested outside the finite region")
    if o.grad_func is not None:
        with np.errstate(over="ignore", invalid="ignore"):
            G = np.asarray(o.grad_func(X), dtype=float).reshape(X.shape)
        if not np.all(np.isfinite(G)):
            raise GradientUndefinedError("analytic gradient is not finite")
        return G
    h = 1e-6 * (1.0 + np.linalg.norm(X, axis=1))
    G = np.empty_like(X)
    for i in range(o.dim):
        step = np.zeros_like(X)
        step[:, i] = h
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            fp = o.values(X + step)
            fm = o.values(X - step)
        if not (np.all(np.isfinite(fp)) and np.all(np.isfinite(fm))):
            raise GradientUndefinedError("+inf inside the finite-difference stencil")
        G[:, i] = (fp - fm) / (2 * h)
    return G


def gradient(o: Objective, x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (o.dim,):
        raise InputError(f"point has dimension {x.size}, objective expects {o.dim}")
    return gradient_many(o, x[None, :])[0]


def objective_from_dict(doc, dim) -> Objective:
    from .catalog import builtin_objective

    if "builtin" in doc:
        obj = builtin_objective(doc["builtin"], dim)
        region = None
        if "finite_region" in doc:
            region = FeasibleSet.from_dict(doc["finite_region"], dim)
        return Objective(obj.func, dim, obj.grad_func, obj.smooth, region,
                         copy.deepcopy(doc), obj.name)
    func = compile_expression(doc["expr"], dim)
    grad_func = None
    if "grad" in doc:
        if len(doc["grad"]) != dim:
            raise ProblemError(f"grad needs {dim} component expressions", code="E_EXPR")
        comps = [compile_expression(s, dim) for s in doc["grad"]]

        def grad_func(X, comps=comps):
            return np.stack([c(X) for c in comps], axis=-1)
    region = FeasibleSet.from_dict(doc["finite_region"], dim) if "finite_region" in doc else None
    smooth = bool(doc.get("smooth", "abs(" not in doc["expr"]
                          and "min(" not in doc["expr"] and "max(" not in doc["expr"]))
    return Objective(func, dim, grad_func, smooth, region, copy.deepcopy(doc), doc["expr"])


@dataclass(frozen=True, eq=False)
class VectorField:
    """Map R^n -> R^n, affine ``Ax + b`` or one expression per coordinate."""

    kind: str
    dim: int
    matrix: Optional[np.ndarray] = None
    offset: Optional[np.ndarray] = None
    components: tuple = ()
    document: dict = field(default_factory=dict)

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X2 = np.atleast_2d(X)
        if self.kind == "affine":
            out = X2 @ self.matrix.T + self.offset
        else:
            out = np.stack([c(X2) for c in self.components], axis=-1)
        if not np.all(np.isfinite(out)):
            raise EvaluationError("vector field is not finite")
        return out[0] if single else out

    @classmethod
    def affine(cls, matrix, offset=None):
        A = np.atleast_2d(np.asarray(matrix, dtype=float))
        n = A.shape[0]
        if A.shape != (n, n):
            raise ProblemError("affine field needs a square matrix")
        b = np.zeros(n) if offset is None else _vec(offset, n, "offset")
        doc = {"affine": {"matrix": A.tolist(), "offset": b.tolist()}}
        return cls("affine", n, A, b, (), doc)

    @classmethod
    def from_dict(cls, doc, dim):
        if "affine" in doc:
            field_ = cls.affine(doc["affine"]["matrix"], doc["affine"]["offset"])
            if field_.dim != dim:
                raise ProblemError(f"V must be {dim}-dimensional")
            return field_
        exprs = doc["expr"]
        if len(exprs) != dim:
            raise ProblemError(f"V needs {dim} component expressions", code="E_EXPR")
        comps = tuple(compile_expression(s, dim) for s in exprs)
        return cls("expr", dim, None, None, comps, copy.deepcopy(doc))


@dataclass(frozen=True, eq=False)
class Problem:
    """Constrained minimization of ``f`` (+ ``g``) over ``feasible`` with directions ``M``."""

    dimension: int
    feasible: FeasibleSet
    f: Objective
    directions: DirectionSet
    sample_lo: np.ndarray
    sample_hi: np.ndarray
    budget: int
    g: Optional[Objective] = None
    anchor: Optional[np.ndarray] = None
    seed: int = 0
    name: str = ""
    notes: tuple = ()
    V: Optional[VectorField] = None

    def values(self, X) -> np.ndarray:
        """Values of the full objective f + g."""
        out = self.f.values(X)
        if self.g is not None:
            out = out + self.g.values(X)
        return out

    def in_region(self, X, anchor=None) -> np.ndarray:
        """Membership in D_anchor = A ∩ (anchor - cone(M))."""
        anchor = self.anchor if anchor is None else np.asarray(anchor, float)
        X = np.atleast_2d(np.asarray(X, dtype=float))
        ok = self.feasible.contains(X)
        if ok.any():
            ok[ok] = domain_contains_many(self.directions, X[ok], anchor)
        return ok

    def with_anchor(self, anchor) -> "Problem":
        anchor = _vec(anchor, self.dimension, "anchor")
        if not self.feasible.contains(anchor)[0]:
            raise ProblemError("anchor is not feasible", code="E_ANCHOR")
        return _replace(self, anchor=anchor)

    def with_budget(self, budget) -> "Problem":
        return _replace(self, budget=int(budget))

    def to_document(self) -> dict:
        doc = {
            "dimension": self.dimension,
            "feasible": self.feasible.to_dict(),
            "f": copy.deepcopy(self.f.document),
            "M": ({"full_sphere": True, "tol": self.directions.tol_cone}
                  if self.directions.full_sphere else
                  {"generators": self.directions.generators.tolist(),
                   "tol": self.directions.tol_cone}),
            "sample_box": {"lo": self.sample_lo.tolist(), "hi": self.sample_hi.tolist()},
            "budget": self.budget,
            "seed": self.seed,
        }
        if self.name:
            doc["name"] = self.name
        if self.notes:
            doc["notes"] = list(self.notes)
        if self.g is not None:
            doc["g"] = copy.deepcopy(self.g.document)
        if self.anchor is not None:
            doc["anchor"] = self.anchor.tolist()
        if self.V is not None:
            doc["V"] = copy.deepcopy(self.V.document)
        return doc


def _replace(problem, **changes):
    kw = {k: getattr(problem, k) for k in problem.__dataclass_fields__}
    kw.update(changes)
    return Problem(**kw)


def parse_problem(document) -> Problem:
    """Build a validated :class:`Problem` from a document.

    ``document`` may be a dict, JSON text, or the name of a catalog problem.
    """
    from .catalog import catalog_document

    if isinstance(document, str):
        text = document.strip()
        if text.startswith("{"):
            try:
                document = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ProblemError(f"invalid JSON: {exc}") from None
        else:
            document = catalog_document(text)
    if not isinstance(document, dict):
        raise ProblemError("problem document must be a JSON object")
    try:
        jsonschema.validate(document, PROBLEM_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ProblemError(f"schema violation at {where}: {exc.message}") from None

    dim = document["dimension"]
    feasible = FeasibleSet.from_dict(document["feasible"], dim)
    f = objective_from_dict(document["f"], dim)
    g = objective_from_dict(document["g"], dim) if "g" in document else None

    m_doc = document["M"]
    tol = float(m_doc.get("tol", 1e-9))
    try:
        if m_doc.get("full_sphere"):
            M = DirectionSet.sphere(dim, tol_cone=tol)
        else:
            gens = np.asarray(m_doc["generators"], dtype=float)
            if gens.ndim != 2 or gens.shape[1] != dim:
                raise ProblemError(f"generators must have {dim} coordinates",
                                   code="E_GENERATOR")
            M = DirectionSet(gens, tol_cone=tol)
    except InputError as exc:
        raise ProblemError(str(exc), code="E_GENERATOR") from None

    lo = _vec(document["sample_box"]["lo"], dim, "sample_box.lo")
    hi = _vec(document["sample_box"]["hi"], dim, "sample_box.hi")
    if np.any(lo >= hi):
        raise ProblemError("sample_box needs lo < hi", code="E_BOX")
    anchor = None
    if "anchor" in document:
        anchor = _vec(document["anchor"], dim, "anchor")
        if not feasible.contains(anchor)[0]:
            raise ProblemError("anchor is not feasible", code="E_ANCHOR")
    bbox = feasible.bounding_box()
    if bbox is not None and (np.any(bbox[0] > hi) or np.any(bbox[1] < lo)):
        raise ProblemError("sample_box does not meet the feasible set", code="E_BOX")
    V = VectorField.from_dict(document["V"], dim) if "V" in document else None
    return Problem(
        dimension=dim, feasible=feasible, f=f, directions=M, sample_lo=lo,
        sample_hi=hi, budget=int(document["budget"]), g=g, anchor=anchor,
        seed=int(document.get("seed", 0)), name=document.get("name", ""),
        notes=tuple(document.get("notes", ())), V=V)


# --- hypothesis spot checks -------------------------------------------------

@dataclass
class SpotCheck:
    passed: bool
    trials: int
    witness: Optional[dict] = None

    def to_dict(self):
        return {"passed": self.passed, "trials": self.trials, "witness": self.witness}


def _box_points(rng, lo, hi, count, feasible=None):
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    pts = rng.uniform(lo, hi, size=(4 * count, lo.size))
    if feasible is not None:
        pts = pts[feasible.contains(pts)]
    return pts[:count]


def convexity_spotcheck(o: Objective, box, trials=200, seed=0, feasible=None) -> SpotCheck:
    """Random chord test of f(la + (1-l)b) <= l f(a) + (1-l) f(b).

    Half of the chords are short (10% of the box width) so local concavity
    is not averaged away.
    """
    rng = np.random.default_rng(seed)
    lo, hi = np.asarray(box[0], float), np.asarray(box[1], float)
    a = _box_points(rng, lo, hi, trials, feasible)
    b = _box_points(rng, lo, hi, trials, feasible)
    m = min(len(a), len(b))
    a, b = a[:m], b[:m]
    short = np.arange(m) % 2 == 1
    b[short] = np.clip(a[short] + 0.1 * (hi - lo) * rng.uniform(-1, 1, (short.sum(), lo.size)),
                       lo, hi)
    if feasible is not None:
        keep = feasible.contains(b)
        a, b = a[keep], b[keep]
    lam = rng.uniform(0, 1, size=len(a))
    mid = lam[:, None] * a + (1 - lam[:, None]) * b
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        fa, fb, fm = o.values(a), o.values(b), o.values(mid)
        rhs = lam * fa + (1 - lam) * fb
    with np.errstate(invalid="ignore"):
        viol = fm - rhs > 1e-9
    if viol.any():
        i = int(np.flatnonzero(viol)[0])
        return SpotCheck(False, len(a), {"a": a[i].tolist(), "b": b[i].tolist(),
                                         "lambda": float(lam[i]),
                                         "gap": float(fm[i] - rhs[i])})
    return SpotCheck(True, len(a))


def subhomogeneity_spotcheck(o: Objective, anchor, cloud, trials=200, seed=0) -> SpotCheck:
    """Random test of f(s x + (1-s) anchor) <= s f(x) + (1-s) f(anchor) on cloud points."""
    rng = np.random.default_rng(seed)
    cloud = np.atleast_2d(np.asarray(cloud, float))
    anchor = np.asarray(anchor, float).reshape(-1)
    idx = rng.integers(0, len(cloud), size=trials)
    s = rng.uniform(0, 1, size=trials)
    s[: min(trials, 2)] = 0.5  # always probe the midpoint of the first samples
    x = cloud[idx]
    pts = s[:, None] * x + (1 - s[:, None]) * anchor
    fa = eval_objective(o, anchor)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        lhs = o.values(pts)
        rhs = s * o.values(x) + (1 - s) * fa
    with np.errstate(invalid="ignore"):
        viol = lhs - rhs > 1e-9
    if viol.any():
        i = int(np.flatnonzero(viol)[0])
        return SpotCheck(False, trials, {"x": x[i].tolist(), "s": float(s[i]),
                                         "gap": float(lhs[i] - rhs[i])})
    return SpotCheck(True, trials)


def monotonicity_spotcheck(V: VectorField, box, trials=200, seed=0) -> SpotCheck:
    """Random pair test of <V(x) - V(y), x - y> >= -1e-9."""
    rng = np.random.default_rng(seed)
    lo, hi = np.asarray(box[0], float), np.asarray(box[1], float)
    x = rng.uniform(lo, hi, size=(trials, lo.size))
    y = rng.uniform(lo, hi, size=(trials, lo.size))
    val = np.einsum("ij,ij->i", V(x) - V(y), x - y)
    viol = val < -1e-9
    if viol.any():
        i = int(np.flatnonzero(viol)[0])
        return SpotCheck(False, trials, {"x": x[i].tolist(), "y": y[i].tolist(),
                                         "value": float(val[i])})
    return SpotCheck(True, trials)
