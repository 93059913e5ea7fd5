"""Direction cones and the directional minimal time function.

A direction set is stored as a finite list of unit generators; the set of
admissible directions is ``cone(generators) ∩ S`` where ``S`` is the unit
sphere.  With that convention the minimal time from ``y`` to ``x`` is

    T(y, x) = ||x - y||   if x - y lies in cone(generators)
    T(y, x) = +inf        otherwise

Extended reals are plain Python floats; ``math.inf`` plays the role of the
absorbing top element (``inf + a == inf`` and comparisons are total).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .errors import InputError

INF = math.inf

# subset enumeration is exact but exponential in the generator count
_MAX_ENUM_GENERATORS = 10
_CHUNK = 1 << 18


def ext_add(a, b):
    """Sum of two extended reals (``+inf`` absorbs)."""
    if a == INF or b == INF:
        return INF
    return a + b


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Finitely generated direction set M = cone(generators) ∩ S.

    Parameters
    ----------
    generators : array_like, shape (k, n)
        Unit vectors (norm 1 within 1e-12).  Ignored when ``full_sphere``.
    full_sphere : bool
        If true, M is the whole unit sphere and ``dim`` must be given.
    tol_cone : float
        Relative tolerance of the conic-hull membership test.
    """

    generators: np.ndarray
    full_sphere: bool = False
    tol_cone: float = 1e-9
    dim: int = field(default=0)
    _subsets: tuple = field(default=(), repr=False)

    def __init__(self, generators=None, full_sphere=False, tol_cone=1e-9, dim=None):
        if tol_cone < 0 or not math.isfinite(tol_cone):
            raise InputError("tol_cone must be a finite nonnegative number")
        if full_sphere:
            if dim is None:
                if generators is None or len(generators) == 0:
                    raise InputError("full_sphere needs an explicit dimension")
                dim = np.atleast_2d(np.asarray(generators, float)).shape[1]
            gens = np.zeros((0, int(dim)))
        else:
            if generators is None or len(generators) == 0:
                raise InputError("direction set needs at least one generator")
            gens = np.atleast_2d(np.asarray(generators, dtype=float))
            if gens.ndim != 2:
                raise InputError("generators must be a list of vectors")
            if not np.all(np.isfinite(gens)):
                raise InputError("generators must be finite")
            norms = np.linalg.norm(gens, axis=1)
            bad = np.flatnonzero(np.abs(norms - 1.0) > 1e-12)
            if bad.size:
                raise InputError(
                    f"generator {int(bad[0])} has norm {norms[bad[0]]!r}, expected 1",
                    code="E_GENERATOR")
            if dim is not None and int(dim) != gens.shape[1]:
                raise InputError("generator dimension does not match dim")
            dim = gens.shape[1]
        if int(dim) < 1:
            raise InputError("dimension must be at least 1")
        gens.setflags(write=False)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "full_sphere", bool(full_sphere))
        object.__setattr__(self, "tol_cone", float(tol_cone))
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "_subsets", _independent_subsets(gens))

    @classmethod
    def sphere(cls, dim, tol_cone=1e-9):
        return cls(full_sphere=True, dim=dim, tol_cone=tol_cone)

    @property
    def n_generators(self):
        return len(self.generators)

    def ray_directions(self):
        """Directions used to lay sample rays: the generators, or ±e_i on the sphere."""
        if self.full_sphere:
            eye = np.eye(self.dim)
            return np.vstack([eye, -eye])
        return np.array(self.generators)

    def to_dict(self):
        if self.full_sphere:
            return {"full_sphere": True, "tol": self.tol_cone}
        return {"generators": self.generators.tolist(), "tol": self.tol_cone}


def _independent_subsets(gens):
    """Pseudo-inverses of every linearly independent subset of generators.

    The nonnegative least-squares optimum is the unconstrained least-squares
    fit on its support, and by Carathéodory the support can be taken
    linearly independent; enumerating these subsets therefore reproduces
    the NNLS residual exactly.
    """
    k = len(gens)
    if k == 0 or k > _MAX_ENUM_GENERATORS:
        return ()
    n = gens.shape[1]
    out = []
    for size in range(1, min(k, n) + 1):
        for idx in itertools.combinations(range(k), size):
            G = gens[list(idx)].T  # (n, size)
            if np.linalg.matrix_rank(G, tol=1e-12) < size:
                continue
            out.append((np.array(idx), G, np.linalg.pinv(G)))
    return tuple(out)


def _as_points(M, v, name="v"):
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.shape[-1] != M.dim:
        raise InputError(f"{name} has dimension {arr.shape[-1]}, direction set has {M.dim}")
    return arr


def cone_residual(M: DirectionSet, V) -> np.ndarray:
    """Distance from each row of ``V`` to cone(generators)."""
    V = np.atleast_2d(_as_points(M, V))
    if M.full_sphere:
        return np.zeros(len(V))
    best = np.linalg.norm(V, axis=1)  # empty support
    if M._subsets:
        for _, G, P in M._subsets:
            lam = V @ P.T
            feasible = np.all(lam >= 0.0, axis=1)
            if not feasible.any():
                continue
            res = np.linalg.norm(V - lam @ G.T, axis=1)
            best = np.where(feasible & (res < best), res, best)
        return best
    G = M.generators.T
    return np.array([nnls(G, v)[1] for v in V])


def cone_contains_many(M: DirectionSet, V) -> np.ndarray:
    V = np.atleast_2d(_as_points(M, V))
    if not np.all(np.isfinite(V)):
        raise InputError("vectors must be finite")
    if M.full_sphere:
        return np.ones(len(V), dtype=bool)
    res = cone_residual(M, V)
    return res <= M.tol_cone * (1.0 + np.linalg.norm(V, axis=1))


def cone_contains(M: DirectionSet, v) -> bool:
    """Whether ``v`` lies in the conic hull of the generators (within tolerance)."""
    v = _as_points(M, v)
    if v.ndim != 1:
        raise InputError("cone_contains expects a single vector")
    return bool(cone_contains_many(M, v[None, :])[0])


def minimal_time(M: DirectionSet, y, x) -> float:
    """T_M(y, x): least time to reach ``x`` from ``y`` moving along M."""
    y = _as_points(M, y, "y")
    x = _as_points(M, x, "x")
    d = x - y
    if M.full_sphere or cone_contains(M, d):
        return float(np.linalg.norm(d))
    return INF


def minimal_time_pairs(M: DirectionSet, Y, X) -> np.ndarray:
    """Row-wise T_M(Y[i], X[i]) with broadcasting."""
    Y = np.atleast_2d(_as_points(M, Y, "Y"))
    X = np.atleast_2d(_as_points(M, X, "X"))
    D = X - Y
    out = np.linalg.norm(D, axis=1)
    if not M.full_sphere:
        out[~cone_contains_many(M, D)] = INF
    return out


def minimal_time_matrix(M: DirectionSet, Y, X) -> np.ndarray:
    """Matrix ``T[i, j] = T_M(Y[i], X[j])``."""
    Y = np.atleast_2d(_as_points(M, Y, "Y"))
    X = np.atleast_2d(_as_points(M, X, "X"))
    out = np.empty((len(Y), len(X)))
    rows = max(1, _CHUNK // max(1, len(X)))
    for lo in range(0, len(Y), rows):
        D = X[None, :, :] - Y[lo:lo + rows, None, :]
        flat = D.reshape(-1, M.dim)
        t = np.linalg.norm(flat, axis=1)
        if not M.full_sphere:
            t[~cone_contains_many(M, flat)] = INF
        out[lo:lo + rows] = t.reshape(D.shape[:2])
    return out


def domain_contains(M: DirectionSet, y, x) -> bool:
    """Whether ``y`` lies in dom T_M(., x) = x - cone(M)."""
    y = _as_points(M, y, "y")
    x = _as_points(M, x, "x")
    return cone_contains(M, x - y)


def domain_contains_many(M: DirectionSet, Y, x) -> np.ndarray:
    Y = np.atleast_2d(_as_points(M, Y, "Y"))
    x = _as_points(M, x, "x")
    return cone_contains_many(M, x[None, :] - Y)


def minimal_time_to_set(M: DirectionSet, y, S) -> float:
    """T_M(y, S) for a finite target set; ``+inf`` for an empty set."""
    S = np.asarray(S, dtype=float)
    if S.size == 0:
        return INF
    S = np.atleast_2d(_as_points(M, S, "S"))
    y = _as_points(M, y, "y")
    return float(minimal_time_matrix(M, y[None, :], S).min())


def enlargement_contains(M: DirectionSet, S, eps, x) -> bool:
    """Membership of ``x`` in the enlargement {z : T_M(z, S) <= eps}."""
    if eps < 0:
        raise InputError("eps must be nonnegative")
    return minimal_time_to_set(M, x, S) <= eps + M.tol_cone
