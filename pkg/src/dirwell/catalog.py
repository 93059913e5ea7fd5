"""Builtin objectives and named problem documents.

Problems are stored as documents and go through :func:`parse_problem` like any
user input, so the catalog exercises the same code path as the CLI.  Entries
marked ``analog`` are finite-dimensional stand-ins for infinite-dimensional
constructions; they keep the directional structure, not the ambient space.
"""
from __future__ import annotations

import copy
import math

import numpy as np

from .errors import ProblemError


def _norm2(X):
    return np.einsum("ij,ij->i", X, X)


def _x2exp(X):
    x = X[:, 0]
    return x * x * np.exp(-x)


def _x2exp_grad(X):
    x = X[:, 0]
    return (np.exp(-x) * x * (2 - x))[:, None]


def _l1w(X):
    w = 1.0 / np.arange(1, X.shape[1] + 1)
    return np.abs(X) @ w


def _l1w_grad(X):
    w = 1.0 / np.arange(1, X.shape[1] + 1)
    return np.sign(X) * w


def _doublewell(X):
    s = _norm2(X)
    return (s - 1.0) ** 2


def _doublewell_grad(X):
    return 4.0 * (_norm2(X) - 1.0)[:, None] * X


# name -> (func, grad, smooth, required dimension or None)
_BUILTINS = {
    "x2exp": (_x2exp, _x2exp_grad, True, 1),
    "expdir": (lambda X: np.exp(X[:, 0]), lambda X: np.exp(X[:, :1]), True, 1),
    "square": (_norm2, lambda X: 2.0 * X, True, None),
    "neg_square": (lambda X: -_norm2(X), lambda X: -2.0 * X, True, None),
    "doublewell": (_doublewell, _doublewell_grad, True, None),
    "l1w": (_l1w, _l1w_grad, False, None),
    "abs1": (lambda X: np.abs(X).sum(axis=1), np.sign, False, None),
    "maxcoord": (lambda X: X.max(axis=1), None, False, None),
    "mincoord": (lambda X: X.min(axis=1), None, False, None),
    "sumcoord": (lambda X: X.sum(axis=1), lambda X: np.ones_like(X), True, None),
    "zero": (lambda X: np.zeros(len(X)), lambda X: np.zeros_like(X), True, None),
}


def builtin_names():
    return sorted(_BUILTINS)


def builtin_objective(name, dim):
    from .problem import Objective

    try:
        func, grad, smooth, need = _BUILTINS[name]
    except KeyError:
        raise ProblemError(f"unknown builtin objective {name!r}", code="E_BUILTIN") from None
    if need is not None and dim != need:
        raise ProblemError(f"builtin {name!r} is {need}-dimensional", code="E_BUILTIN")
    return Objective(func, dim, grad, smooth, None, {"builtin": name}, name)


def _box(lo, hi, n):
    return {"lo": [lo] * n, "hi": [hi] * n}


_INV_SQRT5 = 1.0 / math.sqrt(5.0)
_S2 = [(i / 4) ** 2 for i in range(5)]

_PROBLEMS = {
    "x2exp": {
        "name": "x2exp", "dimension": 1, "feasible": {"shape": "whole"},
        "f": {"builtin": "x2exp"}, "M": {"generators": [[1.0]]}, "anchor": [0.5],
        "sample_box": _box(-3.0, 3.0, 1), "budget": 1201, "seed": 0,
    },
    "l1w_5": {
        "name": "l1w_5", "dimension": 5, "feasible": {"shape": "whole"},
        "f": {"builtin": "l1w"}, "M": {"generators": [[1.0, 0, 0, 0, 0]]},
        "anchor": [0.0] * 5, "sample_box": _box(-3.0, 3.0, 5), "budget": 3001,
        "seed": 0, "notes": ["analog: five-coordinate truncation of a sequence space"],
    },
    "expdir": {
        "name": "expdir", "dimension": 1, "feasible": {"shape": "whole"},
        "f": {"builtin": "expdir"}, "M": {"generators": [[-1.0]]}, "anchor": [0.0],
        "sample_box": _box(-2.0, 2.0, 1), "budget": 801, "seed": 0,
    },
    "square": {
        "name": "square", "dimension": 1, "feasible": {"shape": "whole"},
        "f": {"builtin": "square"}, "M": {"full_sphere": True}, "anchor": [0.0],
        "sample_box": _box(-3.0, 3.0, 1), "budget": 1201, "seed": 0,
    },
    "doublewell": {
        "name": "doublewell", "dimension": 1, "feasible": {"shape": "whole"},
        "f": {"builtin": "doublewell"}, "M": {"full_sphere": True}, "anchor": [1.0],
        "sample_box": _box(-2.0, 2.0, 1), "budget": 801, "seed": 0,
    },
    "sum_5": {
        "name": "sum_5", "dimension": 5, "feasible": {"shape": "whole"},
        "f": {"builtin": "sumcoord"}, "M": {"generators": [[-1.0, 0, 0, 0, 0]]},
        "anchor": [0.0] * 5, "sample_box": _box(-3.0, 3.0, 5), "budget": 3001,
        "seed": 0,
        "notes": ["analog: coordinate sum on five coordinates; the +inf branch for "
                  "infinitely supported sequences has no finite counterpart"],
    },
    "max_diag_5": {
        "name": "max_diag_5", "dimension": 5, "feasible": {"shape": "whole"},
        "f": {"builtin": "maxcoord",
              "finite_region": {"shape": "halfspaces",
                                "A": [[-1, 1, 0, 0, 0], [1, -1, 0, 0, 0],
                                      [-1, 0, 1, 0, 0], [1, 0, -1, 0, 0],
                                      [-1, 0, 0, 1, 0], [1, 0, 0, -1, 0],
                                      [-1, 0, 0, 0, 1], [1, 0, 0, 0, -1]],
                                "b": [0.0] * 8}},
        "M": {"generators": [[-_INV_SQRT5] * 5]}, "anchor": [0.0] * 5,
        "sample_box": _box(-3.0, 3.0, 5), "budget": 3001, "seed": 0,
        "notes": ["analog: functions sampled at five nodes; finite only on "
                  "constant vectors, which stand in for polynomials"],
    },
    "min_shift_5": {
        "name": "min_shift_5", "dimension": 5, "feasible": {"shape": "whole"},
        "f": {"builtin": "mincoord"}, "M": {"generators": [[-_INV_SQRT5] * 5]},
        "anchor": _S2, "sample_box": _box(-1.0, 3.0, 5), "budget": 3001, "seed": 0,
        "notes": ["analog: functions sampled at s = 0, 1/4, ..., 1 with the "
                  "Euclidean norm in place of the maximum norm"],
    },
    # variational inequalities
    "vi_identity": {
        "name": "vi_identity", "dimension": 1,
        "feasible": {"shape": "box", "lo": [-1.0], "hi": [1.0]},
        "f": {"builtin": "zero"}, "V": {"affine": {"matrix": [[1.0]], "offset": [0.0]}},
        "M": {"generators": [[1.0]]}, "anchor": [0.0],
        "sample_box": _box(-1.0, 1.0, 1), "budget": 801, "seed": 0,
    },
    "vi_negative": {
        "name": "vi_negative", "dimension": 1,
        "feasible": {"shape": "box", "lo": [-1.0], "hi": [1.0]},
        "f": {"builtin": "zero"}, "V": {"affine": {"matrix": [[-1.0]], "offset": [0.0]}},
        "M": {"generators": [[1.0]]}, "anchor": [0.0],
        "sample_box": _box(-1.0, 1.0, 1), "budget": 801, "seed": 0,
    },
    "vi_psd_2": {
        "name": "vi_psd_2", "dimension": 2,
        "feasible": {"shape": "box", "lo": [-1.0, -1.0], "hi": [1.0, 1.0]},
        "f": {"builtin": "zero"},
        "V": {"affine": {"matrix": [[2.0, 1.0], [-1.0, 0.0]], "offset": [0.0, 0.0]}},
        "M": {"full_sphere": True}, "anchor": [0.0, 0.0],
        "sample_box": _box(-1.0, 1.0, 2), "budget": 500, "seed": 0,
    },
    "vi_square_grad": {
        "name": "vi_square_grad", "dimension": 1, "feasible": {"shape": "whole"},
        "f": {"builtin": "square"}, "V": {"affine": {"matrix": [[2.0]], "offset": [0.0]}},
        "M": {"full_sphere": True}, "anchor": [0.0],
        "sample_box": _box(-3.0, 3.0, 1), "budget": 1201, "seed": 0,
    },
}


def catalog_names(vi=None):
    """Names of catalog problems; ``vi`` filters on the presence of a vector field."""
    names = sorted(_PROBLEMS)
    if vi is None:
        return names
    return [n for n in names if ("V" in _PROBLEMS[n]) == vi]


def catalog_document(name):
    try:
        return copy.deepcopy(_PROBLEMS[name])
    except KeyError:
        raise ProblemError(f"unknown catalog problem {name!r}", code="E_BUILTIN") from None


def catalog_problem(name):
    from .problem import parse_problem

    return parse_problem(catalog_document(name))
