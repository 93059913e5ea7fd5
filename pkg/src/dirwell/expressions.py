"""Restricted arithmetic expressions over a coordinate vector ``x``.

Expressions are written in Python syntax and compiled to numpy closures that
act on a batch of points of shape ``(N, n)``.  Supported:

* numbers, ``x[i]`` (0-based), the whole vector ``x`` as a function argument
* ``+ - * / **`` and unary minus
* ``exp log sqrt abs`` (elementwise)
* ``min(...)``/``max(...)``: over coordinates when given ``x``, elementwise otherwise
* ``sum(x)`` and ``dot([w0, w1, ...], x)`` for weighted coordinate sums
"""
from __future__ import annotations

import ast

import numpy as np

from .errors import ProblemError

_UNARY_FUNCS = {"exp": np.exp, "log": np.log, "sqrt": np.sqrt, "abs": np.abs}
_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


def _err(msg):
    return ProblemError(msg, code="E_EXPR")


class _Vec:
    """Marker for the bare vector ``x`` (only legal inside reductions)."""


def compile_expression(source: str, dim: int):
    """Compile ``source`` into ``f(X) -> values`` for ``X`` of shape (N, dim)."""
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise _err(f"cannot parse expression {source!r}: {exc.msg}") from None
    node = _build(tree.body, dim)
    if node is _VEC:
        raise _err("expression must be scalar-valued, got the bare vector x")

    def fn(X):
        X = np.asarray(X, dtype=float)
        out = node(X)
        return np.broadcast_to(np.asarray(out, dtype=float), X.shape[:-1]).copy()

    fn.source = source
    return fn


_VEC = _Vec()


def _build(node, dim):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        value = float(node.value)
        return lambda X: value
    if isinstance(node, ast.Name):
        if node.id == "x":
            return _VEC
        raise _err(f"unknown name {node.id!r}")
    if isinstance(node, ast.Subscript):
        if not (isinstance(node.value, ast.Name) and node.value.id == "x"):
            raise _err("only x[i] subscripts are allowed")
        idx = node.slice
        if isinstance(idx, ast.UnaryOp) and isinstance(idx.op, ast.USub) \
                and isinstance(idx.operand, ast.Constant):
            i = -idx.operand.value
        elif isinstance(idx, ast.Constant) and isinstance(idx.value, int):
            i = idx.value
        else:
            raise _err("x[...] needs an integer literal index")
        if not -dim <= i < dim:
            raise _err(f"index {i} out of range for dimension {dim}")
        return lambda X: X[..., i]
    if isinstance(node, ast.UnaryOp):
        inner = _scalar(node.operand, dim)
        if isinstance(node.op, ast.USub):
            return lambda X: -inner(X)
        if isinstance(node.op, ast.UAdd):
            return inner
        raise _err("unsupported unary operator")
    if isinstance(node, ast.BinOp):
        op = _BINOPS.get(type(node.op))
        if op is None:
            raise _err(f"unsupported operator {type(node.op).__name__}")
        left = _scalar(node.left, dim)
        right = _scalar(node.right, dim)
        return lambda X: op(left(X), right(X))
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.keywords:
            raise _err("only plain calls of whitelisted functions are allowed")
        name = node.func.id
        args = node.args
        if name in _UNARY_FUNCS:
            if len(args) != 1:
                raise _err(f"{name} takes one argument")
            f, inner = _UNARY_FUNCS[name], _scalar(args[0], dim)
            return lambda X: f(inner(X))
        if name in ("min", "max"):
            red = np.min if name == "min" else np.max
            pair = np.minimum if name == "min" else np.maximum
            if len(args) == 1:
                if _build(args[0], dim) is not _VEC:
                    raise _err(f"{name} of one argument expects x")
                return lambda X: red(X, axis=-1)
            parts = [_scalar(a, dim) for a in args]

            def reduce_pairs(X, parts=parts, pair=pair):
                out = parts[0](X)
                for p in parts[1:]:
                    out = pair(out, p(X))
                return out
            return reduce_pairs
        if name == "sum":
            if len(args) != 1 or _build(args[0], dim) is not _VEC:
                raise _err("sum expects x")
            return lambda X: np.sum(X, axis=-1)
        if name == "dot":
            if len(args) != 2 or not isinstance(args[0], ast.List) \
                    or _build(args[1], dim) is not _VEC:
                raise _err("dot expects a literal weight list and x")
            w = np.array([float(ast.literal_eval(e)) for e in args[0].elts])
            if w.shape != (dim,):
                raise _err(f"dot weights need {dim} entries")
            return lambda X: X @ w
        raise _err(f"unknown function {name!r}")
    raise _err(f"unsupported syntax: {type(node).__name__}")


def _scalar(node, dim):
    built = _build(node, dim)
    if built is _VEC:
        raise _err("the bare vector x can only appear inside min/max/sum/dot")
    return built
