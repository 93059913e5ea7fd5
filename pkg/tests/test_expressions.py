import numpy as np
import pytest

from dirwell.errors import ProblemError
from dirwell.expressions import compile_expression

X = np.array([[1.0, -2.0, 3.0], [0.5, 0.0, -1.0]])


@pytest.mark.parametrize("source, expected", [
    ("x[0] + 2*x[1]", X[:, 0] + 2 * X[:, 1]),
    ("x[0]**2 - x[2]/4", X[:, 0] ** 2 - X[:, 2] / 4),
    ("-x[1]", -X[:, 1]),
    ("exp(x[0]) * abs(x[1])", np.exp(X[:, 0]) * np.abs(X[:, 1])),
    ("max(x)", X.max(axis=1)),
    ("min(x)", X.min(axis=1)),
    ("max(x[0], x[2], 0)", np.maximum(np.maximum(X[:, 0], X[:, 2]), 0)),
    ("sum(x)", X.sum(axis=1)),
    ("dot([1, 0.5, -1], x)", X @ np.array([1, 0.5, -1])),
    ("sqrt(x[0]**2 + 1)", np.sqrt(X[:, 0] ** 2 + 1)),
    ("3", np.full(2, 3.0)),
])
def test_compiled_values(source, expected):
    f = compile_expression(source, 3)
    np.testing.assert_allclose(f(X), expected, rtol=0, atol=1e-15)


@pytest.mark.parametrize("source", [
    "x[3]", "x", "__import__('os')", "x[0].real", "foo(x)", "lambda: 1",
    "x[0] if x[1] else 0", "dot([1, 2], x)", "sum(x[0])", "x[0] +",
])
def test_rejected_expressions(source):
    with pytest.raises(ProblemError) as info:
        compile_expression(source, 3)
    assert info.value.code == "E_EXPR"
