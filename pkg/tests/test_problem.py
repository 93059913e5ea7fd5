import json
import math
import warnings

import numpy as np
import pytest

from dirwell.catalog import builtin_names, builtin_objective, catalog_names, catalog_problem
from dirwell.errors import EvaluationError, GradientUndefinedError, ProblemError
from dirwell.problem import (VectorField, convexity_spotcheck, eval_objective, gradient,
                             gradient_many, monotonicity_spotcheck, objective_from_dict,
                             parse_problem, subhomogeneity_spotcheck)

from conftest import make_doc


def test_catalog_x2exp():
    p = parse_problem("x2exp")
    assert p.dimension == 1
    assert p.feasible.shape == "whole"
    np.testing.assert_array_equal(p.directions.generators, [[1.0]])
    np.testing.assert_array_equal(p.anchor, [0.5])
    assert eval_objective(p.f, [1.0]) == pytest.approx(math.exp(-1), abs=1e-15)


def test_catalog_l1w_5():
    p = parse_problem("l1w_5")
    assert p.dimension == 5
    np.testing.assert_array_equal(p.directions.generators, [[1, 0, 0, 0, 0]])
    np.testing.assert_array_equal(p.anchor, np.zeros(5))
    assert eval_objective(p.f, [-2.0, 0, 0, 0, 0]) == 2.0
    assert p.notes


def test_catalog_expdir():
    p = parse_problem("expdir")
    np.testing.assert_array_equal(p.directions.generators, [[-1.0]])
    assert eval_objective(p.f, [0.0]) == 1.0


def test_eval_examples():
    assert eval_objective(builtin_objective("x2exp", 1), [0.0]) == 0.0
    assert eval_objective(builtin_objective("l1w", 5), [-2, 0, 0, 0, 0]) == 2.0
    assert eval_objective(builtin_objective("expdir", 1), [0.0]) == 1.0


_CLOSED_FORMS = {
    "x2exp": (1, lambda x: x[0] ** 2 * math.exp(-x[0])),
    "expdir": (1, lambda x: math.exp(x[0])),
    "square": (3, lambda x: sum(v * v for v in x)),
    "neg_square": (3, lambda x: -sum(v * v for v in x)),
    "doublewell": (2, lambda x: (sum(v * v for v in x) - 1) ** 2),
    "l1w": (5, lambda x: sum(abs(v) / (i + 1) for i, v in enumerate(x))),
    "abs1": (2, lambda x: sum(abs(v) for v in x)),
    "maxcoord": (4, max),
    "mincoord": (4, min),
    "sumcoord": (4, sum),
    "zero": (2, lambda x: 0.0),
}


def test_closed_forms_cover_builtins():
    assert set(_CLOSED_FORMS) == set(builtin_names())


@pytest.mark.parametrize("name", sorted(_CLOSED_FORMS))
def test_catalog_fidelity(name):
    dim, closed = _CLOSED_FORMS[name]
    o = builtin_objective(name, dim)
    pts = np.random.default_rng(7).uniform(-2.5, 2.5, size=(10, dim))
    for p in pts:
        expected = closed(list(p))
        assert abs(eval_objective(o, p) - expected) <= 1e-12 * max(1.0, abs(expected))


def test_gradient_examples():
    assert gradient(builtin_objective("square", 1), [3.0])[0] == pytest.approx(6.0)
    g = builtin_objective("x2exp", 1)
    assert gradient(g, [0.0])[0] == pytest.approx(0.0, abs=1e-15)
    assert gradient(g, [1.0])[0] == pytest.approx(math.exp(-1), rel=1e-12)


@pytest.mark.parametrize("name", ["x2exp", "expdir", "square", "neg_square", "doublewell"])
def test_gradient_consistency(name):
    dim = _CLOSED_FORMS[name][0]
    o = builtin_objective(name, dim)
    assert o.grad_func is not None
    fd = type(o)(o.func, dim, None, True, None, {}, "fd")
    X = np.random.default_rng(8).uniform(-2, 2, size=(20, dim))
    A, B = gradient_many(o, X), gradient_many(fd, X)
    np.testing.assert_allclose(A, B, rtol=1e-5, atol=1e-5 * np.abs(A).max())


def test_expression_objective_with_gradient():
    o = objective_from_dict({"expr": "x[0]**2 + 3*x[1]", "grad": ["2*x[0]", "3"]}, 2)
    fd = objective_from_dict({"expr": "x[0]**2 + 3*x[1]"}, 2)
    x = [0.7, -1.2]
    np.testing.assert_allclose(gradient(o, x), [1.4, 3.0])
    np.testing.assert_allclose(gradient(fd, x), [1.4, 3.0], rtol=1e-6)


def test_nan_is_an_evaluation_error():
    o = objective_from_dict({"expr": "sqrt(x[0])"}, 1)
    with pytest.raises(EvaluationError):
        eval_objective(o, [-1.0])


def test_overflow_gives_inf_with_warning():
    o = objective_from_dict({"expr": "exp(x[0])"}, 1)
    with pytest.warns(RuntimeWarning):
        assert eval_objective(o, [1000.0]) == math.inf


def test_extended_objective_and_gradient_stencil():
    doc = {"expr": "x[0]", "finite_region": {"shape": "box", "lo": [0.0], "hi": [1.0]}}
    o = objective_from_dict(doc, 1)
    assert o.extended
    assert eval_objective(o, [2.0]) == math.inf
    assert eval_objective(o, [0.5]) == 0.5
    with pytest.raises(GradientUndefinedError):
        gradient(o, [1.0])


@pytest.mark.parametrize("mutate, code", [
    (lambda d: d.pop("budget"), "E_SCHEMA"),
    (lambda d: d.update(budget=10), "E_SCHEMA"),
    (lambda d: d.update(M={"generators": [[2.0]]}), "E_GENERATOR"),
    (lambda d: d.update(M={"generators": [[1.0, 0.0]]}), "E_GENERATOR"),
    (lambda d: d.update(feasible={"shape": "box", "lo": [0.0], "hi": [1.0]}, anchor=[2.0]),
     "E_ANCHOR"),
    (lambda d: d.update(f={"builtin": "nope"}), "E_BUILTIN"),
    (lambda d: d.update(f={"expr": "x[0] +"}), "E_EXPR"),
    (lambda d: d.update(sample_box={"lo": [1.0], "hi": [0.0]}), "E_BOX"),
])
def test_parse_error_codes(mutate, code):
    doc = make_doc(anchor=0.0)
    mutate(doc)
    with pytest.raises(ProblemError) as info:
        parse_problem(doc)
    assert info.value.code == code


def test_error_codes_are_distinct():
    codes = set()
    for doc in (
        {"dimension": 1},
        make_doc(M={"generators": [[2.0]]}),
        make_doc(feasible={"shape": "box", "lo": [0.0], "hi": [1.0]}, anchor=[2.0]),
        make_doc(f={"builtin": "nope"}),
    ):
        with pytest.raises(ProblemError) as info:
            parse_problem(doc)
        codes.add(info.value.code)
    assert len(codes) == 4


def test_json_text_and_invalid_json():
    doc = make_doc(anchor=0.0)
    assert parse_problem(json.dumps(doc)).dimension == 1
    with pytest.raises(ProblemError):
        parse_problem("{not json")


@pytest.mark.parametrize("name", catalog_names())
def test_round_trip(name):
    p = catalog_problem(name)
    doc = p.to_document()
    q = parse_problem(json.loads(json.dumps(doc)))
    assert q.to_document() == doc
    X = np.random.default_rng(9).uniform(p.sample_lo, p.sample_hi, size=(25, p.dimension))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        np.testing.assert_array_equal(p.values(X), q.values(X))


def test_feasible_shapes():
    ball = parse_problem(make_doc(dim=2, feasible={"shape": "ball", "center": [0, 0],
                                                   "radius": 1.0}))
    assert ball.feasible.contains([[0.6, 0.8], [0.8, 0.8]]).tolist() == [True, False]
    hs = parse_problem(make_doc(dim=2, feasible={"shape": "halfspaces",
                                                 "A": [[1, 1]], "b": [1.0]}))
    assert hs.feasible.contains([[0.5, 0.5], [1.0, 0.5]]).tolist() == [True, False]
    assert hs.feasible.bounding_box() is None


def test_convexity_spotcheck_examples():
    box1 = ([-3.0], [3.0])
    assert convexity_spotcheck(builtin_objective("square", 1), box1, 200).passed
    res = convexity_spotcheck(builtin_objective("x2exp", 1), ([-2.0], [2.0]), 200)
    assert not res.passed
    w = res.witness
    a, b, lam = np.array(w["a"]), np.array(w["b"]), w["lambda"]
    f = builtin_objective("x2exp", 1)
    mid = lam * a + (1 - lam) * b
    assert eval_objective(f, mid) > lam * eval_objective(f, a) + (1 - lam) * eval_objective(f, b)
    assert convexity_spotcheck(builtin_objective("l1w", 5), ([-3.0] * 5, [3.0] * 5), 200).passed


def test_subhomogeneity_spotcheck_examples():
    cloud1 = np.linspace(-1, 1, 201)[:, None]
    assert subhomogeneity_spotcheck(builtin_objective("square", 1), [0.0], cloud1).passed
    cloud5 = np.zeros((50, 5))
    cloud5[:, 0] = -np.linspace(0, 3, 50)
    assert subhomogeneity_spotcheck(builtin_objective("l1w", 5), np.zeros(5), cloud5).passed
    assert not subhomogeneity_spotcheck(builtin_objective("neg_square", 1), [0.0], cloud1).passed


def test_monotonicity_spotcheck_examples():
    box1 = ([-1.0], [1.0])
    assert monotonicity_spotcheck(VectorField.affine([[1.0]]), box1).passed
    assert monotonicity_spotcheck(VectorField.affine([[2.0, 0.0], [0.0, 0.0]]),
                                  ([-1.0, -1.0], [1.0, 1.0])).passed
    assert not monotonicity_spotcheck(VectorField.affine([[-1.0]]), box1).passed


def test_vector_field_expressions():
    V = VectorField.from_dict({"expr": ["x[0] + x[1]", "2*x[1]"]}, 2)
    np.testing.assert_allclose(V([1.0, 2.0]), [3.0, 4.0])
    np.testing.assert_allclose(V(np.array([[1.0, 2.0], [0.0, 1.0]])), [[3, 4], [1, 2]])
