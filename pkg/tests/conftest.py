import numpy as np
import pytest

from dirwell.problem import parse_problem


def make_doc(dim=1, f=None, M=None, anchor=None, lo=-1.0, hi=1.0, budget=401,
             feasible=None, **extra):
    doc = {
        "dimension": dim,
        "feasible": feasible or {"shape": "whole"},
        "f": f or {"builtin": "square"},
        "M": M or {"full_sphere": True},
        "sample_box": {"lo": [lo] * dim, "hi": [hi] * dim},
        "budget": budget,
        "seed": 0,
    }
    if anchor is not None:
        doc["anchor"] = list(np.atleast_1d(anchor).astype(float))
    doc.update(extra)
    return doc


@pytest.fixture
def build():
    """Factory fixture: keyword arguments of ``make_doc`` -> parsed Problem."""
    return lambda **kw: parse_problem(make_doc(**kw))


# smooth strictly convex quadratic with its minimum at the origin
CONVEX_2D = {"expr": "x[0]**2 + 0.5*x[1]**2 + 0.3*x[0]*x[1]",
             "grad": ["2*x[0] + 0.3*x[1]", "x[1] + 0.3*x[0]"]}


def random_cone(rng, dim, k):
    G = rng.normal(size=(k, dim))
    return G / np.linalg.norm(G, axis=1, keepdims=True)


_GATE_LINES = []


@pytest.fixture
def gate(capsys):
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""
    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _GATE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _GATE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(_GATE_LINES):
            terminalreporter.write_line(line)
