import math

import numpy as np
import pytest

from dirwell import certificates as cert
from dirwell.catalog import catalog_names, catalog_problem
from dirwell.cone import minimal_time_pairs
from dirwell.errors import GradientUndefinedError, InputError
from dirwell.problem import gradient_many
from dirwell.sampling import diameter, infimum, sample_directional_region

from conftest import CONVEX_2D

SQUARE = dict(anchor=0.0, lo=-3.0, hi=3.0, budget=601)
SCHEDULE4 = [1e-1, 1e-2, 1e-3, 1e-4]


@pytest.fixture(scope="module")
def x2exp():
    p = catalog_problem("x2exp")
    return p, sample_directional_region(p)


@pytest.fixture(scope="module")
def square():
    p = catalog_problem("square")
    return p, sample_directional_region(p)


@pytest.fixture(scope="module")
def expdir():
    p = catalog_problem("expdir")
    return p, sample_directional_region(p)


def test_tolerance_rule():
    assert cert.leq(1.0, 1.0 + 1e-10)
    assert not cert.leq(1.0, 1.0 - 1e-6)
    assert cert.leq(1.0, math.inf)


def test_schedule_validation():
    assert list(cert.check_schedule([1, 0.5, 0.1, 0.01])) == [1, 0.5, 0.1, 0.01]
    for bad in ([1, 0.5, 0.1], [1, 0.5, 0.5, 0.1], [1, 0.5, 0.1, -1.0]):
        with pytest.raises(InputError):
            cert.check_schedule(bad)


def test_member_L_examples(x2exp):
    p, cloud = x2exp
    assert cert.member_L(p, [0.0], 0.001, cloud)
    assert not cert.member_L(p, [-0.2], 0.01, cloud)
    _, arg = infimum(cloud)
    for eps in (1e-1, 1e-5, 1e-9):
        assert cert.member_L(p, arg, eps, cloud)


def test_member_G_expdir_everywhere(expdir):
    p, _ = expdir
    for x in np.linspace(-2, 2, 9):
        for eps in (0.5, 0.01):
            assert cert.member_G(p, [x], eps)


def test_member_Gp_expdir(expdir):
    p, cloud = expdir
    assert cert.member_Gp(p, [0.0], 0.5, cloud)
    assert not cert.member_Gp(p, [0.3], 0.5, cloud)


def test_member_Gp_l1w():
    p = catalog_problem("l1w_5")
    cloud = sample_directional_region(p)
    assert not cert.member_Gp(p, [-1.0, 0, 0, 0, 0], 0.5, cloud)
    assert cert.member_Gp(p, np.zeros(5), 0.5, cloud)


def test_member_Hp_square(square):
    p, cloud = square
    assert cert.member_Hp(p, [0.004], 0.01, cloud)
    assert not cert.member_Hp(p, [0.1], 0.01, cloud)
    for eps in (1e-1, 1e-4):
        assert cert.member_Hp(p, [0.0], eps, cloud)
        assert cert.member_H(p, [0.0], eps)


def test_gradient_family_needs_smoothness():
    p = catalog_problem("l1w_5")
    cloud = sample_directional_region(p)
    with pytest.raises(GradientUndefinedError):
        cert.member_Hp(p, np.zeros(5), 0.1, cloud)


def test_member_P_reduces_to_H(build):
    p = build(**SQUARE)
    xs = np.random.default_rng(10).uniform(-0.3, 0.3, size=(100, 1))
    got = [(cert.member_P(p, x, 0.3), cert.member_H(p, x, 0.3)) for x in xs]
    assert all(a == b for a, b in got)
    assert 0 < sum(a for a, _ in got) < 100


def test_member_P_with_zero_f_is_G_of_g(build):
    pg = build(f={"builtin": "zero"}, g={"builtin": "abs1"}, **SQUARE)
    pf = build(f={"builtin": "abs1"}, **SQUARE)
    xs = np.random.default_rng(11).uniform(-0.5, 0.5, size=(40, 1))
    xs[:5] = 0.0
    got = [(cert.member_P(pg, x, 0.3), cert.member_G(pf, x, 0.3)) for x in xs]
    assert all(a == b for a, b in got)


def test_member_P_composite_at_zero(build):
    p = build(g={"builtin": "abs1"}, **SQUARE)
    cloud = sample_directional_region(p)
    for eps in (1.0, 1e-2, 1e-6):
        assert cert.member_P(p, [0.0], eps)
        assert cert.member_Pp(p, [0.0], eps, cloud)


def test_member_Q_square(square):
    p, cloud = square
    assert cert.member_Q(p, [0.05], 0.01, cloud)
    assert not cert.member_Q(p, [0.1], 0.01, cloud)
    assert cert.member_Q(p, [0.0], 1e-12, cloud)


def test_sweep_x2exp(x2exp):
    p, cloud = x2exp
    rep = cert.diameter_sweep(p, "L", SCHEDULE4, cloud)
    bounds = [2 * 0.4642, 2 * 0.2154, 2 * 0.1, 2 * 0.0464]
    assert all(d <= b for d, b in zip(rep.diameters, bounds))
    assert all(b < a for a, b in zip(rep.diameters, rep.diameters[1:]))
    assert rep.verdict == "shrinks"
    assert rep.r_values == [d / 2 for d in rep.diameters]


def test_sweep_square_is_two_sqrt_eps(square):
    p, cloud = square
    rep = cert.diameter_sweep(p, "L", cert.DEFAULT_SCHEDULE, cloud)
    for e, d in zip(rep.epsilons, rep.diameters):
        assert abs(d - 2 * math.sqrt(e)) <= 2 * cloud.spacing


def test_sweep_doublewell_does_not_shrink():
    rep = cert.diameter_sweep(catalog_problem("doublewell"), "L")
    assert all(d >= 2 - 1e-12 for d in rep.diameters)
    assert rep.verdict == "does-not-shrink"


def test_shrink_verdict_rule():
    assert cert.shrink_verdict([1.0, 0.1, 0.0], 0.01) == "shrinks"
    assert cert.shrink_verdict([1.0, 1.0, 1.0], 0.01) == "does-not-shrink"
    assert cert.shrink_verdict([1.0, 0.1, 0.2], 0.01) == "inconclusive"
    assert cert.shrink_verdict([1.0, 0.01, 0.02], 0.01) == "inconclusive"


def test_sweep_csv(x2exp):
    p, cloud = x2exp
    rep = cert.diameter_sweep(p, "L", cert.DEFAULT_SCHEDULE, cloud)
    lines = rep.to_csv().strip().splitlines()
    assert lines[0] == "epsilon,diameter,members_count"
    assert len(lines) == 6


def test_c_profile_square(square):
    p, cloud = square
    c0 = cert.c_profile(p, "c0", ts=[1.0, 2.0], cloud=cloud)
    assert c0.c_values == pytest.approx([1.0, 4.0], abs=1e-12)
    assert c0.c_at_zero == 0.0
    c1 = cert.c_profile(p, "c1", ts=[1.0], cloud=cloud)
    assert c1.c_values == pytest.approx([2.0], rel=1e-9)


def test_c_profile_empty_slice(x2exp):
    p, cloud = x2exp
    prof = cert.c_profile(p, "c0", ts=[10.0], cloud=cloud)
    assert prof.c_values == [math.inf]


def test_scaling_inequality(square):
    p, cloud = square
    assert cert.scaling_inequality_check(cert.c_profile(p, "c0", cloud=cloud)).passed
    l1 = catalog_problem("l1w_5")
    prof = cert.c_profile(l1, "c0")
    np.testing.assert_allclose(prof.c_values, prof.ts, rtol=1e-12)
    assert cert.scaling_inequality_check(prof).passed
    fake = cert.AdmissibleProfile("c0", [0.5, 1.0], [1.0, 1.0], 0.0, "admissible", [0.0], 0.1)
    check = cert.scaling_inequality_check(fake)
    assert not check.passed and check.details["witness"]["s"] == 0.5


def test_radius_bound(square):
    p, cloud = square
    prof = cert.c_profile(p, "c0", ts=[1.0, 2.0], cloud=cloud)
    check = cert.radius_bound_check(p, prof, cloud)
    assert check.passed
    rs = [row["r"] for row in check.details["rows"]]
    assert rs == pytest.approx([1.0, 2.0], abs=cloud.spacing)
    l1 = catalog_problem("l1w_5")
    prof = cert.c_profile(l1, "c0", ts=[1.0])
    check = cert.radius_bound_check(l1, prof)
    assert check.passed
    assert check.details["rows"][0]["r"] == pytest.approx(0.5, abs=2e-3)


def test_admissibility_crosscheck(square, build):
    p, cloud = square
    assert cert.admissibility_crosscheck(p, cloud=cloud).passed
    dw = catalog_problem("doublewell")
    prof = cert.c_profile(dw, "c0", ts=[2.0])
    assert prof.c_values[0] == pytest.approx(0.0, abs=1e-12)
    check = cert.admissibility_crosscheck(dw)
    assert check.passed and check.details["L_verdict"] == "does-not-shrink"
    single = build(feasible={"shape": "box", "lo": [0.0], "hi": [1.0]},
                   M={"generators": [[1.0]]}, anchor=0.0, lo=0.0, hi=1.0)
    cl = sample_directional_region(single)
    assert len(cl) == 1
    check = cert.admissibility_crosscheck(single, cloud=cl)
    assert check.passed and check.details["c0_verdict"] == "admissible"


def test_report_x2exp():
    rep = cert.wellposedness_report(catalog_problem("x2exp"))
    assert rep.overall == "well-posed"
    applicable = {k for k, v in rep.criteria.items() if v["applicable"]}
    assert applicable == {"L", "c0"}
    assert rep.to_dict()["window"] == cert.WINDOW_NOTE


def test_report_l1w():
    rep = cert.wellposedness_report(catalog_problem("l1w_5"))
    assert rep.overall == "well-posed"
    assert rep.criteria["L"]["verdict"] == rep.criteria["Gp"]["verdict"] == "well-posed"


def test_report_doublewell():
    rep = cert.wellposedness_report(catalog_problem("doublewell"))
    assert rep.overall == "not-well-posed"
    assert not rep.hard_disagreement


def test_combine_verdicts():
    assert cert.combine_verdicts({"a": "well-posed", "b": "well-posed"})[0] == "well-posed"
    overall, agreement, hard = cert.combine_verdicts({"a": "well-posed", "b": "not-well-posed"})
    assert overall == "inconclusive" and hard and agreement["a|b"] == "disagree"
    overall, _, hard = cert.combine_verdicts({"a": "well-posed", "b": "inconclusive"})
    assert overall == "inconclusive" and not hard


# --- invariants --------------------------------------------------------------

@pytest.mark.parametrize("name", catalog_names(vi=False))
def test_minimizer_in_every_level_set(name):
    p = catalog_problem(name)
    cloud = sample_directional_region(p)
    masks, _ = cert.family_masks(p, "L", cert.DEFAULT_SCHEDULE, cloud)
    _, arg = infimum(cloud)
    i = int(np.flatnonzero(np.all(cloud.points == arg, axis=1))[0])
    assert masks[:, i].all()


@pytest.mark.parametrize("family, extra", [
    ("L", {}), ("G", {}), ("Gp", {}), ("H", {}), ("Hp", {}), ("Q", {}),
    ("P", {"g": {"builtin": "abs1"}}), ("Pp", {"g": {"builtin": "abs1"}}),
])
def test_nesting_in_epsilon(build, family, extra):
    p = build(dim=2, anchor=[0.0, 0.0], lo=-1.0, hi=1.0, budget=225, **extra)
    cloud = sample_directional_region(p)
    masks, _ = cert.family_masks(p, family, cert.DEFAULT_SCHEDULE, cloud)
    for wide, narrow in zip(masks, masks[1:]):
        assert np.all(wide | ~narrow)


def test_classical_reduction_G_equals_Gp(square):
    p, cloud = square
    xs = np.random.default_rng(12).uniform(-0.5, 0.5, size=(100, 1))
    eps = np.random.default_rng(13).choice([0.5, 0.1, 0.01], size=100)
    got = [(cert.member_G(p, x, e, cloud), cert.member_Gp(p, x, e, cloud))
           for x, e in zip(xs, eps)]
    assert all(a == b for a, b in got)
    assert 0 < sum(a for a, _ in got) < 100


@pytest.mark.parametrize("name", ["square", "l1w_5", "x2exp"])
def test_c0_nondecreasing_after_first_positive(name):
    p = catalog_problem(name)
    prof = cert.c_profile(p, "c0")
    c = np.array(prof.c_values)
    pos = np.flatnonzero(np.isfinite(c) & (c > prof.tau))
    assert pos.size
    tail = c[pos[0]:]
    tail = tail[np.isfinite(tail)]
    assert np.all(np.diff(tail) >= -1e-6)


def _convex_2d(build):
    return build(dim=2, f=CONVEX_2D, anchor=[0.0, 0.0], lo=-1.0, hi=1.0, budget=441)


@pytest.mark.parametrize("which", ["square", "convex_2d"])
def test_gradient_lemma_and_c0_below_c1(build, which):
    p = catalog_problem("square") if which == "square" else _convex_2d(build)
    cloud = sample_directional_region(p)
    X = cloud.points
    lhs = cloud.values - cloud.values[cloud.anchor_index]
    rhs = np.sum(gradient_many(p.f, X) * (X - cloud.anchor), axis=1)
    assert np.all(lhs <= rhs + 1e-7)
    ts = np.linspace(0.05, 0.95, 10)
    c0 = cert.c_profile(p, "c0", ts=ts, cloud=cloud).c_values
    c1 = cert.c_profile(p, "c1", ts=ts, cloud=cloud).c_values
    assert all(a <= b + 1e-6 for a, b in zip(c0, c1))


@pytest.mark.parametrize("name", ["square", "l1w_5", "x2exp"])
def test_far_points_bound_c0_of_one(name):
    p = catalog_problem(name)
    cloud = sample_directional_region(p)
    c01 = cert.c_profile(p, "c0", ts=[1.0], cloud=cloud).c_values[0]
    T = minimal_time_pairs(p.directions, cloud.points,
                           np.broadcast_to(cloud.anchor, cloud.points.shape))
    far = np.isfinite(T) & (T > 1)
    assert far.any()
    gain = cloud.values[far] - cloud.values[cloud.anchor_index]
    assert np.all(c01 <= gain + 1e-12)


@pytest.mark.parametrize("which", ["square", "convex_2d"])
def test_Q_inside_L(build, which):
    p = catalog_problem("square") if which == "square" else _convex_2d(build)
    cloud = sample_directional_region(p)
    mq, _ = cert.family_masks(p, "Q", cert.DEFAULT_SCHEDULE, cloud)
    ml, _ = cert.family_masks(p, "L", cert.DEFAULT_SCHEDULE, cloud)
    assert np.all(ml | ~mq)
    assert mq.sum() > len(cert.DEFAULT_SCHEDULE)


def test_Gp_sweep_diameters_are_member_diameters(expdir):
    p, cloud = expdir
    rep = cert.diameter_sweep(p, "Gp", cert.DEFAULT_SCHEDULE, cloud)
    for e, d in zip(rep.epsilons, rep.diameters):
        members = [x for x in cloud.points if cert.member_Gp(p, x, e, cloud)]
        assert d == pytest.approx(diameter(np.array(members)) if members else 0.0)
