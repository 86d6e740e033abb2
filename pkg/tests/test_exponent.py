import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vexlab.common import DIVERGENT, ConstructionError, InputError
from vexlab.exponent import (
    DyadicRationals,
    Theorem52Grid,
    build_theorem52_exponent,
    build_tilde_p,
    conjugate,
    constant_exponent,
    essential_range_on,
    exponent_dumps,
    exponent_for_integrable,
    exponent_loads,
    log_bump_integral,
    single_bump_exponent,
    theorem52_width,
)
from vexlab.funcrep import step_function


def test_eval_off_bumps_is_base():
    p = build_tilde_p(50)
    assert p.eval(0.9) == 2.0


def test_eval_single_bump_formula():
    p = single_bump_exponent(0.0, 1.0 / 200.0)
    # 2 + log(400), checked against high-precision arithmetic
    assert p.eval(1.0 / 400.0) == pytest.approx(7.991464547107982, abs=1e-14)


def test_eval_at_center_is_divergent():
    p = single_bump_exponent(0.3, 0.005)
    assert p.eval(0.3) is DIVERGENT


def test_eval_outside_domain_raises():
    p = build_tilde_p(3)
    with pytest.raises(InputError):
        p.eval(1.5)


def test_conjugate_of_constant_two_is_two():
    p = constant_exponent(2.0)
    q = conjugate(p)
    for x in (0.1, 0.5, 0.9):
        assert q.eval(x) == 2.0


def test_conjugate_single_bump_base_one():
    # conjugate of 1 + log(1/(x-r)) on the bump is 1 + 1/log(1/(x-r))
    r = 0.25
    p = single_bump_exponent(r, 0.005, base=1.0)
    q = conjugate(p)
    u = 1e-4
    expected = 1.0 + 1.0 / math.log(1.0 / u)
    assert q.eval(r + u) == pytest.approx(expected, rel=1e-14)


def test_conjugate_value_at_p4():
    # p = 2 + log(1/u) at u = 1/e^2 gives p = 4, q = 4/3
    p = single_bump_exponent(0.0, 1.0)
    # width capped at 1/200 < 1/e^2, so evaluate the algebra directly
    q_val = 4.0 / (4.0 - 1.0)
    p_val = 2.0 + math.log(math.e**2)
    assert p_val == 4.0
    assert q_val == pytest.approx(4.0 / 3.0)


def test_conjugate_involution_is_object_identity(tilde_p_50):
    assert conjugate(conjugate(tilde_p_50)) is tilde_p_50


@settings(max_examples=60, derandomize=True, deadline=None)
@given(st.floats(min_value=1e-6, max_value=1.0 - 1e-6))
def test_conjugate_involution_pointwise(x):
    p = build_tilde_p(8)
    q2 = conjugate(conjugate(p))
    v1 = p.eval(x)
    v2 = q2.eval(x)
    if v1 is DIVERGENT:
        assert v2 is DIVERGENT
    else:
        assert abs(v1 - v2) <= 1e-14


def test_involution_sample_thousand_points(tilde_p_50, rng):
    xs = rng.uniform(1e-6, 1 - 1e-6, size=1000)
    p2 = conjugate(conjugate(tilde_p_50))
    v1 = tilde_p_50.eval_array(xs)
    v2 = p2.eval_array(xs)
    assert np.max(np.abs(v1 - v2)) <= 1e-14


def test_build_tilde_p_k0_is_constant():
    p = build_tilde_p(0)
    assert p.kind == "constant"
    assert p.base == 2.0


def test_build_tilde_p_custom_rule_tail():
    rule = lambda k: Fraction(1, 200 * (1 << k))
    p = build_tilde_p(3, delta_rule=rule)
    assert p.truncation == 3
    # certified bound dominates the exact partial integral
    partial = sum(log_bump_integral(float(rule(k))) for k in (1, 2, 3))
    assert p.tail_bound >= partial


def test_dyadic_enumeration_order():
    centers = [c for c, _, _ in DyadicRationals().centers(7)]
    assert centers == [0.5, 0.25, 0.75, 0.125, 0.375, 0.625, 0.875]


def test_dyadic_enumeration_injective():
    exact = [e for _, e, _ in DyadicRationals().centers(200)]
    assert len(set(exact)) == 200


def test_theorem52_grid_enumeration():
    p = build_tilde_p(100, enum=Theorem52Grid(depth=20))
    expected = []
    for n in range(1, 21):
        for k in range(1, n + 1):
            expected.append(4.0 * math.pi * k / (2 * n + 1))
    assert [b.center for b in p.bumps] == expected[:100]


def test_monotone_truncation(rng):
    p5 = build_tilde_p(5)
    p6 = build_tilde_p(6)
    xs = rng.uniform(0.0, 1.0, size=400)
    for x in xs:
        v5, v6 = p5.eval(float(x)), p6.eval(float(x))
        if v5 is DIVERGENT:
            assert v6 is DIVERGENT
        elif v6 is not DIVERGENT:
            assert v6 >= v5 - 1e-14


def test_tail_certificate_dominates_prefix():
    for K in (5, 20, 50):
        p = build_tilde_p(K)
        prefix = sum(log_bump_integral(b.effective_width) for b in p.bumps)
        assert p.tail_bound >= prefix


def test_theorem52_exponent_counts():
    assert build_theorem52_exponent(1).truncation == 1
    assert build_theorem52_exponent(2).truncation == 3
    p5 = build_theorem52_exponent(5)
    assert p5.truncation == 15
    lo, hi = p5.interval
    for b in p5.bumps:
        assert lo < b.center < hi


def test_theorem52_row_leader_width():
    p = build_theorem52_exponent(1)
    assert p.bumps[0].width == 2.0  # raw width 2/n^2 at n = 1
    assert p.bumps[0].effective_width == 1.0 / 200.0  # capped by the profile
    assert p.bumps[0].center == pytest.approx(4.0 * math.pi / 3.0)
    assert theorem52_width(3, 1) == pytest.approx(2.0 / 9.0)


def test_theorem52_grid_density_at_100():
    # every length-0.01 subinterval of the rescaled unit interval contains a
    # center once the depth reaches 100 (at depth 50 the leftmost center sits
    # at 2/101 ~ 0.0198, so the claim fails near 0 there)
    grid = Theorem52Grid(depth=100, interval=(0.0, 1.0))
    centers = sorted(c for c, _, _ in grid.centers())
    gaps = np.diff([0.0, *centers, 1.0])
    assert gaps.max() < 0.01


def test_theorem52_grid_density_fails_at_50():
    # documents why the density claim needs depth 100: at depth 50 the
    # leftmost center sits at 2/101 ~ 0.0198, leaving a length-0.01
    # subinterval near 0 with no center in it
    grid = Theorem52Grid(depth=50, interval=(0.0, 1.0))
    centers = sorted(c for c, _, _ in grid.centers())
    assert min(centers) > 0.0198
    gaps = np.diff([0.0, *centers, 1.0])
    assert gaps.max() >= 0.01


def test_essential_range_constant():
    p = constant_exponent(2.0)
    assert essential_range_on(p, 0.1, 0.9) == (2.0, 2.0)


def test_essential_range_conjugate_sup():
    r, eps = 0.25, 1e-3
    p = single_bump_exponent(r, 0.005, base=1.0)
    q = conjugate(p)
    inf_v, sup_v = essential_range_on(q, r, r + eps)
    assert sup_v == pytest.approx(1.0 + 1.0 / math.log(1.0 / eps), rel=1e-12)
    assert inf_v == 1.0


def test_essential_range_bump_divergent():
    p = single_bump_exponent(0.25, 0.005)
    _, sup_v = essential_range_on(p, 0.2, 0.3)
    assert sup_v is DIVERGENT
    inf_v, sup_v2 = essential_range_on(p, 0.2501, 0.26)
    assert sup_v2 is not DIVERGENT
    assert inf_v == 2.0  # interval extends past the bump support


def test_essential_range_degenerate_raises():
    with pytest.raises(InputError):
        essential_range_on(constant_exponent(2.0), 0.5, 0.5)


def test_union_exponent_single_level():
    f = step_function([(0.0, 1.0, 0.5)])
    p, cert = exponent_for_integrable(f)
    assert p.eval(0.3) == 2.0
    assert cert == pytest.approx(1.0)


def test_union_exponent_levels():
    f = step_function([(0.0, 0.3, 0.5), (0.3, 0.6, 1.5), (0.6, 0.9, 7.3)])
    p, _ = exponent_for_integrable(f)
    vals = sorted({v for (_, _, v) in p.levels})
    assert vals == pytest.approx([1.125, 1.5, 2.0])


def test_union_exponent_rejects_nonstep():
    from vexlab.common import RepresentationError
    from vexlab.funcrep import Piece, PiecewiseFunction

    g = PiecewiseFunction(pieces=(Piece(a=0.1, b=0.2, kind="power-log", value=1.0),))
    with pytest.raises(RepresentationError):
        exponent_for_integrable(g)


def test_union_certificate_huge_value():
    f = step_function([(0.0, 1e-9, 1e6)])
    _, cert = exponent_for_integrable(f)
    assert math.isfinite(cert)


def test_serialization_round_trip_exact(tilde_p_50):
    doc = exponent_dumps(tilde_p_50)
    p2 = exponent_loads(doc)
    assert exponent_dumps(p2) == doc
    assert [b.center for b in p2.bumps] == [b.center for b in tilde_p_50.bumps]
    assert [b.center_exact for b in p2.bumps] == [b.center_exact for b in tilde_p_50.bumps]


def test_serialization_round_trip_theorem52():
    p = build_theorem52_exponent(4)
    doc = exponent_dumps(p)
    p2 = exponent_loads(doc)
    assert exponent_dumps(p2) == doc


def test_serialization_round_trip_conjugate(tilde_q_50):
    doc = exponent_dumps(tilde_q_50)
    q2 = exponent_loads(doc)
    assert exponent_dumps(q2) == doc
    assert q2.parent.truncation == 50


def test_nonsummable_rule_rejected():
    with pytest.raises(ConstructionError):
        build_tilde_p(4, delta_rule=lambda k: Fraction(1, 2))  # constant widths
