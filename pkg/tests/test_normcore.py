import math

import numpy as np
import pytest

from vexlab.common import InputError
from vexlab.exponent import build_tilde_p, conjugate, constant_exponent, single_bump_exponent
from vexlab.funcrep import add_steps, characteristic, l1_norm, scale_function, step_function
from vexlab.normcore import (
    INV_E,
    char_interval_norm,
    char_norm_bounds,
    holder_pairing,
    luxemburg_norm,
    modular,
)

E = math.e


def _random_step(rng, domain=(0.0, 1.0), max_pieces=5, max_height=4.0):
    n = int(rng.integers(1, max_pieces + 1))
    lo, hi = domain
    edges = np.sort(rng.uniform(lo, hi, size=2 * n))
    ivs = []
    for j in range(n):
        a, b = float(edges[2 * j]), float(edges[2 * j + 1])
        if b > a:
            ivs.append((a, b, float(rng.uniform(0.05, max_height))))
    return step_function(ivs, domain=domain)


def test_modular_zero_function():
    f = step_function([], domain=(0.0, 1.0))
    assert modular(f, constant_exponent(2.0), 1.0).value == 0.0


def test_modular_char_quarter():
    mv = modular(characteristic(0.0, 0.25), constant_exponent(2.0), 0.5)
    assert mv.value == pytest.approx(1.0, rel=1e-14)


def test_modular_divergent_at_inv_e():
    r, delta = 0.3, 0.005
    p = single_bump_exponent(r, delta)
    mv = modular(characteristic(r, r + delta), p, 1.0 / E)
    assert not mv.is_finite
    assert mv.divergence.where == pytest.approx(r)


def test_norm_char_quarter_constant_two():
    res = luxemburg_norm(characteristic(0.0, 0.25), constant_exponent(2.0))
    assert res.lo <= 0.5 <= res.hi
    assert res.width <= 1e-8


def test_norm_zero_function():
    res = luxemburg_norm(step_function([]), constant_exponent(2.0))
    assert res.lo == res.hi == 0.0


def test_norm_single_bump_against_closed_form_bisection():
    r, delta = 0.3, 0.005
    p = single_bump_exponent(r, delta)
    chi = characteristic(r, r + delta)

    def closed_modular(lam):
        t = 1.0 / lam
        alpha = math.log(t)
        if alpha >= 1.0:
            return None
        return t**2 * delta ** (1.0 - alpha) / (1.0 - alpha)

    lo, hi = 1.0 / E, 4.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        m = closed_modular(mid)
        if m is None or m > 1.0:
            lo = mid
        else:
            hi = mid
    oracle = 0.5 * (lo + hi)
    assert oracle > 1.0 / E
    res = luxemburg_norm(chi, p, tol=1e-10)
    assert res.mid == pytest.approx(oracle, abs=1e-8)


def test_norm_homogeneity():
    p = constant_exponent(2.0)
    f = step_function([(0.1, 0.3, 1.0), (0.5, 0.6, 2.0)])
    c = 7.25
    res1 = luxemburg_norm(f, p)
    res2 = luxemburg_norm(scale_function(f, c), p)
    assert res2.mid == pytest.approx(c * res1.mid, abs=c * (res1.width + res2.width) + 1e-9)


def test_constant_exponent_reduction(rng):
    for q0 in (1.5, 2.0, 3.0):
        p = constant_exponent(q0)
        for _ in range(10):
            f = _random_step(rng)
            if not f.pieces:
                continue
            classical = (
                sum(abs(pc.value) ** q0 * (pc.b - pc.a) for pc in f.pieces)
            ) ** (1.0 / q0)
            res = luxemburg_norm(f, p, tol=1e-10)
            assert res.mid == pytest.approx(classical, abs=1e-8 * (1 + classical))


def test_lattice_monotonicity(rng):
    p = build_tilde_p(5)
    for _ in range(25):
        f = _random_step(rng)
        if not f.pieces:
            continue
        g = step_function(
            [(pc.a, pc.b, pc.value * float(rng.uniform(0.0, 1.0))) for pc in f.pieces]
        )
        tol = 1e-6
        nf = luxemburg_norm(f, p, tol=tol)
        ng = luxemburg_norm(g, p, tol=tol)
        assert ng.hi <= nf.hi + 2.0 * tol


def test_fatou_increasing_chain():
    p = build_tilde_p(5)
    base = [(0.1, 0.3, 1.0), (0.4, 0.7, 2.0)]
    prev_hi = 0.0
    tol = 1e-7
    for frac in (0.25, 0.5, 0.75, 1.0):
        f = step_function([(a, b, v * frac) for a, b, v in base])
        res = luxemburg_norm(f, p, tol=tol)
        assert res.hi >= prev_hi - 2.0 * tol
        prev_hi = res.hi


def test_unit_ball_law(rng):
    p = build_tilde_p(5)
    for _ in range(20):
        f = _random_step(rng)
        if not f.pieces:
            continue
        res = luxemburg_norm(f, p, tol=1e-8)
        mv = modular(f, p, 1.0)
        if res.hi <= 1.0:
            assert mv.value <= 1.0 + 1e-7
        if mv.is_finite and mv.value <= 1.0 - 1e-7:
            assert res.lo <= 1.0


def test_modular_at_norm_hi_within_ball(rng):
    p = build_tilde_p(5)
    f = _random_step(rng)
    res = luxemburg_norm(f, p, tol=1e-9)
    mv = modular(f, p, res.hi)
    assert mv.is_finite
    assert mv.value <= 1.0 + 1e-9


def test_char_interval_norm_divergence_floor(tilde_p_50):
    bump = tilde_p_50.bumps[0]
    sa, sb = bump.support
    res = char_interval_norm(tilde_p_50, sa - 1e-4, sb + 1e-4)
    assert res.divergence_floor == INV_E
    assert res.lo >= INV_E
    assert res.divergence_floor < res.lo


def test_char_interval_norm_constant_full():
    res = char_interval_norm(constant_exponent(2.0), 0.0, 1.0)
    assert res.mid == pytest.approx(1.0, abs=1e-8)


def test_char_interval_norm_degenerate_raises():
    with pytest.raises(InputError):
        char_interval_norm(constant_exponent(2.0), 0.5, 0.5)


def test_char_norm_bounds_constant():
    lo, hi = char_norm_bounds(constant_exponent(2.0), 0.0, 0.04)
    assert lo == pytest.approx(0.2)
    assert hi == pytest.approx(0.2)


def test_char_norm_bounds_conjugate_single_bump():
    r, eps = 0.25, 1e-4
    q = conjugate(single_bump_exponent(r, 0.005, base=1.0))
    lo, hi = char_norm_bounds(q, r, r + eps)
    q_plus = 1.0 + 1.0 / math.log(1.0 / eps)
    assert hi == pytest.approx(eps ** (1.0 / q_plus), rel=1e-12)
    assert hi <= E * eps
    assert lo == pytest.approx(eps)


def test_char_norm_bounds_bump_interval_degenerate_hi(tilde_p_50):
    bump = tilde_p_50.bumps[0]
    sa, sb = bump.support
    lo, hi = char_norm_bounds(tilde_p_50, sa - 1e-4, sb + 1e-4)
    assert hi == 1.0  # sup = infinity, convention 1/inf = 0
    res = char_interval_norm(tilde_p_50, sa - 1e-4, sb + 1e-4)
    assert res.lo >= INV_E  # the sandwich degenerates; the floor still works


def test_char_norm_bounds_sandwich_against_norm(tilde_q_50, rng):
    src = tilde_q_50.parent
    for _ in range(10):
        bump = src.bumps[int(rng.integers(0, 10))]
        eps = float(rng.uniform(0.1, 1.0)) * bump.effective_width
        a, b = bump.center, bump.center + eps
        lo, hi = char_norm_bounds(tilde_q_50, a, b)
        res = luxemburg_norm(characteristic(a, b, domain=src.interval), tilde_q_50, tol=eps * 1e-6)
        assert lo <= res.hi * (1.0 + 1e-9)
        assert res.lo <= hi * (1.0 + 1e-9)


def test_holder_pairing_unit():
    p = constant_exponent(2.0)
    f = characteristic(0.0, 1.0)
    pair, bound = holder_pairing(f, f, p)
    assert pair == pytest.approx(1.0)
    assert bound == pytest.approx(2.0, abs=1e-6)
    assert pair <= bound


def test_holder_pairing_zero():
    p = constant_exponent(2.0)
    f = _random_step(np.random.default_rng(5))
    g = step_function([])
    pair, _ = holder_pairing(f, g, p)
    assert pair == 0.0


def test_holder_pairing_random(rng):
    p = build_tilde_p(3)
    for _ in range(200):
        f = _random_step(rng)
        g = _random_step(rng)
        pair, bound = holder_pairing(f, g, p, tol=1e-6)
        assert pair <= bound * (1.0 + 1e-9)


def test_norm_tolerance_must_be_positive():
    with pytest.raises(InputError):
        luxemburg_norm(characteristic(0.0, 0.5), constant_exponent(2.0), tol=0.0)
