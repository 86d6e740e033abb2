"""Modulars and Luxemburg norms with certified brackets.

The norm is the infimum of lambda with modular(f/lambda) <= 1, computed by
bisection on a bracket whose lower end can be pinned analytically: whenever
the modular is certified Divergent at some lambda, every smaller lambda is
divergent too, so that lambda is a hard floor under the norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .common import InputError, ModularValue
from .exponent import ExponentFunction, conjugate, essential_range_on
from .funcrep import PiecewiseFunction, integrate, l1_norm, powered_integral, sup_norm

__all__ = [
    "NormResult",
    "modular",
    "luxemburg_norm",
    "char_interval_norm",
    "char_norm_bounds",
    "holder_pairing",
]

DEFAULT_NORM_TOL = 1e-9
# modular noise must sit well below the bracket resolution for the
# bisection predicate to be trustworthy
DEFAULT_MODULAR_TOL = 1e-11

INV_E = 1.0 / math.e


@dataclass(frozen=True)
class NormResult:
    """Certified bracket [lo, hi] around the Luxemburg norm.

    ``divergence_floor`` is the largest lambda at which the modular carries an
    analytic divergence certificate; it always sits strictly below ``lo``.
    """

    lo: float
    hi: float
    iterations: int
    divergence_floor: float | None = None

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def to_json(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "iterations": self.iterations,
            "divergence_floor": self.divergence_floor,
        }


def modular(
    f: PiecewiseFunction,
    p: ExponentFunction,
    lam: float,
    tol: float = DEFAULT_MODULAR_TOL,
) -> ModularValue:
    """int over the domain of (|f|/lam)^{p(x)} dx."""
    if lam <= 0.0:
        raise InputError("lambda must be positive")
    if tol <= 0.0:
        raise InputError("tolerance must be positive")
    lo, hi = f.domain
    return powered_integral(f, p, lam, lo, hi, tol=tol)


def _is_zero(f: PiecewiseFunction) -> bool:
    return all(p.kind == "constant" and p.value == 0.0 for p in f.pieces)


def _initial_scale(f: PiecewiseFunction) -> float:
    mass = l1_norm(f)
    sup = sup_norm(f)
    guess = mass + (sup if sup is not None else mass + 1.0)
    return max(guess, 1e-12)


def luxemburg_norm(
    f: PiecewiseFunction,
    p: ExponentFunction,
    tol: float = DEFAULT_NORM_TOL,
    modular_tol: float = DEFAULT_MODULAR_TOL,
    divergence_floor: float | None = None,
) -> NormResult:
    """Bisection on lambda with modular(lambda) <= 1 as the predicate.

    A Divergent modular counts as > 1.  The bracket is expanded by doubling
    up / halving down from an L1 + sup heuristic before bisection starts.
    When the modular error budget is wider than the requested bracket the
    bracket is widened accordingly rather than reported as spuriously tight.
    """
    if tol <= 0.0:
        raise InputError("tolerance must be positive")
    if _is_zero(f):
        return NormResult(lo=0.0, hi=0.0, iterations=0)

    iterations = 0

    def inside(lam: float) -> bool:
        nonlocal iterations
        iterations += 1
        mv = modular(f, p, lam, tol=modular_tol)
        if not mv.is_finite:
            return False
        return mv.value <= 1.0 + mv.abs_error

    hi = max(_initial_scale(f), divergence_floor or 0.0)
    for _ in range(200):
        if inside(hi):
            break
        hi *= 2.0
    else:
        raise InputError("could not bracket the norm from above; f may be outside the space")

    if divergence_floor is not None:
        lo = divergence_floor
    else:
        lo = hi / 2.0
        for _ in range(200):
            if lo <= 0.0 or not inside(lo):
                break
            hi = lo
            lo /= 2.0
        if lo <= 1e-300:
            lo = 0.0

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if inside(mid):
            hi = mid
        else:
            lo = mid
    # widen the bracket by the modular uncertainty at hi (the lenient
    # predicate may have admitted a point with true modular barely above 1;
    # near the root the modular moves at least as fast as 1/lambda)
    mv_hi = modular(f, p, hi, tol=modular_tol)
    rel_slack = (mv_hi.abs_error if mv_hi.is_finite else 0.0) * 2.0
    return NormResult(
        lo=lo,
        hi=hi * (1.0 + rel_slack),
        iterations=iterations,
        divergence_floor=divergence_floor,
    )


def _bump_fully_inside(p: ExponentFunction, a: float, b: float):
    src = p.effective_bump_source()
    for bump in src.bumps:
        sa, sb = bump.support
        if a < sa and sb < b:
            return bump
    return None


def char_interval_norm(
    p: ExponentFunction,
    a: float,
    b: float,
    tol: float = DEFAULT_NORM_TOL,
) -> NormResult:
    """Norm of the characteristic function of (a, b).

    If a materialized bump lies fully inside the interval, the modular at
    lambda = 1/e contains int du/u over the bump and is certified Divergent,
    so the result carries divergence_floor = 1/e analytically and the lower
    bracket end never falls below it.
    """
    if not (b > a):
        raise InputError("interval must be nondegenerate")
    lo_dom, hi_dom = p.interval
    if not (lo_dom <= a and b <= hi_dom):
        raise InputError("interval outside exponent domain")
    from .funcrep import characteristic

    chi = characteristic(a, b, domain=p.interval)
    floor = None
    if p.kind in ("tilde-p", "theorem52") and _bump_fully_inside(p, a, b) is not None:
        floor = INV_E
    return luxemburg_norm(chi, p, tol=tol, divergence_floor=floor)


def char_norm_bounds(p: ExponentFunction, a: float, b: float) -> tuple[float, float]:
    """Closed-form sandwich |I|^{1/p_-} <= norm <= |I|^{1/p_+} for |I| <= 1.

    p_+ infinite degrades the upper bound to 1 (convention 1/inf = 0).
    Valid in the regime where the norm is known to lie in (0, 1].
    """
    if not (b > a):
        raise InputError("interval must be nondegenerate")
    length = b - a
    if length > 1.0:
        raise InputError("closed-form sandwich requires |I| <= 1")
    p_inf, p_sup = essential_range_on(p, a, b)
    lo = length ** (1.0 / p_inf)
    if isinstance(p_sup, float) and not math.isinf(p_sup):
        hi = length ** (1.0 / p_sup)
    else:
        hi = 1.0
    return lo, hi


def holder_pairing(
    f: PiecewiseFunction,
    g: PiecewiseFunction,
    p: ExponentFunction,
    tol: float = DEFAULT_NORM_TOL,
) -> tuple[float, float]:
    """(int |f g|, 2 * ||f||_p * ||g||_{p'}) for step f, g.

    The constant 2 is the standard generalized-Hoelder constant for
    Luxemburg norms.
    """
    if not (f.is_step() and g.is_step()):
        from .common import RepresentationError

        raise RepresentationError("pairing requires step functions")
    edges = sorted(
        {f.domain[0], f.domain[1]}
        | {q.a for q in f.pieces}
        | {q.b for q in f.pieces}
        | {q.a for q in g.pieces}
        | {q.b for q in g.pieces}
    )
    pairing = 0.0
    for x0, x1 in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (x0 + x1)
        pf = f.piece_at(mid)
        pg = g.piece_at(mid)
        if pf is not None and pg is not None:
            pairing += abs(pf.value * pg.value) * (x1 - x0)
    nf = luxemburg_norm(f, p, tol=tol)
    ng = luxemburg_norm(g, conjugate(p), tol=tol)
    bound = 2.0 * nf.hi * ng.hi
    return pairing, bound
