"""Variable exponents built from a base value plus translated log-bumps.

The central object is a sum of terms log(1/(x - c)) restricted to windows
(c, c + w) with w capped at the profile cutoff 1/200, on top of a constant
base.  Conjugation, the double-indexed grid construction used by the
Fourier experiments, and the union (level-set) exponent for integrable
step functions are all provided on the same type.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator

import numpy as np

from .common import DIVERGENT, ConstructionError, InputError, _DivergentValue

__all__ = [
    "PROFILE_CUTOFF",
    "LogBump",
    "ExponentFunction",
    "DyadicRationals",
    "Theorem52Grid",
    "constant_exponent",
    "single_bump_exponent",
    "build_tilde_p",
    "build_theorem52_exponent",
    "exponent_for_integrable",
    "conjugate",
    "essential_range_on",
    "log_bump_integral",
    "exponent_to_json",
    "exponent_from_json",
]

# The bump profile is log(1/x) on (0, 1/200) and zero elsewhere, so a bump's
# effective support is (center, center + min(width, PROFILE_CUTOFF)).
PROFILE_CUTOFF = 1.0 / 200.0

TWO_PI = 2.0 * math.pi


def log_bump_integral(delta: float) -> float:
    """Exact integral of log(1/x) over (0, delta): delta * (1 + log(1/delta))."""
    if delta <= 0.0:
        return 0.0
    return delta * (1.0 - math.log(delta))


@dataclass(frozen=True)
class LogBump:
    """One translated log-bump: contributes log(1/(x - center)) on its window.

    ``width`` is the window length before the 1/200 profile cutoff; the
    effective support is (center, center + min(width, 1/200)).  ``label``
    carries the (n, k) pair for grid-enumerated bumps.  Exact rational
    center/width are kept when the enumeration scheme provides them so the
    JSON round trip is bit-exact.
    """

    center: float
    width: float
    index: int
    label: tuple[int, int] | None = None
    center_exact: Fraction | None = None
    width_exact: Fraction | None = None

    def __post_init__(self):
        if not (self.width > 0.0):
            raise InputError(f"bump width must be positive, got {self.width}")

    @property
    def effective_width(self) -> float:
        return min(self.width, PROFILE_CUTOFF)

    @property
    def support(self) -> tuple[float, float]:
        return (self.center, self.center + self.effective_width)


@dataclass(frozen=True)
class ExponentFunction:
    """A variable exponent p(.) on a working interval.

    kinds:
      * ``constant``   -- p == base everywhere
      * ``tilde-p``    -- base plus log-bumps at enumerated centers
      * ``theorem52``  -- same shape, double-indexed (n, k) grid of centers
      * ``union``      -- piecewise-constant level exponent (1 + 1/n levels)
      * ``conjugate``  -- pointwise p/(p-1) of ``parent``
    """

    kind: str
    base: float
    interval: tuple[float, float]
    bumps: tuple[LogBump, ...] = ()
    levels: tuple[tuple[float, float, float], ...] = ()
    parent: "ExponentFunction | None" = None
    tail_bound: float | None = None

    def __post_init__(self):
        if self.kind not in ("constant", "tilde-p", "theorem52", "union", "conjugate"):
            raise InputError(f"unknown exponent kind {self.kind!r}")
        if self.kind != "conjugate" and self.base < 1.0:
            raise InputError("exponent base must be >= 1")

    @property
    def truncation(self) -> int:
        return len(self.bumps)

    @cached_property
    def _centers(self) -> np.ndarray:
        return np.array([b.center for b in self._sorted_bumps], dtype=float)

    @cached_property
    def _ends(self) -> np.ndarray:
        return np.array([b.center + b.effective_width for b in self._sorted_bumps], dtype=float)

    @cached_property
    def _sorted_bumps(self) -> tuple[LogBump, ...]:
        return tuple(sorted(self.bumps, key=lambda b: b.center))

    @cached_property
    def _max_effective_width(self) -> float:
        return max((b.effective_width for b in self.bumps), default=0.0)

    def _check_domain(self, x: float) -> None:
        a, b = self.interval
        if not (a <= x <= b):
            raise InputError(f"x={x} outside exponent domain [{a}, {b}]")

    def active_bumps(self, x: float) -> list[LogBump]:
        """Bumps whose effective support contains x (strictly)."""
        out = []
        lo = np.searchsorted(self._centers, x - self._max_effective_width, side="left")
        hi = np.searchsorted(self._centers, x, side="left")
        for b in self._sorted_bumps[lo:hi]:
            if b.center < x < b.center + b.effective_width:
                out.append(b)
        return out

    def eval(self, x: float) -> float | _DivergentValue:
        """Pointwise value; the right-limit at a bump center is the marker."""
        self._check_domain(x)
        if self.kind == "constant":
            return self.base
        if self.kind == "conjugate":
            v = self.parent.eval(x)
            if v is DIVERGENT:
                return 1.0  # convention 1/inf = 0
            if v == 1.0:
                return DIVERGENT
            return v / (v - 1.0)
        if self.kind == "union":
            return self._union_value(x)
        # bump kinds
        if self._centers.size and np.any(self._centers == x):
            return DIVERGENT
        total = self.base
        for b in self.active_bumps(x):
            total += math.log(1.0 / (x - b.center))
        return total

    def _union_value(self, x: float) -> float:
        for i, (a, b, v) in enumerate(self.levels):
            last = i == len(self.levels) - 1
            if a <= x < b or (last and x == b):
                return v
        return self.base

    def eval_array(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; xs must avoid bump centers exactly."""
        xs = np.asarray(xs, dtype=float)
        if self.kind == "constant":
            return np.full_like(xs, self.base)
        if self.kind == "conjugate":
            v = self.parent.eval_array(xs)
            return v / (v - 1.0)
        if self.kind == "union":
            return np.array([self._union_value(float(x)) for x in xs], dtype=float)
        out = np.full_like(xs, self.base)
        order = np.argsort(xs, kind="stable")
        xs_sorted = xs[order]
        for b in self._sorted_bumps:
            lo = np.searchsorted(xs_sorted, b.center, side="right")
            hi = np.searchsorted(xs_sorted, b.center + b.effective_width, side="left")
            if hi > lo:
                idx = order[lo:hi]
                out[idx] += np.log(1.0 / (xs[idx] - b.center))
        return out

    def breakpoints_in(self, a: float, b: float) -> list[float]:
        """Bump centers and support right-ends (and level edges) inside (a, b)."""
        pts: set[float] = set()
        for bump in self.effective_bump_source()._sorted_bumps:
            for p in bump.support:
                if a < p < b:
                    pts.add(p)
        src = self.parent if self.kind == "conjugate" else self
        for la, lb, _ in src.levels:
            for p in (la, lb):
                if a < p < b:
                    pts.add(p)
        return sorted(pts)

    def effective_bump_source(self) -> "ExponentFunction":
        return self.parent if self.kind == "conjugate" else self

    def base_value(self) -> float:
        """Base of the underlying bump exponent (through conjugation)."""
        src = self.effective_bump_source()
        return src.base


def constant_exponent(value: float, interval: tuple[float, float] = (0.0, 1.0)) -> ExponentFunction:
    return ExponentFunction(kind="constant", base=float(value), interval=interval)


def single_bump_exponent(
    center: float,
    width: float,
    base: float = 2.0,
    interval: tuple[float, float] = (0.0, 1.0),
) -> ExponentFunction:
    bump = LogBump(center=center, width=width, index=1)
    return ExponentFunction(kind="tilde-p", base=base, interval=interval, bumps=(bump,))


@dataclass(frozen=True)
class DyadicRationals:
    """Deterministic enumeration of dyadic rationals in (0,1), by level.

    Order: 1/2, 1/4, 3/4, 1/8, 3/8, 5/8, 7/8, 1/16, ...  Injective and dense.
    """

    interval: tuple[float, float] = (0.0, 1.0)

    def __iter__(self) -> Iterator[Fraction]:
        level = 1
        while True:
            den = 1 << level
            for num in range(1, den, 2):
                yield Fraction(num, den)
            level += 1

    def centers(self, count: int) -> list[tuple[float, Fraction | None, tuple[int, int] | None]]:
        a, b = self.interval
        out = []
        it = iter(self)
        for _ in range(count):
            frac = next(it)
            scaled = Fraction(a) + (Fraction(b) - Fraction(a)) * frac
            out.append((float(scaled), scaled, None))
        return out


@dataclass(frozen=True)
class Theorem52Grid:
    """Centers 4*pi*k/(2n+1) for n <= depth, k <= n, rescaled to ``interval``.

    The grid is naturally a subset of (0, 2*pi); the rescaling to the working
    interval is explicit so that [0,1]-based and torus-based exponents can
    share the same enumeration.
    """

    depth: int
    interval: tuple[float, float] = (0.0, TWO_PI)

    def raw_pairs(self) -> Iterator[tuple[int, int, float]]:
        for n in range(1, self.depth + 1):
            for k in range(1, n + 1):
                yield n, k, 4.0 * math.pi * k / (2 * n + 1)

    def centers(self, count: int | None = None) -> list[tuple[float, Fraction | None, tuple[int, int] | None]]:
        a, b = self.interval
        scale = (b - a) / TWO_PI
        out = []
        for n, k, t in self.raw_pairs():
            out.append((a + scale * t, None, (n, k)))
            if count is not None and len(out) >= count:
                break
        return out


def default_width_rule(k: int) -> Fraction:
    """min(1/200, 2**-k): summable in the certified-tail sense."""
    return min(Fraction(1, 200), Fraction(1, 1 << k))


def _dyadic_tail_bound(K: int) -> float:
    """Upper bound for sum_{k>K} of the log-bump integral with dyadic widths."""
    total = 0.0
    k = K + 1
    while (1 << k) < 200:  # width still capped at 1/200
        total += log_bump_integral(PROFILE_CUTOFF)
        k += 1
    # from here widths are 2^-k:  sum 2^-k (1 + k log 2) over k >= k0
    k0 = k
    log2 = math.log(2.0)
    total += 2.0 ** (1 - k0) + log2 * (k0 + 1) * 2.0 ** (1 - k0)
    return total


def build_tilde_p(
    K: int,
    enum: DyadicRationals | Theorem52Grid | None = None,
    delta_rule=default_width_rule,
) -> ExponentFunction:
    """Exponent 2 + sum of K log-bumps at the enumerated centers.

    The stored ``tail_bound`` certifies that the defining series of bump-mass
    integrals converges: it is the exact partial sum over the materialized
    bumps plus an analytic bound on the remainder.
    """
    if K < 0:
        raise InputError("K must be >= 0")
    enum = enum or DyadicRationals()
    if K == 0:
        return ExponentFunction(kind="constant", base=2.0, interval=enum.interval, tail_bound=_dyadic_tail_bound(0))
    centers = enum.centers(K)
    bumps = []
    partial = 0.0
    for i, (c, c_exact, label) in enumerate(centers, start=1):
        w = delta_rule(i)
        w_exact = w if isinstance(w, Fraction) else None
        wf = float(w)
        if wf <= 0.0:
            raise ConstructionError(f"width rule produced nonpositive width at k={i}")
        bumps.append(
            LogBump(center=c, width=wf, index=i, label=label, center_exact=c_exact, width_exact=w_exact)
        )
        partial += log_bump_integral(min(wf, PROFILE_CUTOFF))
    tail = _dyadic_tail_bound(K) if delta_rule is default_width_rule else None
    if tail is None:
        # generic rule: the block sums over (K, 2K] and (2K, 4K] must decay,
        # and the tail is bounded by geometric extrapolation of that decay
        block1 = sum(
            log_bump_integral(min(float(delta_rule(k)), PROFILE_CUTOFF)) for k in range(K + 1, 2 * K + 1)
        )
        block2 = sum(
            log_bump_integral(min(float(delta_rule(k)), PROFILE_CUTOFF))
            for k in range(2 * K + 1, 4 * K + 1)
        )
        if block1 > 0.0 and block2 >= block1:
            raise ConstructionError("width rule does not appear summable")
        ratio = block2 / block1 if block1 > 0.0 else 0.0
        tail = block1 + block2 + (block2 * ratio / (1.0 - ratio) if ratio < 1.0 else 0.0)
    return ExponentFunction(
        kind="tilde-p",
        base=2.0,
        interval=enum.interval,
        bumps=tuple(bumps),
        tail_bound=partial + tail,
    )


def theorem52_width(n: int, k: int) -> float:
    """Width budget for the (n, k) bump: 2/(n^2 k^2); row leader is 2/n^2."""
    return 2.0 / (n * n * k * k)


def build_theorem52_exponent(N: int, interval: tuple[float, float] = (0.0, TWO_PI)) -> ExponentFunction:
    """Double-indexed exponent 2 + sum over n<=N, k<=n of bumps at 4*pi*k/(2n+1).

    Widths follow 2/(n^2 k^2), which keeps the row-leading width at 2/n^2 and
    makes the double series of bump-mass integrals converge; the certified
    tail bound for rows beyond N is stored on the result.  The (n, k) labels
    preserve the constraint slots the spike construction reads back via
    :func:`theorem52_width`.
    """
    if N < 1:
        raise InputError("N must be >= 1")
    grid = Theorem52Grid(depth=N, interval=interval)
    bumps = []
    partial = 0.0
    idx = 0
    a, b = interval
    scale = (b - a) / TWO_PI
    for n, k, t in grid.raw_pairs():
        idx += 1
        w = theorem52_width(n, k)
        bumps.append(LogBump(center=a + scale * t, width=w, index=idx, label=(n, k)))
        partial += log_bump_integral(min(w, PROFILE_CUTOFF))
    # Tail over rows n > N: per row, sum_k g(2/(n^2 k^2)) with
    # g(d) = d(1 + log(1/d)) <= (2/(n^2 k^2)) (1 + log(n^2 k^2 / 2)).
    zeta2 = math.pi * math.pi / 6.0
    sum_logk_k2 = 0.9375482543158437  # sum_{k>=1} log(k)/k^2
    def row_bound(n: float) -> float:
        return (2.0 / n**2) * ((1.0 - math.log(2.0) + 2.0 * math.log(n)) * zeta2 + 2.0 * sum_logk_k2)
    # integral comparison: sum_{n>N} row_bound(n) <= row_bound(N+1) + int_{N+1}^inf row_bound
    c1 = (1.0 - math.log(2.0)) * zeta2 + 2.0 * sum_logk_k2
    c2 = 2.0 * zeta2
    M = float(N + 1)
    tail = row_bound(M) + (2.0 * c1 + c2 * (2.0 * math.log(M) + 2.0)) / M
    return ExponentFunction(
        kind="theorem52",
        base=2.0,
        interval=interval,
        bumps=tuple(bumps),
        tail_bound=partial + tail,
    )


def exponent_for_integrable(f) -> tuple[ExponentFunction, float]:
    """Union-construction exponent for an integrable step function.

    Level sets E_n = {n-1 <= |f| < n} get exponent 1 + 1/n.  Returns the
    exponent together with the convergence certificate sum n^{1+1/n} |E_n|
    (a finite sum for a step function).
    """
    from .funcrep import PiecewiseFunction  # local import to avoid a cycle

    if not isinstance(f, PiecewiseFunction) or not f.is_step():
        from .common import RepresentationError

        raise RepresentationError("union-construction exponent requires a step function")
    lo, hi = f.domain
    edges: list[tuple[float, float, float]] = []  # (a, b, |value|)
    cursor = lo
    for p in sorted(f.pieces, key=lambda p: p.a):
        if p.a > cursor:
            edges.append((cursor, p.a, 0.0))
        edges.append((p.a, p.b, abs(p.value)))
        cursor = p.b
    if cursor < hi:
        edges.append((cursor, hi, 0.0))

    levels = []
    measures: dict[int, float] = {}
    for a, b, v in edges:
        n = int(math.floor(v)) + 1
        levels.append((a, b, 1.0 + 1.0 / n))
        measures[n] = measures.get(n, 0.0) + (b - a)
    # merge adjacent equal levels
    merged: list[tuple[float, float, float]] = []
    for a, b, val in levels:
        if merged and merged[-1][2] == val and merged[-1][1] == a:
            merged[-1] = (merged[-1][0], b, val)
        else:
            merged.append((a, b, val))
    certificate = math.fsum(n ** (1.0 + 1.0 / n) * m for n, m in sorted(measures.items()))
    expo = ExponentFunction(
        kind="union",
        base=2.0,
        interval=f.domain,
        levels=tuple(merged),
    )
    return expo, certificate


def conjugate(p: ExponentFunction) -> ExponentFunction:
    """Pointwise conjugate q = p/(p-1), with q = 1 where p = inf.

    Conjugating twice returns the original object, so the involution is
    exact rather than merely within rounding.
    """
    if p.kind == "conjugate":
        return p.parent
    if p.kind == "constant":
        if p.base == 1.0:
            # conjugate of constant 1 is identically infinity; keep it as a
            # conjugate wrapper so the convention stays explicit.
            return ExponentFunction(kind="conjugate", base=math.inf, interval=p.interval, parent=p)
        return ExponentFunction(
            kind="conjugate", base=p.base / (p.base - 1.0), interval=p.interval, parent=p
        )
    base = p.base / (p.base - 1.0) if p.base > 1.0 else math.inf
    return ExponentFunction(kind="conjugate", base=base, interval=p.interval, parent=p)


def essential_range_on(
    p: ExponentFunction, a: float, b: float
) -> tuple[float, float | _DivergentValue]:
    """Exact essential (inf, sup) of the truncated exponent on (a, b).

    The closed forms are piecewise monotone between bump breakpoints, so the
    extrema are attained at segment endpoints; the sup is the divergence
    marker exactly when a bump center lies in [a, b).
    """
    if not (b > a):
        raise InputError("interval must be nondegenerate")
    if p.kind == "constant":
        return (p.base, p.base)
    if p.kind == "union":
        vals = [v for (la, lb, v) in p.levels if lb > a and la < b]
        lo_cov = min((la for (la, lb, v) in p.levels if lb > a and la < b), default=b)
        hi_cov = max((lb for (la, lb, v) in p.levels if lb > a and la < b), default=a)
        if lo_cov > a or hi_cov < b or not vals:
            vals.append(p.base)
        return (min(vals), max(vals))
    if p.kind == "conjugate":
        pi, ps = essential_range_on(p.parent, a, b)
        q_sup = math.inf if pi == 1.0 else pi / (pi - 1.0)
        if q_sup == math.inf:
            q_sup_val: float | _DivergentValue = DIVERGENT
        else:
            q_sup_val = q_sup
        q_inf = 1.0 if ps is DIVERGENT else ps / (ps - 1.0)
        return (q_inf, q_sup_val)

    src = p
    pts = sorted({a, b, *src.breakpoints_in(a, b)})
    centers = {float(c) for c in src._centers}
    diverges = any(a <= c < b for c in centers)
    finite_sups: list[float] = [src.base]
    inf = math.inf
    for u, v in zip(pts[:-1], pts[1:]):
        mid = 0.5 * (u + v)
        active = src.active_bumps(mid)
        # p is a decreasing closed form on each segment: sup at the right
        # limit of u, inf at the left limit of v.
        if not any(u == bb.center for bb in active) and u not in centers:
            finite_sups.append(
                src.base + sum(math.log(1.0 / (u - bb.center)) for bb in active)
            )
        inf = min(inf, src.base + sum(math.log(1.0 / (v - bb.center)) for bb in active))
    sup: float | _DivergentValue = DIVERGENT if diverges else max(finite_sups)
    return (inf, sup)


# ---------------------------------------------------------------------------
# serialization


def _frac_str(fr: Fraction) -> str:
    return f"{fr.numerator}/{fr.denominator}"


def _parse_frac(s: str) -> Fraction:
    num, den = s.split("/")
    return Fraction(int(num), int(den))


def exponent_to_json(p: ExponentFunction) -> dict:
    doc: dict = {
        "kind": p.kind,
        "base": p.base,
        "interval": [p.interval[0], p.interval[1]],
        "truncation": p.truncation,
    }
    if p.bumps:
        doc["bumps"] = [
            {
                "center": _frac_str(b.center_exact) if b.center_exact is not None else b.center,
                "width": _frac_str(b.width_exact) if b.width_exact is not None else b.width,
                "index": b.index,
                **({"label": list(b.label)} if b.label else {}),
            }
            for b in p.bumps
        ]
    if p.levels:
        doc["levels"] = [[a, b, v] for (a, b, v) in p.levels]
    if p.tail_bound is not None:
        doc["tail_bound"] = p.tail_bound
    if p.parent is not None:
        doc["parent"] = exponent_to_json(p.parent)
    return doc


def exponent_from_json(doc: dict) -> ExponentFunction:
    bumps = []
    for raw in doc.get("bumps", ()):
        c = raw["center"]
        w = raw["width"]
        c_exact = _parse_frac(c) if isinstance(c, str) else None
        w_exact = _parse_frac(w) if isinstance(w, str) else None
        bumps.append(
            LogBump(
                center=float(c_exact) if c_exact is not None else float(c),
                width=float(w_exact) if w_exact is not None else float(w),
                index=int(raw["index"]),
                label=tuple(raw["label"]) if "label" in raw else None,
                center_exact=c_exact,
                width_exact=w_exact,
            )
        )
    parent = exponent_from_json(doc["parent"]) if "parent" in doc else None
    return ExponentFunction(
        kind=doc["kind"],
        base=float(doc["base"]),
        interval=(float(doc["interval"][0]), float(doc["interval"][1])),
        bumps=tuple(bumps),
        levels=tuple((float(a), float(b), float(v)) for a, b, v in doc.get("levels", ())),
        parent=parent,
        tail_bound=doc.get("tail_bound"),
    )


def exponent_dumps(p: ExponentFunction) -> str:
    return json.dumps(exponent_to_json(p), sort_keys=True)


def exponent_loads(s: str) -> ExponentFunction:
    return exponent_from_json(json.loads(s))
