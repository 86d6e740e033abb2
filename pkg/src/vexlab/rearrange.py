"""Non-increasing rearrangements and the exponential-integrability test that
separates the absolutely-continuous-norm subspace from the closure of the
bounded functions.

The test integral of A^{p*} never needs the rearrangement itself: t -> A^t
is monotone, so A^{p*} and A^{p} are equimeasurable and the integrals agree
exactly.  That turns the test into a powered integral of the constant A,
where the bump machinery supplies the analytic divergence certificate
(log A >= 1 against a full log tail).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .common import InputError, ModularValue, RepresentationError, fsum, integrate_logspaced
from .exponent import ExponentFunction, log_bump_integral
from .funcrep import PiecewiseFunction, characteristic, powered_integral, step_function

__all__ = [
    "decreasing_rearrangement",
    "exponent_rearrangement_grid",
    "prop21_integral_test",
    "ExampleProfile",
    "classify_subspaces",
    "export_rearrangement_csv",
]


def decreasing_rearrangement(f: PiecewiseFunction) -> PiecewiseFunction:
    """Sort the level values of |f| in decreasing order onto (0, |domain|).

    Equimeasurable with |f| by construction: each value keeps its total
    width, zero gaps land at the right end (and are dropped from the piece
    list, the function being zero off its pieces).
    """
    if not f.is_step():
        raise RepresentationError("rearrangement requires a step function")
    blocks = sorted(
        ((abs(p.value), p.b - p.a) for p in f.pieces if p.value != 0.0),
        key=lambda t: -t[0]
    )
    out = []
    cursor = 0.0
    for v, w in blocks:
        if out and out[-1][2] == v:
            a, _, _ = out[-1]
            out[-1] = (a, cursor + w, v)
        else:
            out.append((cursor, cursor + w, v))
        cursor += w
    length = f.domain[1] - f.domain[0]
    return step_function(out, domain=(0.0, length))


def exponent_rearrangement_grid(p: ExponentFunction, grid_size: int = 1 << 16) -> PiecewiseFunction:
    """Fine step approximation of p, rearranged decreasingly.

    Each cell takes its exact average value (bump overlaps integrate through
    the antiderivative u - u log u, so singular cells get finite averages);
    the exact rearrangement of overlapping log bumps has no closed form,
    which is why this path is grid-based.
    """
    lo, hi = p.interval
    edges = np.linspace(lo, hi, grid_size + 1)
    cell_w = (hi - lo) / grid_size
    avgs = np.zeros(grid_size)
    if p.kind == "constant":
        avgs[:] = p.base
    elif p.kind in ("tilde-p", "theorem52"):
        avgs[:] = p.base
        for bump in p.bumps:
            sa, sb = bump.support
            i0 = max(int(np.searchsorted(edges, sa, side="right")) - 1, 0)
            i1 = min(int(np.searchsorted(edges, sb, side="left")), grid_size)
            for i in range(i0, i1):
                a = max(edges[i], sa) - bump.center
                b = min(edges[i + 1], sb) - bump.center
                if b <= a:
                    continue
                integral = log_bump_integral(b) - log_bump_integral(a)
                avgs[i] += integral / cell_w
    elif p.kind == "union":
        mids = 0.5 * (edges[:-1] + edges[1:])
        avgs = p.eval_array(mids)
    else:
        raise RepresentationError("grid rearrangement supports direct exponents only")
    order = np.argsort(-avgs, kind="stable")
    out = []
    cursor = 0.0
    for v in avgs[order]:
        out.append((cursor, cursor + cell_w, float(v)))
        cursor += cell_w
    merged: list[tuple[float, float, float]] = []
    for a, b, v in out:
        if merged and merged[-1][2] == v:
            merged[-1] = (merged[-1][0], b, v)
        else:
            merged.append((a, b, v))
    return step_function(merged, domain=(0.0, hi - lo))


@dataclass(frozen=True)
class ExampleProfile:
    """Named exponent profiles on (0, 1/e) used by the classification study.

    kind "log-alpha": p(x) = (log(1/x))^alpha with alpha > 0;
    kind "x-alpha":   p(x) = x^alpha with alpha < 0.
    Both are decreasing, so they equal their own rearrangement.
    """

    kind: str
    alpha: float
    domain: tuple[float, float] = (0.0, 1.0 / math.e)

    def __post_init__(self):
        if self.kind not in ("log-alpha", "x-alpha"):
            raise InputError(f"unknown profile kind {self.kind!r}")
        if self.kind == "log-alpha" and self.alpha <= 0.0:
            raise InputError("log-alpha requires alpha > 0")
        if self.kind == "x-alpha" and self.alpha >= 0.0:
            raise InputError("x-alpha requires alpha < 0")

    def values(self, xs: np.ndarray) -> np.ndarray:
        if self.kind == "log-alpha":
            return np.log(1.0 / xs) ** self.alpha
        return xs**self.alpha

    def integral_of_power(self, A: float, tol: float = 1e-12) -> ModularValue:
        """int over (0, 1/e) of A^{p(x)} dx with analytic divergence tests.

        In L = log(1/x) coordinates the integrand is exp(log A * L^alpha - L)
        on (1, inf): alpha > 1 diverges for every A > 1; alpha = 1 diverges
        exactly when log A >= 1 (and has the closed form e^{logA-1}/(1-logA)
        otherwise); alpha < 1 always converges.
        """
        if A <= 1.0:
            raise InputError("A must exceed 1")
        ln_a = math.log(A)
        if self.kind == "x-alpha":
            # integrand exp(log A * x^alpha) blows up faster than any power
            return ModularValue.divergent(where=0.0, u_power=-math.inf)
        if self.alpha > 1.0:
            return ModularValue.divergent(where=0.0, u_power=-math.inf)
        if self.alpha == 1.0:
            if ln_a >= 1.0:
                return ModularValue.divergent(where=0.0, u_power=-ln_a)
            return ModularValue.finite(math.exp(ln_a - 1.0) / (1.0 - ln_a))
        # alpha < 1: truncate where log A * L^alpha <= L/2, bound the rest
        L0 = max(2.0, (2.0 * ln_a) ** (1.0 / (1.0 - self.alpha)))
        L_max = L0
        while 2.0 * math.exp(-L_max / 2.0) > tol:
            L_max *= 1.5

        def fun(Ls: np.ndarray) -> np.ndarray:
            return np.exp(ln_a * Ls**self.alpha - Ls)

        val, err = integrate_logspaced(fun, 1.0, L_max, efolds_per_panel=0.25)
        tail = 2.0 * math.exp(-L_max / 2.0)
        return ModularValue.finite(val + tail, err + tail)


def prop21_integral_test(
    p: ExponentFunction | ExampleProfile,
    A_values: list[float],
    tol: float = 1e-11,
) -> dict[float, ModularValue]:
    """int of A^{p*} over the domain for each A > 1.

    By equimeasurability this equals int A^{p}, evaluated through the exact
    powered-integral machinery; a truncated bump exponent therefore returns
    Divergent precisely when log A >= 1 (the full log tail at any bump).
    """
    out: dict[float, ModularValue] = {}
    for A in A_values:
        if A <= 1.0:
            raise InputError("A must exceed 1")
        if isinstance(p, ExampleProfile):
            out[A] = p.integral_of_power(A, tol=tol)
            continue
        lo, hi = p.interval
        const_a = characteristic(lo, hi, height=A, domain=p.interval)
        out[A] = powered_integral(const_a, p, 1.0, lo, hi, tol=tol)
    return out


def classify_subspaces(results: dict[float, ModularValue]) -> str:
    """Verdict string from the per-A integrals: equality needs all finite."""
    if all(mv.is_finite for mv in results.values()):
        return "X_a = X_b (all tested A finite)"
    return "X_a is a proper subspace of X_b (divergent A found)"


def export_rearrangement_csv(f_star: PiecewiseFunction, path: str, samples: int = 512) -> None:
    lo, hi = f_star.domain
    ts = np.linspace(lo, hi, samples, endpoint=False)[1:]
    from .funcrep import evaluate_array

    vals = evaluate_array(f_star, ts)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "f_star(t)"])
        for t, v in zip(ts, vals):
            writer.writerow([repr(float(t)), repr(float(v))])
