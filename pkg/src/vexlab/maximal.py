"""Hardy-Littlewood maximal function on grids, and the witness whose maximal
function fails to be integrable on every subinterval.

For a step function the interval average is monotone in each endpoint
between breakpoints, so the sup over windows containing x is attained with
both endpoints in the breakpoint set plus x itself; the grid values are then
exact.  For the derivative-of-1/log profile the anchored average from the
singular endpoint is available in closed form, 1/(u log(1/u)), and every
reported value is a true lower bound of Mf.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .common import InputError, fsum
from .exponent import ExponentFunction
from .funcrep import Piece, PiecewiseFunction

__all__ = [
    "MaximalProfile",
    "maximal_on_grid",
    "thm42_witness",
    "anchored_average_curve",
    "export_maximal_csv",
]


@dataclass(frozen=True)
class MaximalProfile:
    grid: np.ndarray
    values: np.ndarray
    method: str  # "exact-candidates" | "anchored-average"

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "Mf(x)"])
            for x, v in zip(self.grid, self.values):
                writer.writerow([repr(float(x)), repr(float(v))])


def _step_data(f: PiecewiseFunction) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    lo, hi = f.domain
    edges = sorted({lo, hi} | {p.a for p in f.pieces} | {p.b for p in f.pieces})
    breaks = np.array(edges)
    seg_vals = np.zeros(len(edges) - 1)
    for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        piece = f.piece_at(0.5 * (a + b))
        seg_vals[i] = abs(piece.value) if piece is not None else 0.0
    prefix = np.zeros(len(edges))
    np.cumsum(seg_vals * np.diff(breaks), out=prefix[1:])
    return breaks, prefix, seg_vals


def maximal_on_grid(f: PiecewiseFunction, grid: np.ndarray) -> MaximalProfile:
    """Mf on the grid: exact for step functions, certified lower bounds else.

    Non-step inputs (the witness profiles) contribute their exact breakpoint
    prefix integrals plus the anchored averages from their singular
    endpoints, all of which underestimate the true supremum at worst.
    """
    xs = np.asarray(grid, dtype=float)
    lo, hi = f.domain
    if np.any((xs < lo) | (xs > hi)):
        raise InputError("grid extends outside the domain")
    if f.is_step():
        breaks, prefix, seg_vals = _step_data(f)
        values = _kernels.step_maximal_sup(breaks, prefix, seg_vals, xs)
        return MaximalProfile(grid=xs, values=values, method="exact-candidates")

    # lower bounds: breakpoint-window averages plus anchored averages
    edges = sorted({lo, hi} | {p.a for p in f.pieces} | {p.b for p in f.pieces})
    breaks = np.array(edges)
    from .funcrep import integrate

    prefix = np.array([integrate(f, lo, e).value for e in edges])
    values = np.zeros_like(xs)
    for i, x in enumerate(xs):
        fx = integrate(f, lo, float(x)).value
        pts = np.append(breaks, x)
        fv = np.append(prefix, fx)
        left = pts <= x
        right = pts >= x
        la = pts[left][:, None]
        fa = fv[left][:, None]
        rb = pts[right][None, :]
        fb = fv[right][None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            avg = (fb - fa) / (rb - la)
        best = float(np.max(np.where(rb > la, avg, -np.inf)))
        for p in f.pieces:
            if p.kind == "power-log" and p.a < x <= p.b:
                u = x - p.a
                best = max(best, abs(p.value) / (u * math.log(1.0 / u)))
        values[i] = best
    return MaximalProfile(grid=xs, values=values, method="anchored-average")


def thm42_witness(
    q: ExponentFunction,
    a: float,
    b: float,
    terms: int,
    weights: list[float] | None = None,
    window: float = 0.06,
) -> tuple[PiecewiseFunction, list[tuple[float, float]]]:
    """Witness sum of translated derivative-of-1/log profiles on the bumps.

    Piece k is weights[k] * d/dx (1/log(1/(x - r_k))) on (r_k, r_k + w_k)
    with w_k up to ``window``; the profile is decreasing there (window stays
    below e^{-2}) and the exponent only sees the first 1/200 of it anyway.
    Windows wider than e^{-3} keep the whole cutoff curve in the log-log
    regime.  Pieces are chosen greedily so the windows stay disjoint and
    inside (a, b).

    Returns the function together with the cutoff curve
    eta_j = e^{-j} -> integral over the windows minus eta-neighbourhoods of
    the anchored-average lower bound of Mg, in closed form through
    log log(1/u): the curve grows like log j, witnessing non-integrability.
    """
    if not (0.0 < window < math.exp(-2.0)):
        raise InputError("window must lie in (0, e^-2) to keep the profile decreasing")
    src = q.effective_bump_source()
    # only full-width bumps: past the profile cutoff the exponent reverts to
    # its base value, and a window stub there would contribute a plain
    # power-norm of the (still large) profile values
    widest = max(bump.effective_width for bump in src.bumps)
    candidates = [bump for bump in src.bumps if bump.effective_width >= 0.9 * widest]
    chosen: list = []
    cursor = a
    for bump in sorted(candidates, key=lambda bb: bb.center):
        if bump.center <= cursor or bump.center + window >= b:
            continue
        chosen.append(bump)
        cursor = bump.center + window
        if len(chosen) >= terms:
            break
    if not chosen:
        raise InputError("no bump center with room for a window inside the interval")
    if weights is None:
        weights = [2.0**-k for k in range(1, len(chosen) + 1)]
    if len(weights) < len(chosen):
        raise InputError("need one weight per term")
    if any(w <= 0 for w in weights):
        raise InputError("weights must be positive")
    weights = weights[: len(chosen)]
    pieces = [
        Piece(a=bump.center, b=bump.center + window, kind="power-log", value=w_k)
        for w_k, bump in zip(weights, chosen)
    ]
    g = PiecewiseFunction(pieces=tuple(pieces), domain=src.interval)

    loglog_w = math.log(math.log(1.0 / window))
    curve: list[tuple[float, float]] = []
    for j in range(3, 21):
        eta = math.exp(-float(j))
        total = [
            w_k * (math.log(math.log(1.0 / eta)) - loglog_w)
            for w_k in weights
            if eta < window
        ]
        curve.append((eta, fsum(total)))
    return g, curve


def anchored_average_curve(curve: list[tuple[float, float]], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eta", "partial_integral"])
        for eta, v in curve:
            writer.writerow([repr(float(eta)), repr(float(v))])


def export_maximal_csv(profile: MaximalProfile, path: str) -> None:
    profile.to_csv(path)
