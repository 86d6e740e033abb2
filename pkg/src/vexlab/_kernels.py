"""Hot inner loops: incremental Fourier partial-sum scans and maximal sups.

Each kernel exists twice: a plain-loop version compiled with numba's @njit
(default) and a vectorized numpy fallback.  Set the environment variable
``VEXLAB_NO_NUMBA=1`` to force the numpy path; ``python -m vexlab.bench``
times both.

Partial sums use the rotation recurrence for (cos(j x), sin(j x)) with a
periodic exact resync so the drift stays at the 1e-13 scale even for a
million terms.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "NUMBA_ENABLED",
    "scan_running_max",
    "abs_at_checkpoints",
    "step_maximal_sup",
    "scan_running_max_numpy",
    "abs_at_checkpoints_numpy",
    "step_maximal_sup_numpy",
]

_RESYNC = 4096


def _scan_running_max_loop(c_re, c_im, xs, r_lo):
    """Per grid point: running max of |S_r| and its argmax over r in [r_lo, R]."""
    n_x = xs.shape[0]
    r_max = c_re.shape[0] - 1
    out_max = np.zeros(n_x)
    out_arg = np.zeros(n_x, dtype=np.int64)
    for ix in range(n_x):
        x = xs[ix]
        c1 = math.cos(x)
        s1 = math.sin(x)
        c = 1.0
        s = 0.0
        acc = c_re[0]
        best = abs(acc) if r_lo <= 0 else -1.0
        best_r = 0
        for j in range(1, r_max + 1):
            if j % _RESYNC == 0:
                c = math.cos(j * x)
                s = math.sin(j * x)
            else:
                c_new = c * c1 - s * s1
                s = s * c1 + c * s1
                c = c_new
            acc += 2.0 * (c_re[j] * c - c_im[j] * s)
            if j >= r_lo and abs(acc) > best:
                best = abs(acc)
                best_r = j
        out_max[ix] = best
        out_arg[ix] = best_r
    return out_max, out_arg


def _abs_at_checkpoints_loop(c_re, c_im, xs, checks):
    """|S_m(x)| for every checkpoint m in ``checks`` (sorted ascending)."""
    n_x = xs.shape[0]
    n_c = checks.shape[0]
    out = np.zeros((n_c, n_x))
    for ix in range(n_x):
        x = xs[ix]
        c1 = math.cos(x)
        s1 = math.sin(x)
        c = 1.0
        s = 0.0
        acc = c_re[0]
        idx = 0
        while idx < n_c and checks[idx] == 0:
            out[idx, ix] = abs(acc)
            idx += 1
        last = checks[n_c - 1]
        for j in range(1, last + 1):
            if j % _RESYNC == 0:
                c = math.cos(j * x)
                s = math.sin(j * x)
            else:
                c_new = c * c1 - s * s1
                s = s * c1 + c * s1
                c = c_new
            acc += 2.0 * (c_re[j] * c - c_im[j] * s)
            while idx < n_c and checks[idx] == j:
                out[idx, ix] = abs(acc)
                idx += 1
    return out


def _step_maximal_sup_loop(breaks, prefix, seg_vals, xs):
    """Sup of interval averages of a step function over windows containing x.

    ``breaks`` are the sorted breakpoints (domain ends included), ``prefix``
    the exact integral from the left end to each breakpoint, ``seg_vals`` the
    constant value on each segment.  Averages are monotone in each endpoint
    between breakpoints, so the sup over all windows is attained with both
    endpoints in breaks + {x}; tiny windows give f(x) itself.
    """
    n_b = breaks.shape[0]
    n_x = xs.shape[0]
    out = np.zeros(n_x)
    for ix in range(n_x):
        x = xs[ix]
        seg = n_b - 2
        for i in range(n_b - 1):
            if breaks[i] <= x < breaks[i + 1]:
                seg = i
                break
        fx = seg_vals[seg]
        f_at_x = prefix[seg] + fx * (x - breaks[seg])
        best = abs(fx)
        for il in range(seg + 1):
            la = breaks[il]
            fa = prefix[il]
            if x > la:
                avg = (f_at_x - fa) / (x - la)
                if avg > best:
                    best = avg
            for ir in range(seg + 1, n_b):
                rb = breaks[ir]
                fb = prefix[ir]
                if rb > la:
                    avg = (fb - fa) / (rb - la)
                    if avg > best:
                        best = avg
        for ir in range(seg + 1, n_b):
            rb = breaks[ir]
            if rb > x:
                avg = (prefix[ir] - f_at_x) / (rb - x)
                if avg > best:
                    best = avg
        out[ix] = best
    return out


# numpy fallbacks -----------------------------------------------------------


def scan_running_max_numpy(c_re, c_im, xs, r_lo=0):
    xs = np.asarray(xs, dtype=float)
    r_max = c_re.shape[0] - 1
    c1 = np.cos(xs)
    s1 = np.sin(xs)
    c = np.ones_like(xs)
    s = np.zeros_like(xs)
    acc = np.full_like(xs, c_re[0])
    if r_lo <= 0:
        best = np.abs(acc).copy()
    else:
        best = np.full_like(xs, -1.0)
    best_r = np.zeros(xs.shape[0], dtype=np.int64)
    for j in range(1, r_max + 1):
        if j % _RESYNC == 0:
            c = np.cos(j * xs)
            s = np.sin(j * xs)
        else:
            c, s = c * c1 - s * s1, s * c1 + c * s1
        acc += 2.0 * (c_re[j] * c - c_im[j] * s)
        if j >= r_lo:
            a = np.abs(acc)
            better = a > best
            best[better] = a[better]
            best_r[better] = j
    return best, best_r


def abs_at_checkpoints_numpy(c_re, c_im, xs, checks):
    xs = np.asarray(xs, dtype=float)
    checks = np.asarray(checks, dtype=np.int64)
    out = np.zeros((checks.shape[0], xs.shape[0]))
    c1 = np.cos(xs)
    s1 = np.sin(xs)
    c = np.ones_like(xs)
    s = np.zeros_like(xs)
    acc = np.full_like(xs, c_re[0])
    idx = 0
    while idx < checks.shape[0] and checks[idx] == 0:
        out[idx] = np.abs(acc)
        idx += 1
    last = int(checks[-1]) if checks.size else 0
    for j in range(1, last + 1):
        if j % _RESYNC == 0:
            c = np.cos(j * xs)
            s = np.sin(j * xs)
        else:
            c, s = c * c1 - s * s1, s * c1 + c * s1
        acc += 2.0 * (c_re[j] * c - c_im[j] * s)
        while idx < checks.shape[0] and checks[idx] == j:
            out[idx] = np.abs(acc)
            idx += 1
    return out


def step_maximal_sup_numpy(breaks, prefix, seg_vals, xs):
    xs = np.asarray(xs, dtype=float)
    out = np.zeros(xs.shape[0])
    for ix, x in enumerate(xs):
        seg = int(np.searchsorted(breaks, x, side="right")) - 1
        seg = min(max(seg, 0), len(seg_vals) - 1)
        fx = seg_vals[seg]
        f_at_x = prefix[seg] + fx * (x - breaks[seg])
        pts = np.append(breaks, x)
        fvals = np.append(prefix, f_at_x)
        left = pts <= x
        right = pts >= x
        la = pts[left][:, None]
        fa = fvals[left][:, None]
        rb = pts[right][None, :]
        fb = fvals[right][None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            avg = (fb - fa) / (rb - la)
        avg = np.where(rb > la, avg, -np.inf)
        out[ix] = max(float(np.max(avg)), abs(fx))
    return out


# numba wiring --------------------------------------------------------------

NUMBA_ENABLED = False
scan_running_max = scan_running_max_numpy
abs_at_checkpoints = abs_at_checkpoints_numpy
step_maximal_sup = step_maximal_sup_numpy

if os.environ.get("VEXLAB_NO_NUMBA", "").strip() not in ("1", "true", "yes"):
    try:
        from numba import njit, prange

        @njit(cache=True, parallel=True)
        def _scan_running_max_nb(c_re, c_im, xs, r_lo):  # pragma: no cover
            n_x = xs.shape[0]
            r_max = c_re.shape[0] - 1
            out_max = np.zeros(n_x)
            out_arg = np.zeros(n_x, dtype=np.int64)
            for ix in prange(n_x):
                x = xs[ix]
                c1 = math.cos(x)
                s1 = math.sin(x)
                c = 1.0
                s = 0.0
                acc = c_re[0]
                best = abs(acc) if r_lo <= 0 else -1.0
                best_r = 0
                for j in range(1, r_max + 1):
                    if j % _RESYNC == 0:
                        c = math.cos(j * x)
                        s = math.sin(j * x)
                    else:
                        c_new = c * c1 - s * s1
                        s = s * c1 + c * s1
                        c = c_new
                    acc += 2.0 * (c_re[j] * c - c_im[j] * s)
                    if j >= r_lo and abs(acc) > best:
                        best = abs(acc)
                        best_r = j
                out_max[ix] = best
                out_arg[ix] = best_r
            return out_max, out_arg

        @njit(cache=True, parallel=True)
        def _abs_at_checkpoints_nb(c_re, c_im, xs, checks):  # pragma: no cover
            n_x = xs.shape[0]
            n_c = checks.shape[0]
            out = np.zeros((n_c, n_x))
            for ix in prange(n_x):
                x = xs[ix]
                c1 = math.cos(x)
                s1 = math.sin(x)
                c = 1.0
                s = 0.0
                acc = c_re[0]
                idx = 0
                while idx < n_c and checks[idx] == 0:
                    out[idx, ix] = abs(acc)
                    idx += 1
                last = checks[n_c - 1]
                for j in range(1, last + 1):
                    if j % _RESYNC == 0:
                        c = math.cos(j * x)
                        s = math.sin(j * x)
                    else:
                        c_new = c * c1 - s * s1
                        s = s * c1 + c * s1
                        c = c_new
                    acc += 2.0 * (c_re[j] * c - c_im[j] * s)
                    while idx < n_c and checks[idx] == j:
                        out[idx, ix] = abs(acc)
                        idx += 1
            return out

        _step_maximal_sup_nb = njit(cache=True, parallel=False)(_step_maximal_sup_loop)

        def scan_running_max(c_re, c_im, xs, r_lo=0):  # type: ignore[no-redef]
            return _scan_running_max_nb(
                np.ascontiguousarray(c_re),
                np.ascontiguousarray(c_im),
                np.ascontiguousarray(xs, dtype=np.float64),
                int(r_lo),
            )

        def abs_at_checkpoints(c_re, c_im, xs, checks):  # type: ignore[no-redef]
            return _abs_at_checkpoints_nb(
                np.ascontiguousarray(c_re),
                np.ascontiguousarray(c_im),
                np.ascontiguousarray(xs, dtype=np.float64),
                np.ascontiguousarray(checks, dtype=np.int64),
            )

        def step_maximal_sup(breaks, prefix, seg_vals, xs):  # type: ignore[no-redef]
            return _step_maximal_sup_nb(
                np.ascontiguousarray(breaks, dtype=np.float64),
                np.ascontiguousarray(prefix, dtype=np.float64),
                np.ascontiguousarray(seg_vals, dtype=np.float64),
                np.ascontiguousarray(xs, dtype=np.float64),
            )

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover
        pass
