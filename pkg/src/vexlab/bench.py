"""Benchmark the numba kernels against their numpy fallbacks.

Run with ``python -m vexlab.bench`` (or ``vexlab bench``).  The same inputs
go through both paths; set VEXLAB_NO_NUMBA=1 to see the package run entirely
on the fallback.
"""

from __future__ import annotations

import time

import numpy as np

from . import _kernels


def _time(fn, *args, repeats: int = 3) -> tuple[float, object]:
    fn(*args)  # warmup (and JIT compile on the numba path)
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def run_benchmarks(r_max: int = 20_000, grid: int = 256) -> None:
    rng = np.random.default_rng(7)
    c_re = rng.standard_normal(r_max + 1) / np.arange(1, r_max + 2)
    c_im = rng.standard_normal(r_max + 1) / np.arange(1, r_max + 2)
    xs = np.sort(rng.uniform(0.0, 2 * np.pi, grid))

    print(f"numba enabled: {_kernels.NUMBA_ENABLED}")
    print(f"scan_running_max: r_max={r_max}, grid={grid}")
    t_np, out_np = _time(_kernels.scan_running_max_numpy, c_re, c_im, xs, 0)
    print(f"  numpy: {t_np*1e3:8.2f} ms")
    if _kernels.NUMBA_ENABLED:
        t_nb, out_nb = _time(_kernels.scan_running_max, c_re, c_im, xs, 0)
        print(f"  numba: {t_nb*1e3:8.2f} ms   speedup {t_np/t_nb:5.1f}x")
        print(f"  max |difference|: {np.max(np.abs(out_np[0] - out_nb[0])):.3e}")

    checks = np.arange(100, r_max, 97, dtype=np.int64)
    print(f"abs_at_checkpoints: {len(checks)} checkpoints")
    t_np, out_np = _time(_kernels.abs_at_checkpoints_numpy, c_re, c_im, xs, checks)
    print(f"  numpy: {t_np*1e3:8.2f} ms")
    if _kernels.NUMBA_ENABLED:
        t_nb, out_nb = _time(_kernels.abs_at_checkpoints, c_re, c_im, xs, checks)
        print(f"  numba: {t_nb*1e3:8.2f} ms   speedup {t_np/t_nb:5.1f}x")
        print(f"  max |difference|: {np.max(np.abs(out_np - out_nb)):.3e}")

    n_breaks = 400
    breaks = np.concatenate([[0.0], np.sort(rng.uniform(0.0, 1.0, n_breaks - 2)), [1.0]])
    seg_vals = np.abs(rng.standard_normal(n_breaks - 1))
    prefix = np.concatenate([[0.0], np.cumsum(seg_vals * np.diff(breaks))])
    xs_m = np.sort(rng.uniform(0.0, 1.0, 400))
    print(f"step_maximal_sup: {n_breaks} breakpoints, {len(xs_m)} grid points")
    t_np, out_np = _time(_kernels.step_maximal_sup_numpy, breaks, prefix, seg_vals, xs_m)
    print(f"  numpy: {t_np*1e3:8.2f} ms")
    if _kernels.NUMBA_ENABLED:
        t_nb, out_nb = _time(_kernels.step_maximal_sup, breaks, prefix, seg_vals, xs_m)
        print(f"  numba: {t_nb*1e3:8.2f} ms   speedup {t_np/t_nb:5.1f}x")
        print(f"  max |difference|: {np.max(np.abs(out_np - out_nb)):.3e}")


if __name__ == "__main__":
    run_benchmarks()
