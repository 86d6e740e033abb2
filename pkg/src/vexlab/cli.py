"""Command-line entry point: construction, norms, spike trains, scans, and
the experiment suite.

Exit codes: 0 pass, 1 failure, 2 inconclusive, 64 usage error.  Flags
override a flat ``key = value`` config file; every run echoes its seed into
the outputs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import _kernels
from .common import InputError, VexlabError
from .exponent import (
    build_theorem52_exponent,
    build_tilde_p,
    conjugate,
    exponent_dumps,
    exponent_for_integrable,
    exponent_loads,
)
from .experiments import EXPERIMENT_IDS, ExperimentConfig, run_all, run_experiment, write_summary_csv
from .funcrep import evaluate_array, export_samples_csv, function_loads
from .fourier import (
    TWO_PI,
    DivergentSeriesSpec,
    assemble_series,
    build_phi_n,
    divergence_scan,
    phi_dumps,
)
from .normcore import luxemburg_norm

USAGE_ERROR = 64


def _read_config_file(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    out: dict[str, str] = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise InputError(f"bad config line: {line!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _config_from_args(args) -> ExperimentConfig:
    file_opts = _read_config_file(getattr(args, "config", None))
    merged = dict(file_opts)
    for key in ("seed", "out_dir", "truncation", "trials", "r_cap"):
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    kwargs = {}
    for key, cast in (
        ("seed", int),
        ("out_dir", str),
        ("truncation", int),
        ("trials", int),
        ("norm_tol", float),
        ("r_cap", int),
        ("scan_grid", int),
        ("grid_density", int),
    ):
        if key in merged:
            kwargs[key] = cast(merged[key])
    if "n_list" in merged:
        kwargs["n_list"] = tuple(int(v) for v in str(merged["n_list"]).split(","))
    return ExperimentConfig(**kwargs)


def _build_exponent(kind: str, truncation: int):
    if kind == "tilde-p":
        return build_tilde_p(truncation)
    if kind == "theorem52":
        return build_theorem52_exponent(truncation)
    raise InputError(f"--kind must be tilde-p or theorem52, or use union via --function")


def cmd_exponent(args) -> int:
    if args.action == "build":
        p = _build_exponent(args.kind, args.truncation)
        doc = exponent_dumps(p)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(doc)
        else:
            print(doc)
        return 0
    if args.action == "eval":
        with open(args.exponent) as fh:
            p = exponent_loads(fh.read())
        v = p.eval(args.at)
        print(json.dumps({"x": args.at, "value": None if not isinstance(v, float) else v, "divergent": not isinstance(v, float)}))
        return 0
    if args.action == "sample":
        with open(args.exponent) as fh:
            p = exponent_loads(fh.read())
        lo, hi = p.interval
        xs = np.linspace(lo, hi, args.grid, endpoint=False)[1:]
        vals = p.eval_array(xs)
        out = args.out or "exponent_samples.csv"
        with open(out, "w", newline="") as fh:
            fh.write("x,p(x)\n")
            for x, v in zip(xs, vals):
                fh.write(f"{x!r},{v!r}\n")
        print(out)
        return 0
    return USAGE_ERROR


def cmd_norm(args) -> int:
    with open(args.function) as fh:
        f = function_loads(fh.read())
    with open(args.exponent) as fh:
        p = exponent_loads(fh.read())
    if args.conjugate:
        p = conjugate(p)
    res = luxemburg_norm(f, p, tol=args.tol)
    print(json.dumps(res.to_json(), sort_keys=True))
    return 0


def cmd_phi(args) -> int:
    phi = build_phi_n(
        args.n,
        grid_density=args.grid_density,
        symmetric=args.symmetric,
        lambda_cap=args.lambda_cap,
    )
    if args.action == "build":
        doc = phi_dumps(phi)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(doc)
            print(args.out)
        else:
            print(doc)
        return 0
    if args.action == "scan":
        r_max = args.r_max or phi.natural_r_max()
        grid = np.linspace(0.0, TWO_PI, args.grid, endpoint=False)
        scan = divergence_scan(phi, r_max, grid)
        out = args.out or f"phi{args.n}_scan.csv"
        scan.to_csv(out)
        print(out)
        return 0
    return USAGE_ERROR


def cmd_series(args) -> int:
    n_seq = tuple(int(v) for v in args.n_seq.split(","))
    spec = DivergentSeriesSpec(n_sequence=n_seq, weight_kind=args.kind, truncation=len(n_seq))
    series = assemble_series(spec, grid_density=args.grid_density)
    print(f"l1 mass = {series.l1_mass!r}")
    grid = np.linspace(0.0, TWO_PI, args.grid, endpoint=False)
    scan = divergence_scan(series, args.r_max, grid)
    out = args.out or f"{args.kind}_scan.csv"
    scan.to_csv(out)
    print(out)
    return 0


def cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    os.makedirs(cfg.out_dir, exist_ok=True)
    if args.id == "all":
        reports = run_all(cfg)
    else:
        reports = [run_experiment(args.id, cfg)]
        write_summary_csv(reports, os.path.join(cfg.out_dir, "summary.csv"))
    print(f"seed = {cfg.seed}")
    worst = 0
    for rep in reports:
        print(f"{rep.id}: {rep.verdict}")
        for check in rep.checks:
            if not check["ok"]:
                print(f"  FAILED {check['name']}: {check['detail']}")
        if rep.verdict == "fail":
            worst = max(worst, 1) if worst != 1 else 1
        elif rep.verdict == "inconclusive" and worst == 0:
            worst = 2
    return worst


def cmd_bench(args) -> int:
    from .bench import run_benchmarks

    run_benchmarks(r_max=args.r_max, grid=args.grid)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vexlab", description=__doc__)
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--threads", type=int, help="bound worker parallelism")
    sub = parser.add_subparsers(dest="command")

    p_exp = sub.add_parser("exponent", help="build/eval/sample exponents")
    p_exp.add_argument("action", choices=["build", "eval", "sample"])
    p_exp.add_argument("--kind", default="tilde-p", choices=["tilde-p", "theorem52"])
    p_exp.add_argument("--truncation", type=int, default=50)
    p_exp.add_argument("--exponent", help="exponent JSON file (eval/sample)")
    p_exp.add_argument("--at", type=float, help="evaluation point")
    p_exp.add_argument("--grid", type=int, default=512)
    p_exp.add_argument("--out")

    p_norm = sub.add_parser("norm", help="Luxemburg norm of a function file")
    p_norm.add_argument("--function", required=True)
    p_norm.add_argument("--exponent", required=True)
    p_norm.add_argument("--tol", type=float, default=1e-9)
    p_norm.add_argument("--conjugate", action="store_true")

    p_phi = sub.add_parser("phi", help="build or scan a spike train")
    p_phi.add_argument("action", choices=["build", "scan"])
    p_phi.add_argument("--n", type=int, required=True)
    p_phi.add_argument("--grid-density", dest="grid_density", type=int, default=64)
    p_phi.add_argument("--symmetric", action="store_true")
    p_phi.add_argument("--lambda-cap", dest="lambda_cap", type=int)
    p_phi.add_argument("--r-max", dest="r_max", type=int)
    p_phi.add_argument("--grid", type=int, default=2048)
    p_phi.add_argument("--out")

    p_series = sub.add_parser("series", help="assemble a weighted train sum and scan it")
    p_series.add_argument("--kind", default="kolmogorov", choices=["kolmogorov", "marcinkiewicz"])
    p_series.add_argument("--n-seq", dest="n_seq", default="25,50,100")
    p_series.add_argument("--r-max", dest="r_max", type=int, default=100_000)
    p_series.add_argument("--grid", type=int, default=2048)
    p_series.add_argument("--grid-density", dest="grid_density", type=int, default=64)
    p_series.add_argument("--out")

    p_verify = sub.add_parser("verify", help="run one or all experiments")
    p_verify.add_argument("--id", default="all", choices=["all", *EXPERIMENT_IDS])
    p_verify.add_argument("--seed", type=int)
    p_verify.add_argument("--out-dir", dest="out_dir")
    p_verify.add_argument("--truncation", type=int)
    p_verify.add_argument("--trials", type=int)
    p_verify.add_argument("--r-cap", dest="r_cap", type=int)

    p_bench = sub.add_parser("bench", help="time the numba kernels against numpy")
    p_bench.add_argument("--r-max", dest="r_max", type=int, default=20_000)
    p_bench.add_argument("--grid", type=int, default=256)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return USAGE_ERROR
    if args.threads is not None and _kernels.NUMBA_ENABLED:
        import numba

        numba.set_num_threads(max(1, args.threads))
    handlers = {
        "exponent": cmd_exponent,
        "norm": cmd_norm,
        "phi": cmd_phi,
        "series": cmd_series,
        "verify": cmd_verify,
        "bench": cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except VexlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
