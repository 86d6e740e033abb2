"""One named, reproducible verification per theorem-level statement.

Each experiment aggregates module-level computations into a report with a
pass / fail / inconclusive verdict, named metrics (measured constants), and
CSV artifacts.  "Inconclusive" is reserved for budget-truncated scans: the
spike-train orders m_k grow doubly exponentially, so any finite scan cap is
below the final m_n and the asymptotic statements can only be sampled, not
exhausted, at desk scale.

Determinism: every random draw flows from the single seed through named
substreams, so adding an experiment never perturbs existing ones; identical
config yields byte-identical reports.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .common import fsum, substream
from .exponent import (
    ExponentFunction,
    build_theorem52_exponent,
    build_tilde_p,
    conjugate,
    constant_exponent,
    exponent_for_integrable,
    theorem52_width,
)
from .funcrep import PiecewiseFunction, characteristic, l1_norm, step_function, sup_norm
from .fourier import (
    TWO_PI,
    DivergentSeriesSpec,
    PhiN,
    assemble_series,
    build_phi_n,
    divergence_scan,
    reaudit_phi,
)
from .maximal import thm42_witness
from .normcore import INV_E, char_interval_norm, char_norm_bounds, luxemburg_norm, modular

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "EXPERIMENT_IDS",
    "run_experiment",
    "run_all",
    "write_summary_csv",
    "thm31_closedness_check",
    "thm32_interval_norms",
    "section3_xa_witness",
    "eq41_char_scaling",
    "lemma41_ratio_study",
    "thm42_maximal_divergence",
    "eq51_union_membership",
    "lemma51_empirical",
    "thm52_end_to_end",
]


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 20240801
    out_dir: str = "vexlab-out"
    truncation: int = 50
    trials: int = 100
    norm_tol: float = 1e-9
    r_cap: int = 100_000
    scan_grid: int = 2048
    grid_density: int = 64
    n_list: tuple[int, ...] = (25, 50, 100)
    n_sequence: tuple[int, ...] = (25, 50, 100)
    series_truncation: int = 3

    def digest(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass
class ExperimentReport:
    id: str
    config_digest: str
    verdict: str  # pass | fail | inconclusive
    metrics: dict[str, float] = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)
    checks: list[dict] = field(default_factory=list)

    def add_check(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append({"name": name, "ok": bool(ok), "detail": detail})

    def finalize(self, inconclusive: bool = False) -> "ExperimentReport":
        if any(not c["ok"] for c in self.checks):
            self.verdict = "fail"
        elif inconclusive:
            self.verdict = "inconclusive"
        else:
            self.verdict = "pass"
        return self

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "config_digest": self.config_digest,
            "verdict": self.verdict,
            "metrics": self.metrics,
            "artifacts": self.artifacts,
            "checks": self.checks,
        }

    def write(self, out_dir: str) -> str:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, f"{self.id.replace('.', '_')}.json")
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, indent=1)
        return path


def _random_bump_interval(p: ExponentFunction, rng) -> tuple[float, float]:
    """Interval inside the domain strictly containing a materialized bump.

    Extensions beyond the bump stay small so the norm bisections do not have
    to panel-split across hundreds of unrelated bumps per evaluation.
    """
    lo_dom, hi_dom = p.interval
    for _ in range(64):
        bump = p.bumps[rng.integers(0, len(p.bumps))]
        sa, sb = bump.support
        a = max(lo_dom, sa - rng.uniform(1e-6, 0.01))
        b = min(hi_dom, sb + rng.uniform(1e-6, 0.01))
        if a < sa and sb < b:
            return a, b
    raise RuntimeError("no bump with room inside the domain")


def thm31_closedness_check(cfg: ExperimentConfig, exponent_kind: str = "tilde-p") -> ExperimentReport:
    """Interval-norm criterion for closedness of the continuous functions,
    plus the two-sided sandwich on sampled piecewise-linear functions.

    On the bump exponent the interval norms stay above 1/e and the sandwich
    constants are reported; on a constant exponent small intervals drive the
    norm to zero and the experiment deliberately fails.
    """
    rep = ExperimentReport(id="thm3.1", config_digest=cfg.digest(), verdict="pass")
    rng = substream(cfg.seed, f"thm3.1:{exponent_kind}")
    if exponent_kind == "constant":
        p = constant_exponent(2.0)
    else:
        p = build_tilde_p(cfg.truncation)
    lo_dom, hi_dom = p.interval

    interval_lo = math.inf
    for _ in range(cfg.trials):
        if p.bumps:
            a, b = _random_bump_interval(p, rng)
        else:
            a = rng.uniform(lo_dom, hi_dom - 1e-4)
            b = a + rng.uniform(1e-4, min(0.05, hi_dom - a))
        res = char_interval_norm(p, a, b, tol=cfg.norm_tol)
        interval_lo = min(interval_lo, res.lo)
    rep.metrics["min_interval_norm"] = interval_lo
    rep.add_check(
        "interval_norms_bounded_below",
        interval_lo >= INV_E - 1e-12,
        f"min interval norm {interval_lo:.6f} vs 1/e",
    )

    # sandwich on tent functions approximated by fine steps
    ratios = []
    cells = 400
    for _ in range(20):
        peak = rng.uniform(0.2, 0.8)
        height = rng.uniform(0.5, 3.0)
        xs = np.linspace(lo_dom, hi_dom, cells + 1)
        mids = 0.5 * (xs[:-1] + xs[1:])
        vals = height * np.maximum(
            0.0, 1.0 - np.abs(mids - peak) / max(peak - lo_dom, hi_dom - peak)
        )
        f = step_function(
            [(float(a), float(b), float(v)) for a, b, v in zip(xs[:-1], xs[1:], vals) if v > 0.0],
            domain=p.interval,
        )
        nr = luxemburg_norm(f, p, tol=1e-7)
        sup = float(np.max(vals))
        ratios.append(nr.lo / sup)
        rep.add_check("upper_sandwich", nr.hi <= sup * (1.0 + 1e-6), f"norm {nr.hi:.4f} vs sup {sup:.4f}")
    rep.metrics["measured_C"] = min(ratios)
    rep.add_check("lower_sandwich_positive", min(ratios) > 0.0, f"C = {min(ratios):.6f}")
    return rep.finalize()


def thm32_interval_norms(cfg: ExperimentConfig) -> ExperimentReport:
    """Every interval containing a materialized bump has norm above 1/e,
    certified analytically through the divergence floor."""
    rep = ExperimentReport(id="thm3.2", config_digest=cfg.digest(), verdict="pass")
    rng = substream(cfg.seed, "thm3.2")
    p = build_tilde_p(cfg.truncation)
    floors = []
    los = []
    for _ in range(cfg.trials):
        a, b = _random_bump_interval(p, rng)
        res = char_interval_norm(p, a, b, tol=cfg.norm_tol)
        floors.append(res.divergence_floor if res.divergence_floor is not None else 0.0)
        los.append(res.lo)
    rep.metrics["min_divergence_floor"] = min(floors)
    rep.metrics["min_lo"] = min(los)
    rep.add_check("floors_at_inv_e", min(floors) >= INV_E, f"min floor {min(floors):.9f}")
    rep.add_check("lo_at_inv_e", min(los) >= INV_E, f"min lo {min(los):.9f}")
    return rep.finalize()


def section3_xa_witness(cfg: ExperimentConfig) -> ExperimentReport:
    """Unbounded function with absolutely continuous norm: level pieces of
    height n on sets of measure below exp(-e^n).

    Only the n = 2 level set has float-representable measure; higher levels
    are carried in log scale with analytic modular bounds (their powered
    contributions sit at exp(n log(An) - e^n), far below the float floor).
    """
    rep = ExperimentReport(id="sec3.xa", config_digest=cfg.digest(), verdict="pass")
    p = build_tilde_p(cfg.truncation)
    lo_dom, hi_dom = p.interval
    # a flat gap for G_2 (level value 2 occupies the off-bump region)
    supports = sorted(b.support for b in p.bumps)
    gap_start, gap_len = lo_dom, 0.0
    cursor = lo_dom
    for sa, sb in supports:
        if sa - cursor > gap_len:
            gap_start, gap_len = cursor, sa - cursor
        cursor = max(cursor, sb)
    if hi_dom - cursor > gap_len:
        gap_start, gap_len = cursor, hi_dom - cursor
    w2 = min(0.9 * gap_len, 0.5 * math.exp(-math.exp(2.0)))
    g2 = characteristic(gap_start + 0.05 * gap_len, gap_start + 0.05 * gap_len + w2, height=2.0)
    rep.metrics["level2_width"] = w2
    rep.add_check("level2_measure_bound", w2 < math.exp(-math.exp(2.0)), f"width {w2:.3e}")

    levels = [2]
    log_contrib = {}
    for A in (2.0, 4.0, 8.0):
        mv = modular(g2, p, 1.0 / A)
        rep.add_check(f"modular_A{int(A)}_finite", mv.is_finite, f"value {mv.value:.3e}")
        # analytic bounds for the symbolic levels n >= 8 (shells of the bumps)
        tail_terms = []
        for n in range(8, 12):
            tail_terms.append((n + 1) * math.log(A * n) - math.exp(float(n)))
        tail_log = max(tail_terms)
        log_contrib[A] = tail_log
        rep.add_check(
            f"symbolic_tail_A{int(A)}_negligible",
            tail_log < -500.0,
            f"max log-term {tail_log:.1f}",
        )
        rep.metrics[f"modular_A{int(A)}"] = mv.value
    levels.extend(range(8, 12))
    rep.metrics["levels_materialized"] = float(len(levels))
    rep.metrics["max_level_value"] = float(max(levels))
    rep.add_check("unbounded_trend", max(levels) >= 8, f"levels {levels}")
    return rep.finalize()


def eq41_char_scaling(cfg: ExperimentConfig) -> ExperimentReport:
    """Norms of small right-of-center intervals scale like their length,
    with the closed-form eps^{1/q_+} <= e*eps bound checked exactly."""
    rep = ExperimentReport(id="eq4.1", config_digest=cfg.digest(), verdict="pass")
    p = build_tilde_p(cfg.truncation)
    q = conjugate(p)
    ratios = []
    rows = []
    for bump in p.bumps[:5]:
        r = bump.center
        delta = bump.effective_width
        for eps in np.geomspace(delta * 1e-5, delta, 6):
            eps = float(eps)
            nr = luxemburg_norm(characteristic(r, r + eps, domain=p.interval), q, tol=min(cfg.norm_tol, eps * 1e-4))
            ratios.append(nr.mid / eps)
            lo_b, hi_b = char_norm_bounds(q, r, r + eps)
            ok_exact = hi_b <= math.e * eps * (1.0 + 1e-12)
            rep.add_check("corollary_bound_exact", ok_exact, f"eps={eps:.2e} hi={hi_b:.3e}")
            ok_sandwich = lo_b <= nr.hi and nr.lo <= hi_b * (1.0 + 1e-9)
            rep.add_check("sandwich_vs_norm", ok_sandwich, f"eps={eps:.2e}")
            rows.append((bump.index, eps, nr.mid, nr.mid / eps, lo_b, hi_b))
    rep.metrics["ratio_min"] = min(ratios)
    rep.metrics["ratio_max"] = max(ratios)
    rep.add_check(
        "ratio_band",
        0.5 <= min(ratios) and max(ratios) <= 2.0 * math.e,
        f"band [{min(ratios):.3f}, {max(ratios):.3f}]",
    )
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, "eq4_1_scaling.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bump", "eps", "norm", "ratio", "bound_lo", "bound_hi"])
        writer.writerows(rows)
    rep.artifacts.append(path)
    return rep.finalize()


def _nested_profile(bump, depth: int, base_h: float, rho: float) -> list[tuple[float, float, float]]:
    """Non-increasing step on (center, center + width): the partial sums of
    nested slabs a_i * chi_{(center, center + w_i)} with dyadic widths."""
    widths = bump.effective_width * 2.0 ** -np.arange(depth, dtype=float)
    a = base_h * rho ** np.arange(depth, dtype=float)
    prefix = np.cumsum(a)
    flat = []
    for d in range(1, depth):
        flat.append((bump.center + widths[d], bump.center + widths[d - 1], float(prefix[d - 1])))
    flat.append((bump.center, bump.center + widths[depth - 1], float(prefix[depth - 1])))
    return flat


def _dyadic_decay_family(p: ExponentFunction, rng, count: int = 24) -> list[PiecewiseFunction]:
    """Finite sums of non-increasing steps hugging bump left edges.

    Dyadic width decay with geometric heights; masses span several decades,
    and single thin slivers are included so the family reaches the extreme
    thin-piece ratios that the spike trains realize.
    """
    # bumps with pairwise disjoint supports, so profiles never overlap
    disjoint = []
    cursor = -1.0
    for bump in sorted(p.bumps, key=lambda b: b.center):
        if bump.center > cursor:
            disjoint.append(bump)
            cursor = bump.support[1]
    out = []
    for i in range(count):
        n_terms = int(rng.integers(1, min(4, len(disjoint) + 1)))
        idx = rng.choice(len(disjoint), size=n_terms, replace=False)
        flat: list[tuple[float, float, float]] = []
        for j in idx:
            bump = disjoint[int(j)]
            depth = int(rng.integers(1, 7))
            base_h = 10.0 ** rng.uniform(-2.0, 2.0)
            rho = float(rng.uniform(1.5, 4.0))
            flat.extend(_nested_profile(bump, depth, base_h, rho))
        out.append(step_function(flat, domain=p.interval))
    # thin slivers down to ~1e-11 of the widest bump (still far above the
    # float spacing at the center, so the interval survives as floats)
    bump = max(disjoint, key=lambda b: b.effective_width)
    for expo in range(2, 12, 3):
        eps = bump.effective_width * 10.0 ** (-expo)
        if bump.center + eps > bump.center:
            out.append(
                characteristic(
                    bump.center, bump.center + eps, height=10.0 ** rng.uniform(-2, 2), domain=p.interval
                )
            )
    # beyond float widths the slivers continue as spikes with exact mass,
    # the same regime the spike-train plateaus occupy
    from .funcrep import Piece

    for log_w in (-50.0, -200.0, -2000.0):
        mass = 10.0 ** rng.uniform(-2.0, 2.0)
        spike = Piece(
            a=bump.center,
            b=bump.center,
            kind="spike",
            value=mass,
            log_height=math.log(mass) - log_w,
            log_width=log_w,
        )
        out.append(PiecewiseFunction(pieces=(spike,), domain=p.interval))
    return out


def lemma41_ratio_study(cfg: ExperimentConfig) -> ExperimentReport:
    """Measured band of ||f||_q / ||f||_L1 over the decreasing-on-bumps family."""
    rep = ExperimentReport(id="lemma4.1", config_digest=cfg.digest(), verdict="pass")
    rng = substream(cfg.seed, "lemma4.1")
    p = build_tilde_p(cfg.truncation)
    q = conjugate(p)
    family = _dyadic_decay_family(p, rng)
    ratios = []
    masses = []
    for f in family:
        mass = l1_norm(f)
        nr = luxemburg_norm(f, q, tol=max(min(cfg.norm_tol, mass * 1e-6), 1e-280))
        ratios.append(nr.mid / mass)
        masses.append(mass)
    rep.metrics["ratio_min"] = min(ratios)
    rep.metrics["ratio_max"] = max(ratios)
    rep.metrics["band_width"] = max(ratios) / min(ratios)
    rep.metrics["mass_decades"] = math.log10(max(masses) / min(masses))
    rep.add_check("mass_span", rep.metrics["mass_decades"] >= 4.0, f"{rep.metrics['mass_decades']:.2f} decades")
    rep.add_check("band_bounded", rep.metrics["band_width"] <= 20.0, f"max/min = {rep.metrics['band_width']:.3f}")
    return rep.finalize()


def thm42_maximal_divergence(cfg: ExperimentConfig) -> ExperimentReport:
    """Cutoff curve of the maximal function of the witness grows like log j
    while the witness itself keeps finite L1 and conjugate-space norms."""
    rep = ExperimentReport(id="thm4.2", config_digest=cfg.digest(), verdict="pass")
    p = build_tilde_p(cfg.truncation)
    q = conjugate(p)
    g, curve = thm42_witness(q, 0.0, 1.0, terms=4)
    incs = [curve[i + 1][1] - curve[i][1] for i in range(len(curve) - 1)]
    js = list(range(4, 21))
    rep.add_check("curve_strictly_increasing", all(d > 0 for d in incs), "")
    c_fit = sum(d / j for d, j in zip(incs, js)) / sum(1.0 / j**2 for j in js)
    rel_dev = max(abs(d - c_fit / j) / (c_fit / j) for d, j in zip(incs, js))
    rep.metrics["logj_fit_c"] = c_fit
    rep.metrics["logj_max_rel_dev"] = rel_dev
    rep.add_check("increments_fit_c_over_j", rel_dev <= 0.2, f"max rel dev {rel_dev:.3f}")
    mass = l1_norm(g)
    rep.metrics["witness_l1"] = mass
    rep.add_check("witness_l1_finite", math.isfinite(mass) and mass > 0.0, f"{mass:.6f}")
    nr = luxemburg_norm(g, q, tol=1e-7)
    rep.metrics["witness_qnorm"] = nr.mid
    rep.add_check("witness_qnorm_finite", math.isfinite(nr.hi), f"{nr.mid:.6f}")
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, "thm4_2_curve.csv")
    from .maximal import anchored_average_curve

    anchored_average_curve(curve, path)
    rep.artifacts.append(path)
    return rep.finalize()


def eq51_union_membership(cfg: ExperimentConfig) -> ExperimentReport:
    """Every integrable step function lands in its own union-construction
    space: exponent above 1, finite modular, certificate matching the sum."""
    rep = ExperimentReport(id="eq5.1", config_digest=cfg.digest(), verdict="pass")
    rng = substream(cfg.seed, "eq5.1")
    worst_gap = 0.0
    for i in range(50):
        n_pieces = int(rng.integers(1, 8))
        edges = np.sort(rng.uniform(0.0, TWO_PI, size=2 * n_pieces))
        heights = 10.0 ** rng.uniform(-1.0, 6.0, size=n_pieces)
        f = step_function(
            [(float(edges[2 * j]), float(edges[2 * j + 1]), float(heights[j])) for j in range(n_pieces)],
            domain=(0.0, TWO_PI),
            periodic=True,
        )
        p, cert = exponent_for_integrable(f)
        vals = [v for (_, _, v) in p.levels]
        rep.add_check("exponent_above_one", min(vals) > 1.0, f"case {i}")
        # direct-summation oracle for the certificate
        direct = []
        for a, b, v in ((pc.a, pc.b, pc.value) for pc in f.pieces):
            n_level = int(math.floor(abs(v))) + 1
            direct.append(n_level ** (1.0 + 1.0 / n_level) * (b - a))
        covered = fsum(pc.b - pc.a for pc in f.pieces)
        direct.append(1.0 * (TWO_PI - covered))
        gap = abs(cert - fsum(direct))
        worst_gap = max(worst_gap, gap)
        mv = modular(f, p, 1.0)
        rep.add_check("modular_finite", mv.is_finite, f"case {i}: {mv.value if mv.is_finite else 'div'}")
    rep.metrics["certificate_gap"] = worst_gap
    rep.add_check("certificate_matches", worst_gap <= 1e-10, f"max gap {worst_gap:.2e}")
    return rep.finalize()


def lemma51_empirical(cfg: ExperimentConfig, phis: dict[int, PhiN] | None = None) -> ExperimentReport:
    """Spike-train lemma at desk scale: exact mass, audit maxima, and the
    partial-sum statistics at the scan cap.

    The cap is always far below the final kernel order m_n (their growth is
    doubly exponential), so the coverage statistic samples only the windows
    whose orders fit under the cap; the verdict is inconclusive rather than
    pass, per the budget-truncation convention.
    """
    rep = ExperimentReport(id="lemma5.1", config_digest=cfg.digest(), verdict="pass")
    phis = phis or {}
    A_measured = {}
    scans = {}
    for n in cfg.n_list:
        phi = phis.get(n) or build_phi_n(n, grid_density=cfg.grid_density)
        phis[n] = phi
        rep.add_check(f"mass_exact_n{n}", phi.mass_exact == 2, str(phi.mass_exact))
        rep.add_check(
            f"audit_below_one_n{n}",
            all(rec.worst < 1.0 for rec in phi.audit),
            f"worst {max(rec.worst for rec in phi.audit):.6f}",
        )
        re2 = reaudit_phi(phi, factor=2)
        rep.add_check(f"reaudit_2x_n{n}", all(v < 1.0 for v in re2), f"worst {max(re2):.6f}")
        xs = np.concatenate([np.linspace(lo, hi, cfg.grid_density) for lo, hi in phi.D])
        scan_h = divergence_scan(phi, cfg.r_cap, xs)
        A_measured[n] = float(scan_h.max_abs.max()) / math.log(n)
        rep.metrics[f"A_n{n}"] = A_measured[n]
        rep.metrics[f"H_measure_n{n}"] = phi.h_measure
        grid = np.linspace(0.0, TWO_PI, cfg.scan_grid, endpoint=False)
        scans[n] = divergence_scan(phi, cfg.r_cap, grid, r_min=n)
    a_vals = list(A_measured.values())
    rep.metrics["A_variation"] = max(a_vals) / min(a_vals) - 1.0
    rep.add_check("A_stable", rep.metrics["A_variation"] < 0.5, f"variation {rep.metrics['A_variation']:.3f}")
    alpha = 0.5 * A_measured[min(cfg.n_list)]
    rep.metrics["alpha"] = alpha
    for n in cfg.n_list:
        frac = float(np.mean(scans[n].max_abs > alpha * math.log(n)))
        rep.metrics[f"coverage_n{n}"] = frac
    truncated = any(
        not phis[n].m[-1].is_exact or phis[n].m[-1].log2 > math.log2(cfg.r_cap) for n in cfg.n_list
    )
    os.makedirs(cfg.out_dir, exist_ok=True)
    for n in cfg.n_list:
        path = os.path.join(cfg.out_dir, f"lemma5_1_scan_n{n}.csv")
        scans[n].to_csv(path)
        rep.artifacts.append(path)
    return rep.finalize(inconclusive=truncated)


def thm52_end_to_end(cfg: ExperimentConfig, phis: dict[int, PhiN] | None = None) -> ExperimentReport:
    """Grid exponent + spike trains: interval-norm criterion on the direct
    side, mass-equivalent norms on the conjugate side, and the divergence
    scans separating the two weightings."""
    rep = ExperimentReport(id="thm5.2", config_digest=cfg.digest(), verdict="pass")
    rng = substream(cfg.seed, "thm5.2")
    n_seq = cfg.n_sequence[: cfg.series_truncation]
    depth = max(n_seq)
    p = build_theorem52_exponent(depth)
    q = conjugate(p)

    # (a) closedness criterion on the direct side
    floors = []
    for _ in range(25):
        a, b = _random_bump_interval(p, rng)
        res = char_interval_norm(p, a, b, tol=cfg.norm_tol)
        floors.append(res.lo)
    rep.metrics["min_interval_norm"] = min(floors)
    rep.add_check("interval_norms_inv_e", min(floors) >= INV_E, f"min {min(floors):.9f}")

    # (b) mass-equivalent norms for both weightings; reused trains must obey
    # the alignment budgets (2/m_k^2 < width slot), else rebuild with them
    phis = phis or {}
    for n in n_seq:
        cached = phis.get(n)
        if cached is not None and all(
            big.log2 > math.log2(n * k) for k, big in enumerate(cached.m, start=1) if k >= 2
        ):
            continue
        phis[n] = build_phi_n(
            n, grid_density=cfg.grid_density, width_budget=lambda k, n=n: theorem52_width(n, k)
        )
    for n in n_seq:
        fits = all(
            big.log2 > math.log2(n * k) for k, big in enumerate(phis[n].m, start=1) if k >= 2
        )
        rep.add_check(f"alignment_n{n}", fits, "2/m_k^2 below the width slots")
    band = lemma41_ratio_study(cfg)
    lo_band, hi_band = band.metrics["ratio_min"], band.metrics["ratio_max"]
    rep.metrics["band_lo"] = lo_band
    rep.metrics["band_hi"] = hi_band
    stats = {}
    for kind in ("kolmogorov", "marcinkiewicz"):
        spec = DivergentSeriesSpec(n_sequence=tuple(n_seq), weight_kind=kind, truncation=len(n_seq))
        series = assemble_series(spec, phis=phis)
        f = series.to_piecewise()
        nr = luxemburg_norm(f, q, tol=1e-6)
        ratio = nr.mid / series.l1_mass
        rep.metrics[f"{kind}_l1"] = series.l1_mass
        rep.metrics[f"{kind}_qnorm"] = nr.mid
        rep.metrics[f"{kind}_ratio"] = ratio
        rep.add_check(
            f"{kind}_ratio_in_band",
            lo_band * (1.0 - 1e-9) <= ratio <= hi_band * (1.0 + 1e-9),
            f"ratio {ratio:.4f} vs band [{lo_band:.4f}, {hi_band:.4f}]",
        )
        grid = np.linspace(0.0, TWO_PI, cfg.scan_grid, endpoint=False)
        scan = divergence_scan(series, cfg.r_cap, grid)
        stats[kind] = float(np.mean(scan.max_abs))
        rep.metrics[f"{kind}_scan_mean_max"] = stats[kind]
        os.makedirs(cfg.out_dir, exist_ok=True)
        path = os.path.join(cfg.out_dir, f"thm5_2_scan_{kind}.csv")
        scan.to_csv(path)
        rep.artifacts.append(path)

    growth_ratio = stats["kolmogorov"] / stats["marcinkiewicz"]
    rep.metrics["scan_growth_ratio"] = growth_ratio
    rep.add_check("kolmogorov_grows_faster", growth_ratio >= 1.5, f"ratio {growth_ratio:.3f}")
    return rep.finalize()


EXPERIMENT_IDS = {
    "thm3.1": thm31_closedness_check,
    "thm3.2": thm32_interval_norms,
    "sec3.xa": section3_xa_witness,
    "eq4.1": eq41_char_scaling,
    "lemma4.1": lemma41_ratio_study,
    "thm4.2": thm42_maximal_divergence,
    "eq5.1": eq51_union_membership,
    "lemma5.1": lemma51_empirical,
    "thm5.2": thm52_end_to_end,
}


def run_experiment(exp_id: str, cfg: ExperimentConfig) -> ExperimentReport:
    if exp_id not in EXPERIMENT_IDS:
        raise KeyError(f"unknown experiment id {exp_id!r}")
    report = EXPERIMENT_IDS[exp_id](cfg)
    report.artifacts.append(report.write(cfg.out_dir))
    return report


def run_all(cfg: ExperimentConfig) -> list[ExperimentReport]:
    phis: dict[int, PhiN] = {}
    reports = []
    for exp_id, fn in EXPERIMENT_IDS.items():
        if exp_id in ("lemma5.1", "thm5.2"):
            report = fn(cfg, phis=phis)
        else:
            report = fn(cfg)
        report.artifacts.append(report.write(cfg.out_dir))
        reports.append(report)
    write_summary_csv(reports, os.path.join(cfg.out_dir, "summary.csv"))
    return reports


def write_summary_csv(reports: list[ExperimentReport], path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "verdict", "config_digest", "n_checks", "n_failed"])
        for rep in reports:
            writer.writerow(
                [
                    rep.id,
                    rep.verdict,
                    rep.config_digest,
                    len(rep.checks),
                    sum(1 for c in rep.checks if not c["ok"]),
                ]
            )
