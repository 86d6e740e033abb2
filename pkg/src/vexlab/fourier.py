"""Exact Fourier analysis of periodic step functions and the spike-train
construction behind the divergent-series examples.

The train phi_n consists of n plateaus of height m_k^2/n and width 2/m_k^2
near the points A_k = 4 pi k/(2n+1), with 2 m_k + 1 = lambda_k (2n+1) for an
increasing odd sequence lambda_k chosen inductively: at step k the partial
sums of the already-built plateaus, against the Dirichlet kernel of order
m_k, must stay below 1 on the window D_{k-1}.

The inductive requirement forces m_k to grow roughly like m_{k-1}^2 log n,
i.e. doubly exponentially in k.  Small k are selected by an exact scan: the
check quantity is literally the m-th partial sum of a step function, a
finite trigonometric sum, evaluated incrementally at every candidate m in
one pass.  Once candidates leave the exactly-summable range, selection
switches to a certified envelope bound (integration by parts of the kernel
integral), which is valid for every x in the window, and the enormous odd
numbers are carried exactly while they fit and in log2 scale beyond that.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .common import ConstructionError, InputError, RepresentationError, fsum
from .funcrep import Piece, PiecewiseFunction

__all__ = [
    "TWO_PI",
    "BigNat",
    "AuditRecord",
    "PhiN",
    "DivergentSeriesSpec",
    "SeriesFunction",
    "dirichlet_kernel",
    "fourier_coeff",
    "coefficient_array",
    "partial_sum",
    "partial_sums_upto",
    "build_phi_n",
    "reaudit_phi",
    "assemble_series",
    "divergence_scan",
    "DivergenceScan",
    "phi_to_json",
]

TWO_PI = 2.0 * math.pi
_LOG_FLOAT_MAX = 709.0
# largest integers materialized exactly; beyond this lambda_k/m_k live in log2
_MAX_EXACT_LOG2 = 996.0


@dataclass(frozen=True)
class BigNat:
    """A positive integer, exact when small enough, else a log2 lower bound.

    The symbolic form records that "the smallest odd integer above this
    certified bound" was selected; the integer exists but would need more
    digits than are worth materializing.
    """

    log2: float
    exact: int | None = None

    @classmethod
    def from_int(cls, v: int) -> "BigNat":
        return cls(log2=math.log2(v), exact=v)

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    @property
    def ln(self) -> float:
        return self.log2 * math.log(2.0)

    def as_float(self) -> float:
        if self.exact is not None and self.log2 < 1020.0:
            return float(self.exact)
        return math.inf

    def __gt__(self, other: "BigNat") -> bool:
        if self.exact is not None and other.exact is not None:
            return self.exact > other.exact
        return self.log2 > other.log2

    def to_json(self) -> dict:
        if self.exact is not None and self.log2 <= 256.0:
            return {"exact": self.exact}
        if self.exact is not None:
            return {"exact_digits": len(str(self.exact)), "log2": self.log2}
        return {"log2": self.log2}


@dataclass(frozen=True)
class AuditRecord:
    """Outcome of the step-k selection check.

    mode "grid": the check quantity was evaluated exactly on the stated grid
    and on its 2x refinement (both maxima recorded).  mode "envelope": a
    certified upper bound, valid for every point of the window, is recorded
    instead; grid fields are None.  ``earlier`` records (never enforces) the
    same quantity on the windows D_1 .. D_{k-2}.
    """

    k: int
    mode: str
    grid_max: float | None
    grid_max_fine: float | None
    bound: float | None
    earlier: tuple[float, ...] = ()

    @property
    def worst(self) -> float:
        vals = [v for v in (self.grid_max, self.grid_max_fine, self.bound) if v is not None]
        return max(vals)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "mode": self.mode,
            "grid_max": self.grid_max,
            "grid_max_fine": self.grid_max_fine,
            "bound": self.bound,
            "earlier": list(self.earlier),
        }


@dataclass(frozen=True)
class PhiN:
    """Full record of one spike train: parameters, plateaus, windows, audit."""

    n: int
    symmetric: bool
    grid_density: int
    lambdas: tuple[BigNat, ...]
    m: tuple[BigNat, ...]
    A: tuple[float, ...]
    deltas: tuple[tuple[float, float], ...]
    log_heights: tuple[float, ...]
    log_widths: tuple[float, ...]
    D: tuple[tuple[float, float], ...]
    audit: tuple[AuditRecord, ...]

    @property
    def mass_exact(self) -> Fraction:
        """Sum over plateaus of height*width = n * (2/n) = 2, exactly."""
        return Fraction(2, self.n) * self.n

    @property
    def piece_masses(self) -> np.ndarray:
        return np.full(self.n, 2.0 / self.n)

    @property
    def piece_mids(self) -> np.ndarray:
        mids = []
        for (a, b), lw in zip(self.deltas, self.log_widths):
            w = math.exp(lw) if lw > -744.0 else 0.0
            mids.append(a + 0.5 * w if not self.symmetric else 0.5 * (a + b) if b > a else a)
        return np.array(mids)

    @property
    def piece_widths(self) -> np.ndarray:
        return np.array([math.exp(lw) if lw > -744.0 else 0.0 for lw in self.log_widths])

    @property
    def h_measure(self) -> float:
        return fsum(b - a for a, b in self.D)

    def coefficients(self, r_max: int) -> np.ndarray:
        """Complex Fourier coefficients for j = 0..r_max.

        Uses the cancellation-free midpoint form
        c_j = sum_k (mass_k / 2pi) e^{-i j mid_k} sinc(j w_k / 2),
        so plateaus far too tall and thin for floats contribute exactly
        their mass."""
        return _coefficients_from_pieces(self.piece_mids, self.piece_widths, self.piece_masses, r_max)

    def natural_r_max(self, cap: int = 10**6) -> int:
        m_n = self.m[-1]
        if m_n.is_exact and m_n.log2 < 62:
            return min(int(m_n.exact), cap)
        return cap

    def to_piecewise(self, weight: float = 1.0) -> PiecewiseFunction:
        """Step representation.  Plateaus too tall for floats, or so thin
        that a float interval would misstate their width (and hence their
        mass), become spikes carrying exact mass weight * 2/n."""
        pieces = []
        logw = math.log(weight)
        mass = weight * 2.0 / self.n
        for (a, b), lh, lw in zip(self.deltas, self.log_heights, self.log_widths):
            width = math.exp(lw) if lw > -744.0 else 0.0
            thin = width < (abs(a) + 1.0) * 1e-10
            if lh + logw <= _LOG_FLOAT_MAX and not thin:
                pieces.append(Piece(a=a, b=a + width, kind="constant", value=weight * math.exp(lh)))
            else:
                pieces.append(
                    Piece(a=a, b=a, kind="spike", value=mass, log_height=lh + logw, log_width=lw)
                )
        return PiecewiseFunction(pieces=tuple(pieces), domain=(0.0, TWO_PI), periodic=True)


# ---------------------------------------------------------------------------
# kernels, coefficients, partial sums


def dirichlet_kernel(m: int, t: float) -> float:
    """sin((m + 1/2) t) / (2 sin(t/2)), with the series branch near t = 0 mod 2pi."""
    tau = math.remainder(t, TWO_PI)
    s2 = math.sin(0.5 * tau)
    big_m = m + 0.5
    if abs(s2) < 1e-8:
        return big_m * (1.0 - tau * tau * (4.0 * big_m * big_m - 1.0) / 24.0)
    return math.sin(big_m * tau) / (2.0 * s2)


def _step_arrays(f: PiecewiseFunction) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not f.is_step():
        raise RepresentationError("Fourier closed forms require a step function")
    mids = np.array([0.5 * (p.a + p.b) for p in f.pieces])
    widths = np.array([p.b - p.a for p in f.pieces])
    masses = np.array([p.value * (p.b - p.a) for p in f.pieces])
    return mids, widths, masses


def _coefficients_from_pieces(
    mids: np.ndarray, widths: np.ndarray, masses: np.ndarray, r_max: int
) -> np.ndarray:
    js = np.arange(r_max + 1, dtype=float)
    out = np.zeros(r_max + 1, dtype=complex)
    for mid, w, mass in zip(mids, widths, masses):
        args = 0.5 * js * w
        sinc = np.ones_like(args)
        nz = args != 0.0
        sinc[nz] = np.sin(args[nz]) / args[nz]
        out += (mass / TWO_PI) * sinc * np.exp(-1j * js * mid)
    return out


def fourier_coeff(f: PiecewiseFunction, j: int):
    """Closed-form coefficient (1/2pi) int f e^{-ijx} of a periodic step function."""
    mids, widths, masses = _step_arrays(f)
    if j == 0:
        return complex(np.sum(masses) / TWO_PI)
    args = 0.5 * j * widths
    sinc = np.where(args != 0.0, np.sin(args) / np.where(args != 0.0, args, 1.0), 1.0)
    return complex(np.sum((masses / TWO_PI) * sinc * np.exp(-1j * j * mids)))


def coefficient_array(obj, r_max: int) -> np.ndarray:
    """Coefficients j = 0..r_max for a step function, spike train, or series."""
    if isinstance(obj, PhiN):
        return obj.coefficients(r_max)
    if isinstance(obj, SeriesFunction):
        return obj.coefficients(r_max)
    mids, widths, masses = _step_arrays(obj)
    return _coefficients_from_pieces(mids, widths, masses, r_max)


def partial_sum(obj, r: int, x: float) -> float:
    """S_r(x) = sum_{|j| <= r} c_j e^{ijx}; real for real input (checked)."""
    coeffs = coefficient_array(obj, r)
    js = np.arange(1, r + 1)
    phases = np.exp(1j * js * x)
    total = coeffs[0] + np.sum(coeffs[1:] * phases + np.conj(coeffs[1:]) * np.conj(phases))
    if abs(total.imag) > 1e-9:
        raise RepresentationError(f"partial sum has imaginary residue {total.imag:.3e}")
    return float(total.real)


def partial_sums_upto(obj, r_max: int, x: float) -> np.ndarray:
    """All S_r(x) for r = 0..r_max in one incremental pass."""
    coeffs = coefficient_array(obj, r_max)
    js = np.arange(1, r_max + 1)
    terms = 2.0 * (coeffs[1:].real * np.cos(js * x) - coeffs[1:].imag * np.sin(js * x))
    out = np.empty(r_max + 1)
    out[0] = coeffs[0].real
    out[1:] = out[0] + np.cumsum(terms)
    return out


# ---------------------------------------------------------------------------
# the inductive construction


def _psi_bound(gap: float) -> float:
    """Upper bound of 1/(2|sin(tau/2)|) at circular distance >= gap."""
    g = min(max(gap, 1e-300), math.pi)
    return 1.0 / (2.0 * math.sin(0.5 * g))


def _circular_gap(lo: float, hi: float, point: float) -> float:
    if lo <= point <= hi:
        return 0.0

    def circ(a: float, b: float) -> float:
        d = abs(a - b) % TWO_PI
        return min(d, TWO_PI - d)

    return min(circ(lo, point), circ(hi, point))


def _envelope_log_sum(
    log_heights: list[float],
    edges: list[tuple[float, float]],
    window: tuple[float, float],
) -> float:
    """log of sum_j h_j (psi(d_aj) + psi(d_bj)) over the built plateaus."""
    terms = []
    for lh, (ea, eb) in zip(log_heights, edges):
        psi = _psi_bound(_circular_gap(*window, ea)) + _psi_bound(_circular_gap(*window, eb))
        terms.append(lh + math.log(psi))
    peak = max(terms)
    return peak + math.log(fsum(math.exp(t - peak) for t in terms))


def _envelope_bound(log_sum: float, m_ln: float) -> float:
    """Certified bound (2/(pi m)) * sum h_j (psi_a + psi_b) for |S_m| on the window."""
    ln_bound = math.log(2.0 / math.pi) + log_sum - m_ln
    return math.exp(ln_bound) if ln_bound > -700.0 else 0.0


def _smallest_odd_at_least(x: int) -> int:
    return x if x % 2 == 1 else x + 1


def _materialize_lambda(m_required: float, two_n_one: int, lam_prev: BigNat) -> tuple[BigNat, BigNat]:
    """Smallest odd lambda > lam_prev with m = (lambda(2n+1)-1)/2 >= m_required."""
    if lam_prev.is_exact and m_required < 2.0**996:
        m_req = int(math.ceil(m_required))
        lam0 = max((2 * m_req + two_n_one) // two_n_one, lam_prev.exact + 2)
        lam = _smallest_odd_at_least(lam0)
        while (lam * two_n_one - 1) // 2 < m_req or lam <= lam_prev.exact:
            lam += 2
        m = (lam * two_n_one - 1) // 2
        return BigNat.from_int(lam), BigNat.from_int(m)
    # symbolic: record a log2 lower bound with a safety margin for the
    # odd-rounding; the actual integer is the smallest odd above it
    log2_lam = max(math.log2(m_required) + 1.0 - math.log2(two_n_one), lam_prev.log2 + 1e-9) + 1e-9
    log2_m_sel = log2_lam + math.log2(two_n_one) - 1.0
    return BigNat(log2=log2_lam), BigNat(log2=log2_m_sel)


def build_phi_n(
    n: int,
    grid_density: int = 64,
    symmetric: bool = False,
    lambda_cap: int | None = None,
    direct_cutoff: int = 1_000_000,
    width_budget=None,
    strict_alignment: bool = False,
    envelope_margin: float = 0.9,
) -> PhiN:
    """Construct the spike train with n plateaus.

    ``width_budget``: optional map k -> available width; when given, the
    selection additionally requires 2/m_k^2 < budget(k) for k >= 2, which is
    how the plateaus are kept inside the exponent bumps they sit on.
    ``strict_alignment`` switches to the literal positional inequality
    A_k + 2/m_k^2 < budget(k), which is unsatisfiable for the standard
    budgets; it exists so the distinction stays visible.

    Selection: candidates with m below ``direct_cutoff`` are checked exactly
    (one incremental partial-sum pass with a checkpoint at every candidate,
    on the stated grid and its 2x refinement); above the cutoff the smallest
    odd value whose certified envelope bound clears ``envelope_margin`` is
    taken.  Raises ConstructionError when ``lambda_cap`` is exhausted.
    """
    if n < 3:
        raise InputError("n must be >= 3")
    if symmetric and width_budget is not None:
        raise InputError("width budgets apply to the non-symmetric interval mode")
    two_n_one = 2 * n + 1
    A = [4.0 * math.pi * k / two_n_one for k in range(1, n + 1)]
    margin = 1.0 / (n * math.log(n))
    D = [(A[k - 1] + margin, A[k] - margin) for k in range(1, n)]

    lambdas: list[BigNat] = [BigNat.from_int(1)]
    ms: list[BigNat] = [BigNat.from_int(n)]
    log_heights: list[float] = [2.0 * math.log(n) - math.log(n)]
    log_widths: list[float] = [math.log(2.0) - 2.0 * math.log(n)]
    audits: list[AuditRecord] = []

    def delta_edges(k_idx: int) -> tuple[float, float]:
        w = math.exp(log_widths[k_idx]) if log_widths[k_idx] > -744.0 else 0.0
        if symmetric:
            return (A[k_idx] - 0.5 * w, A[k_idx] + 0.5 * w)
        return (A[k_idx], A[k_idx] + w)

    for k in range(2, n + 1):
        window = D[k - 2]
        built_edges = [delta_edges(j) for j in range(k - 1)]
        log_sum = _envelope_log_sum(log_heights, built_edges, window)

        m_wmin = 1.0
        if width_budget is not None:
            budget = width_budget(k)
            if strict_alignment:
                budget = budget - A[k - 1]
            if budget <= 0.0:
                raise ConstructionError(
                    f"alignment constraint unsatisfiable at k={k}: available width {budget:.3e}"
                )
            m_wmin = math.sqrt(2.0 / budget) * (1.0 + 1e-12)

        m_prev = ms[-1]
        ln_m_env = math.log(2.0 / math.pi) + log_sum - math.log(envelope_margin)
        m_env = math.exp(ln_m_env) if ln_m_env < 700.0 else math.inf

        chosen: tuple[BigNat, BigNat] | None = None
        record: AuditRecord | None = None

        scan_feasible = (
            m_prev.is_exact
            and m_prev.exact < direct_cutoff
            and (ln_m_env < math.log(8.0 * direct_cutoff))
        )
        if scan_feasible:
            lam_first = _smallest_odd_at_least(lambdas[-1].exact + 2)
            m_first = (lam_first * two_n_one - 1) // 2
            while m_first < max(m_wmin, float(m_prev.exact + 1)):
                lam_first += 2
                m_first = (lam_first * two_n_one - 1) // 2
            m_last = min(direct_cutoff, int(m_env) + two_n_one if m_env < math.inf else direct_cutoff)
            if m_first <= m_last:
                checks = np.arange(m_first, m_last + 1, two_n_one, dtype=np.int64)
                mids_b = np.array([0.5 * (ea + eb) for ea, eb in built_edges])
                widths_b = np.array([eb - ea for ea, eb in built_edges])
                masses_b = np.full(k - 1, 2.0 / n)
                coeffs = _coefficients_from_pieces(mids_b, widths_b, masses_b, int(checks[-1]))
                fine = np.linspace(window[0], window[1], 2 * grid_density)
                vals = _kernels.abs_at_checkpoints(coeffs.real.copy(), coeffs.imag.copy(), fine, checks)
                fine_max = vals.max(axis=1)
                coarse_max = vals[:, ::2].max(axis=1)
                ok = np.nonzero((fine_max < 1.0) & (coarse_max < 1.0))[0]
                if ok.size:
                    idx = int(ok[0])
                    m_sel = int(checks[idx])
                    lam_sel = (2 * m_sel + 1) // two_n_one
                    chosen = (BigNat.from_int(lam_sel), BigNat.from_int(m_sel))
                    earlier = _earlier_window_values(
                        coeffs, m_sel, D[: k - 2], density=8
                    )
                    record = AuditRecord(
                        k=k,
                        mode="grid",
                        grid_max=float(coarse_max[idx]),
                        grid_max_fine=float(fine_max[idx]),
                        bound=None,
                        earlier=earlier,
                    )
        if chosen is None:
            if ln_m_env < 700.0:
                floors = [math.exp(ln_m_env), m_wmin]
                if m_prev.is_exact and m_prev.log2 < 1020.0:
                    floors.append(m_prev.as_float() + 1.0)
                lam_sel, m_sel = _materialize_lambda(max(floors), two_n_one, lambdas[-1])
            else:
                log2_m_req = ln_m_env / math.log(2.0)
                # the margin must dominate the float resolution of these
                # astronomically large logarithms
                rel = 1e-12 * abs(log2_m_req) + 1e-9
                log2_lam = max(log2_m_req + 1.0 - math.log2(two_n_one), lambdas[-1].log2 + rel) + rel
                lam_sel = BigNat(log2=log2_lam)
                m_sel = BigNat(log2=log2_lam + math.log2(two_n_one) - 1.0)
            bound = _envelope_bound(log_sum, m_sel.ln)
            if bound >= 1.0:
                raise ConstructionError(f"envelope bound failed to certify at k={k}: {bound}")
            earlier = tuple(
                _envelope_bound(_envelope_log_sum(log_heights, built_edges, w), m_sel.ln)
                for w in D[: k - 2]
            )
            record = AuditRecord(
                k=k, mode="envelope", grid_max=None, grid_max_fine=None, bound=bound, earlier=earlier
            )
            chosen = (lam_sel, m_sel)

        lam_sel, m_sel = chosen
        if lambda_cap is not None and (
            (lam_sel.is_exact and lam_sel.exact > lambda_cap)
            or (not lam_sel.is_exact and lam_sel.log2 > math.log2(lambda_cap))
        ):
            raise ConstructionError(
                f"lambda_cap={lambda_cap} exhausted at k={k}; "
                f"required lambda ~ 2^{lam_sel.log2:.1f} "
                f"(measured minimum bound {record.worst if record else 'n/a'})"
            )
        lambdas.append(lam_sel)
        ms.append(m_sel)
        log_heights.append(2.0 * m_sel.ln - math.log(n))
        log_widths.append(math.log(2.0) - 2.0 * m_sel.ln)
        audits.append(record)

    deltas = tuple(delta_edges(j) for j in range(n))
    for (a0, b0), (a1, _) in zip(deltas[:-1], deltas[1:]):
        if b0 > a1:
            raise ConstructionError("plateau intervals overlap")
    return PhiN(
        n=n,
        symmetric=symmetric,
        grid_density=grid_density,
        lambdas=tuple(lambdas),
        m=tuple(ms),
        A=tuple(A),
        deltas=deltas,
        log_heights=tuple(log_heights),
        log_widths=tuple(log_widths),
        D=tuple(D),
        audit=tuple(audits),
    )


def _earlier_window_values(
    coeffs: np.ndarray, m_sel: int, windows, density: int = 8
) -> tuple[float, ...]:
    """Recorded (not enforced) check values on earlier windows at the chosen m."""
    out = []
    checks = np.array([m_sel], dtype=np.int64)
    for lo, hi in windows:
        xs = np.linspace(lo, hi, density)
        vals = _kernels.abs_at_checkpoints(coeffs.real.copy(), coeffs.imag.copy(), xs, checks)
        out.append(float(vals.max()))
    return tuple(out)


def reaudit_phi(phi: PhiN, factor: int = 2) -> list[float]:
    """Re-evaluate every selection check at ``factor`` times the stated
    grid density (selection itself already clears factors 1 and 2).

    Exactly-checked steps are re-scanned; envelope-certified steps return
    their stored bound, which holds for every point of the window.
    """
    out = []
    for rec in phi.audit:
        k = rec.k
        if rec.mode == "envelope":
            out.append(rec.bound)
            continue
        m_sel = phi.m[k - 1]
        mids = phi.piece_mids[: k - 1]
        widths = phi.piece_widths[: k - 1]
        masses = phi.piece_masses[: k - 1]
        coeffs = _coefficients_from_pieces(mids, widths, masses, int(m_sel.exact))
        lo, hi = phi.D[k - 2]
        xs = np.linspace(lo, hi, factor * phi.grid_density)
        vals = _kernels.abs_at_checkpoints(
            coeffs.real.copy(), coeffs.imag.copy(), xs, np.array([m_sel.exact], dtype=np.int64)
        )
        out.append(float(vals.max()))
    return out


# ---------------------------------------------------------------------------
# series assembly and scans


@dataclass(frozen=True)
class DivergentSeriesSpec:
    """Which spike trains to combine and with which decaying weights."""

    n_sequence: tuple[int, ...] = (25, 50, 100, 200)
    weight_kind: str = "kolmogorov"
    truncation: int = 4

    def __post_init__(self):
        if self.weight_kind not in ("kolmogorov", "marcinkiewicz"):
            raise InputError(f"unknown weight kind {self.weight_kind!r}")
        seq = self.n_sequence[: self.truncation]
        if any(b <= a for a, b in zip(seq[:-1], seq[1:])):
            raise InputError("n_sequence must be strictly increasing")
        if any(nk < 3 for nk in seq):
            raise InputError("n_sequence entries must be >= 3 (log n > 1)")

    def weight(self, nk: int) -> float:
        if self.weight_kind == "kolmogorov":
            return 1.0 / math.sqrt(math.log(nk))
        return 1.0 / math.log(nk)


@dataclass(frozen=True)
class SeriesFunction:
    """Finite weighted sum of spike trains, kept term-by-term.

    Coefficients add linearly; the merged step representation (with spikes
    for plateaus beyond float range) is produced on demand.
    """

    terms: tuple[tuple[float, PhiN], ...]
    spec: DivergentSeriesSpec

    @property
    def l1_mass(self) -> float:
        """Exact total mass: each train has mass 2 and everything is >= 0."""
        return fsum(2.0 * w for w, _ in self.terms)

    def coefficients(self, r_max: int) -> np.ndarray:
        out = np.zeros(r_max + 1, dtype=complex)
        for w, phi in self.terms:
            out += w * phi.coefficients(r_max)
        return out

    def to_piecewise(self) -> PiecewiseFunction:
        events: list[tuple[float, float, float]] = []
        spikes: list[Piece] = []
        for w, phi in self.terms:
            for piece in phi.to_piecewise(weight=w).pieces:
                if piece.kind == "spike":
                    spikes.append(piece)
                else:
                    events.append((piece.a, piece.b, piece.value))
        edges = sorted({e for a, b, _ in events for e in (a, b)} | {s.a for s in spikes})
        merged: list[Piece] = []
        for a, b in zip(edges[:-1], edges[1:]):
            if b <= a:
                continue
            mid = 0.5 * (a + b)
            v = fsum(val for (pa, pb, val) in events if pa < mid < pb)
            if v != 0.0:
                merged.append(Piece(a=a, b=b, kind="constant", value=v))
        merged.extend(spikes)
        return PiecewiseFunction(pieces=tuple(merged), domain=(0.0, TWO_PI), periodic=True)


def assemble_series(spec: DivergentSeriesSpec, phis: dict[int, PhiN] | None = None, **build_kwargs) -> SeriesFunction:
    """Build (or reuse) the spike trains and attach the decaying weights."""
    seq = spec.n_sequence[: spec.truncation]
    terms = []
    for nk in seq:
        phi = phis[nk] if phis is not None and nk in phis else build_phi_n(nk, **build_kwargs)
        terms.append((spec.weight(nk), phi))
    return SeriesFunction(terms=tuple(terms), spec=spec)


@dataclass(frozen=True)
class DivergenceScan:
    """Per-grid-point running maxima of |S_r| with the maximizing r."""

    xs: np.ndarray
    max_abs: np.ndarray
    argmax_r: np.ndarray
    r_min: int
    r_max: int

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "max_abs_partial_sum", "argmax_r"])
            for x, v, r in zip(self.xs, self.max_abs, self.argmax_r):
                writer.writerow([repr(float(x)), repr(float(v)), int(r)])


def divergence_scan(obj, r_max: int, grid: np.ndarray, r_min: int = 0) -> DivergenceScan:
    """max over r in [r_min, r_max] of |S_r(x)| for every grid point."""
    xs = np.ascontiguousarray(grid, dtype=float)
    coeffs = coefficient_array(obj, r_max)
    max_abs, argmax = _kernels.scan_running_max(
        np.ascontiguousarray(coeffs.real), np.ascontiguousarray(coeffs.imag), xs, int(r_min)
    )
    return DivergenceScan(xs=xs, max_abs=max_abs, argmax_r=argmax, r_min=r_min, r_max=r_max)


# ---------------------------------------------------------------------------
# serialization


def phi_to_json(phi: PhiN) -> dict:
    return {
        "n": phi.n,
        "symmetric": phi.symmetric,
        "grid_density": phi.grid_density,
        "mass": [int(phi.mass_exact.numerator), int(phi.mass_exact.denominator)],
        "lambdas": [b.to_json() for b in phi.lambdas],
        "m": [b.to_json() for b in phi.m],
        "A": list(phi.A),
        "deltas": [[a, b] for a, b in phi.deltas],
        "log_heights": list(phi.log_heights),
        "log_widths": list(phi.log_widths),
        "D": [[a, b] for a, b in phi.D],
        "h_measure": phi.h_measure,
        "audit": [rec.to_json() for rec in phi.audit],
    }


def phi_dumps(phi: PhiN) -> str:
    return json.dumps(phi_to_json(phi), sort_keys=True)
