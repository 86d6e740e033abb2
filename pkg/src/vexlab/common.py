"""Shared numeric plumbing: divergence markers, quadrature, seeded streams.

Everything here is deterministic: panel sums are accumulated with
``math.fsum`` in panel-index order, and random streams are derived from a
single seed through named substreams, so adding a consumer never perturbs
the draws seen by existing ones.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DIVERGENT",
    "Divergence",
    "InputError",
    "RepresentationError",
    "ConstructionError",
    "ModularValue",
    "gauss_nodes",
    "gauss_panel",
    "integrate_graded",
    "integrate_logspaced",
    "substream",
    "fsum",
]


class VexlabError(Exception):
    """Base class for errors raised by this package."""


class InputError(VexlabError, ValueError):
    """A caller violated an operation's precondition."""


class RepresentationError(VexlabError, TypeError):
    """The function representation does not support the requested operation."""


class ConstructionError(VexlabError, RuntimeError):
    """An inductive construction could not be completed."""


class _DivergentValue:
    """Singleton marking a pointwise value of +infinity.

    Used instead of ``float('inf')`` so that a divergence can never leak
    into downstream floating-point arithmetic unnoticed.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "DIVERGENT"

    def __reduce__(self):
        return (_DivergentValue, ())


DIVERGENT = _DivergentValue()


@dataclass(frozen=True)
class Divergence:
    """Certificate that an integral is infinite.

    ``where`` is the singular point; ``u_power`` the local exponent of the
    distance-to-singularity variable u (integrand ~ u**u_power); ``log_power``
    the additional power of log(1/u).  The integral diverges iff
    u_power < -1, or u_power == -1 and log_power >= -1.
    """

    where: float
    u_power: float
    log_power: float = 0.0

    def to_json(self) -> dict:
        return {"where": self.where, "u_power": self.u_power, "log_power": self.log_power}


@dataclass(frozen=True)
class ModularValue:
    """Result of a (possibly weighted) integral: finite value or divergence.

    Finite results carry an absolute error estimate; divergent results
    carry the analytic certificate.  Divergence is decided analytically,
    never by timeout or overflow.
    """

    value: float | None
    abs_error: float = 0.0
    divergence: Divergence | None = None

    @classmethod
    def finite(cls, value: float, abs_error: float = 0.0) -> "ModularValue":
        return cls(value=float(value), abs_error=float(abs_error))

    @classmethod
    def divergent(cls, where: float, u_power: float, log_power: float = 0.0) -> "ModularValue":
        return cls(value=None, divergence=Divergence(where, u_power, log_power))

    @property
    def is_finite(self) -> bool:
        return self.divergence is None

    def __add__(self, other: "ModularValue") -> "ModularValue":
        if not self.is_finite:
            return self
        if not other.is_finite:
            return other
        return ModularValue.finite(self.value + other.value, self.abs_error + other.abs_error)

    def to_json(self) -> dict:
        if self.is_finite:
            return {"finite": True, "value": self.value, "abs_error": self.abs_error}
        return {"finite": False, "divergence": self.divergence.to_json()}


def divergence_fires(u_power: float, log_power: float = 0.0) -> bool:
    """Analytic endpoint test: does integral of u^a * log(1/u)^b diverge at 0?"""
    if u_power < -1.0:
        return True
    return u_power == -1.0 and log_power >= -1.0


_GAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1], cached per order."""
    if order not in _GAUSS_CACHE:
        x, w = np.polynomial.legendre.leggauss(order)
        _GAUSS_CACHE[order] = (x, w)
    return _GAUSS_CACHE[order]


def gauss_panel(fun, lo: float, hi: float, order: int = 16) -> float:
    """Integrate a vectorized integrand over one panel with Gauss-Legendre."""
    x, w = gauss_nodes(order)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return half * float(np.dot(w, fun(mid + half * x)))


def fsum(values) -> float:
    return math.fsum(values)


def integrate_graded(
    fun,
    lo: float,
    hi: float,
    *,
    singular_lo: bool = False,
    singular_hi: bool = False,
    tol_abs: float = 1e-12,
    tol_rel: float = 1e-11,
    order: int = 16,
    max_panels: int = 4096,
) -> tuple[float, float]:
    """Panel quadrature with geometric grading toward flagged endpoints.

    The mesh is split at ratio 1/2 toward each singular endpoint before any
    adaptivity, which is the right a-priori grading for integrands that are
    smooth away from known endpoint singularities.  Remaining error is
    estimated per panel by comparing two Gauss orders and the worst panels
    are bisected.  Returns (value, error_estimate).
    """
    if hi <= lo:
        return 0.0, 0.0
    panels: list[tuple[float, float]] = [(lo, hi)]

    def _grade(panels, toward_lo):
        out = []
        for a, b in panels:
            anchor = a if toward_lo else b
            cur_a, cur_b = a, b
            for _ in range(48):
                if cur_b - cur_a <= 0:
                    break
                mid = 0.5 * (cur_a + cur_b)
                if toward_lo:
                    out.append((mid, cur_b))
                    cur_b = mid
                else:
                    out.append((cur_a, mid))
                    cur_a = mid
                if abs(mid - anchor) < 1e-300:
                    break
            out.append((cur_a, cur_b))
        return out

    if singular_lo:
        panels = _grade(panels, True)
    if singular_hi:
        panels = _grade(panels, False)
    panels.sort()

    def _panel(a, b):
        v_hi = gauss_panel(fun, a, b, order=2 * order)
        v_lo = gauss_panel(fun, a, b, order=order)
        return v_hi, abs(v_hi - v_lo)

    results = {p: _panel(*p) for p in panels}
    for _ in range(max_panels):
        total = fsum(results[p][0] for p in sorted(results))
        err = fsum(results[p][1] for p in sorted(results))
        if err <= tol_abs + tol_rel * abs(total):
            break
        worst = max(sorted(results), key=lambda p: results[p][1])
        a, b = worst
        if b - a < 1e-300:
            break
        mid = 0.5 * (a + b)
        del results[worst]
        results[(a, mid)] = _panel(a, mid)
        results[(mid, b)] = _panel(mid, b)
    ordered = sorted(results)
    total = fsum(results[p][0] for p in ordered)
    err = fsum(results[p][1] for p in ordered)
    return total, err


def integrate_logspaced(
    fun,
    u_lo: float,
    u_hi: float,
    *,
    efolds_per_panel: float = 2.0,
    order: int = 16,
) -> tuple[float, float]:
    """Integrate fun(u) du over (u_lo, u_hi) on panels of bounded log-width.

    Both endpoints must be positive.  Panels have at most
    ``efolds_per_panel`` e-folds each, so an integrand whose variation is
    polynomial in log(u) is resolved uniformly well down to very small u.
    """
    if u_hi <= u_lo:
        return 0.0, 0.0
    n_panels = max(1, int(math.ceil(math.log(u_hi / u_lo) / efolds_per_panel)))
    edges = np.exp(np.linspace(math.log(u_lo), math.log(u_hi), n_panels + 1))
    vals = []
    errs = []
    for a, b in zip(edges[:-1], edges[1:]):
        v_hi = gauss_panel(fun, a, b, order=2 * order)
        v_lo = gauss_panel(fun, a, b, order=order)
        vals.append(v_hi)
        errs.append(abs(v_hi - v_lo))
    return fsum(vals), fsum(errs)


def substream(seed: int, name: str) -> np.random.Generator:
    """Named random substream: stable under addition of other streams."""
    tag = zlib.crc32(name.encode("utf-8"))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, tag])))
