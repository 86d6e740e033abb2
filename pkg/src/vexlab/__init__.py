"""vexlab: a numerical laboratory for variable-exponent Lebesgue spaces.

Exponents built from log-bumps, Luxemburg norms with analytic divergence
certificates, maximal-function experiments, and the spike-train
constructions of almost-everywhere divergent Fourier series.
"""

from .common import DIVERGENT, Divergence, ModularValue
from .exponent import (
    ExponentFunction,
    LogBump,
    build_theorem52_exponent,
    build_tilde_p,
    conjugate,
    constant_exponent,
    essential_range_on,
    exponent_for_integrable,
    single_bump_exponent,
)
from .funcrep import (
    PiecewiseFunction,
    Piece,
    characteristic,
    evaluate,
    integrate,
    powered_integral,
    step_function,
)
from .fourier import (
    DivergentSeriesSpec,
    PhiN,
    assemble_series,
    build_phi_n,
    dirichlet_kernel,
    divergence_scan,
    fourier_coeff,
    partial_sum,
)
from .maximal import maximal_on_grid, thm42_witness
from .normcore import NormResult, char_interval_norm, char_norm_bounds, holder_pairing, luxemburg_norm, modular
from .rearrange import decreasing_rearrangement, exponent_rearrangement_grid, prop21_integral_test

__version__ = "0.1.0"

__all__ = [
    "DIVERGENT",
    "Divergence",
    "ModularValue",
    "ExponentFunction",
    "LogBump",
    "build_theorem52_exponent",
    "build_tilde_p",
    "conjugate",
    "constant_exponent",
    "essential_range_on",
    "exponent_for_integrable",
    "single_bump_exponent",
    "PiecewiseFunction",
    "Piece",
    "characteristic",
    "evaluate",
    "integrate",
    "powered_integral",
    "step_function",
    "DivergentSeriesSpec",
    "PhiN",
    "assemble_series",
    "build_phi_n",
    "dirichlet_kernel",
    "divergence_scan",
    "fourier_coeff",
    "partial_sum",
    "NormResult",
    "char_interval_norm",
    "char_norm_bounds",
    "holder_pairing",
    "luxemburg_norm",
    "modular",
    "maximal_on_grid",
    "thm42_witness",
    "decreasing_rearrangement",
    "exponent_rearrangement_grid",
    "prop21_integral_test",
    "__version__",
]
