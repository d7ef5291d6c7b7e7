"""Numerics for fractional Musielak-Sobolev spaces.

Generalized N-functions with spatial dependence, Musielak modulars and
Luxemburg norms on uniform grids, Gagliardo-type fractional seminorms with
singular-kernel quadrature, smooth truncation and mollification operators,
and a constructive approximation pipeline with per-stage error budgets.
"""

from .exceptions import (
    AlignmentError,
    BudgetInfeasibleError,
    ConfigError,
    DomainError,
    MusielakError,
    ParameterError,
    ResolutionError,
    SamplingError,
)
from .grid import (
    Ball,
    BoxDomain,
    ConstantBoundary,
    FullSpace,
    GridFunction,
    GridSpec,
    Hypograph,
    Region,
    SineBoundary,
    clamp,
    sample,
    support,
    vanishes_outside,
)
from .modular import (
    ModularResult,
    detect_divergence,
    frac_modular_value,
    modular_fractional,
    modular_pair,
    modular_scalar,
    scalar_modular_value,
)
from .nfunction import (
    NFunction,
    NFunctionReport,
    SamplingSpec,
    check_structure,
    conjugate,
    conjugate_nfunction,
    estimate_g_bounds,
    eval_G,
    eval_g,
    orlicz,
    product,
    step_exponent,
    variable_exponent,
)
from .norms import (
    NormResult,
    gagliardo_seminorm,
    holder_pairing,
    luxemburg_norm,
    norm_modular_equivalence,
    sobolev_norm,
    sobolev_parts,
)
from .pipeline import (
    ApproximationReport,
    ConvergenceReport,
    approximate,
    convergence_experiment,
    counterexample_experiment,
    finiteness_experiment,
)
from .profiles import bump, kovacik_f, linear, tent, windowed_constant
from .smoothing import (
    SmoothingParams,
    axis_shift,
    cutoff,
    cutoff_slope,
    cutoff_values,
    hypograph_margin,
    inflate,
    mollifier_weights,
    mollify,
    translate,
)
from ._kernels import available_backends, backend_name, tree_sum

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "ApproximationReport",
    "Ball",
    "BoxDomain",
    "BudgetInfeasibleError",
    "ConfigError",
    "ConstantBoundary",
    "ConvergenceReport",
    "DomainError",
    "FullSpace",
    "GridFunction",
    "GridSpec",
    "Hypograph",
    "ModularResult",
    "MusielakError",
    "NFunction",
    "NFunctionReport",
    "NormResult",
    "ParameterError",
    "Region",
    "ResolutionError",
    "SamplingError",
    "SamplingSpec",
    "SineBoundary",
    "SmoothingParams",
    "approximate",
    "available_backends",
    "axis_shift",
    "backend_name",
    "bump",
    "check_structure",
    "clamp",
    "conjugate",
    "conjugate_nfunction",
    "convergence_experiment",
    "counterexample_experiment",
    "cutoff",
    "cutoff_slope",
    "cutoff_values",
    "detect_divergence",
    "estimate_g_bounds",
    "eval_G",
    "eval_g",
    "finiteness_experiment",
    "frac_modular_value",
    "gagliardo_seminorm",
    "holder_pairing",
    "hypograph_margin",
    "inflate",
    "kovacik_f",
    "linear",
    "luxemburg_norm",
    "modular_fractional",
    "modular_pair",
    "modular_scalar",
    "mollifier_weights",
    "mollify",
    "norm_modular_equivalence",
    "orlicz",
    "product",
    "sample",
    "scalar_modular_value",
    "sobolev_norm",
    "sobolev_parts",
    "step_exponent",
    "support",
    "tent",
    "translate",
    "tree_sum",
    "vanishes_outside",
    "variable_exponent",
    "windowed_constant",
    "__version__",
]
