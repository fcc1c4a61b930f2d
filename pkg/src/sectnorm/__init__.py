"""Exact sup, quotient and spectral norms on graded section algebras over
p-adic fields, with a metric-extension experiment harness."""

from .ratio import RAT_BACKEND, Rat, rat, rat_str
from .valued_arith import (
    GammaValue,
    Prime,
    gamma_compare,
    gamma_from_json,
    gamma_to_json,
    norm_max,
    norm_min,
    q_independent,
    valuation,
)
from .kernels import KERNEL_BACKEND
from .normed_space import (
    DependentSpanError,
    NotComplementaryError,
    OutsideSpanError,
    WeightedNorm,
    dual_norm,
    orthogonalize,
    quotient_norm,
    vector_norm,
)
from .section_algebra import (
    DiagonalMetric,
    GradedElement,
    GradedSection,
    algebra_norm,
    gauss_norm,
    monomial_basis,
    multiply,
    parse_section,
    power,
    section_to_str,
    space_dim,
    spectral_seminorm,
)
from .points_metrics import (
    Frame,
    MonomialPoint,
    RationalPoint,
    disc_membership,
    eval_dual_metric,
    eval_metric,
    fs_idempotence_check,
    fs_value,
    metric_distance,
    parse_point,
    point_to_str,
)
from .restriction import (
    RestrictedDegree,
    Subvariety,
    extension_lift,
    ideal_degree_part,
    quotient_norm_n,
    sup_norm_exact,
    sup_norm_spectral,
)
from .experiment import (
    ExperimentConfig,
    load_config,
    run_check_suite,
    run_extension,
    run_perturbation_study,
    run_spectral_study,
)

__version__ = "0.1.0"
