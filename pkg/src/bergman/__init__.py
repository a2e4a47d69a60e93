"""Certified numerics for kernels, metrics, and distances on circular domains.

The package builds multiply connected circular domains (a unit disc with
round holes), evaluates their reproducing kernels through Gram matrices
of rational basis functions, bounds kernels above and below in exact
log-space arithmetic, and certifies the inequality chain showing that a
complete domain can keep a bounded kernel along a boundary-approaching
sequence.
"""

from .basis import (
    BasisElement,
    PointSet,
    RationalCombination,
    monomial_element,
    standard_basis,
    tail_element,
)
from .closed_forms import (
    AnnulusSpec,
    disc_kernel,
    disc_moment,
    exterior_annulus_kernel,
    monomial_norm_disc,
    restriction_factor_annulus,
    restriction_factor_disc,
    tail_kernel_bound_higher,
    tail_kernel_bound_order1,
    tail_norm_annulus,
    u_ratio,
)
from .construction import (
    ConditionReport,
    Construction,
    ConstructionParams,
    Ring,
    SandwichReport,
    SandwichRow,
    SpacingConstant,
    generate,
    majorant,
    ring,
    ring_lower_bound_log,
    sandwich_scan,
    spacing_constant,
    verify_conditions,
)
from .distance import (
    DistanceResult,
    Path,
    ProbeReport,
    ProbeRow,
    completeness_probe,
    distance_matrix,
    distance_upper,
    metric,
    path_length,
)
from .domain import (
    CircularDomain,
    HoleSpec,
    ValidationReport,
    contains,
    domain_from_dict,
    domain_to_dict,
    hole_condition_terms,
    hole_conditions_hold,
    load_domain,
    save_domain,
    validate_configuration,
)
from .hilbert import (
    BackendMismatchError,
    GramBuild,
    KernelEvaluator,
    annulus_kernel_reference,
    gram_matrix,
    inner_product,
    kernel_lower_bound_single,
)
from .laurent import (
    ApproximationResult,
    InequalityStep,
    SplitResult,
    SuiteReport,
    annulus_tail_norm_sq,
    hole_alpha_beta,
    inequality_suite,
    laurent_coefficients,
    partial_sum_approximation,
    split,
    tail_norm_bound,
)
from .logspace import LogScalar

__version__ = "0.1.0"

__all__ = [
    "BackendMismatchError",
    "BasisElement",
    "CircularDomain",
    "ConditionReport",
    "Construction",
    "ConstructionParams",
    "DistanceResult",
    "GramBuild",
    "HoleSpec",
    "InequalityStep",
    "KernelEvaluator",
    "LogScalar",
    "Path",
    "PointSet",
    "ProbeReport",
    "ProbeRow",
    "RationalCombination",
    "Ring",
    "SandwichReport",
    "SandwichRow",
    "SpacingConstant",
    "SplitResult",
    "SuiteReport",
    "ValidationReport",
    "AnnulusSpec",
    "ApproximationResult",
    "annulus_kernel_reference",
    "annulus_tail_norm_sq",
    "completeness_probe",
    "contains",
    "disc_kernel",
    "disc_moment",
    "distance_matrix",
    "distance_upper",
    "domain_from_dict",
    "domain_to_dict",
    "exterior_annulus_kernel",
    "generate",
    "gram_matrix",
    "hole_alpha_beta",
    "hole_condition_terms",
    "hole_conditions_hold",
    "inequality_suite",
    "inner_product",
    "kernel_lower_bound_single",
    "laurent_coefficients",
    "load_domain",
    "majorant",
    "metric",
    "monomial_element",
    "monomial_norm_disc",
    "partial_sum_approximation",
    "path_length",
    "restriction_factor_annulus",
    "restriction_factor_disc",
    "ring",
    "ring_lower_bound_log",
    "sandwich_scan",
    "save_domain",
    "spacing_constant",
    "split",
    "standard_basis",
    "tail_element",
    "tail_kernel_bound_higher",
    "tail_kernel_bound_order1",
    "tail_norm_annulus",
    "u_ratio",
    "validate_configuration",
    "verify_conditions",
]
