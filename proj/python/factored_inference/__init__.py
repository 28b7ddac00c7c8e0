"""Moment approximation for products of one-dimensional Gaussian-mixture factors.

Thin Python surface over the compiled core: mixture construction, the exact
brute-force oracle, four message-passing solvers (variable-duplication Gaussian
BP, persistent EP, analytic-continuation EP, and a clipping-EP baseline),
mixing-matrix utilities, and the seeded benchmark instance generator.
"""

from ._core import (
    AcepFactorUpdate,
    AcepStep,
    Estimate,
    FactoredError,
    GaussianMoment,
    GaussianNat,
    Gmm1D,
    InstanceSpec,
    IntegrabilityStatus,
    MatrixKind,
    MixingMatrix,
    Mode,
    PepStep,
    PosteriorMoments,
    RangeLaw,
    SolveStatus,
    SolverConfig,
    ValidationReport,
    WeightLaw,
    acep_integrability,
    build_mixing_matrix,
    check_integrability,
    exact_product_moments,
    generate_instance,
    gmm_moments,
    gmm_times_gaussian,
    instance_to_json,
    moment_from_nat,
    nat_from_moment,
    nse,
    parse_instance_json,
    product_component_count,
    quadrature_posterior_moments,
    quadrature_product_moments,
    reproduce_nat,
    run_acep,
    run_clipping_ep,
    run_persistent_ep,
    run_vdbp,
    update_factor_acep,
    validate_mixing_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "AcepFactorUpdate",
    "AcepStep",
    "Estimate",
    "FactoredError",
    "GaussianMoment",
    "GaussianNat",
    "Gmm1D",
    "InstanceSpec",
    "IntegrabilityStatus",
    "MatrixKind",
    "MixingMatrix",
    "Mode",
    "PepStep",
    "PosteriorMoments",
    "RangeLaw",
    "SolveStatus",
    "SolverConfig",
    "ValidationReport",
    "WeightLaw",
    "acep_integrability",
    "build_mixing_matrix",
    "check_integrability",
    "exact_product_moments",
    "generate_instance",
    "gmm_moments",
    "gmm_times_gaussian",
    "instance_to_json",
    "moment_from_nat",
    "nat_from_moment",
    "nse",
    "parse_instance_json",
    "product_component_count",
    "quadrature_posterior_moments",
    "quadrature_product_moments",
    "reproduce_nat",
    "run_acep",
    "run_clipping_ep",
    "run_persistent_ep",
    "run_vdbp",
    "update_factor_acep",
    "validate_mixing_matrix",
]
