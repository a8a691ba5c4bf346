"""betamode: minimal-volume probability box (beta-mode) detection.

PRIM peeling/covering and the one-step fastPRIM box, with principal or
pettiest (smallest-variance) component reduction, analytic centered-box
formulas for independent normal marginals, an exhaustive subset-volume
optimality check, and a reproducible five-method simulation harness.
"""

__version__ = "0.1.0"

from .boxes import (
    Box,
    QuantileBoxSpec,
    active_information,
    analytic_box_volume,
    central_quantile_box,
    contains,
    empirical_mass,
    volume,
)
from .errors import (
    BetamodeError,
    CannotPeelError,
    DegenerateColumnError,
    DegenerateDataError,
    DomainError,
    InsufficientPointsError,
    InvalidInputError,
    NumericalError,
)
from .fastprim import (
    ComponentSelection,
    OptimalityCheckReport,
    SubsetScanResult,
    beta_schedule,
    fastprim_box,
    fastprim_cover,
    pettiest_optimality_check,
    select_components,
    subset_volume_scan,
)
from .mvn import sample_mvn
from .prim import (
    BoxRecord,
    BoxTrajectory,
    CoveringReport,
    PeelStep,
    bounding_box,
    empirical_quantile,
    peel,
    prim_cover,
    prim_peel_to_beta,
)
from .sim import (
    ALL_METHODS,
    MethodRunResult,
    MethodSummary,
    SimConfig,
    audit_results,
    benchmark_covariance,
    emit_report,
    parse_report_csv,
    run_experiment,
    summarize_bias_variance,
)
from .stats import (
    Dataset,
    EigenBasis,
    SymmetricMatrix,
    correlation_matrix,
    covariance_matrix,
    eigh,
    normal_quantile,
    rotate,
    standardize,
)
from .svgplot import emit_boxes_svg, project_report, render_boxes_svg

__all__ = [
    "ALL_METHODS",
    "BetamodeError",
    "Box",
    "BoxRecord",
    "BoxTrajectory",
    "CannotPeelError",
    "ComponentSelection",
    "CoveringReport",
    "Dataset",
    "DegenerateColumnError",
    "DegenerateDataError",
    "DomainError",
    "EigenBasis",
    "InsufficientPointsError",
    "InvalidInputError",
    "MethodRunResult",
    "MethodSummary",
    "NumericalError",
    "OptimalityCheckReport",
    "PeelStep",
    "QuantileBoxSpec",
    "SimConfig",
    "SubsetScanResult",
    "SymmetricMatrix",
    "active_information",
    "analytic_box_volume",
    "audit_results",
    "benchmark_covariance",
    "beta_schedule",
    "bounding_box",
    "central_quantile_box",
    "contains",
    "correlation_matrix",
    "covariance_matrix",
    "eigh",
    "emit_boxes_svg",
    "emit_report",
    "empirical_mass",
    "empirical_quantile",
    "fastprim_box",
    "fastprim_cover",
    "normal_quantile",
    "parse_report_csv",
    "peel",
    "pettiest_optimality_check",
    "prim_cover",
    "prim_peel_to_beta",
    "project_report",
    "render_boxes_svg",
    "rotate",
    "run_experiment",
    "sample_mvn",
    "select_components",
    "standardize",
    "subset_volume_scan",
    "summarize_bias_variance",
    "volume",
]
