"""Numerical laboratory for rotopulsating orbits of the n-body problem on
constant-curvature manifolds (unit sphere and unit hyperboloid).

The package evaluates the existence criterion for polygonal
configurations, integrates both the ambient equations of motion and the
reduced size/rotation/fiber system, and cross-validates them while
monitoring every conserved quantity the model carries.
"""

from .diagnostics import (
    ConservationSeries,
    CriterionReport,
    CrossValidationReport,
    conservation_series,
    criterion_report,
    cross_validate,
    default_rho_grid,
    is_regular_polygon,
    regular_gap_deviation,
)
from .dynamics import (
    CriterionTerms,
    criterion_terms,
    full_rhs,
    make_full_rhs,
    make_reduced_rhs,
    pack_full,
    pack_reduced,
    pair_inner,
    reduced_rhs,
    unpack_full,
    unpack_reduced,
)
from .errors import (
    CollisionError,
    CurvebodyError,
    DimensionError,
    InfeasibleConstraintError,
    SingularityError,
    ValidationError,
)
from .geometry import (
    HYPERBOLIC,
    SPHERICAL,
    on_manifold,
    rotate,
    rotation_generator_apply,
    sigma_dot,
    wedge_c12,
)
from .integrator import (
    IntegrationSettings,
    Termination,
    Trajectory,
    integrate_adaptive,
    integrate_fixed_rk4,
)
from .model import (
    FullState,
    PolygonConfig,
    ReducedState,
    embed,
    regular_polygon,
    synthesize_initial,
)

__version__ = "0.1.0"

__all__ = [
    "SPHERICAL",
    "HYPERBOLIC",
    "sigma_dot",
    "on_manifold",
    "rotate",
    "rotation_generator_apply",
    "wedge_c12",
    "PolygonConfig",
    "ReducedState",
    "FullState",
    "regular_polygon",
    "synthesize_initial",
    "embed",
    "CriterionTerms",
    "pair_inner",
    "criterion_terms",
    "full_rhs",
    "reduced_rhs",
    "pack_reduced",
    "unpack_reduced",
    "make_reduced_rhs",
    "pack_full",
    "unpack_full",
    "make_full_rhs",
    "IntegrationSettings",
    "Trajectory",
    "Termination",
    "integrate_fixed_rk4",
    "integrate_adaptive",
    "CriterionReport",
    "ConservationSeries",
    "CrossValidationReport",
    "criterion_report",
    "conservation_series",
    "cross_validate",
    "default_rho_grid",
    "is_regular_polygon",
    "regular_gap_deviation",
    "CurvebodyError",
    "DimensionError",
    "ValidationError",
    "InfeasibleConstraintError",
    "SingularityError",
    "CollisionError",
]
