"""Typed errors shared across the package.

Integrations treat ``SingularityError`` (and subclasses) raised from a
right-hand side as terminal events; everything else propagates as a bug.
"""


class CurvebodyError(Exception):
    """Base class for all curvebody errors."""


class DimensionError(CurvebodyError):
    """Vector or state dimensions do not match what an operation requires."""


class ValidationError(CurvebodyError):
    """A configuration or state violates its invariants."""


class InfeasibleConstraintError(ValidationError):
    """The size/fiber constraint has no real solution for the requested data."""


class SingularityError(CurvebodyError):
    """Dynamics undefined: collision, antipodal degeneracy, or blow-up."""


class CollisionError(SingularityError):
    """Two bodies occupy the same configuration angle."""
