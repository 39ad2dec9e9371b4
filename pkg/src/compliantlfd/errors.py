"""Exception types raised across the package."""


class CompliantLfDError(Exception):
    """Base class for all package errors."""


class TrajectoryError(CompliantLfDError, ValueError):
    """A trajectory violates its invariants (ordering, finiteness, spacing)."""


class NoMotionError(CompliantLfDError, ValueError):
    """Every averaging window of a trajectory was stationary."""


class DegenerateDirectionError(CompliantLfDError, ValueError):
    """A direction could not be estimated because the net displacement is ~0."""


class ProjectionDomainError(CompliantLfDError, ValueError):
    """A unit vector lies too close to the antipode of the projection pole."""


class DegenerateConstraintError(CompliantLfDError, ValueError):
    """Constraint points do not span a polygon with positive area."""


class ConflictingDemonstrationsError(CompliantLfDError):
    """The intersection of constraint polygons is empty.

    ``pair`` holds the indices of the first two input polygons found to be
    mutually disjoint (or the accumulated prefix and the polygon that emptied
    it, when no single disjoint pair exists).
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NoUsableConstraintsError(CompliantLfDError):
    """No motion sample produced a valid constraint polygon."""


class ConfigError(CompliantLfDError, ValueError):
    """An environment or run configuration is malformed."""
