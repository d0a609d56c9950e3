"""Exception types raised across the library."""


class PathsetError(Exception):
    """Base class for all library errors."""


class OverlappingObstacles(PathsetError):
    """Two obstacles share interior area where disjointness is required."""


class DegeneratePath(PathsetError):
    """A polyline of zero total length cannot be parameterized."""


class NoPathFound(PathsetError):
    """The planner exhausted its sample budget without reaching the goal."""


class InvalidEndpoint(PathsetError):
    """A start or goal position is not in free space."""


class PassageTooNarrow(PathsetError):
    """A passage cannot host the requested clearance on both sides."""


class InfeasiblePassage(PathsetError):
    """Path-set deformation failed to fit all paths through a passage."""


class MissingIntersection(PathsetError):
    """A path does not cross the reference line within the search window."""


class PlacementFailure(PathsetError):
    """Random obstacle placement exceeded the rejection budget."""


class ParseError(PathsetError):
    """A serialized document is malformed; the message names the field."""
