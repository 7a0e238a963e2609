"""Exception hierarchy shared by all modules."""


class SpacelikeError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SpacelikeError):
    """A point or node lies outside the domain where a surface is defined."""


class StencilError(SpacelikeError):
    """A finite-difference stencil was requested at a non-interior node."""


class NotSpacelike(SpacelikeError):
    """A gradient reached (or came within delta_space of) the light cone |Du| = 1."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class TangencyError(SpacelikeError):
    """A direction is not tangent to the graph."""


class DegenerateDirection(SpacelikeError):
    """A zero tangent direction was supplied."""


class NoLevelCurve(SpacelikeError):
    """The gradient vanishes, so no level curve passes through the point."""


class InadmissibleBoundary(SpacelikeError):
    """Boundary data has no spacelike affine interpolant and no usable initial guess."""


class LineSearchStalled(SpacelikeError):
    """Every damping factor down to 2**-20 was rejected."""

    def __init__(self, message, field=None, report=None):
        super().__init__(message)
        self.field = field
        self.report = report


class NotASolution(SpacelikeError):
    """A solution-conditional check was run on a field with a non-small residual."""


class TheoremViolation(SpacelikeError):
    """A theorem's hypothesis held numerically but its conclusion did not."""
