"""Exception types raised by the geometry kernel."""


class NurbsError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(NurbsError, ValueError):
    """A parameter value lies outside the [0, 1] domain."""


class ShapeError(NurbsError, ValueError):
    """Array arguments have inconsistent shapes or counts."""


class GeometryError(NurbsError):
    """Invalid geometric data (trim image out of range, degenerate line, ...)."""


class SingularSurfaceError(GeometryError):
    """A surface tangent degenerates where a query needs it."""


class SingularSystemError(NurbsError):
    """A fitting system is singular or rank deficient."""


class DegenerateParameterizationError(NurbsError, ValueError):
    """Sample points cannot be parameterized (coincident consecutive points)."""


class InsufficientIntersectionError(NurbsError):
    """Too few intersection points converged to fit a trim curve."""


class UnsupportedTopologyError(NurbsError):
    """The intersection topology is outside what the decomposition handles."""


class DocumentParseError(NurbsError):
    """A geometry document could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DocumentValidationError(NurbsError):
    """A parsed geometry document violates an entity invariant."""

    def __init__(self, message, entity=None):
        self.entity = entity
        if entity is not None:
            message = f"entity '{entity}': {message}"
        super().__init__(message)
