"""nurbskit: a small NURBS geometry kernel.

Evaluation of rational B-spline curves and tensor-product surfaces,
least-squares/interpolating fits, closest-point and line-intersection
queries, surface-surface intersection with trimmed-patch decomposition,
a plain-text geometry document format, and OBJ tessellation.

Hot evaluation loops are numba-compiled when numba is importable; set
``NURBSKIT_NO_NUMBA=1`` to force the pure-numpy fallback.  ``BACKEND``
names the active implementation.
"""

from ._accel import BACKEND
from .basis import (
    BasisSpec,
    KnotVector,
    bspline_basis,
    bspline_basis_second,
    find_span,
    greville_abscissae,
    nurbs_basis_1d,
    nurbs_basis_2d,
)
from .document import GeometryDocument, dumps, load, loads, save
from .errors import (
    DegenerateParameterizationError,
    DocumentParseError,
    DocumentValidationError,
    DomainError,
    GeometryError,
    InsufficientIntersectionError,
    NurbsError,
    ShapeError,
    SingularSurfaceError,
    SingularSystemError,
    UnsupportedTopologyError,
)
from .fitting import (
    FitResult,
    fit_curve_through_points,
    fit_surface_grid,
    fit_trim_curve,
    parameterize_chord_length,
)
from .geometry import (
    ControlPoint,
    NurbsCurve,
    NurbsSurface,
    TrimMap,
    TrimmedSurface,
    ruled_trim_map,
)
from .intersect import (
    Decomposition,
    IntersectConfig,
    surface_surface_intersection,
)
from .mesh import TriangleMesh, save_obj, tessellate
from .queries import (
    ClosestPointResult,
    LineIntersectConfig,
    LineIntersectResult,
    ProjectionConfig,
    closest_point,
    line_surface_intersection,
)
from .shapes import bilinear_patch, circular_cylinder, quarter_cylinder_shell

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BasisSpec",
    "KnotVector",
    "bspline_basis",
    "bspline_basis_second",
    "find_span",
    "greville_abscissae",
    "nurbs_basis_1d",
    "nurbs_basis_2d",
    "GeometryDocument",
    "load",
    "loads",
    "save",
    "dumps",
    "NurbsError",
    "DomainError",
    "ShapeError",
    "GeometryError",
    "SingularSurfaceError",
    "SingularSystemError",
    "DegenerateParameterizationError",
    "InsufficientIntersectionError",
    "UnsupportedTopologyError",
    "DocumentParseError",
    "DocumentValidationError",
    "FitResult",
    "fit_curve_through_points",
    "fit_surface_grid",
    "fit_trim_curve",
    "parameterize_chord_length",
    "ControlPoint",
    "NurbsCurve",
    "NurbsSurface",
    "TrimMap",
    "TrimmedSurface",
    "ruled_trim_map",
    "Decomposition",
    "IntersectConfig",
    "surface_surface_intersection",
    "TriangleMesh",
    "tessellate",
    "save_obj",
    "ClosestPointResult",
    "ProjectionConfig",
    "closest_point",
    "LineIntersectConfig",
    "LineIntersectResult",
    "line_surface_intersection",
    "bilinear_patch",
    "circular_cylinder",
    "quarter_cylinder_shell",
    "__version__",
]
