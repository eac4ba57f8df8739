"""NURBS curves, tensor-product surfaces and trimmed surfaces.

Control points carry their own weight.  Curves may be 3D or 2D-valued
(2D curves are used for trim boundaries in parameter space).  A trimmed
surface is the composition of a base surface with a trim map: a NURBS
surface whose "points" are (xi, eta) coordinates inside the unit square.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .basis import (
    BasisSpec,
    KnotVector,
    _check_param,
    bspline_basis,
    bspline_basis_second,
    greville_abscissae,
)
from .errors import DomainError, GeometryError, ShapeError

__all__ = [
    "ControlPoint",
    "NurbsCurve",
    "NurbsSurface",
    "TrimMap",
    "TrimmedSurface",
    "ruled_trim_map",
]

#: slack allowed when a trim map image leaves the unit square
TRIM_IMAGE_TOL = 1e-9


@dataclass(frozen=True)
class ControlPoint:
    """A weighted control point; ``w`` defaults to 1 (polynomial)."""

    x: float
    y: float
    z: float = 0.0
    w: float = 1.0

    def __post_init__(self):
        vals = (self.x, self.y, self.z, self.w)
        if not all(np.isfinite(v) for v in vals):
            raise ShapeError(f"control point has non-finite entries: {vals}")
        if self.w <= 0.0:
            raise ShapeError(f"control point weight must be positive, got {self.w}")

    def xyz(self):
        return np.array([self.x, self.y, self.z])


def _as_point_array(points, dim=None):
    arr = np.ascontiguousarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise ShapeError(f"expected an (n, 2) or (n, 3) point array, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise ShapeError(f"expected {dim}D points, got {arr.shape[1]}D")
    if not np.all(np.isfinite(arr)):
        raise ShapeError("point array contains non-finite values")
    return arr


class NurbsCurve:
    """A rational B-spline curve; weights live in its :class:`BasisSpec`."""

    def __init__(self, basis, control_points):
        if not isinstance(basis, BasisSpec):
            raise ShapeError("basis must be a BasisSpec")
        cps = _as_point_array(control_points)
        if cps.shape[0] != basis.num_basis:
            raise ShapeError(
                f"basis carries {basis.num_basis} functions but got {cps.shape[0]} control points"
            )
        cps.flags.writeable = False
        self.basis = basis
        self.control_points = cps
        self._weights = np.ascontiguousarray(basis.weights_or_ones())

    @classmethod
    def from_control_points(cls, knots, degree, points):
        """Build a 3D curve from :class:`ControlPoint` instances."""
        pts = [p if isinstance(p, ControlPoint) else ControlPoint(*p) for p in points]
        spec = BasisSpec(knots, degree, np.array([p.w for p in pts]))
        return cls(spec, np.array([[p.x, p.y, p.z] for p in pts]))

    @property
    def dim(self):
        return self.control_points.shape[1]

    @property
    def degree(self):
        return self.basis.degree

    def points(self, xs):
        xs = np.ascontiguousarray(xs, dtype=np.float64)
        if xs.size and (xs.min() < 0.0 or xs.max() > 1.0):
            raise DomainError("curve parameters outside [0, 1]")
        pts, _ = _kernels.curve_eval_many(
            self.basis.knots.values, self.degree, self._weights, self.control_points, xs
        )
        return pts

    def point(self, xi):
        return self.points(np.array([_check_param(xi)]))[0]

    def tangent(self, xi):
        """First derivative with respect to the [0, 1] parameter."""
        xi = _check_param(xi)
        _, tans = _kernels.curve_eval_many(
            self.basis.knots.values,
            self.degree,
            self._weights,
            self.control_points,
            np.array([xi]),
        )
        return tans[0]


class NurbsSurface:
    """A rational tensor-product surface with one weight per control point.

    ``points`` has shape ``(n_xi, n_eta, d)`` with the row index running
    along xi; ``weights`` has shape ``(n_xi, n_eta)``.  ``d`` is normally 3;
    2D-valued surfaces back trim maps.
    """

    def __init__(self, knots_xi, degree_xi, knots_eta, degree_eta, points, weights=None):
        self.basis_xi = BasisSpec(knots_xi, degree_xi)
        self.basis_eta = BasisSpec(knots_eta, degree_eta)
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim != 3 or pts.shape[2] not in (2, 3):
            raise ShapeError(f"expected an (n_xi, n_eta, 2|3) control net, got shape {pts.shape}")
        expected = (self.basis_xi.num_basis, self.basis_eta.num_basis)
        if pts.shape[:2] != expected:
            raise ShapeError(f"control net shape {pts.shape[:2]} does not match bases {expected}")
        if not np.all(np.isfinite(pts)):
            raise ShapeError("control net contains non-finite values")
        if weights is None:
            weights = np.ones(expected)
        w = np.ascontiguousarray(weights, dtype=np.float64)
        if w.shape != expected:
            raise ShapeError(f"weight net shape {w.shape} does not match control net {expected}")
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise ShapeError("weights must be finite and strictly positive")
        pts.flags.writeable = False
        w.flags.writeable = False
        self.points = pts
        self.weights = w

    @classmethod
    def from_control_points(cls, knots_xi, degree_xi, knots_eta, degree_eta, net):
        """Build a surface from a nested grid of :class:`ControlPoint`."""
        rows = [[p if isinstance(p, ControlPoint) else ControlPoint(*p) for p in row] for row in net]
        pts = np.array([[[p.x, p.y, p.z] for p in row] for row in rows])
        w = np.array([[p.w for p in row] for row in rows])
        return cls(knots_xi, degree_xi, knots_eta, degree_eta, pts, w)

    @property
    def dim(self):
        return self.points.shape[2]

    @property
    def degree_xi(self):
        return self.basis_xi.degree

    @property
    def degree_eta(self):
        return self.basis_eta.degree

    def _eval_args(self):
        return (
            self.basis_xi.knots.values,
            self.degree_xi,
            self.basis_eta.knots.values,
            self.degree_eta,
            self.weights,
            self.points,
        )

    def point(self, xi, eta):
        xi = _check_param(xi, "xi")
        eta = _check_param(eta, "eta")
        return _kernels.surface_points_many(
            *self._eval_args(), np.array([xi]), np.array([eta])
        )[0]

    def point_and_tangents(self, xi, eta):
        """Point plus the two first-derivative vectors (xi- then eta-direction)."""
        xi = _check_param(xi, "xi")
        eta = _check_param(eta, "eta")
        pts, tx, te = _kernels.surface_eval_many(
            *self._eval_args(), np.array([xi]), np.array([eta])
        )
        return pts[0], tx[0], te[0]

    def tangents(self, xi, eta):
        _, tx, te = self.point_and_tangents(xi, eta)
        return tx, te

    def point_and_second_derivatives(self, xi, eta):
        """Point plus first and second parameter derivatives at ``(xi, eta)``.

        Returns ``(point, d_xi, d_eta, d_xixi, d_xieta, d_etaeta)``.  The
        rational derivatives follow from the quotient rule applied to the
        weighted numerator and the scalar weight field.
        """
        xi = _check_param(xi, "xi")
        eta = _check_param(eta, "eta")
        bx = bspline_basis(self.basis_xi.knots, self.degree_xi, xi)
        be = bspline_basis(self.basis_eta.knots, self.degree_eta, eta)
        rows_x = (bx.values, bx.derivs, bspline_basis_second(self.basis_xi.knots, self.degree_xi, xi))
        rows_e = (be.values, be.derivs, bspline_basis_second(self.basis_eta.knots, self.degree_eta, eta))
        win_x = slice(bx.first_index, bx.first_index + self.degree_xi + 1)
        win_e = slice(be.first_index, be.first_index + self.degree_eta + 1)
        w = self.weights[win_x, win_e]
        pw = self.points[win_x, win_e] * w[:, :, None]

        def wsum(i, j):
            return float(rows_x[i] @ w @ rows_e[j])

        def psum(i, j):
            return np.einsum("i,ijd,j->d", rows_x[i], pw, rows_e[j])

        w00 = wsum(0, 0)
        s = psum(0, 0) / w00
        s_x = (psum(1, 0) - s * wsum(1, 0)) / w00
        s_e = (psum(0, 1) - s * wsum(0, 1)) / w00
        s_xx = (psum(2, 0) - 2.0 * s_x * wsum(1, 0) - s * wsum(2, 0)) / w00
        s_ee = (psum(0, 2) - 2.0 * s_e * wsum(0, 1) - s * wsum(0, 2)) / w00
        s_xe = (psum(1, 1) - s_x * wsum(0, 1) - s_e * wsum(1, 0) - s * wsum(1, 1)) / w00
        return s, s_x, s_e, s_xx, s_xe, s_ee

    def points_at(self, xs, es):
        """Points at paired parameter lists (same length)."""
        xs = np.ascontiguousarray(xs, dtype=np.float64)
        es = np.ascontiguousarray(es, dtype=np.float64)
        if xs.shape != es.shape or xs.ndim != 1:
            raise ShapeError("points_at expects two equally long 1D parameter arrays")
        for arr, name in ((xs, "xi"), (es, "eta")):
            if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
                raise DomainError(f"{name} parameters outside [0, 1]")
        return _kernels.surface_points_many(*self._eval_args(), xs, es)

    def grid_points(self, xs, es):
        """Points on the tensor grid ``xs`` x ``es``; shape (len(xs), len(es), d)."""
        xs = np.ascontiguousarray(xs, dtype=np.float64)
        es = np.ascontiguousarray(es, dtype=np.float64)
        for arr, name in ((xs, "xi"), (es, "eta")):
            if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
                raise DomainError(f"{name} parameters outside [0, 1]")
        return _kernels.surface_points_grid(*self._eval_args(), xs, es)

    def bounding_box(self):
        """Axis-aligned box of the control net (contains the surface)."""
        flat = self.points.reshape(-1, self.dim)
        return flat.min(axis=0), flat.max(axis=0)


class TrimMap:
    """A NURBS map from the unit square into the unit parameter square.

    The underlying surface is 2D-valued; its image is validated on a dense
    sample grid at construction and must stay inside [0, 1]^2 within
    ``TRIM_IMAGE_TOL``.  Evaluation clamps round-off excursions of that
    size and rejects anything larger.
    """

    def __init__(self, surface, validation_grid=33):
        if not isinstance(surface, NurbsSurface) or surface.dim != 2:
            raise ShapeError("a trim map needs a 2D-valued NurbsSurface")
        self.surface = surface
        n = max(int(validation_grid), 2)
        sample = np.linspace(0.0, 1.0, n)
        img = surface.grid_points(sample, sample)
        worst = max(0.0 - img.min(), img.max() - 1.0)
        if worst > TRIM_IMAGE_TOL:
            raise GeometryError(
                f"trim map image leaves the unit square by {worst:.3e} "
                f"(allowed {TRIM_IMAGE_TOL:.1e})"
            )

    @staticmethod
    def _clamp(uv):
        worst = max(0.0 - uv.min(), uv.max() - 1.0)
        if worst > TRIM_IMAGE_TOL:
            raise GeometryError(
                f"trim map evaluated {worst:.3e} outside the unit square "
                f"(allowed {TRIM_IMAGE_TOL:.1e})"
            )
        return np.clip(uv, 0.0, 1.0)

    def eval(self, xi, eta):
        """Mapped (xi, eta), clamped into the unit square."""
        return self._clamp(self.surface.point(xi, eta))

    def grid(self, xs, es):
        return self._clamp(self.surface.grid_points(xs, es))


class TrimmedSurface:
    """Composition of a base surface with a trim map."""

    def __init__(self, base, trim):
        if not isinstance(base, NurbsSurface) or base.dim != 3:
            raise ShapeError("trimmed surfaces need a 3D base surface")
        if not isinstance(trim, TrimMap):
            raise ShapeError("trim must be a TrimMap")
        self.base = base
        self.trim = trim

    def point(self, xi, eta):
        uv = self.trim.eval(xi, eta)
        return self.base.point(uv[0], uv[1])

    def grid_points(self, xs, es):
        uv = self.trim.grid(xs, es)
        flat = uv.reshape(-1, 2)
        pts = self.base.points_at(flat[:, 0], flat[:, 1])
        return pts.reshape(uv.shape[0], uv.shape[1], 3)


def ruled_trim_map(boundary, base_start=(0.0, 0.0), base_end=(1.0, 0.0), boundary_side="high"):
    """Trim map ruled between a straight parameter segment and a 2D curve.

    The segment from ``base_start`` to ``base_end`` becomes one eta-edge of
    the map and ``boundary`` the other (``boundary_side`` says which one is
    at eta=1).  The segment is reproduced exactly by placing its control
    points at the Greville abscissae of the boundary basis, which requires
    the boundary curve to carry unit weights.
    """
    if not isinstance(boundary, NurbsCurve) or boundary.dim != 2:
        raise ShapeError("ruled_trim_map needs a 2D-valued boundary curve")
    w = boundary.basis.weights_or_ones()
    if not np.all(w == 1.0):
        raise ShapeError("ruled_trim_map supports unit-weight boundary curves only")
    start = np.asarray(base_start, dtype=np.float64)
    end = np.asarray(base_end, dtype=np.float64)
    g = greville_abscissae(boundary.basis.knots, boundary.degree)
    base_pts = start[None, :] + g[:, None] * (end - start)[None, :]
    if boundary_side == "high":
        net = np.stack([base_pts, boundary.control_points], axis=1)
    elif boundary_side == "low":
        net = np.stack([boundary.control_points, base_pts], axis=1)
    else:
        raise ShapeError(f"boundary_side must be 'low' or 'high', got {boundary_side!r}")
    surface = NurbsSurface(
        boundary.basis.knots,
        boundary.degree,
        KnotVector([0.0, 0.0, 1.0, 1.0]),
        1,
        net,
    )
    return TrimMap(surface)
