"""Least-squares / interpolating fits of curves and surfaces.

A fit solves for control-point coordinates only: weights and knot vectors
are inputs.  The documented system matrix is the interleaved block form
(one row per sample coordinate, one column per control-point coordinate,
basis values on the coordinate diagonals); the solver works on the
mathematically identical compact matrix with one row per sample and one
column per control point, shared by all coordinates.

Square systems are solved directly (LU with partial pivoting), rectangular
ones by QR least squares.  A system is rejected as rank deficient when a
diagonal of R falls below 1e-12 times the largest one.
"""

from dataclasses import dataclass

import numpy as np

from .basis import BasisSpec, KnotVector, nurbs_basis_1d, nurbs_basis_2d
from .errors import (
    DegenerateParameterizationError,
    DomainError,
    ShapeError,
    SingularSystemError,
)
from .geometry import NurbsCurve, NurbsSurface

__all__ = [
    "CurveFitProblem",
    "SurfaceFitProblem",
    "FitResult",
    "parameterize_chord_length",
    "collocation_matrix",
    "assemble_collocation_matrix",
    "solve_fit",
    "fit_curve_through_points",
    "fit_surface_grid",
    "fit_trim_curve",
]

RANK_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CurveFitProblem:
    """Samples ``targets[k]`` taken at curve parameters ``params[k]``."""

    basis: BasisSpec
    params: np.ndarray
    targets: np.ndarray

    def __init__(self, basis, params, targets):
        params = np.ascontiguousarray(params, dtype=np.float64)
        targets = np.ascontiguousarray(targets, dtype=np.float64)
        if params.ndim != 1:
            raise ShapeError("curve fit parameters must be a 1D array")
        if targets.ndim != 2 or targets.shape[0] != params.shape[0]:
            raise ShapeError("one target point per parameter required")
        if targets.shape[1] not in (2, 3):
            raise ShapeError("targets must be 2D or 3D points")
        if params.size and (params.min() < 0.0 or params.max() > 1.0):
            raise DomainError("fit parameters outside [0, 1]")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "targets", targets)

    @property
    def num_unknowns(self):
        return self.basis.num_basis


@dataclass(frozen=True, eq=False)
class SurfaceFitProblem:
    """Samples at (xi, eta) pairs for a tensor-product surface basis.

    Unknown control points are ordered row-major: index ``i * n_eta + j``.
    """

    basis_xi: BasisSpec
    basis_eta: BasisSpec
    weight_net: np.ndarray
    params: np.ndarray
    targets: np.ndarray

    def __init__(self, basis_xi, basis_eta, weight_net, params, targets):
        params = np.ascontiguousarray(params, dtype=np.float64)
        targets = np.ascontiguousarray(targets, dtype=np.float64)
        weight_net = np.ascontiguousarray(weight_net, dtype=np.float64)
        if params.ndim != 2 or params.shape[1] != 2:
            raise ShapeError("surface fit parameters must be (m, 2)")
        if targets.ndim != 2 or targets.shape[0] != params.shape[0]:
            raise ShapeError("one target point per parameter pair required")
        if targets.shape[1] not in (2, 3):
            raise ShapeError("targets must be 2D or 3D points")
        if params.size and (params.min() < 0.0 or params.max() > 1.0):
            raise DomainError("fit parameters outside [0, 1]")
        if weight_net.shape != (basis_xi.num_basis, basis_eta.num_basis):
            raise ShapeError(
                f"weight net shape {weight_net.shape} does not match bases "
                f"({basis_xi.num_basis}, {basis_eta.num_basis})"
            )
        object.__setattr__(self, "basis_xi", basis_xi)
        object.__setattr__(self, "basis_eta", basis_eta)
        object.__setattr__(self, "weight_net", weight_net)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "targets", targets)

    @property
    def num_unknowns(self):
        return self.basis_xi.num_basis * self.basis_eta.num_basis


@dataclass(frozen=True, eq=False)
class FitResult:
    """Fitted control points plus the Euclidean residual over all coordinates."""

    control_points: np.ndarray
    residual_norm: float
    exact: bool


def parameterize_chord_length(points):
    """Cumulative chord-length parameters in [0, 1] for a point sequence."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ShapeError("need at least two points to parameterize")
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    if np.any(seg == 0.0):
        k = int(np.flatnonzero(seg == 0.0)[0])
        raise DegenerateParameterizationError(
            f"coincident consecutive points at indices {k} and {k + 1}"
        )
    t = np.concatenate([[0.0], np.cumsum(seg)])
    t /= t[-1]
    t[-1] = 1.0
    return t


def collocation_matrix(problem):
    """Compact matrix: rational basis value per (sample, control point)."""
    if isinstance(problem, CurveFitProblem):
        m = problem.params.shape[0]
        n = problem.num_unknowns
        a = np.zeros((m, n))
        p1 = problem.basis.degree + 1
        for k, t in enumerate(problem.params):
            ev = nurbs_basis_1d(problem.basis, t)
            a[k, ev.first_index : ev.first_index + p1] = ev.values
        return a
    if isinstance(problem, SurfaceFitProblem):
        m = problem.params.shape[0]
        n_eta = problem.basis_eta.num_basis
        a = np.zeros((m, problem.num_unknowns))
        for k, (x, e) in enumerate(problem.params):
            ev = nurbs_basis_2d(problem.basis_xi, problem.basis_eta, problem.weight_net, x, e)
            for r in range(ev.values.shape[0]):
                i = ev.first_xi + r
                j0 = ev.first_eta
                a[k, i * n_eta + j0 : i * n_eta + j0 + ev.values.shape[1]] = ev.values[r]
        return a
    raise ShapeError(f"unknown fit problem type {type(problem).__name__}")


def assemble_collocation_matrix(problem):
    """Interleaved block form of the collocation matrix.

    Row ``s * d + c`` and column ``j * d + c`` carry the basis value of
    control point ``j`` at sample ``s`` for coordinate ``c``; off-diagonal
    coordinate couplings are zero.
    """
    compact = collocation_matrix(problem)
    d = problem.targets.shape[1]
    return np.kron(compact, np.eye(d))


def _check_duplicate_params(problem):
    if isinstance(problem, CurveFitProblem):
        order = np.argsort(problem.params, kind="stable")
        p = problem.params[order]
        dup = np.flatnonzero(np.diff(p) == 0.0)
        if dup.size:
            raise SingularSystemError(
                f"duplicate fit parameter {p[dup[0]]:.17g} makes the system singular"
            )
    else:
        p = problem.params[np.lexsort((problem.params[:, 1], problem.params[:, 0]))]
        same = np.all(np.diff(p, axis=0) == 0.0, axis=1)
        if np.any(same):
            k = int(np.flatnonzero(same)[0])
            raise SingularSystemError(
                f"duplicate fit parameter pair ({p[k, 0]:.17g}, {p[k, 1]:.17g}) "
                "makes the system singular"
            )


def solve_fit(problem):
    """Solve the fit; returns a :class:`FitResult`.

    Raises :class:`SingularSystemError` for underdetermined systems,
    duplicate parameters, singular square systems and rank-deficient
    least-squares systems.
    """
    if problem.params.shape[0] < problem.num_unknowns:
        raise SingularSystemError(
            f"underdetermined fit: {problem.params.shape[0]} samples for "
            f"{problem.num_unknowns} control points"
        )
    _check_duplicate_params(problem)
    a = collocation_matrix(problem)
    m, n = a.shape
    if m == n:
        try:
            coeffs = np.linalg.solve(a, problem.targets)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(f"square collocation matrix is singular: {exc}") from exc
        exact = True
    else:
        q, r = np.linalg.qr(a)
        diag = np.abs(np.diag(r))
        if diag.min() < RANK_TOL * diag.max():
            raise SingularSystemError(
                f"rank-deficient least-squares system: |R[{int(diag.argmin())},"
                f"{int(diag.argmin())}]| = {diag.min():.3e} below "
                f"{RANK_TOL:.0e} * {diag.max():.3e}"
            )
        coeffs = np.linalg.solve(r, q.T @ problem.targets)
        exact = False
    residual = float(np.linalg.norm(a @ coeffs - problem.targets))
    return FitResult(coeffs, residual, exact)


def _chord_params_or_given(points, params, parameterization):
    if params is not None:
        return np.ascontiguousarray(params, dtype=np.float64)
    if parameterization == "chord":
        return parameterize_chord_length(points)
    if parameterization == "uniform":
        return np.linspace(0.0, 1.0, len(points))
    raise ShapeError(f"unknown parameterization {parameterization!r}")


def fit_curve_through_points(
    points,
    degree,
    weights=None,
    num_control=None,
    params=None,
    parameterization="chord",
):
    """Fit a curve through (or near) a point sequence.

    With ``num_control`` omitted the fit interpolates (one control point
    per sample); fewer control points give a least-squares approximation.
    Returns ``(curve, fit_result)``.
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] not in (2, 3):
        raise ShapeError("points must be an (m, 2|3) array")
    t = _chord_params_or_given(pts, params, parameterization)
    if t.shape[0] != pts.shape[0]:
        raise ShapeError("one parameter per point required")
    n = pts.shape[0] if num_control is None else int(num_control)
    knots = KnotVector.uniform_clamped(n, degree)
    basis = BasisSpec(knots, degree, weights)
    problem = CurveFitProblem(basis, t, pts)
    result = solve_fit(problem)
    return NurbsCurve(basis, result.control_points), result


def fit_surface_grid(
    grid_points,
    degree_xi,
    degree_eta,
    weight_net=None,
    num_control=None,
    params=None,
):
    """Fit a surface through a structured grid of sample points.

    ``grid_points`` has shape ``(m_xi, m_eta, 3)``.  Parameters default to
    chord-length averages across the grid rows/columns; ``num_control``
    (pair) below the sample counts gives a least-squares fit.  Returns
    ``(surface, fit_result)``.
    """
    pts = np.ascontiguousarray(grid_points, dtype=np.float64)
    if pts.ndim != 3 or pts.shape[2] != 3:
        raise ShapeError("grid_points must be (m_xi, m_eta, 3)")
    m_xi, m_eta = pts.shape[:2]
    if params is None:
        t_xi = np.mean(
            [parameterize_chord_length(pts[:, j, :]) for j in range(m_eta)], axis=0
        )
        t_eta = np.mean(
            [parameterize_chord_length(pts[i, :, :]) for i in range(m_xi)], axis=0
        )
    else:
        t_xi, t_eta = (np.ascontiguousarray(p, dtype=np.float64) for p in params)
    if num_control is None:
        n_xi, n_eta = m_xi, m_eta
    else:
        n_xi, n_eta = (int(v) for v in num_control)
    basis_xi = BasisSpec(KnotVector.uniform_clamped(n_xi, degree_xi), degree_xi)
    basis_eta = BasisSpec(KnotVector.uniform_clamped(n_eta, degree_eta), degree_eta)
    if weight_net is None:
        weight_net = np.ones((n_xi, n_eta))
    pxi, peta = np.meshgrid(t_xi, t_eta, indexing="ij")
    flat_params = np.stack([pxi.ravel(), peta.ravel()], axis=1)
    problem = SurfaceFitProblem(
        basis_xi, basis_eta, weight_net, flat_params, pts.reshape(-1, 3)
    )
    result = solve_fit(problem)
    surface = NurbsSurface(
        basis_xi.knots,
        degree_xi,
        basis_eta.knots,
        degree_eta,
        result.control_points.reshape(n_xi, n_eta, 3),
        weight_net,
    )
    return surface, result


def fit_trim_curve(parameter_points, degree=2):
    """Interpolating 2D curve through parameter-space points.

    Unit weights, uniform clamped knots sized to the point count and
    chord-length parameters; used to build trim boundaries.
    """
    pts = np.ascontiguousarray(parameter_points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ShapeError("trim curve points must be (m, 2)")
    degree = int(degree)
    if degree < 1:
        raise ShapeError("trim curves need degree >= 1")
    if pts.shape[0] < degree + 1:
        raise ShapeError(
            f"need at least {degree + 1} points for a degree-{degree} trim curve"
        )
    curve, result = fit_curve_through_points(pts, degree)
    return curve, result
