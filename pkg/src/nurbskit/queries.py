"""Point-to-surface projection and line-surface intersection.

Closest-point projection runs Newton steps on the squared distance from a
seed found on a coarse sample grid.  With gap = x_P - x_S the 2x2 system is

    [v1.v1 - gap.S_xx   v1.v2 - gap.S_xe] [d_xi ]   [v1 . gap]
    [v1.v2 - gap.S_xe   v2.v2 - gap.S_ee] [d_eta] = [v2 . gap]

falling back to the Gauss-Newton system (the same without the curvature
terms) when the Hessian is not positive definite, and to the decoupled
steps d_xi = v1.gap/|v1|^2, d_eta = v2.gap/|v2|^2 when the tangents are
numerically collinear.  A coordinate sitting at 0 or 1 whose descent
direction points outside the domain is frozen and the step is solved on
the free coordinate alone.

Step magnitudes are capped by a trust radius that starts at 1; steps that
would increase the distance are rejected and shrink the radius by
``damp``, while accepted steps restore it by the same factor (capped at
1), so the accepted distance history is non-increasing.  Parameters are
clamped to [0, 1], so boundary minima are found as well.  Iteration stops
when an accepted step changes the distance by less than ``tolerance``.

A line is intersected with a surface by alternating closest-point
projection of the current line point and the line-parameter update towards
the projected foot point; convergence requires both a tiny parameter step
and a line-to-surface residual below ten times the step tolerance.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, ShapeError, SingularSurfaceError
from .geometry import NurbsCurve, NurbsSurface

__all__ = [
    "ProjectionConfig",
    "ClosestPointResult",
    "LineIntersectConfig",
    "LineIntersectResult",
    "seed_projection",
    "closest_point",
    "line_surface_intersection",
]

_TANGENT_EPS = 1e-14


@dataclass(frozen=True)
class ProjectionConfig:
    max_iterations: int = 100
    damp: float = 0.6
    tolerance: float = 1e-10
    seed_grid: int = 8

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ShapeError("max_iterations must be at least 1")
        if not 0.0 < self.damp < 1.0:
            raise ShapeError("damp must lie strictly between 0 and 1")
        if self.tolerance <= 0.0:
            raise ShapeError("tolerance must be positive")
        if self.seed_grid < 2:
            raise ShapeError("seed_grid must be at least 2")


@dataclass(frozen=True, eq=False)
class ClosestPointResult:
    xi: float
    eta: float
    point: np.ndarray
    distance: float
    iterations: int
    converged: bool
    history: tuple


@dataclass(frozen=True)
class LineIntersectConfig:
    max_iterations: int = 50
    tolerance: float = 1e-9

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ShapeError("max_iterations must be at least 1")
        if self.tolerance <= 0.0:
            raise ShapeError("tolerance must be positive")


@dataclass(frozen=True, eq=False)
class LineIntersectResult:
    point: np.ndarray
    xi_line: float
    xi: float
    eta: float
    residual: float
    iterations: int
    converged: bool


def _as_target(target):
    t = np.asarray(target, dtype=np.float64).reshape(-1)
    if t.shape[0] != 3 or not np.all(np.isfinite(t)):
        raise ShapeError("target must be a finite 3D point")
    return t


def seed_projection(surface, target, grid=8):
    """Best (xi, eta) on a uniform ``grid x grid`` sample.

    Exact distance ties resolve to the lexicographically smallest pair.
    """
    target = _as_target(target)
    grid = int(grid)
    if grid < 2:
        raise ShapeError("seed grid must be at least 2")
    ts = np.linspace(0.0, 1.0, grid)
    pts = surface.grid_points(ts, ts)
    d2 = ((pts - target) ** 2).sum(axis=2)
    k = int(d2.argmin())
    return float(ts[k // grid]), float(ts[k % grid])


def closest_point(surface, target, config=None, seed=None):
    """Project ``target`` onto ``surface``; see the module docstring."""
    if not isinstance(surface, NurbsSurface) or surface.dim != 3:
        raise ShapeError("closest_point needs a 3D NurbsSurface")
    cfg = config or ProjectionConfig()
    target = _as_target(target)
    if seed is None:
        xi, eta = seed_projection(surface, target, cfg.seed_grid)
    else:
        xi, eta = float(seed[0]), float(seed[1])
    point = surface.point(xi, eta)
    dist = float(np.linalg.norm(target - point))
    history = [dist]
    trust = 1.0
    converged = False
    iterations = 0
    for it in range(1, cfg.max_iterations + 1):
        iterations = it
        _, v1, v2, s_xx, s_xe, s_ee = surface.point_and_second_derivatives(xi, eta)
        l1 = np.linalg.norm(v1)
        l2 = np.linalg.norm(v2)
        if l1 < _TANGENT_EPS or l2 < _TANGENT_EPS:
            raise SingularSurfaceError(
                f"degenerate surface tangent at (xi={xi:.6g}, eta={eta:.6g})"
            )
        gap = target - point
        g1 = float(np.dot(v1, gap))
        g2 = float(np.dot(v2, gap))
        a = l1 * l1
        b = float(np.dot(v1, v2))
        c = l2 * l2
        # Hessian of the squared distance: tangent Gram matrix minus the
        # curvature term projected onto the gap
        h11 = a - float(np.dot(gap, s_xx))
        h12 = b - float(np.dot(gap, s_xe))
        h22 = c - float(np.dot(gap, s_ee))
        # coordinates pinned at a bound with the descent direction pointing
        # outside are frozen, so the step is solved on the free ones only
        pinned_xi = (xi == 0.0 and g1 < 0.0) or (xi == 1.0 and g1 > 0.0)
        pinned_eta = (eta == 0.0 and g2 < 0.0) or (eta == 1.0 and g2 > 0.0)
        if pinned_xi and pinned_eta:
            converged = True
            break
        if pinned_xi:
            d_xi, d_eta = 0.0, g2 / (h22 if h22 > 0.0 else c)
        elif pinned_eta:
            d_xi, d_eta = g1 / (h11 if h11 > 0.0 else a), 0.0
        else:
            det_h = h11 * h22 - h12 * h12
            if h11 > 0.0 and det_h > 0.0:
                d_xi = (h22 * g1 - h12 * g2) / det_h
                d_eta = (h11 * g2 - h12 * g1) / det_h
            else:
                # indefinite Hessian: Gauss-Newton still gives a descent step
                det = a * c - b * b
                if det > 1e-12 * a * c:
                    d_xi = (c * g1 - b * g2) / det
                    d_eta = (a * g2 - b * g1) / det
                else:
                    # tangents numerically collinear: decoupled steps
                    d_xi = g1 / a
                    d_eta = g2 / c
        largest = max(abs(d_xi), abs(d_eta))
        if largest > trust:
            # scale rather than clip per component: clipping both components
            # to +-trust would replace the step direction with a diagonal
            scale = trust / largest
            d_xi *= scale
            d_eta *= scale
        xi_new = min(max(xi + d_xi, 0.0), 1.0)
        eta_new = min(max(eta + d_eta, 0.0), 1.0)
        point_new = surface.point(xi_new, eta_new)
        dist_new = float(np.linalg.norm(target - point_new))
        if dist_new <= dist:
            delta = dist - dist_new
            xi, eta, point, dist = xi_new, eta_new, point_new, dist_new
            history.append(dist)
            if delta < cfg.tolerance:
                converged = True
                break
            trust = min(1.0, trust / cfg.damp)
        else:
            trust *= cfg.damp
    return ClosestPointResult(xi, eta, point, dist, iterations, converged, tuple(history))


def _line_data(line):
    if not isinstance(line, NurbsCurve) or line.dim != 3:
        raise GeometryError("line must be a 3D NurbsCurve")
    if line.degree != 1 or line.control_points.shape[0] != 2:
        raise GeometryError(
            "line-surface intersection supports straight degree-1 lines "
            "with exactly two control points"
        )
    a = line.point(0.0)
    b = line.point(1.0)
    v = b - a
    length = float(np.linalg.norm(v))
    if length < 1e-14:
        raise GeometryError("line has zero length")
    return a, v, length


def line_surface_intersection(line, surface, config=None, projection=None):
    """Intersect a straight line with a surface; see the module docstring."""
    cfg = config or LineIntersectConfig()
    proj_cfg = projection or ProjectionConfig()
    a, v, length = _line_data(line)
    t = 1.0
    step_ok = False
    iterations = 0
    for it in range(1, cfg.max_iterations + 1):
        iterations = it
        x_line = line.point(t)
        foot = closest_point(surface, x_line, proj_cfg)
        d_t = float(np.dot(foot.point - x_line, v) / (length * length))
        t = min(max(t + d_t, 0.0), 1.0)
        if abs(d_t) < cfg.tolerance:
            step_ok = True
            break
    final = closest_point(surface, line.point(t), proj_cfg)
    residual = final.distance
    converged = step_ok and residual <= 10.0 * cfg.tolerance
    return LineIntersectResult(
        final.point, t, final.xi, final.eta, residual, iterations, converged
    )
