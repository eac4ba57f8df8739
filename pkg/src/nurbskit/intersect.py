"""Surface-surface intersection by line sampling and trimmed decomposition.

The intersecting surface (surface 1) is sampled with straight lines along
its eta-direction iso-curves; each line is intersected with the intersected
surface (surface 2).  The converged points are fitted with trim curves:

* surface 1 keeps everything on one eta-side of the intersection, as a
  single trimmed patch;
* surface 2 is split into four quadrant subsurfaces at the center of the
  intersection loop's parameter bounding box, and each quadrant keeps the
  region outside the loop.

The result is a decomposition into five analysis-ready trimmed patches
plus the intersection point data and per-line diagnostics.  The method
assumes the intersection traces a single closed loop in surface 2's
parameter square, which requires surface 1 to be closed in xi.
"""

from dataclasses import dataclass

import numpy as np

from .basis import BasisSpec, KnotVector, greville_abscissae
from .errors import (
    GeometryError,
    InsufficientIntersectionError,
    ShapeError,
    UnsupportedTopologyError,
)
from .fitting import fit_trim_curve
from .geometry import NurbsCurve, NurbsSurface, TrimmedSurface, ruled_trim_map
from .queries import (
    LineIntersectConfig,
    ProjectionConfig,
    closest_point,
    line_surface_intersection,
)

__all__ = [
    "IntersectConfig",
    "IsoLine",
    "LineDiagnostic",
    "IntersectionCurvePoints",
    "PatchInfo",
    "Decomposition",
    "generate_iso_lines",
    "compute_intersection_points",
    "trim_intersecting_surface",
    "subdivide_and_trim_intersected",
    "surface_surface_intersection",
]

#: 3D tolerance for "the same point" (loop closure, duplicate stations)
CLOSURE_TOL = 1e-9
#: largest point-to-surface distance accepted for an intersection record
BI_RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class IntersectConfig:
    nlines: int = 17
    trim_degree: int = 2
    extent_factor: float = 0.1
    keep_side: str = "low"
    line: LineIntersectConfig = LineIntersectConfig()
    projection: ProjectionConfig = ProjectionConfig()

    def __post_init__(self):
        if self.trim_degree < 1:
            raise ShapeError("trim_degree must be at least 1")
        if self.nlines < max(3, self.trim_degree + 1):
            raise ShapeError(
                f"nlines={self.nlines} too small for degree-{self.trim_degree} trim curves"
            )
        if self.extent_factor < 0.0:
            raise ShapeError("extent_factor must be non-negative")
        if self.keep_side not in ("low", "high"):
            raise ShapeError("keep_side must be 'low' or 'high'")


@dataclass(frozen=True, eq=False)
class IsoLine:
    """A straight sampling line tagged with its surface-1 xi station."""

    station: float
    curve: NurbsCurve


@dataclass(frozen=True)
class LineDiagnostic:
    line_index: int
    station: float
    converged: bool
    residual: float
    included: bool
    reason: str


@dataclass(frozen=True, eq=False)
class IntersectionCurvePoints:
    """Ordered intersection records (by generating-line station).

    ``points_3d[k]`` lies on both surfaces within the bi-residual
    tolerance; ``uv1``/``uv2`` are its parameters on surface 1 / 2 and
    ``line_index[k]`` names the generating line.
    """

    points_3d: np.ndarray
    uv1: np.ndarray
    uv2: np.ndarray
    line_index: np.ndarray

    def __len__(self):
        return self.points_3d.shape[0]


@dataclass(frozen=True, eq=False)
class PatchInfo:
    """Bookkeeping for one trimmed patch of a decomposition.

    ``trim_range`` is the parameter interval of the patch's eta=1 edge
    that carries the fitted intersection curve; outside that interval the
    edge runs along straight quadrant boundaries.  ``local_points`` are
    the intersection points in the quadrant's local coordinates (surface-1
    parameters for the intersecting patch).
    """

    name: str
    role: str
    trim_range: tuple
    fit_residual: float
    quadrant: tuple | None
    local_points: np.ndarray | None


@dataclass(frozen=True, eq=False)
class Decomposition:
    patches: tuple
    infos: tuple
    curve: IntersectionCurvePoints
    diagnostics: tuple


def generate_iso_lines(surface1, config=None, extent_box=None):
    """Straight lines through the eta=0 and eta=1 points of nlines stations.

    With ``extent_box`` (a pair of 3D corners, typically the intersected
    surface's bounding box) each line is extended so it spans the box's
    projection onto the line with ``extent_factor`` slack on both sides.
    """
    cfg = config or IntersectConfig()
    stations = np.linspace(0.0, 1.0, cfg.nlines)
    scale = float(np.linalg.norm(np.subtract(*surface1.bounding_box()))) or 1.0
    lines = []
    for s in stations:
        a = surface1.point(s, 0.0)
        b = surface1.point(s, 1.0)
        chord = np.linalg.norm(b - a)
        if chord <= 1e-12 * scale:
            raise GeometryError(
                f"iso line at xi={s:.6g} is degenerate (eta edge collapses to a point)"
            )
        if extent_box is not None:
            u = (b - a) / chord
            lo3, hi3 = (np.asarray(c, dtype=np.float64) for c in extent_box)
            corners = np.array(
                [[x, y, z] for x in (lo3[0], hi3[0]) for y in (lo3[1], hi3[1]) for z in (lo3[2], hi3[2])]
            )
            t = (corners - a) @ u
            t_lo, t_hi = float(t.min()), float(t.max())
            span = max(t_hi - t_lo, chord)
            a2 = a + (t_lo - cfg.extent_factor * span) * u
            b2 = a + (t_hi + cfg.extent_factor * span) * u
        else:
            a2, b2 = a, b
        curve = NurbsCurve(
            BasisSpec(KnotVector([0.0, 0.0, 1.0, 1.0]), 1), np.array([a2, b2])
        )
        lines.append(IsoLine(float(s), curve))
    return lines


def _recover_uv1(surface1, point, station, projection):
    """Project an intersection point back onto surface 1, seeded on its line."""
    etas = np.linspace(0.0, 1.0, 33)
    pts = surface1.points_at(np.full(33, station), etas)
    k = int(((pts - point) ** 2).sum(axis=1).argmin())
    res = closest_point(surface1, point, projection, seed=(station, float(etas[k])))
    return res


def compute_intersection_points(lines, surface1, surface2, config=None):
    """Intersect every sampling line with surface 2 and collect records.

    Lines that do not converge, or whose intersection point is farther
    than the bi-residual tolerance from either surface, are excluded and
    reported in the diagnostics.
    """
    cfg = config or IntersectConfig()
    records = []
    diagnostics = []
    for idx, iso in enumerate(lines):
        res = line_surface_intersection(iso.curve, surface2, cfg.line, cfg.projection)
        if not res.converged:
            diagnostics.append(
                LineDiagnostic(idx, iso.station, False, res.residual, False, "no convergence")
            )
            continue
        back = _recover_uv1(surface1, res.point, iso.station, cfg.projection)
        worst = max(res.residual, back.distance)
        if worst > BI_RESIDUAL_TOL:
            diagnostics.append(
                LineDiagnostic(
                    idx, iso.station, True, worst, False, "bi-residual above tolerance"
                )
            )
            continue
        diagnostics.append(LineDiagnostic(idx, iso.station, True, worst, True, ""))
        records.append(
            (res.point, (back.xi, back.eta), (res.xi, res.eta), idx)
        )
    needed = cfg.trim_degree + 1
    if len(records) < needed:
        raise InsufficientIntersectionError(
            f"line intersection produced {len(records)} usable points of "
            f"{len(lines)} lines; need at least {needed} to fit trim curves"
        )
    points = IntersectionCurvePoints(
        np.array([r[0] for r in records]),
        np.array([r[1] for r in records]),
        np.array([r[2] for r in records]),
        np.array([r[3] for r in records], dtype=np.int64),
    )
    return points, tuple(diagnostics)


def trim_intersecting_surface(surface1, points, config=None):
    """Trim surface 1 along the intersection curve in its parameter space.

    Keeps the eta-low side by default (``keep_side`` flips it).  Returns
    the trimmed patch and the trim-curve fit result.
    """
    cfg = config or IntersectConfig()
    curve, fit = fit_trim_curve(points.uv1, cfg.trim_degree)
    if cfg.keep_side == "low":
        trim = ruled_trim_map(curve, (0.0, 0.0), (1.0, 0.0), boundary_side="high")
    else:
        trim = ruled_trim_map(curve, (0.0, 1.0), (1.0, 1.0), boundary_side="low")
    return TrimmedSurface(surface1, trim), fit


def _lead_composite_curve(arc, corner):
    """Prepend an exact straight run from ``corner`` to the arc's start.

    The joint knot gets multiplicity ``degree`` so the composite curve is
    C0 there: a straight lead segment (control points equally spaced on
    the chord, reproducing the segment exactly) followed by the fitted arc
    reparameterized into the remaining interval.  Returns the composite
    curve and the join parameter.
    """
    p = arc.degree
    corner = np.asarray(corner, dtype=np.float64)
    start = arc.control_points[0]
    arc_knots = arc.basis.knots.values
    interior = arc_knots[p + 1 : -(p + 1)]
    seg_len = float(np.linalg.norm(start - corner))
    chord = float(
        np.sum(np.linalg.norm(np.diff(arc.control_points, axis=0), axis=1))
    )
    if seg_len < 1e-12:
        raise UnsupportedTopologyError(
            "intersection loop touches a subdivision corner; cannot build lead segment"
        )
    u_join = seg_len / (seg_len + chord)
    knots = np.concatenate(
        [
            np.zeros(p + 1),
            np.full(p, u_join),
            u_join + (1.0 - u_join) * interior,
            np.ones(p + 1),
        ]
    )
    lead = corner[None, :] + (start - corner)[None, :] * (np.arange(p) / p)[:, None]
    cps = np.concatenate([lead, arc.control_points], axis=0)
    curve = NurbsCurve(BasisSpec(KnotVector(knots), p), cps)
    return curve, u_join


#: interior run points closer than this fraction of the run's chord length
#: to their neighbor get dropped: clustered chord parameters make the
#: uniform-knot interpolating trim fit oscillate
_MERGE_REL = 0.04


def _quadrant_runs(loop, cx, cy):
    """Split a closed parameter loop into per-quadrant point runs.

    Boundary crossings (where the loop crosses xi=cx or eta=cy) are
    inserted by linear interpolation and shared by the two adjacent runs.
    Loop points sitting (almost) on a split line act as the crossing
    themselves.  Each quadrant must be visited exactly once.
    """

    def crossings(p, q):
        out = []
        for c, axis in ((cx, 0), (cy, 1)):
            a, b = p[axis], q[axis]
            if (a < c) != (b < c) and a != b:
                t = (c - a) / (b - a)
                if 0.0 < t < 1.0:
                    x = p + t * (q - p)
                    x[axis] = c
                    out.append((t, x))
        out.sort(key=lambda item: item[0])
        return [x for _, x in out]

    # Cyclic point list with crossings inserted; consecutive points then
    # bound sub-segments that each stay inside a single quadrant.
    n = loop.shape[0]
    walk = []
    for i in range(n):
        p = loop[i]
        q = loop[(i + 1) % n]
        walk.append(p.copy())
        walk.extend(crossings(p, q))
    m = len(walk)

    def sub_quad(k):
        mid = 0.5 * (walk[k] + walk[(k + 1) % m])
        return (mid[0] >= cx, mid[1] >= cy)

    start = None
    for k in range(m):
        if sub_quad(k) != sub_quad(k - 1):
            start = k
            break
    if start is None:
        raise UnsupportedTopologyError(
            "intersection loop stays in one quadrant of its own bounding box"
        )

    def store(by_quad, key, run):
        if key in by_quad:
            raise UnsupportedTopologyError(
                "intersection loop enters a quadrant more than once; "
                "only single convex-like loops are supported"
            )
        by_quad[key] = _merge_close(run)

    by_quad = {}
    key = sub_quad(start)
    run = [walk[start]]
    for j in range(m):
        k = (start + j) % m
        nxt = walk[(k + 1) % m]
        run.append(nxt)
        if j == m - 1:
            break  # the walk is back at its starting transition point
        next_key = sub_quad((k + 1) % m)
        if next_key != key:
            store(by_quad, key, run)
            key = next_key
            run = [nxt]
    store(by_quad, key, run)
    if len(by_quad) != 4:
        raise UnsupportedTopologyError(
            f"intersection loop only reaches {len(by_quad)} of 4 quadrants"
        )
    return by_quad


def _merge_close(run):
    """Drop interior points too close to a neighbor, keeping both endpoints."""
    arr = np.array(run)
    total = float(np.sum(np.linalg.norm(np.diff(arr, axis=0), axis=1)))
    tol = max(1e-6, _MERGE_REL * total)
    pts = [arr[0]]
    for p in arr[1:-1]:
        if np.linalg.norm(p - pts[-1]) > tol:
            pts.append(p)
    last = arr[-1]
    if len(pts) > 1 and np.linalg.norm(last - pts[-1]) <= tol:
        pts.pop()
    pts.append(last)
    return np.array(pts)


def subdivide_and_trim_intersected(surface2, points, config=None):
    """Decompose surface 2 into four quadrant patches outside the loop.

    The parameter square is split at the loop's bounding-box center; each
    quadrant gets a trim curve through its share of the loop points (with
    boundary crossings inserted) and keeps the region outside the loop.
    Returns ``[(patch, info), ...]`` in quadrant order (low/high xi x
    low/high eta).
    """
    cfg = config or IntersectConfig()
    uv2 = points.uv2
    if len(points) < 4:
        raise InsufficientIntersectionError("need at least 4 points to subdivide around a loop")
    closed = (
        np.linalg.norm(points.points_3d[0] - points.points_3d[-1]) <= CLOSURE_TOL
        and np.linalg.norm(uv2[0] - uv2[-1]) <= 1e-6
    )
    if not closed:
        raise UnsupportedTopologyError(
            "intersection is not a closed loop on the intersected surface "
            "(the intersecting surface must be closed in xi)"
        )
    loop = uv2[:-1]
    lo = loop.min(axis=0)
    hi = loop.max(axis=0)
    cx, cy = 0.5 * (lo + hi)
    if not (0.0 < cx < 1.0 and 0.0 < cy < 1.0):
        raise UnsupportedTopologyError("loop bounding-box center lies on the parameter boundary")
    runs = _quadrant_runs(loop, cx, cy)

    result = []
    for key in ((False, False), (False, True), (True, False), (True, True)):
        xi_high, eta_high = key
        far_x = 1.0 if xi_high else 0.0
        far_y = 1.0 if eta_high else 0.0
        pts = runs[key]
        on_exi_first = abs(pts[0, 0] - cx) <= 1e-12
        on_exi_last = abs(pts[-1, 0] - cx) <= 1e-12
        if on_exi_first == on_exi_last:
            raise UnsupportedTopologyError(
                "quadrant run does not connect the two interior quadrant edges"
            )
        if on_exi_first:
            pts = pts[::-1]
        degree = min(cfg.trim_degree, len(pts) - 1)
        arc, fit = fit_trim_curve(pts, degree)
        composite, u_join = _lead_composite_curve(arc, (far_x, cy))
        trim = ruled_trim_map(
            composite, (far_x, far_y), (cx, far_y), boundary_side="high"
        )
        patch = TrimmedSurface(surface2, trim)
        qx = (min(far_x, cx), max(far_x, cx))
        qy = (min(far_y, cy), max(far_y, cy))
        local = np.empty_like(pts)
        local[:, 0] = (pts[:, 0] - qx[0]) / (qx[1] - qx[0])
        local[:, 1] = (pts[:, 1] - qy[0]) / (qy[1] - qy[0])
        name = f"sub{int(xi_high)}{int(eta_high)}"
        info = PatchInfo(
            name=name,
            role="intersected",
            trim_range=(u_join, 1.0),
            fit_residual=fit.residual_norm,
            quadrant=(qx, qy),
            local_points=local,
        )
        result.append((patch, info))
    return result


def surface_surface_intersection(surface1, surface2, config=None):
    """Full pipeline: sample, intersect, trim, subdivide.

    Returns a :class:`Decomposition` with the trimmed surface-1 patch
    first, then the four surface-2 quadrant patches.
    """
    cfg = config or IntersectConfig()
    for name, srf in (("surface1", surface1), ("surface2", surface2)):
        if not isinstance(srf, NurbsSurface) or srf.dim != 3:
            raise ShapeError(f"{name} must be a 3D NurbsSurface")
    lines = generate_iso_lines(surface1, cfg, extent_box=surface2.bounding_box())
    first, last = lines[0].curve.control_points, lines[-1].curve.control_points
    if np.abs(first - last).max() > CLOSURE_TOL:
        raise UnsupportedTopologyError(
            "first and last sampling lines differ: the intersecting surface "
            "is not closed in xi, so the intersection cannot form a loop"
        )
    points, diagnostics = compute_intersection_points(lines, surface1, surface2, cfg)
    patch1, fit1 = trim_intersecting_surface(surface1, points, cfg)
    info1 = PatchInfo(
        name="intersecting",
        role="intersecting",
        trim_range=(0.0, 1.0),
        fit_residual=fit1.residual_norm,
        quadrant=None,
        local_points=points.uv1.copy(),
    )
    quads = subdivide_and_trim_intersected(surface2, points, cfg)
    patches = (patch1,) + tuple(p for p, _ in quads)
    infos = (info1,) + tuple(i for _, i in quads)
    return Decomposition(patches, infos, points, diagnostics)
