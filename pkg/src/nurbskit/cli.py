"""Command-line driver.

Subcommands cover evaluation, fitting, closest-point queries, line and
surface intersection, and OBJ tessellation.  Failures map to exit codes:
2 for parse errors (documents or command line), 3 for validation errors,
4 for numerical non-convergence, 1 for I/O problems.  Every failure also
prints one ``error: <category>: <message>`` line on stderr.
"""

import argparse
import sys

import numpy as np

from . import document
from .errors import (
    DegenerateParameterizationError,
    DocumentParseError,
    DocumentValidationError,
    DomainError,
    GeometryError,
    InsufficientIntersectionError,
    NurbsError,
    ShapeError,
    SingularSystemError,
    UnsupportedTopologyError,
)
from .fitting import fit_curve_through_points, fit_surface_grid
from .geometry import NurbsCurve, NurbsSurface, TrimMap, TrimmedSurface
from .intersect import IntersectConfig, surface_surface_intersection
from .mesh import save_obj, tessellate
from .queries import (
    LineIntersectConfig,
    ProjectionConfig,
    closest_point,
    line_surface_intersection,
)

__all__ = ["main"]

_VALIDATION_ERRORS = (
    DocumentValidationError,
    DomainError,
    ShapeError,
    DegenerateParameterizationError,
)
_NUMERICAL_ERRORS = (
    GeometryError,
    SingularSystemError,
    InsufficientIntersectionError,
    UnsupportedTopologyError,
)


def _fmt(values):
    """Fixed 6-significant-digit report formatting."""
    arr = np.atleast_1d(np.asarray(values, dtype=np.float64))
    return " ".join("%.6g" % v for v in arr)


def _xyz(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected x,y,z")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _points_entity(doc, name):
    """A named point set, or the only one in the document."""
    if name is not None:
        return doc.get(name, np.ndarray)
    found = [(n, e) for n, e in doc.entities.items() if isinstance(e, np.ndarray)]
    if len(found) != 1:
        names = ", ".join(n for n, _ in found) or "none"
        raise DocumentValidationError(
            f"pick a point set with --entity (candidates: {names})"
        )
    return found[0][1]


def _cmd_eval(args):
    doc = document.load(args.doc)
    entity = doc.get(args.entity)
    if isinstance(entity, NurbsCurve):
        if args.eta is not None:
            raise ShapeError("--eta does not apply to a curve")
        print(f"point {_fmt(entity.point(args.xi))}")
        print(f"tangent {_fmt(entity.tangent(args.xi))}")
        return 0
    if args.eta is None:
        raise ShapeError("--eta is required for surfaces")
    if isinstance(entity, NurbsSurface):
        pt, tx, te = entity.point_and_tangents(args.xi, args.eta)
        print(f"point {_fmt(pt)}")
        print(f"tangent_xi {_fmt(tx)}")
        print(f"tangent_eta {_fmt(te)}")
    elif isinstance(entity, TrimMap):
        print(f"point {_fmt(entity.eval(args.xi, args.eta))}")
    elif isinstance(entity, TrimmedSurface):
        print(f"point {_fmt(entity.point(args.xi, args.eta))}")
    else:
        raise DocumentValidationError("entity is not evaluable", entity=args.entity)
    return 0


def _cmd_fit_curve(args):
    doc = document.load(args.points_file)
    points = _points_entity(doc, args.entity)
    curve, fit = fit_curve_through_points(
        points,
        args.degree,
        num_control=args.approx,
        parameterization=args.params,
    )
    out = document.GeometryDocument()
    out.add(args.name, curve)
    document.save(out, args.out)
    n = curve.control_points.shape[0]
    print(f"fitted curve: degree {curve.degree}, {n} control points")
    print(f"residual {_fmt(fit.residual_norm)}")
    print(f"exact {'yes' if fit.exact else 'no'}")
    print(f"wrote {args.out}")
    return 0


def _cmd_fit_surface(args):
    doc = document.load(args.points_file)
    points = _points_entity(doc, args.entity)
    m_xi, m_eta = args.grid
    if points.shape[0] != m_xi * m_eta:
        raise ShapeError(
            f"--grid {m_xi} {m_eta} needs {m_xi * m_eta} points, "
            f"the point set has {points.shape[0]}"
        )
    grid = points.reshape(m_xi, m_eta, points.shape[1])
    surface, fit = fit_surface_grid(
        grid,
        args.degree[0],
        args.degree[1],
        num_control=None if args.approx is None else tuple(args.approx),
    )
    out = document.GeometryDocument()
    out.add(args.name, surface)
    document.save(out, args.out)
    n_xi, n_eta = surface.points.shape[:2]
    print(
        f"fitted surface: degree {surface.degree_xi} {surface.degree_eta}, "
        f"{n_xi} x {n_eta} control points"
    )
    print(f"residual {_fmt(fit.residual_norm)}")
    print(f"exact {'yes' if fit.exact else 'no'}")
    print(f"wrote {args.out}")
    return 0


def _cmd_closest(args):
    doc = document.load(args.doc)
    surface = doc.get(args.surface, NurbsSurface)
    config = ProjectionConfig(
        max_iterations=args.iters, damp=args.damp, tolerance=args.tol
    )
    res = closest_point(surface, np.array(args.point), config)
    print(f"xi {_fmt(res.xi)}")
    print(f"eta {_fmt(res.eta)}")
    print(f"point {_fmt(res.point)}")
    print(f"distance {_fmt(res.distance)}")
    print(f"iterations {res.iterations}")
    print(f"converged {'yes' if res.converged else 'no'}")
    if not res.converged:
        print("error: numerical: closest-point iteration did not converge", file=sys.stderr)
        return 4
    return 0


def _cmd_intersect_line(args):
    doc = document.load(args.doc)
    line = doc.get(args.line, NurbsCurve)
    surface = doc.get(args.surface, NurbsSurface)
    config = LineIntersectConfig(max_iterations=args.iters, tolerance=args.tol)
    res = line_surface_intersection(line, surface, config)
    print(f"point {_fmt(res.point)}")
    print(f"t {_fmt(res.xi_line)}")
    print(f"xi {_fmt(res.xi)}")
    print(f"eta {_fmt(res.eta)}")
    print(f"residual {_fmt(res.residual)}")
    print(f"iterations {res.iterations}")
    print(f"converged {'yes' if res.converged else 'no'}")
    if not res.converged:
        print(
            "error: numerical: the line does not meet the surface within tolerance",
            file=sys.stderr,
        )
        return 4
    return 0


def _cmd_intersect(args):
    doc = document.load(args.doc)
    surface1 = doc.get(args.surface1, NurbsSurface)
    surface2 = doc.get(args.surface2, NurbsSurface)
    config = IntersectConfig(nlines=args.nlines, keep_side=args.keep_side)
    decomp = surface_surface_intersection(surface1, surface2, config)

    out = document.GeometryDocument()
    out.add(args.surface1, surface1)
    out.add(args.surface2, surface2)
    for patch, info in zip(decomp.patches, decomp.infos):
        out.add(f"{info.name}.map", patch.trim)
        out.add(info.name, patch)
    out.add("intersection.points", decomp.curve.points_3d)
    document.save(out, args.out)

    print(f"patches {len(decomp.patches)}")
    for patch, info in zip(decomp.patches, decomp.infos):
        base = args.surface1 if info.role == "intersecting" else args.surface2
        print(f"patch {info.name} base {base} fit-residual {_fmt(info.fit_residual)}")
    used = sum(1 for d in decomp.diagnostics if d.included)
    print(f"lines {len(decomp.diagnostics)} used {used}")
    for d in decomp.diagnostics:
        if not d.included:
            print(f"excluded line {d.line_index} station {_fmt(d.station)}: {d.reason}")
    worst = max(d.residual for d in decomp.diagnostics if d.included)
    print(f"max-bi-residual {_fmt(worst)}")
    print(f"wrote {args.out}")
    return 0


def _cmd_tessellate(args):
    doc = document.load(args.doc)
    entity = doc.get(args.entity)
    if not isinstance(entity, (NurbsSurface, TrimmedSurface)):
        raise DocumentValidationError(
            "only surfaces and trimmed surfaces tessellate", entity=args.entity
        )
    mesh = tessellate(entity, args.nx, args.ny)
    save_obj(mesh, args.out)
    print(
        f"wrote {args.out} ({mesh.vertices.shape[0]} vertices, "
        f"{mesh.triangles.shape[0]} triangles)"
    )
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nurbskit", description="NURBS geometry kernel command line"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate an entity at (xi[, eta])")
    p.add_argument("doc")
    p.add_argument("entity")
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--eta", type=float, default=None)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("fit-curve", help="fit a curve through a point set")
    p.add_argument("points_file")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--approx", type=int, default=None, metavar="N",
                   help="least-squares fit with N control points instead of interpolating")
    p.add_argument("--params", choices=("chord", "uniform"), default="chord")
    p.add_argument("--entity", default=None, help="point-set entity name")
    p.add_argument("--name", default="fitted", help="output entity name")
    p.add_argument("--out", required=True, help="output document path")
    p.set_defaults(func=_cmd_fit_curve)

    p = sub.add_parser("fit-surface", help="fit a surface through a grid of points")
    p.add_argument("points_file")
    p.add_argument("--degree", type=int, nargs=2, required=True, metavar=("PX", "PE"))
    p.add_argument("--grid", type=int, nargs=2, required=True, metavar=("MX", "ME"),
                   help="point-grid shape; the point set is row-major")
    p.add_argument("--approx", type=int, nargs=2, default=None, metavar=("NX", "NE"))
    p.add_argument("--entity", default=None)
    p.add_argument("--name", default="fitted")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fit_surface)

    p = sub.add_parser("closest", help="closest point on a surface")
    p.add_argument("doc")
    p.add_argument("surface")
    p.add_argument("--point", type=_xyz, required=True, metavar="X,Y,Z")
    p.add_argument("--damp", type=float, default=ProjectionConfig.damp)
    p.add_argument("--tol", type=float, default=ProjectionConfig.tolerance)
    p.add_argument("--iters", type=int, default=ProjectionConfig.max_iterations)
    p.set_defaults(func=_cmd_closest)

    p = sub.add_parser("intersect-line", help="intersect a straight line with a surface")
    p.add_argument("doc")
    p.add_argument("line")
    p.add_argument("surface")
    p.add_argument("--tol", type=float, default=LineIntersectConfig.tolerance)
    p.add_argument("--iters", type=int, default=LineIntersectConfig.max_iterations)
    p.set_defaults(func=_cmd_intersect_line)

    p = sub.add_parser("intersect", help="surface-surface intersection and decomposition")
    p.add_argument("doc")
    p.add_argument("surface1", help="the intersecting surface (closed in xi)")
    p.add_argument("surface2", help="the intersected surface")
    p.add_argument("--nlines", type=int, default=IntersectConfig.nlines)
    p.add_argument("--keep-side", choices=("low", "high"), default=IntersectConfig.keep_side)
    p.add_argument("--out", required=True, help="decomposition document path")
    p.set_defaults(func=_cmd_intersect)

    p = sub.add_parser("tessellate", help="export a triangle mesh as Wavefront OBJ")
    p.add_argument("doc")
    p.add_argument("entity")
    p.add_argument("--nx", type=int, default=33)
    p.add_argument("--ny", type=int, default=33)
    p.add_argument("--out", required=True, help="OBJ path")
    p.set_defaults(func=_cmd_tessellate)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DocumentParseError as exc:
        print(f"error: parse: {exc}", file=sys.stderr)
        return 2
    except _VALIDATION_ERRORS as exc:
        print(f"error: validation: {exc}", file=sys.stderr)
        return 3
    except _NUMERICAL_ERRORS as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return 4
    except NurbsError as exc:  # anything uncategorized counts as validation
        print(f"error: validation: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
