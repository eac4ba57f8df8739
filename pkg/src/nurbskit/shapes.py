"""Ready-made demo surfaces used by the examples, CLI data and tests."""

import numpy as np

from .geometry import NurbsSurface

__all__ = ["quarter_cylinder_shell", "circular_cylinder", "bilinear_patch"]


def quarter_cylinder_shell():
    """Quarter-cylinder shell of radius 1 extruded one unit along x.

    Quadratic arc in xi over the (y, z) quadrant from (1, 0) to (0, 1),
    linear extrusion in eta from x=0 to x=1.  The arc uses the classic
    0.707 middle weight, so it approximates a circle to about 1e-4.
    """
    points = np.array(
        [
            [[0.0, 1.0, 0.0], [1.0, 1.0, 0.0]],
            [[0.0, 1.0, 1.0], [1.0, 1.0, 1.0]],
            [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0]],
        ]
    )
    weights = np.array([[1.0, 1.0], [0.707, 0.707], [1.0, 1.0]])
    return NurbsSurface(
        [0.0, 0.0, 0.0, 1.0, 1.0, 1.0], 2, [0.0, 0.0, 1.0, 1.0], 1, points, weights
    )


def circular_cylinder(radius=0.5, center=(0.0, 0.0), z_range=(0.0, 1.0)):
    """Closed circular cylinder with a vertical axis.

    Exact rational circle (nine control points, double knots at the
    quarter stations, sqrt(2)/2 corner weights) extruded linearly in eta
    from ``z_range[0]`` to ``z_range[1]``.  Closed in xi: the xi=0 and
    xi=1 boundaries coincide.
    """
    cx, cy = (float(c) for c in center)
    r = float(radius)
    z0, z1 = (float(z) for z in z_range)
    ring = np.array(
        [
            [cx + r, cy],
            [cx + r, cy + r],
            [cx, cy + r],
            [cx - r, cy + r],
            [cx - r, cy],
            [cx - r, cy - r],
            [cx, cy - r],
            [cx + r, cy - r],
            [cx + r, cy],
        ]
    )
    s = np.sqrt(2.0) / 2.0
    ring_w = np.array([1.0, s, 1.0, s, 1.0, s, 1.0, s, 1.0])
    points = np.empty((9, 2, 3))
    points[:, 0, :2] = ring
    points[:, 0, 2] = z0
    points[:, 1, :2] = ring
    points[:, 1, 2] = z1
    weights = np.stack([ring_w, ring_w], axis=1)
    knots_xi = [0, 0, 0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75, 1, 1, 1]
    return NurbsSurface(knots_xi, 2, [0.0, 0.0, 1.0, 1.0], 1, points, weights)


def bilinear_patch(p00, p10, p01, p11):
    """Flat bilinear patch through four corners (degree 1 x 1)."""
    pts = np.array([[p00, p01], [p10, p11]], dtype=np.float64)
    return NurbsSurface([0.0, 0.0, 1.0, 1.0], 1, [0.0, 0.0, 1.0, 1.0], 1, pts)
