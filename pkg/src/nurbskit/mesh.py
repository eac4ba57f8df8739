"""Triangle tessellation of (trimmed) surfaces and OBJ export."""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .geometry import NurbsSurface, TrimmedSurface

__all__ = ["TriangleMesh", "tessellate", "save_obj"]

#: triangles with area at or below this are dropped from tessellations
DEGENERATE_AREA = 1e-14


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Vertices, 0-based triangle indices and per-vertex (xi, eta) params."""

    vertices: np.ndarray
    triangles: np.ndarray
    params: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.float64)
        t = np.ascontiguousarray(self.triangles, dtype=np.int64)
        p = np.ascontiguousarray(self.params, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ShapeError(f"vertices must be (n, 3), got {v.shape}")
        if t.ndim != 2 or t.shape[1] != 3:
            raise ShapeError(f"triangles must be (m, 3), got {t.shape}")
        if p.shape != (v.shape[0], 2):
            raise ShapeError("params must pair one (xi, eta) with every vertex")
        if not np.all(np.isfinite(v)):
            raise ShapeError("mesh vertices contain non-finite values")
        if t.size and (t.min() < 0 or t.max() >= v.shape[0]):
            raise ShapeError("triangle indices out of range")
        for name, arr in (("vertices", v), ("triangles", t), ("params", p)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def triangle_areas(self):
        a = self.vertices[self.triangles[:, 0]]
        b = self.vertices[self.triangles[:, 1]]
        c = self.vertices[self.triangles[:, 2]]
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def area(self):
        return float(self.triangle_areas().sum())


def tessellate(surface, n_xi=33, n_eta=33):
    """Uniform-grid tessellation with ``n_xi * n_eta`` vertices.

    Works for plain and trimmed surfaces.  Every grid cell is split into
    two triangles along the same diagonal; degenerate (near-zero-area)
    triangles are not emitted.
    """
    n_xi = int(n_xi)
    n_eta = int(n_eta)
    if n_xi < 2 or n_eta < 2:
        raise ShapeError("tessellation needs at least 2 samples per direction")
    if isinstance(surface, NurbsSurface) and surface.dim != 3:
        raise ShapeError("only 3D surfaces can be tessellated")
    if not isinstance(surface, (NurbsSurface, TrimmedSurface)):
        raise ShapeError(f"cannot tessellate {type(surface).__name__}")
    xs = np.linspace(0.0, 1.0, n_xi)
    es = np.linspace(0.0, 1.0, n_eta)
    grid = surface.grid_points(xs, es)
    vertices = grid.reshape(-1, 3)
    pxi, peta = np.meshgrid(xs, es, indexing="ij")
    params = np.stack([pxi.ravel(), peta.ravel()], axis=1)

    i = np.arange(n_xi - 1)[:, None]
    j = np.arange(n_eta - 1)[None, :]
    v00 = (i * n_eta + j).ravel()
    v10 = ((i + 1) * n_eta + j).ravel()
    v01 = (i * n_eta + j + 1).ravel()
    v11 = ((i + 1) * n_eta + j + 1).ravel()
    tris = np.concatenate(
        [np.stack([v00, v10, v11], axis=1), np.stack([v00, v11, v01], axis=1)]
    )
    mesh = TriangleMesh(vertices, tris, params)
    keep = mesh.triangle_areas() > DEGENERATE_AREA
    if not np.all(keep):
        mesh = TriangleMesh(vertices, tris[keep], params)
    return mesh


def save_obj(mesh, path):
    """Write a Wavefront OBJ file (1-based face indices)."""
    lines = []
    for v in mesh.vertices:
        lines.append(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}")
    for t in mesh.triangles:
        lines.append(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}")
    text = "\n".join(lines) + "\n"
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text)
    return text
