"""Kernel dispatch: numba backend when available, NumPy otherwise."""

from ._accel import BACKEND

if BACKEND == "numba":
    from ._kernels_numba import (
        basis_many,
        curve_eval_many,
        find_span,
        surface_eval_many,
        surface_points_grid,
        surface_points_many,
    )
else:
    from ._kernels_numpy import (
        basis_many,
        curve_eval_many,
        find_span,
        surface_eval_many,
        surface_points_grid,
        surface_points_many,
    )

__all__ = [
    "BACKEND",
    "basis_many",
    "curve_eval_many",
    "find_span",
    "surface_eval_many",
    "surface_points_grid",
    "surface_points_many",
]
