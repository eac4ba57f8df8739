"""Knot vectors and B-spline / NURBS basis evaluation.

Everything is 0-based: basis function ``i`` of degree ``p`` is supported on
``[knots[i], knots[i+p+1])`` and a knot vector of length ``m`` carries
``m - p - 1`` basis functions.  Knot vectors are clamped (first and last
knot repeated ``p+1`` times) and normalized to the domain [0, 1] at
construction time.  At the right end of the domain the basis is evaluated
by continuity, so partition of unity holds on the closed interval.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, ShapeError

__all__ = [
    "KnotVector",
    "BasisSpec",
    "BasisEval",
    "BasisEval2D",
    "find_span",
    "bspline_basis",
    "bspline_basis_second",
    "nurbs_basis_1d",
    "nurbs_basis_2d",
    "greville_abscissae",
]


def _check_param(x, name="xi"):
    x = float(x)
    if not np.isfinite(x) or x < 0.0 or x > 1.0:
        raise DomainError(f"{name}={x!r} outside the parameter domain [0, 1]")
    return x


@dataclass(frozen=True, eq=False)
class KnotVector:
    """Non-decreasing knot values, affinely rescaled to span [0, 1]."""

    values: np.ndarray

    def __init__(self, values):
        arr = np.ascontiguousarray(values, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 2:
            raise ShapeError("knot vector needs at least two values in one dimension")
        if not np.all(np.isfinite(arr)):
            raise ShapeError("knot vector contains non-finite values")
        if np.any(np.diff(arr) < 0.0):
            raise ShapeError("knot vector must be non-decreasing")
        lo, hi = arr[0], arr[-1]
        if hi <= lo:
            raise ShapeError("knot vector spans no interval (all knots equal)")
        if lo != 0.0 or hi != 1.0:
            arr = (arr - lo) / (hi - lo)
            arr[0] = 0.0
            arr[-1] = 1.0
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self):
        return self.values.shape[0]

    def num_basis(self, degree):
        """Number of basis functions this vector carries for ``degree``."""
        return len(self) - degree - 1

    def is_clamped(self, degree):
        v = self.values
        p1 = degree + 1
        return len(v) >= 2 * p1 and v[degree] == v[0] and v[-p1] == v[-1]

    @classmethod
    def uniform_clamped(cls, num_basis, degree):
        """Clamped vector with uniformly spaced interior knots."""
        if num_basis < degree + 1:
            raise ShapeError(
                f"need at least {degree + 1} basis functions for degree {degree}, got {num_basis}"
            )
        interior = np.linspace(0.0, 1.0, num_basis - degree + 1)[1:-1]
        return cls(np.concatenate([np.zeros(degree + 1), interior, np.ones(degree + 1)]))


def _as_knots(knots):
    return knots if isinstance(knots, KnotVector) else KnotVector(knots)


@dataclass(frozen=True, eq=False)
class BasisSpec:
    """A 1D basis: knot vector, degree and (optional) rational weights.

    ``weights=None`` means the basis is polynomial (all weights one).
    """

    knots: KnotVector
    degree: int
    weights: np.ndarray | None = None

    def __init__(self, knots, degree, weights=None):
        knots = _as_knots(knots)
        degree = int(degree)
        if degree < 0:
            raise ShapeError(f"degree must be non-negative, got {degree}")
        if not knots.is_clamped(degree):
            raise ShapeError(
                f"knot vector of length {len(knots)} is not clamped for degree {degree}"
            )
        n = knots.num_basis(degree)
        if weights is not None:
            weights = np.ascontiguousarray(weights, dtype=np.float64)
            if weights.shape != (n,):
                raise ShapeError(
                    f"expected {n} weights for {n} basis functions, got shape {weights.shape}"
                )
            if not np.all(np.isfinite(weights)) or np.any(weights <= 0.0):
                raise ShapeError("weights must be finite and strictly positive")
            weights.flags.writeable = False
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "weights", weights)

    @property
    def num_basis(self):
        return self.knots.num_basis(self.degree)

    def weights_or_ones(self):
        if self.weights is None:
            return np.ones(self.num_basis)
        return self.weights


@dataclass(frozen=True, eq=False)
class BasisEval:
    """Non-zero basis window at one parameter.

    ``values[r]`` and ``derivs[r]`` belong to basis function
    ``first_index + r``; all functions outside the window vanish.
    """

    first_index: int
    values: np.ndarray
    derivs: np.ndarray


@dataclass(frozen=True, eq=False)
class BasisEval2D:
    """Non-zero tensor-product window at one (xi, eta) pair."""

    first_xi: int
    first_eta: int
    values: np.ndarray
    derivs_xi: np.ndarray
    derivs_eta: np.ndarray


def find_span(knots, degree, xi):
    """Index of the non-degenerate knot span containing ``xi``."""
    knots = _as_knots(knots)
    xi = _check_param(xi)
    return int(_kernels.find_span(knots.values, int(degree), xi))


def bspline_basis(knots, degree, xi):
    """Non-rational basis values and first derivatives at ``xi``."""
    knots = _as_knots(knots)
    degree = int(degree)
    if not knots.is_clamped(degree):
        raise ShapeError(f"knot vector is not clamped for degree {degree}")
    xi = _check_param(xi)
    spans, vals, ders = _kernels.basis_many(knots.values, degree, np.array([xi]))
    return BasisEval(int(spans[0]) - degree, vals[0], ders[0])


def _window_values(v, degree, span, x):
    """Values of the ``degree + 1`` basis functions ``span - degree .. span``.

    Plain Cox-de Boor triangle for one parameter value.  Unlike the batch
    kernels this guards zero-width supports (needed when evaluating a
    lowered degree on a vector clamped for a higher one).
    """
    vals = np.zeros(degree + 1)
    vals[0] = 1.0
    for j in range(1, degree + 1):
        saved = 0.0
        for r in range(j):
            denom = (v[span + r + 1] - x) + (x - v[span + 1 - j + r])
            temp = vals[r] / denom if denom != 0.0 else 0.0
            vals[r] = saved + (v[span + r + 1] - x) * temp
            saved = (x - v[span + 1 - j + r]) * temp
        vals[j] = saved
    return vals


def bspline_basis_second(knots, degree, xi):
    """Second derivatives of the basis window of :func:`bspline_basis`.

    Returns an array aligned with the ``values``/``derivs`` window: entry
    ``r`` is the second derivative of basis function ``first_index + r``.
    Uses the lower-degree recursion

        N''_{i,p} = p [ N'_{i,p-1}/(k_{i+p} - k_i)
                        - N'_{i+1,p-1}/(k_{i+p+1} - k_{i+1}) ]

    with zero-width spans contributing nothing.
    """
    knots = _as_knots(knots)
    degree = int(degree)
    ev = bspline_basis(knots, degree, xi)
    seconds = np.zeros(degree + 1)
    if degree < 2:
        return seconds
    v = knots.values
    xi = float(xi)
    span = ev.first_index + degree
    low = degree - 2
    low_vals = _window_values(v, low, span, xi)

    def value_low(j):
        r = j - (span - low)
        return low_vals[r] if 0 <= r <= low else 0.0

    def deriv_mid(j):
        mid = degree - 1
        term = 0.0
        left = v[j + mid] - v[j]
        right = v[j + mid + 1] - v[j + 1]
        if left > 0.0:
            term += value_low(j) / left
        if right > 0.0:
            term -= value_low(j + 1) / right
        return mid * term

    for r in range(degree + 1):
        i = ev.first_index + r
        left = v[i + degree] - v[i]
        right = v[i + degree + 1] - v[i + 1]
        term = 0.0
        if left > 0.0:
            term += deriv_mid(i) / left
        if right > 0.0:
            term -= deriv_mid(i + 1) / right
        seconds[r] = degree * term
    return seconds


def nurbs_basis_1d(spec, xi):
    """Rational basis window at ``xi`` for a weighted 1D basis.

    Equal weights cancel out of the rational quotient, so that case
    returns the plain B-spline window unchanged.
    """
    ev = bspline_basis(spec.knots, spec.degree, xi)
    w = spec.weights
    if w is None or np.all(w == w[0]):
        return ev
    win = w[ev.first_index : ev.first_index + spec.degree + 1]
    bw = ev.values * win
    dw = ev.derivs * win
    wsum = bw.sum()
    wder = dw.sum()
    values = bw / wsum
    derivs = (dw - values * wder) / wsum
    return BasisEval(ev.first_index, values, derivs)


def nurbs_basis_2d(spec_xi, spec_eta, weight_net, xi, eta):
    """Rational tensor-product basis window at ``(xi, eta)``.

    The rationalization uses one weight per control point (``weight_net``
    of shape ``(n_xi, n_eta)``), not the per-direction weights of the two
    specs, which are ignored here.
    """
    ex = bspline_basis(spec_xi.knots, spec_xi.degree, xi)
    ee = bspline_basis(spec_eta.knots, spec_eta.degree, eta)
    net = np.asarray(weight_net, dtype=np.float64)
    expected = (spec_xi.num_basis, spec_eta.num_basis)
    if net.shape != expected:
        raise ShapeError(f"weight net shape {net.shape} does not match basis counts {expected}")
    if not np.all(np.isfinite(net)) or np.any(net <= 0.0):
        raise ShapeError("weight net must be finite and strictly positive")
    win = net[
        ex.first_index : ex.first_index + spec_xi.degree + 1,
        ee.first_index : ee.first_index + spec_eta.degree + 1,
    ]
    if np.all(win == win.flat[0]):
        values = np.outer(ex.values, ee.values)
        d_xi = np.outer(ex.derivs, ee.values)
        d_eta = np.outer(ex.values, ee.derivs)
        return BasisEval2D(ex.first_index, ee.first_index, values, d_xi, d_eta)
    coef = np.outer(ex.values, ee.values) * win
    coef_x = np.outer(ex.derivs, ee.values) * win
    coef_e = np.outer(ex.values, ee.derivs) * win
    w = coef.sum()
    wx = coef_x.sum()
    we = coef_e.sum()
    values = coef / w
    d_xi = (coef_x - values * wx) / w
    d_eta = (coef_e - values * we) / w
    return BasisEval2D(ex.first_index, ee.first_index, values, d_xi, d_eta)


def greville_abscissae(knots, degree):
    """Parameter anchors: the mean of ``degree`` consecutive interior knots.

    For degree 0 (piecewise-constant basis) the anchors are the knot-span
    midpoints, one per basis function.
    """
    knots = _as_knots(knots)
    degree = int(degree)
    v = knots.values
    if degree == 0:
        return 0.5 * (v[:-1] + v[1:])
    n = knots.num_basis(degree)
    if n < 1:
        raise ShapeError("knot vector too short for this degree")
    # direct window sums keep the clamped ends exactly 0 and 1
    return np.array([v[i + 1 : i + 1 + degree].sum() / degree for i in range(n)])
