"""Vectorized pure-NumPy evaluation kernels (fallback backend).

Reference semantics for both backends:

``find_span(knots, degree, x)``
    Index ``k`` with ``knots[k] <= x < knots[k+1]`` restricted to the
    non-degenerate spans of a clamped vector; ``x`` at the right end of
    the domain maps to the last non-degenerate span.

``basis_many(knots, degree, xs)``
    Cox-de Boor recursion.  Returns ``(spans, values, derivs)`` where
    ``values[k]``/``derivs[k]`` hold the ``degree+1`` non-zero B-spline
    basis functions (and first derivatives) at ``xs[k]``, starting at
    basis index ``spans[k] - degree``.

``curve_eval_many`` / ``surface_eval_many`` / ``surface_points_many`` /
``surface_points_grid``
    Rational (weighted) point and first-derivative evaluation for curves
    and tensor-product surfaces; derivatives use the quotient rule.
"""

import numpy as np


def find_span(knots, degree, x):
    high = knots.shape[0] - degree - 1
    if x >= knots[high]:
        return high - 1
    if x <= knots[degree]:
        return degree
    return int(np.searchsorted(knots, x, side="right")) - 1


def _spans_many(knots, degree, xs):
    high = knots.shape[0] - degree - 1
    spans = np.searchsorted(knots, xs, side="right") - 1
    return np.clip(spans, degree, high - 1)


def basis_many(knots, degree, xs):
    m = xs.shape[0]
    p1 = degree + 1
    spans = _spans_many(knots, degree, xs)
    vals = np.zeros((m, p1))
    ders = np.zeros((m, p1))
    vals[:, 0] = 1.0
    if degree == 0:
        return spans, vals, ders
    left = np.zeros((m, p1))
    right = np.zeros((m, p1))
    low = None
    for j in range(1, p1):
        if j == degree:
            low = vals[:, :degree].copy()
        left[:, j] = xs - knots[spans + 1 - j]
        right[:, j] = knots[spans + j] - xs
        saved = np.zeros(m)
        for r in range(j):
            denom = right[:, r + 1] + left[:, j - r]
            temp = vals[:, r] / denom
            vals[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        vals[:, j] = saved
    if degree == 1:
        low = np.ones((m, 1))
    for r in range(p1):
        i = spans - degree + r
        acc = np.zeros(m)
        if r > 0:
            den = knots[i + degree] - knots[i]
            ok = den > 0.0
            acc += np.where(ok, degree * low[:, r - 1] / np.where(ok, den, 1.0), 0.0)
        if r < degree:
            den = knots[i + degree + 1] - knots[i + 1]
            ok = den > 0.0
            acc -= np.where(ok, degree * low[:, r] / np.where(ok, den, 1.0), 0.0)
        ders[:, r] = acc
    return spans, vals, ders


def _curve_windows(spans, degree, weights, cps):
    idx = spans[:, None] - degree + np.arange(degree + 1)[None, :]
    return weights[idx], cps[idx]


def curve_eval_many(knots, degree, weights, cps, xs):
    spans, vals, ders = basis_many(knots, degree, xs)
    w_win, cp_win = _curve_windows(spans, degree, weights, cps)
    bw = vals * w_win
    dw = ders * w_win
    w = bw.sum(axis=1)
    wd = dw.sum(axis=1)
    num = (bw[:, :, None] * cp_win).sum(axis=1)
    numd = (dw[:, :, None] * cp_win).sum(axis=1)
    pts = num / w[:, None]
    tans = (numd - pts * wd[:, None]) / w[:, None]
    return pts, tans


def _surface_windows(spans_x, deg_x, spans_e, deg_e, weights, cps):
    ix = spans_x[:, None] - deg_x + np.arange(deg_x + 1)[None, :]
    ie = spans_e[:, None] - deg_e + np.arange(deg_e + 1)[None, :]
    w_win = weights[ix[:, :, None], ie[:, None, :]]
    cp_win = cps[ix[:, :, None], ie[:, None, :], :]
    return w_win, cp_win


def surface_eval_many(knots_x, deg_x, knots_e, deg_e, weights, cps, xs, es):
    spans_x, bx, dx = basis_many(knots_x, deg_x, xs)
    spans_e, be, de = basis_many(knots_e, deg_e, es)
    w_win, cp_win = _surface_windows(spans_x, deg_x, spans_e, deg_e, weights, cps)
    coef = bx[:, :, None] * be[:, None, :] * w_win
    coef_x = dx[:, :, None] * be[:, None, :] * w_win
    coef_e = bx[:, :, None] * de[:, None, :] * w_win
    w = coef.sum(axis=(1, 2))
    wx = coef_x.sum(axis=(1, 2))
    we = coef_e.sum(axis=(1, 2))
    num = (coef[..., None] * cp_win).sum(axis=(1, 2))
    numx = (coef_x[..., None] * cp_win).sum(axis=(1, 2))
    nume = (coef_e[..., None] * cp_win).sum(axis=(1, 2))
    pts = num / w[:, None]
    tx = (numx - pts * wx[:, None]) / w[:, None]
    te = (nume - pts * we[:, None]) / w[:, None]
    return pts, tx, te


def surface_points_many(knots_x, deg_x, knots_e, deg_e, weights, cps, xs, es):
    spans_x, bx, _ = basis_many(knots_x, deg_x, xs)
    spans_e, be, _ = basis_many(knots_e, deg_e, es)
    w_win, cp_win = _surface_windows(spans_x, deg_x, spans_e, deg_e, weights, cps)
    coef = bx[:, :, None] * be[:, None, :] * w_win
    w = coef.sum(axis=(1, 2))
    num = (coef[..., None] * cp_win).sum(axis=(1, 2))
    return num / w[:, None]


def surface_points_grid(knots_x, deg_x, knots_e, deg_e, weights, cps, xs, es):
    mx = xs.shape[0]
    me = es.shape[0]
    d = cps.shape[2]
    spans_x, bx, _ = basis_many(knots_x, deg_x, xs)
    spans_e, be, _ = basis_many(knots_e, deg_e, es)
    den = np.zeros((mx, me))
    num = np.zeros((mx, me, d))
    for a in range(deg_x + 1):
        ia = spans_x - deg_x + a
        for b in range(deg_e + 1):
            ib = spans_e - deg_e + b
            w_ab = weights[ia[:, None], ib[None, :]]
            coef = bx[:, a][:, None] * be[:, b][None, :] * w_ab
            den += coef
            num += coef[:, :, None] * cps[ia[:, None], ib[None, :], :]
    return num / den[:, :, None]
