"""Numba-compiled evaluation kernels.

Same interface as ``_kernels_numpy``; see that module for the reference
semantics.  Knot vectors are clamped and normalized to [0, 1] before they
reach these functions, so no domain checks happen here.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def find_span(knots, degree, x):
    high = knots.shape[0] - degree - 1
    if x >= knots[high]:
        return high - 1
    if x <= knots[degree]:
        return degree
    lo = degree
    hi = high
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if x < knots[mid]:
            hi = mid
        else:
            lo = mid
    return lo


@njit(cache=True)
def basis_many(knots, degree, xs):
    m = xs.shape[0]
    p1 = degree + 1
    spans = np.empty(m, dtype=np.int64)
    vals = np.zeros((m, p1))
    ders = np.zeros((m, p1))
    left = np.zeros(p1)
    right = np.zeros(p1)
    low = np.zeros(p1)
    for k in range(m):
        x = xs[k]
        span = find_span(knots, degree, x)
        spans[k] = span
        vals[k, 0] = 1.0
        for j in range(1, p1):
            if j == degree:
                for r in range(degree):
                    low[r] = vals[k, r]
            left[j] = x - knots[span + 1 - j]
            right[j] = knots[span + j] - x
            saved = 0.0
            for r in range(j):
                denom = right[r + 1] + left[j - r]
                temp = vals[k, r] / denom
                vals[k, r] = saved + right[r + 1] * temp
                saved = left[j - r] * temp
            vals[k, j] = saved
        if degree > 0:
            for r in range(p1):
                i = span - degree + r
                acc = 0.0
                if r > 0:
                    den = knots[i + degree] - knots[i]
                    if den > 0.0:
                        acc += degree * low[r - 1] / den
                if r < degree:
                    den = knots[i + degree + 1] - knots[i + 1]
                    if den > 0.0:
                        acc -= degree * low[r] / den
                ders[k, r] = acc
    return spans, vals, ders


@njit(cache=True)
def curve_eval_many(knots, degree, weights, cps, xs):
    m = xs.shape[0]
    d = cps.shape[1]
    pts = np.zeros((m, d))
    tans = np.zeros((m, d))
    spans, vals, ders = basis_many(knots, degree, xs)
    for k in range(m):
        i0 = spans[k] - degree
        w = 0.0
        wd = 0.0
        for r in range(degree + 1):
            w += vals[k, r] * weights[i0 + r]
            wd += ders[k, r] * weights[i0 + r]
        for c in range(d):
            num = 0.0
            numd = 0.0
            for r in range(degree + 1):
                bw = weights[i0 + r] * cps[i0 + r, c]
                num += vals[k, r] * bw
                numd += ders[k, r] * bw
            pts[k, c] = num / w
            tans[k, c] = (numd - pts[k, c] * wd) / w
    return pts, tans


@njit(cache=True)
def surface_eval_many(knots_x, deg_x, knots_e, deg_e, weights, cps, xs, es):
    m = xs.shape[0]
    d = cps.shape[2]
    pts = np.zeros((m, d))
    tx = np.zeros((m, d))
    te = np.zeros((m, d))
    spans_x, bx, dx = basis_many(knots_x, deg_x, xs)
    spans_e, be, de = basis_many(knots_e, deg_e, es)
    for k in range(m):
        ix0 = spans_x[k] - deg_x
        ie0 = spans_e[k] - deg_e
        w = 0.0
        wx = 0.0
        we = 0.0
        for a in range(deg_x + 1):
            for b in range(deg_e + 1):
                ww = weights[ix0 + a, ie0 + b]
                w += bx[k, a] * be[k, b] * ww
                wx += dx[k, a] * be[k, b] * ww
                we += bx[k, a] * de[k, b] * ww
        for c in range(d):
            num = 0.0
            numx = 0.0
            nume = 0.0
            for a in range(deg_x + 1):
                for b in range(deg_e + 1):
                    ww = weights[ix0 + a, ie0 + b] * cps[ix0 + a, ie0 + b, c]
                    num += bx[k, a] * be[k, b] * ww
                    numx += dx[k, a] * be[k, b] * ww
                    nume += bx[k, a] * de[k, b] * ww
            pts[k, c] = num / w
            tx[k, c] = (numx - pts[k, c] * wx) / w
            te[k, c] = (nume - pts[k, c] * we) / w
    return pts, tx, te


@njit(cache=True)
def surface_points_many(knots_x, deg_x, knots_e, deg_e, weights, cps, xs, es):
    m = xs.shape[0]
    d = cps.shape[2]
    pts = np.zeros((m, d))
    spans_x, bx, _ = basis_many(knots_x, deg_x, xs)
    spans_e, be, _ = basis_many(knots_e, deg_e, es)
    for k in range(m):
        ix0 = spans_x[k] - deg_x
        ie0 = spans_e[k] - deg_e
        w = 0.0
        for a in range(deg_x + 1):
            for b in range(deg_e + 1):
                w += bx[k, a] * be[k, b] * weights[ix0 + a, ie0 + b]
        for c in range(d):
            num = 0.0
            for a in range(deg_x + 1):
                for b in range(deg_e + 1):
                    num += bx[k, a] * be[k, b] * weights[ix0 + a, ie0 + b] * cps[ix0 + a, ie0 + b, c]
            pts[k, c] = num / w
    return pts


@njit(cache=True)
def surface_points_grid(knots_x, deg_x, knots_e, deg_e, weights, cps, xs, es):
    mx = xs.shape[0]
    me = es.shape[0]
    d = cps.shape[2]
    pts = np.zeros((mx, me, d))
    spans_x, bx, _ = basis_many(knots_x, deg_x, xs)
    spans_e, be, _ = basis_many(knots_e, deg_e, es)
    for i in range(mx):
        ix0 = spans_x[i] - deg_x
        for j in range(me):
            ie0 = spans_e[j] - deg_e
            w = 0.0
            for a in range(deg_x + 1):
                for b in range(deg_e + 1):
                    w += bx[i, a] * be[j, b] * weights[ix0 + a, ie0 + b]
            for c in range(d):
                num = 0.0
                for a in range(deg_x + 1):
                    for b in range(deg_e + 1):
                        num += bx[i, a] * be[j, b] * weights[ix0 + a, ie0 + b] * cps[ix0 + a, ie0 + b, c]
                pts[i, j, c] = num / w
    return pts
