import numpy as np
import pytest

from nurbskit import (
    BasisSpec,
    DomainError,
    KnotVector,
    ShapeError,
    bspline_basis,
    bspline_basis_second,
    find_span,
    greville_abscissae,
    nurbs_basis_1d,
    nurbs_basis_2d,
)

from oracles import (
    central_difference,
    clamped_knots,
    naive_basis_derivative,
    naive_basis_row,
    naive_rational_row,
)


def full_row(knots, degree, x):
    """Spread a windowed basis evaluation onto the full index range."""
    ev = bspline_basis(KnotVector(knots), degree, x)
    row = np.zeros(len(knots) - degree - 1)
    row[ev.first_index : ev.first_index + degree + 1] = ev.values
    der = np.zeros_like(row)
    der[ev.first_index : ev.first_index + degree + 1] = ev.derivs
    return row, der


class TestKnotVector:
    def test_rescales_to_unit_interval(self):
        kv = KnotVector([2.0, 2.0, 3.0, 5.0, 5.0])
        assert kv.values[0] == 0.0 and kv.values[-1] == 1.0
        np.testing.assert_allclose(kv.values, [0, 0, 1 / 3, 1, 1])

    def test_rejects_decreasing(self):
        with pytest.raises(ShapeError):
            KnotVector([0.0, 0.5, 0.4, 1.0])

    def test_rejects_degenerate_span(self):
        with pytest.raises(ShapeError):
            KnotVector([1.0, 1.0, 1.0])

    def test_values_read_only(self):
        kv = KnotVector([0.0, 0.0, 1.0, 1.0])
        with pytest.raises(ValueError):
            kv.values[0] = 0.5

    def test_uniform_clamped(self):
        kv = KnotVector.uniform_clamped(4, 2)
        np.testing.assert_allclose(kv.values, [0, 0, 0, 0.5, 1, 1, 1])
        assert kv.is_clamped(2)

    def test_num_basis(self):
        kv = KnotVector([0, 0, 0, 0.25, 0.5, 1, 1, 1])
        assert kv.num_basis(2) == 5


class TestFindSpan:
    def test_interior_and_ends(self):
        kv = KnotVector([0, 0, 0, 0.25, 0.5, 1, 1, 1])
        assert find_span(kv, 2, 0.0) == 2
        assert find_span(kv, 2, 0.1) == 2
        assert find_span(kv, 2, 0.25) == 3
        assert find_span(kv, 2, 0.7) == 4
        # the right end belongs to the last non-degenerate span
        assert find_span(kv, 2, 1.0) == 4

    def test_matches_sorted_position_randomly(self, rng):
        for _ in range(200):
            degree = int(rng.integers(1, 5))
            n = degree + int(rng.integers(1, 6))
            knots = clamped_knots(n, degree, rng)
            x = float(rng.uniform(0, 1))
            s = find_span(KnotVector(knots), degree, x)
            assert knots[s] <= x < knots[s + 1] or (x == 1.0 and knots[s] < 1.0)
            # the window [s-p, s] must index valid basis functions
            assert degree <= s <= n - 1


class TestBsplineBasis:
    def test_matches_naive_recursion(self, rng):
        for _ in range(150):
            degree = int(rng.integers(0, 5))
            n = degree + int(rng.integers(1, 6))
            knots = clamped_knots(n, degree, rng)
            x = float(rng.uniform(0, 1))
            row, _ = full_row(knots, degree, x)
            np.testing.assert_allclose(row, naive_basis_row(knots, degree, x), atol=1e-12)

    def test_matches_naive_at_knots_and_ends(self, rng):
        for _ in range(40):
            degree = int(rng.integers(1, 5))
            n = degree + int(rng.integers(2, 6))
            knots = clamped_knots(n, degree, rng)
            for x in [0.0, 1.0, *knots[degree + 1 : n]]:
                row, _ = full_row(knots, degree, float(x))
                np.testing.assert_allclose(
                    row, naive_basis_row(knots, degree, float(x)), atol=1e-12
                )

    def test_derivative_matches_naive_formula(self, rng):
        for _ in range(150):
            degree = int(rng.integers(1, 5))
            n = degree + int(rng.integers(1, 6))
            knots = clamped_knots(n, degree, rng)
            x = float(rng.uniform(0, 1))
            _, der = full_row(knots, degree, x)
            ref = [naive_basis_derivative(knots, degree, i, x) for i in range(n)]
            np.testing.assert_allclose(der, ref, atol=1e-10)

    def test_partition_of_unity_and_positivity(self, rng):
        for _ in range(300):
            degree = int(rng.integers(0, 5))
            n = degree + int(rng.integers(1, 6))
            knots = clamped_knots(n, degree, rng)
            x = float(rng.uniform(0, 1))
            ev = bspline_basis(KnotVector(knots), degree, x)
            assert abs(ev.values.sum() - 1.0) < 1e-12
            assert (ev.values > -1e-15).all()
            assert abs(ev.derivs.sum()) < 1e-9

    def test_rejects_out_of_domain(self):
        kv = KnotVector([0, 0, 1, 1])
        with pytest.raises(DomainError):
            bspline_basis(kv, 1, -0.1)
        with pytest.raises(DomainError):
            bspline_basis(kv, 1, 1.1)

    def test_quadratic_midpoint_values(self):
        # single-span quadratic at x=0.5: the Bernstein row (0.25, 0.5, 0.25)
        ev = bspline_basis(KnotVector([0, 0, 0, 1, 1, 1]), 2, 0.5)
        np.testing.assert_allclose(ev.values, [0.25, 0.5, 0.25], atol=1e-15)

    def test_second_derivative_matches_difference_of_first(self, rng):
        checked = 0
        while checked < 120:
            degree = int(rng.integers(2, 5))
            n = degree + int(rng.integers(1, 5))
            knots = clamped_knots(n, degree, rng)
            kv = KnotVector(knots)
            x = float(rng.uniform(0.02, 0.98))
            # stay off knots so both difference stencils share one window
            if np.min(np.abs(knots - x)) < 1e-4:
                continue
            h = 1e-6
            lo, hi = bspline_basis(kv, degree, x - h), bspline_basis(kv, degree, x + h)
            if lo.first_index != hi.first_index:
                continue
            fd = (hi.derivs - lo.derivs) / (2 * h)
            np.testing.assert_allclose(bspline_basis_second(kv, degree, x), fd, atol=1e-5)
            checked += 1

    def test_second_derivative_of_quadratic_bezier_is_constant(self):
        kv = KnotVector([0, 0, 0, 1, 1, 1])
        for x in (0.0, 0.3, 0.5, 1.0):
            np.testing.assert_allclose(bspline_basis_second(kv, 2, x), [2.0, -4.0, 2.0], atol=1e-13)

    def test_second_derivatives_sum_to_zero(self, rng):
        # differentiating the partition of unity twice gives zero
        for _ in range(60):
            degree = int(rng.integers(2, 5))
            n = degree + int(rng.integers(1, 5))
            kv = KnotVector(clamped_knots(n, degree, rng))
            x = float(rng.uniform(0, 1))
            assert abs(bspline_basis_second(kv, degree, x).sum()) < 1e-8

    def test_second_derivative_below_quadratic_is_zero(self):
        kv = KnotVector([0, 0, 0.5, 1, 1])
        np.testing.assert_array_equal(bspline_basis_second(kv, 1, 0.3), [0.0, 0.0])


class TestRationalBasis:
    def test_matches_naive_rational(self, rng):
        for _ in range(150):
            degree = int(rng.integers(1, 5))
            n = degree + int(rng.integers(1, 6))
            knots = clamped_knots(n, degree, rng)
            w = rng.uniform(0.25, 4.0, n)
            x = float(rng.uniform(0, 1))
            spec = BasisSpec(KnotVector(knots), degree, w)
            ev = nurbs_basis_1d(spec, x)
            row = np.zeros(n)
            row[ev.first_index : ev.first_index + degree + 1] = ev.values
            np.testing.assert_allclose(
                row, naive_rational_row(knots, degree, w, x), atol=1e-12
            )

    def test_equal_weights_reduce_to_bspline(self, rng):
        knots = clamped_knots(6, 2, rng)
        spec = BasisSpec(KnotVector(knots), 2, np.full(6, 3.7))
        for x in rng.uniform(0, 1, 20):
            rational = nurbs_basis_1d(spec, float(x))
            plain = bspline_basis(spec.knots, 2, float(x))
            np.testing.assert_array_equal(rational.values, plain.values)
            np.testing.assert_array_equal(rational.derivs, plain.derivs)

    def test_rational_weight_ratio_example(self):
        # one span, degree 2, middle weight 2: values (w N) / W at x=0.5
        spec = BasisSpec(KnotVector([0, 0, 0, 1, 1, 1]), 2, np.array([1.0, 2.0, 1.0]))
        ev = nurbs_basis_1d(spec, 0.5)
        w_n = np.array([0.25, 1.0, 0.25])
        np.testing.assert_allclose(ev.values, w_n / w_n.sum(), atol=1e-15)

    def test_derivative_by_finite_difference(self, rng):
        for _ in range(50):
            degree = int(rng.integers(1, 4))
            n = degree + int(rng.integers(1, 5))
            knots = clamped_knots(n, degree, rng)
            w = rng.uniform(0.25, 4.0, n)
            spec = BasisSpec(KnotVector(knots), degree, w)
            x = float(rng.uniform(0.01, 0.99))
            if np.min(np.abs(knots - x)) < 1e-4:
                continue
            ev = nurbs_basis_1d(spec, x)
            for local, i in enumerate(range(ev.first_index, ev.first_index + degree + 1)):
                ref = central_difference(
                    lambda t, i=i: naive_rational_row(knots, degree, w, t)[i], x
                )
                assert ev.derivs[local] == pytest.approx(ref, abs=1e-5)

    def test_weight_count_mismatch(self):
        with pytest.raises(ShapeError):
            BasisSpec(KnotVector([0, 0, 0, 1, 1, 1]), 2, np.ones(4))

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(ShapeError):
            BasisSpec(KnotVector([0, 0, 0, 1, 1, 1]), 2, np.array([1.0, 0.0, 1.0]))


class TestBasis2D:
    def test_partition_of_unity(self, rng):
        for _ in range(50):
            px, pe = int(rng.integers(1, 4)), int(rng.integers(1, 4))
            nx, ne = px + int(rng.integers(1, 4)), pe + int(rng.integers(1, 4))
            sx = BasisSpec(KnotVector(clamped_knots(nx, px, rng)), px)
            se = BasisSpec(KnotVector(clamped_knots(ne, pe, rng)), pe)
            net = rng.uniform(0.5, 2.0, (nx, ne))
            ev = nurbs_basis_2d(sx, se, net, float(rng.uniform(0, 1)), float(rng.uniform(0, 1)))
            assert abs(ev.values.sum() - 1.0) < 1e-12
            assert abs(ev.derivs_xi.sum()) < 1e-9
            assert abs(ev.derivs_eta.sum()) < 1e-9

    def test_unit_weights_factorize(self, rng):
        px, pe, nx, ne = 2, 1, 4, 3
        sx = BasisSpec(KnotVector(clamped_knots(nx, px, rng)), px)
        se = BasisSpec(KnotVector(clamped_knots(ne, pe, rng)), pe)
        xi, eta = 0.3, 0.8
        ev = nurbs_basis_2d(sx, se, np.ones((nx, ne)), xi, eta)
        bx = bspline_basis(sx.knots, px, xi)
        be = bspline_basis(se.knots, pe, eta)
        np.testing.assert_allclose(ev.values, np.outer(bx.values, be.values), atol=1e-15)
        np.testing.assert_allclose(
            ev.derivs_xi, np.outer(bx.derivs, be.values), atol=1e-12
        )

    def test_weight_net_changes_values(self, rng):
        # a 2D weight net is not the product of two 1D rational bases
        px = pe = 2
        nx = ne = 4
        sx = BasisSpec(KnotVector(clamped_knots(nx, px, rng)), px)
        se = BasisSpec(KnotVector(clamped_knots(ne, pe, rng)), pe)
        net = np.ones((nx, ne))
        net[1, 2] = 5.0
        ev = nurbs_basis_2d(sx, se, net, 0.4, 0.6)
        flat = bspline_basis(sx.knots, px, 0.4)
        flate = bspline_basis(se.knots, pe, 0.6)
        outer = np.outer(flat.values, flate.values)
        assert not np.allclose(ev.values, outer)
        assert abs(ev.values.sum() - 1.0) < 1e-12

    def test_bad_net_shape(self, rng):
        sx = BasisSpec(KnotVector(clamped_knots(4, 2, rng)), 2)
        se = BasisSpec(KnotVector(clamped_knots(3, 1, rng)), 1)
        with pytest.raises(ShapeError):
            nurbs_basis_2d(sx, se, np.ones((3, 4)), 0.5, 0.5)


class TestGreville:
    def test_single_span_quadratic(self):
        kv = KnotVector([0, 0, 0, 1, 1, 1])
        np.testing.assert_allclose(greville_abscissae(kv, 2), [0.0, 0.5, 1.0])

    def test_documented_cubic_example(self):
        kv = KnotVector([0, 0, 0, 0, 0.5, 1, 1, 1, 1])
        np.testing.assert_allclose(
            greville_abscissae(kv, 3), [0.0, 1 / 6, 0.5, 5 / 6, 1.0]
        )

    def test_all_within_domain_and_increasing(self, rng):
        for _ in range(100):
            degree = int(rng.integers(1, 5))
            n = degree + int(rng.integers(1, 6))
            kv = KnotVector(clamped_knots(n, degree, rng))
            g = greville_abscissae(kv, degree)
            assert g[0] == 0.0 and g[-1] == 1.0
            assert (np.diff(g) > 0).all()
            assert len(g) == n

    def test_degree_zero_midpoints(self):
        kv = KnotVector([0.0, 0.25, 0.75, 1.0])
        np.testing.assert_allclose(greville_abscissae(kv, 0), [0.125, 0.5, 0.875])
