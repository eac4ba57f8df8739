import numpy as np
import pytest

import nurbskit as nk
from nurbskit import (
    BasisSpec,
    GeometryError,
    KnotVector,
    LineIntersectConfig,
    NurbsCurve,
    ProjectionConfig,
    ShapeError,
    closest_point,
    line_surface_intersection,
)
from nurbskit.queries import seed_projection

from oracles import dense_closest_point, random_smooth_surface


def straight_line(a, b):
    return NurbsCurve(
        BasisSpec(KnotVector([0.0, 0.0, 1.0, 1.0]), 1),
        np.array([a, b], dtype=np.float64),
    )


class TestSeedProjection:
    def test_exact_grid_point_wins(self, shell):
        target = shell.point(3 / 7, 2 / 7)
        xi, eta = seed_projection(shell, target, grid=8)
        assert (xi, eta) == (3 / 7, 2 / 7)

    def test_tie_breaks_lexicographically(self):
        # a flat square far below the target: the z term dominates the
        # squared distances, so the four samples nearest (0.5, 0.5) tie
        # bitwise and the first (lowest xi, then eta) wins
        s = nk.bilinear_patch((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0))
        xi, eta = seed_projection(s, np.array([0.5, 0.5, 100.0]), grid=4)
        assert (xi, eta) == (1 / 3, 1 / 3)

    def test_documented_seed_region(self, shell):
        # the target sits over the arc start at mid-width, so the seed lands
        # on xi = 0 within one grid cell of eta = 0.5
        xi, eta = seed_projection(shell, np.array([0.5, 2.0, 0.0]), grid=8)
        assert xi == 0.0
        assert abs(eta - 0.5) <= 1 / 14 + 1e-12


class TestClosestPoint:
    def test_on_surface_target_distance_zero(self, shell, rng):
        for _ in range(10):
            xi, eta = rng.uniform(0, 1, 2)
            target = shell.point(float(xi), float(eta))
            res = closest_point(shell, target)
            assert res.converged
            assert res.distance <= 1e-8

    def test_matches_dense_oracle(self, rng):
        # a dense seed keeps wavy surfaces from starting the iteration in
        # the wrong local basin; the iteration accuracy is what is under test
        cfg = ProjectionConfig(seed_grid=64)
        total = 0
        for _ in range(5):
            s = random_smooth_surface(rng)
            for _ in range(6):
                # stay a little off the surface so the grid resolution of
                # the oracle is not the limiting factor
                target = rng.uniform(-0.2, 1.2, 3)
                res = closest_point(s, target, cfg)
                _, _, ref = dense_closest_point(s, target, n=400)
                assert res.distance <= ref + 1e-3
                total += 1
        assert total == 30

    def test_interior_optimum_tangent_orthogonality(self, shell):
        target = np.array([0.5, 1.0, 1.0])
        res = closest_point(shell, target)
        assert res.converged
        assert 0.01 < res.xi < 0.99 and 0.01 < res.eta < 0.99
        tx, te = shell.tangents(res.xi, res.eta)
        gap = target - res.point
        scale = np.linalg.norm(gap)
        assert abs(np.dot(gap, tx)) / (scale * np.linalg.norm(tx)) < 1e-6
        assert abs(np.dot(gap, te)) / (scale * np.linalg.norm(te)) < 1e-6

    def test_history_monotone_non_increasing(self, shell, rng):
        for _ in range(10):
            target = rng.uniform(-0.5, 1.5, 3)
            res = closest_point(shell, target)
            h = np.array(res.history)
            assert (np.diff(h) <= 1e-12).all()

    def test_distance_field_consistency(self, shell):
        res = closest_point(shell, np.array([0.2, 0.3, 0.4]))
        assert res.distance == pytest.approx(
            np.linalg.norm(np.array([0.2, 0.3, 0.4]) - res.point), abs=1e-14
        )

    def test_result_parameters_in_domain(self, rng):
        s = random_smooth_surface(rng)
        for _ in range(10):
            res = closest_point(s, rng.uniform(-1, 2, 3))
            assert 0.0 <= res.xi <= 1.0 and 0.0 <= res.eta <= 1.0

    def test_edge_targets_clamp(self, shell):
        # far below the eta=0 edge: optimum pins to the boundary
        res = closest_point(shell, np.array([-3.0, 1.0, 0.0]))
        assert res.converged
        assert res.eta == 0.0

    def test_seed_override(self, shell):
        target = shell.point(0.25, 0.75)
        res = closest_point(shell, target, seed=(0.3, 0.7))
        assert res.distance <= 1e-8

    def test_config_validation(self):
        with pytest.raises(ShapeError):
            ProjectionConfig(damp=1.5)
        with pytest.raises(ShapeError):
            ProjectionConfig(max_iterations=0)
        with pytest.raises(ShapeError):
            ProjectionConfig(tolerance=-1.0)

    def test_requires_3d_target(self, shell):
        with pytest.raises(ShapeError):
            closest_point(shell, np.array([0.0, 1.0]))


class TestLineSurfaceIntersection:
    def test_vertical_probe_hits_quarter_arc(self, shell):
        line = straight_line([0.5, 0.6, -0.5], [0.5, 0.6, 1.5])
        res = line_surface_intersection(line, shell)
        assert res.converged
        # analytic: z = sqrt(1 - 0.6^2) = 0.8, within the 0.707-weight error
        assert res.point[2] == pytest.approx(0.8, abs=2e-3)
        assert res.residual <= 1e-8
        assert 0.0 <= res.xi_line <= 1.0

    def test_residual_is_line_to_surface_gap(self, shell):
        # a shallow crossing (y = 0.9) converges slowly, so give the
        # alternation more iterations than the default 50
        line = straight_line([0.2, 0.9, -0.5], [0.2, 0.9, 1.5])
        res = line_surface_intersection(line, shell, LineIntersectConfig(max_iterations=200))
        assert res.converged
        line_pt = line.point(res.xi_line)
        surf_pt = shell.point(res.xi, res.eta)
        np.testing.assert_allclose(res.point, surf_pt, atol=1e-15)
        assert res.residual == pytest.approx(np.linalg.norm(line_pt - surf_pt), abs=1e-15)
        assert res.residual <= 1e-8
        assert abs(res.point[1] - 0.9) <= 2e-3

    def test_oblique_line_against_bilinear_patch(self):
        s = nk.bilinear_patch((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0))
        line = straight_line([0.3, 0.3, -1.0], [0.5, 0.7, 1.0])
        res = line_surface_intersection(line, s)
        assert res.converged
        # the plane z=0 is crossed at the line's halfway point
        np.testing.assert_allclose(res.point, [0.4, 0.5, 0.0], atol=1e-8)

    def test_missing_line_reports_no_convergence(self, shell):
        line = straight_line([-5.0, 5.0, 5.0], [5.0, 5.0, 5.0])
        res = line_surface_intersection(line, shell)
        assert not res.converged
        assert res.residual > 1e-3

    def test_rejects_non_line_curve(self, shell):
        arc = NurbsCurve(
            BasisSpec(KnotVector([0, 0, 0, 1, 1, 1]), 2),
            np.array([[0.0, 0, 0], [1.0, 1, 0], [2.0, 0, 0]]),
        )
        with pytest.raises(GeometryError):
            line_surface_intersection(arc, shell)

    def test_rejects_degenerate_line(self, shell):
        with pytest.raises(GeometryError):
            line_surface_intersection(
                straight_line([1.0, 1, 1], [1.0, 1, 1]), shell
            )

    def test_config_validation(self):
        with pytest.raises(ShapeError):
            LineIntersectConfig(max_iterations=0)
        with pytest.raises(ShapeError):
            LineIntersectConfig(tolerance=0.0)
