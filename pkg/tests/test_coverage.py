import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PENTAGON, points_in, seeds
from swarmcover.coverage import (
    UniformDensity,
    cell_center_of_mass,
    cell_mass,
    coverage_cost,
    coverage_gradient,
    coverage_report,
    lloyd_velocity,
)
from swarmcover.geom2d import ConvexPolygon, GeometryError, Vec2


def fd_gradient(pos, arena, h=1e-5):
    pos = np.asarray(pos, dtype=float)
    g = np.zeros_like(pos)
    for i in range(len(pos)):
        for k in range(2):
            up, dn = pos.copy(), pos.copy()
            up[i, k] += h
            dn[i, k] -= h
            g[i, k] = (coverage_cost(up, arena) - coverage_cost(dn, arena)) / (2 * h)
    return g


def lloyd_fixed_point(pos, arena, iters=3000):
    pos = np.asarray(pos, dtype=float)
    for _ in range(iters):
        pos = np.array([c.as_tuple() for c in coverage_report(pos, arena).centroids])
    return pos


class TestDensity:
    def test_must_be_positive(self):
        with pytest.raises(ValueError):
            UniformDensity(0)


class TestMass:
    def test_unit(self, square):
        assert cell_mass(square) == 1.0

    def test_pentagon(self, pentagon):
        assert cell_mass(pentagon) == pytest.approx(42.5)

    def test_linear_in_density(self, square):
        assert cell_mass(square, UniformDensity(2.0)) == 2.0

    def test_center_of_mass(self, square, pentagon):
        assert cell_center_of_mass(square).as_tuple() == pytest.approx((0.5, 0.5))
        assert cell_center_of_mass(pentagon).as_tuple() == pytest.approx((4.0118, 3.4549), abs=1e-4)

    def test_degenerate_center(self):
        with pytest.raises(GeometryError):
            cell_center_of_mass(ConvexPolygon.empty())


class TestCost:
    def test_single_at_centroid(self, square):
        assert coverage_cost([(0.5, 0.5)], square) == pytest.approx(1 / 6)

    def test_single_at_corner(self, square):
        assert coverage_cost([(0, 0)], square) == pytest.approx(2 / 3)

    def test_two_symmetric(self, square):
        assert coverage_cost([(0.25, 0.5), (0.75, 0.5)], square) == pytest.approx(5 / 48)

    def test_density_scales_cost(self, square):
        pos = [(0.2, 0.3), (0.7, 0.6)]
        assert coverage_cost(pos, square, UniformDensity(3)) == pytest.approx(3 * coverage_cost(pos, square))


class TestGradient:
    def test_at_centroid(self, square):
        (g,) = coverage_gradient([(0.5, 0.5)], square)
        assert g.as_tuple() == pytest.approx((0, 0), abs=1e-15)

    def test_off_centre(self, square):
        (g,) = coverage_gradient([(0.3, 0.5)], square)
        assert g.as_tuple() == pytest.approx((-0.4, 0.0), abs=1e-14)
        assert fd_gradient([(0.3, 0.5)], square)[0] == pytest.approx([-0.4, 0.0], abs=1e-8)


class TestLloyd:
    def test_converged(self):
        assert lloyd_velocity((1, 2), (1, 2), 1.0) == Vec2(0, 0)

    def test_unit_gain(self):
        assert lloyd_velocity((0, 0), (1, 0), 1.0) == Vec2(1, 0)

    def test_linear_in_gain(self):
        a = lloyd_velocity((0.3, 0.1), (1, 2), 1.5)
        b = lloyd_velocity((0.3, 0.1), (1, 2), 3.0)
        assert b.as_tuple() == pytest.approx((2 * a.x, 2 * a.y))

    def test_gain_positive(self):
        with pytest.raises(ValueError):
            lloyd_velocity((0, 0), (1, 0), 0.0)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 8))
def test_gradient_matches_finite_differences(seed, n):
    pos = points_in(PENTAGON, np.random.default_rng(seed), n)
    analytic = np.array([g.as_tuple() for g in coverage_gradient(pos, PENTAGON)])
    numeric = fd_gradient(pos, PENTAGON)
    assert np.allclose(analytic, numeric, rtol=1e-4, atol=1e-6)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 8), st.floats(0.05, 1.0))
def test_lloyd_descent(seed, n, c_dt):
    pos = points_in(PENTAGON, np.random.default_rng(seed), n)
    cost = coverage_cost(pos, PENTAGON)
    for _ in range(30):
        rep = coverage_report(pos, PENTAGON)
        cm = np.array([c.as_tuple() for c in rep.centroids])
        pos = pos + c_dt * (cm - pos)
        new = coverage_cost(pos, PENTAGON)
        assert new <= cost + 1e-9
        cost = new


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(1, 6))
def test_stationary_at_centroidal_configuration(seed, n):
    pos = lloyd_fixed_point(points_in(PENTAGON, np.random.default_rng(seed), n), PENTAGON)
    rep = coverage_report(pos, PENTAGON)
    grads = coverage_gradient(pos, PENTAGON)
    assert max(g.norm() for g in grads) < 1e-6
    for p, cm in zip(pos, rep.centroids):
        assert lloyd_velocity(p, cm, 1.0).norm() < 1e-6
    assert all(m > 0 for m in rep.masses)
    assert rep.cost >= 0
