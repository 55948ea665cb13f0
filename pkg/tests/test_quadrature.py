import dataclasses
import math

import numpy as np
import pytest

from gaffney_lab import geometry as geo
from gaffney_lab import quadrature as q
from gaffney_lab.errors import CoverageError


def ball_volume(n, R=1.0):
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * R**n


def sphere_area(n, R=1.0):
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2) * R ** (n - 1)


ONE = lambda X: np.ones(len(X))
ONE_B = lambda X, face: np.ones(len(X))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_ball_volume_and_area(n):
    d = geo.ball(n, 1.3)
    order = q.QuadratureOrder(8, 12, 4) if n >= 5 else None
    assert q.volume_integral(d, ONE, order).value == pytest.approx(ball_volume(n, 1.3), rel=1e-12)
    assert q.boundary_integral(d, ONE_B, order).value == pytest.approx(sphere_area(n, 1.3), rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_second_moment_of_ball(n):
    # ∫_B |x|² = |S^{n−1}| / (n + 2)
    d = geo.ball(n)
    got = q.volume_integral(d, lambda X: np.sum(X**2, axis=1)).value
    assert got == pytest.approx(sphere_area(n) / (n + 2), rel=1e-12)


def test_annulus_singular_radial_profiles():
    d = geo.annulus(3, 1e-3)
    s = lambda X: np.linalg.norm(X, axis=1)
    assert q.volume_integral(d, lambda X: s(X) ** -4).value == pytest.approx(4 * math.pi * 999, rel=1e-10)
    assert q.volume_integral(d, lambda X: s(X) ** -3).value == pytest.approx(4 * math.pi * math.log(1e3), rel=1e-10)


def test_annulus_boundary_measure():
    d = geo.annulus(4, 0.5)
    assert q.boundary_integral(d, ONE_B).value == pytest.approx(sphere_area(4) * (1 + 0.5**3), rel=1e-12)


def test_cube_and_holed_cube():
    cube = geo.box(3)
    assert q.boundary_integral(cube, ONE_B).value == pytest.approx(6.0, rel=1e-13)
    assert q.volume_integral(cube, lambda X: X[:, 0] ** 2 * X[:, 1]).value == pytest.approx(1 / 6, rel=1e-13)
    holed = geo.box_with_hole(3)
    assert q.volume_integral(holed, ONE).value == pytest.approx(1 - 1 / 27, rel=1e-13)
    assert q.boundary_integral(holed, ONE_B).value == pytest.approx(6 + 6 / 9, rel=1e-13)


def test_torus_volume_and_area():
    d = geo.torus(2.0, 0.5)
    assert q.volume_integral(d, ONE).value == pytest.approx(2 * math.pi**2 * 2.0 * 0.25, rel=1e-12)
    assert q.boundary_integral(d, ONE_B).value == pytest.approx(4 * math.pi**2 * 2.0 * 0.5, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_total_mean_curvature_of_sphere(n):
    d = geo.ball(n, 2.0)

    def H(X, face):
        return geo.face_frames(face, X)[3].sum(axis=1)

    assert q.boundary_integral(d, H).value == pytest.approx((n - 1) / 2.0 * sphere_area(n, 2.0), rel=1e-12)


def test_shell_measures():
    d = geo.shell(4, 2, 0.5)
    assert q.volume_integral(d, ONE).value == pytest.approx(ball_volume(3) * (1 - 0.125), rel=1e-12)
    assert q.boundary_integral(d, ONE_B).value == pytest.approx(d.area, rel=1e-12)


def test_error_estimate_and_doubling():
    d = geo.ball(3)
    f = lambda X: np.cos(3 * X[:, 0]) * np.exp(X[:, 1])
    low = q.QuadratureOrder(4, 6, 4)
    res = q.volume_integral(d, f, low)
    ref = q.volume_integral(d, f, q.QuadratureOrder(40, 80, 4)).value
    assert res.error > 0 and res.order == low
    assert abs(res.value - ref) < 10 * res.error
    doubled = q.volume_integral(d, f, low, tol=1e-12)
    assert doubled.order == low.scaled(2.0)
    assert abs(doubled.value - ref) < abs(res.value - ref)


def test_order_refinement_plateaus():
    d = geo.annulus(3, 0.2)
    f = lambda X: np.linalg.norm(X, axis=1) ** -2.5 * (1 + X[:, 2] ** 2)
    vals = [q.volume_integral(d, f, q.QuadratureOrder(m, 2 * m, 4)).value for m in (8, 16, 32)]
    assert abs(vals[2] - vals[1]) < 1e-12 * abs(vals[2])


def test_summation_is_chunk_independent():
    d = geo.ball(3)
    rule = q.volume_rule(d)
    f = lambda X: np.stack([np.sin(X[:, 0]), X[:, 1] ** 3 + 1.0], axis=1)
    a = q.integrate(rule, f)
    b = q.integrate(rule, f, chunk=97)
    assert np.array_equal(a, b)


def test_coverage_error_when_faces_miss_area():
    d = dataclasses.replace(geo.ball(3), area=4 * math.pi * 1.01, _rule_cache={})
    with pytest.raises(CoverageError):
        q.boundary_rule(d)


def test_default_orders_shrink_with_dimension():
    orders = [q.default_order(n) for n in (3, 4, 5)]
    sizes = [o.angular for o in orders]
    assert sizes == sorted(sizes, reverse=True)
    assert q.QuadratureOrder(10, 20, 6).scaled(0.5) == q.QuadratureOrder(5, 10, 3)
