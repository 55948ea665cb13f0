import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaffney_lab import geometry as geo
from gaffney_lab import verify as v
from gaffney_lab.errors import BoundaryConditionError, DomainError
from gaffney_lab.fields import Polynomial, PolynomialField
from gaffney_lab.quadrature import QuadratureOrder

LOW = QuadratureOrder(12, 24, 8)


# residual bookkeeping

@pytest.mark.parametrize(
    "relation,lhs,rhs,tol,ok",
    [
        ("eq", 1.0, 1.0 + 1e-7, 1e-6, True),
        ("eq", 1.0, 1.0 + 1e-5, 1e-6, False),
        ("eq", 1e-12, -1e-12, 1e-6, True),
        ("le", 1.0 + 1e-8, 1.0, 1e-6, True),
        ("le", 1.1, 1.0, 1e-6, False),
        ("ge", 0.9, 1.0, 1e-6, False),
        ("lt", 1.0, 1.0, 0.5, False),
        ("gt", 2.0, 1.0, 0.0, True),
        ("abs", 1e-9, 0.0, 1e-8, True),
        ("abs", 1e-7, 0.0, 1e-8, False),
    ],
)
def test_identity_residual_relations(relation, lhs, rhs, tol, ok):
    r = v.IdentityResidual("x", lhs, rhs, tol, relation=relation)
    assert r.passed is ok
    rec = r.record()
    assert rec["pass"] is ok and rec["abs"] == pytest.approx(abs(lhs - rhs))
    json.dumps(rec)


def test_records_are_plain_json():
    r = v.IdentityResidual("x", np.float64(1.0), np.float64(1.0), 1e-9, location=np.array([0.5, 0.25]),
                           details={"v": np.arange(2), "k": np.int64(3)})
    assert json.loads(json.dumps(r.record()))["details"] == {"v": [0, 1], "k": 3}


# pointwise gap

@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gap_in_the_plane_is_twice_the_jacobian(seed):
    # for a 1-form in R^2 the gap equals 2 det(∂_j ω^i) by direct expansion
    jac = np.random.default_rng(seed).standard_normal((4, 2, 2))
    gap, upper, lower = v.pointwise_gap_array(jac, 2, 1)
    want = 2 * (jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 1, 0] * jac[:, 0, 1])
    np.testing.assert_allclose(gap, want, atol=1e-12)
    np.testing.assert_allclose(upper, want, atol=1e-12)
    np.testing.assert_allclose(lower, want, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_gap_forms_agree(n, seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, n))
    from math import comb

    jac = rng.standard_normal((3, n, comb(n, k)))
    gap, upper, lower = v.pointwise_gap_array(jac, n, k)
    np.testing.assert_allclose(upper, gap, atol=1e-10)
    np.testing.assert_allclose(lower, gap, atol=1e-10)


def test_gap_example_and_rank_errors():
    x, y = Polynomial.coordinate(2, 1), Polynomial.coordinate(2, 2)
    f = v.polynomial_form(2, 1, [y, x])  # d = δ = 0, |∇ω|² = 2
    assert v.pointwise_gap(f, [0.3, 0.1]) == pytest.approx((-2.0, -2.0, -2.0))
    with pytest.raises(DomainError):
        v.pointwise_gap_array(np.zeros((1, 2, 1)), 2, 2)


def test_compactly_supported_gap_integrates_to_zero():
    # bubble² vanishes to second order on the cube, so the gap has zero integral
    d = geo.box(3)
    rng = np.random.default_rng(1)
    bub = Polynomial.constant(3, 1.0)
    for i in (1, 2, 3):
        t = Polynomial.coordinate(3, i)
        bub = bub * (t * (1.0 - t)) ** 2
    f = v.polynomial_form(3, 2, [bub * v._random_poly(3, 2, rng) for _ in range(3)])
    rep = v.gaffney_quotient(d, f, "tangential", QuadratureOrder(4, 4, 12))
    assert rep.numerator == pytest.approx(rep.d_sq + rep.delta_sq, rel=1e-12)


# quotients and boundary conditions

def test_annulus_closed_form_values():
    assert v.annulus_quotient_closed_form(3, 1, 0.1) == pytest.approx(2 * 999 / 9)
    # n = k + 1 uses the logarithmic denominator
    r = 0.1
    want = 1 * (r**-2 - 1) / (-math.log(r))
    assert v.annulus_quotient_closed_form(3, 2, r) == pytest.approx(want)
    with pytest.raises(DomainError):
        v.annulus_quotient_closed_form(3, 3, 0.1)
    with pytest.raises(DomainError):
        v.annulus_quotient_closed_form(3, 1, 1.5)


@pytest.mark.parametrize("n,k", [(3, 1), (3, 2), (4, 2)])
def test_blowup_quadrature_matches_closed_form(n, k):
    rep = v.shell_quotient(n, k, 0.2)
    assert rep.quotient == pytest.approx(v.annulus_quotient_closed_form(n, k, 0.2), rel=1e-8)
    assert rep.bc_residual < 1e-12


def test_non_admissible_field_is_rejected():
    d = geo.ball(3)
    f = PolynomialField.random(3, 1, 2, np.random.default_rng(0))
    with pytest.raises(BoundaryConditionError):
        v.gaffney_quotient(d, f, "tangential", LOW)
    with pytest.raises(DomainError):
        v.gaffney_quotient(d, f, "sideways", LOW)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["ball", "annulus", "ellipsoid", "box", "box_with_hole", "torus"]),
       st.integers(0, 3), st.sampled_from(["tangential", "normal"]), st.integers(0, 2**32 - 1))
def test_admissible_fields_satisfy_their_condition(name, k, bc, seed):
    d = geo.make_domain(name, 3)
    f, text = v.admissible_field(d, k, bc, np.random.default_rng(seed))
    worst, scale, _ = v.boundary_condition_residual(d, f, bc, LOW)
    assert worst <= 1e-10 * max(scale, 1.0), text


def test_sinbump_ratio_rises_towards_one():
    vals = [v.maximizing_sequence_ratio(3, 1, m) for m in (5, 10, 20)]
    assert vals == sorted(vals) and vals[-1] < 1.0
    assert 1 - vals[-1] < 0.5 * (1 - vals[0])
    with pytest.raises(DomainError):
        v.maximizing_sequence_ratio(3, 1, 0.5)


# integral identities

@pytest.mark.parametrize("k", [1, 2])
def test_integral_identity_on_ellipsoid(k):
    d = geo.ellipsoid(3, [1.0, 1.5, 2.0])
    rng = np.random.default_rng(k)
    a = PolynomialField.random(3, k, 3, rng)
    b = PolynomialField.random(3, k, 3, rng)
    res = v.integral_identity_residual(d, a, b)
    assert res.passed, res.record()
    # the curvature sums carry real weight here
    assert abs(res.details["tangential_curvature_sum"] + res.details["normal_curvature_sum"]) > 1e-3 * res.scale


def test_integral_identity_rank_mismatch():
    d = geo.ball(3)
    rng = np.random.default_rng(0)
    with pytest.raises(DomainError):
        v.integral_identity_residual(d, PolynomialField.random(3, 1, 1, rng), PolynomialField.random(3, 2, 1, rng))


@pytest.mark.parametrize("bc", ["tangential", "normal"])
def test_piecewise_identity_on_ball(bc):
    d = geo.ball(3)
    f, _ = v.admissible_field(d, 1, bc, np.random.default_rng(4))
    res = v.piecewise_boundary_identity(d, f, bc)
    assert res.passed, res.record()
    assert abs(res.rhs) > 1e-6


@pytest.mark.parametrize("name", ["box", "box_with_hole"])
def test_polytopes_have_zero_gap(name):
    d = geo.make_domain(name, 3)
    f, _ = v.admissible_field(d, 2, "normal", np.random.default_rng(5))
    res = v.energy_equality(d, f, "normal", "polytope-equality", QuadratureOrder(4, 4, 12))
    assert res.passed, res.record()


def test_korn_margin_on_cube_and_curved_rejection():
    d = geo.box(3)
    u, _ = v.admissible_field(d, 1, "tangential", np.random.default_rng(6))
    res = v.korn_check(u, d, "tangential", QuadratureOrder(4, 4, 12))
    assert res.relation == "eq" and res.passed, res.record()
    assert res.details["pointwise_identity_residual"] < 1e-12
    assert np.max(v.korn_pointwise_residual(u, np.random.default_rng(7).random((5, 3)))) < 1e-12
    with pytest.raises(DomainError):
        v.korn_check(u, geo.ball(3))


def test_curvature_sum_on_ellipsoid():
    d = geo.ellipsoid(3, [1.0, 1.5, 2.0])
    x0 = d.faces[0].chart.sample(1, np.random.default_rng(8))[0]
    for I in [(), (1,), (2,)]:
        assert v.curvature_sum_check(d, x0, I).passed
    assert v.curvature_sum_check(d, x0, (1,), (2,)).passed


def test_quotient_duality_on_ball():
    d = geo.ball(3)
    f, _ = v.admissible_field(d, 1, "tangential", np.random.default_rng(9))
    assert v.quotient_duality(d, f, LOW).passed


def test_harness_finds_annulus_counterexample_only():
    ann = geo.annulus(3, 0.5)
    rep = v.sharp_inequality_harness(ann, 1, "tangential", 3, 0, extra=[(v.blowup_field(3, 1), "radial")])
    assert rep.counterexample is not None and rep.max_sharp_ratio > 1
    ball_rep = v.sharp_inequality_harness(geo.ball(3), 1, "tangential", 5, 0)
    assert ball_rep.counterexample is None and ball_rep.max_quotient < 1
    assert ball_rep.trials == 5 and len(ball_rep.constructions) == 5
