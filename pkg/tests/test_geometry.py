from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaffney_lab import geometry as geo
from gaffney_lab.errors import DomainError
from gaffney_lab.exterior import KForm, inner, interior, wedge


def face_named(d, name):
    return next(f for f in d.faces if f.name == name)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("R", [0.5, 1.0, 3.0])
def test_sphere_curvatures(n, R):
    d = geo.ball(n, R)
    X = d.faces[0].chart.sample(20, np.random.default_rng(0))
    np.testing.assert_allclose(np.linalg.norm(X, axis=1), R)
    _, _, E, gam = geo.face_frames(d.faces[0], X)
    np.testing.assert_allclose(gam, 1.0 / R, atol=1e-12)
    # principal directions are orthonormal and tangent
    np.testing.assert_allclose(np.einsum("nia,nja->nij", E, E), np.broadcast_to(np.eye(n - 1), (20, n - 1, n - 1)), atol=1e-12)
    np.testing.assert_allclose(np.einsum("nia,na->ni", E, X), 0.0, atol=1e-12)


@pytest.mark.parametrize("n,k", [(3, 2), (4, 2), (4, 3), (5, 3)])
def test_inner_cylinder_curvatures(n, k):
    r = 0.4
    face = face_named(geo.shell(n, k, r), "inner cylinder")
    _, _, _, gam = geo.face_frames(face, face.chart.sample(20, np.random.default_rng(1)))
    want = np.sort([-1.0 / r] * (n - k) + [0.0] * (k - 1))
    np.testing.assert_allclose(np.sort(gam, axis=1), np.broadcast_to(want, gam.shape), atol=1e-10)


def test_inner_annulus_normal_points_inward():
    d = geo.annulus(3, 0.5)
    x = np.array([0.0, 0.3, 0.4])
    np.testing.assert_allclose(geo.normal(d, x).coeffs, -x / 0.5)
    np.testing.assert_allclose(geo.frame(d, x).gamma, [-2.0, -2.0])


def test_ellipsoid_pole_curvatures():
    axes = np.array([1.0, 1.5, 2.0])
    d = geo.ellipsoid(3, axes)
    for i in range(3):
        x = np.zeros(3)
        x[i] = axes[i]
        want = sorted(axes[i] / axes[j] ** 2 for j in range(3) if j != i)
        np.testing.assert_allclose(geo.frame(d, x).gamma, want, atol=1e-12)


def test_torus_curvatures_and_convexity():
    d = geo.torus()
    np.testing.assert_allclose(geo.frame(d, [2.5, 0.0, 0.0]).gamma, [1 / 2.5, 2.0], atol=1e-12)
    np.testing.assert_allclose(geo.frame(d, [1.5, 0.0, 0.0]).gamma, [-1 / 1.5, 2.0], atol=1e-12)
    m1, w1 = geo.k_convexity(d, 1)
    m2, _ = geo.k_convexity(d, 2)
    assert m1 < 0 and np.hypot(w1[0], w1[1]) < 2.0
    assert m2 > 0


def test_k_convexity_catalog():
    assert geo.k_convexity(geo.ball(4), 1)[0] == pytest.approx(1.0)
    m, witness = geo.k_convexity(geo.annulus(3, 0.5), 1)
    assert m == pytest.approx(-2.0) and np.linalg.norm(witness) == pytest.approx(0.5)
    assert geo.k_convexity(geo.box(3), 2)[0] == 0.0
    with pytest.raises(DomainError):
        geo.k_convexity(geo.ball(3), 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_jacobi_matches_numpy_eigh(m, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((5, m, m))
    S = A + np.transpose(A, (0, 2, 1))
    w, V = geo.jacobi_eigh(S)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(S), atol=1e-12)
    np.testing.assert_allclose(S @ V, V * w[:, None, :], atol=1e-11)
    np.testing.assert_allclose(np.transpose(V, (0, 2, 1)) @ V, np.broadcast_to(np.eye(m), (5, m, m)), atol=1e-12)


def test_jacobi_repeated_eigenvalues():
    w, V = geo.jacobi_eigh(np.diag([2.0, 2.0, -1.0])[None])
    np.testing.assert_allclose(w[0], [-1.0, 2.0, 2.0])


@pytest.mark.parametrize("n", [3, 4])
def test_sphere_quadratic_forms(n):
    d = geo.ball(n)
    x = np.zeros(n)
    x[0] = 1.0
    fr = geo.frame(d, x)
    E1 = fr.direction(1)
    assert geo.L_nu_quadratic(d, x, E1, E1) == pytest.approx(1.0)
    assert geo.K_nu_quadratic(d, x, fr.nu, fr.nu) == pytest.approx(n - 1.0)
    # tangential forms contribute nothing to K, normal ones nothing to L
    assert geo.K_nu_quadratic(d, x, E1, E1) == pytest.approx(0.0, abs=1e-14)
    assert geo.L_nu_quadratic(d, x, fr.nu, fr.nu) == pytest.approx(0.0, abs=1e-14)


def test_ellipsoid_operators_match_quadratic_forms():
    d = geo.ellipsoid(3, [1.0, 1.5, 2.0])
    rng = np.random.default_rng(3)
    x = d.faces[0].chart.sample(1, rng)[0]
    nu = geo.normal(d, x)
    for k in (1, 2):
        a = KForm(3, k, rng.standard_normal(comb(3, k)))
        b = KForm(3, k, rng.standard_normal(comb(3, k)))
        na, nb = interior(nu, a), interior(nu, b)
        assert inner(geo.K_nu(d, x, na), nb) == pytest.approx(geo.K_nu_quadratic(d, x, a, b), abs=1e-12)
        wa, wb = wedge(nu, a), wedge(nu, b)
        assert inner(geo.L_nu(d, x, wa), wb) == pytest.approx(geo.L_nu_quadratic(d, x, a, b), abs=1e-12)


def test_rotated_frame_field():
    d = geo.ellipsoid(3, [1.0, 1.5, 2.0])
    x0 = d.faces[0].chart.sample(1, np.random.default_rng(5))[0]
    nu_field, E_fields, fr = geo.frame_fields(d, x0)
    for E, e0 in zip(E_fields, fr.E):
        np.testing.assert_allclose(E.values(x0[None])[0], e0, atol=1e-14)
    X = x0 + 0.05 * np.random.default_rng(6).standard_normal((8, 3))
    nu = nu_field.values(X)
    vals = np.stack([E.values(X) for E in E_fields], axis=1)
    np.testing.assert_allclose(np.einsum("nia,na->ni", vals, nu), 0.0, atol=1e-13)
    np.testing.assert_allclose(np.einsum("nia,nja->nij", vals, vals), np.broadcast_to(np.eye(2), (8, 2, 2)), atol=1e-13)
    h = 1e-6
    for E in E_fields:
        jac = E.jet(X)[1]
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            np.testing.assert_allclose(jac[:, j], (E.values(X + e) - E.values(X - e)) / (2 * h), atol=1e-7)


def test_frame_rejects_interior_points():
    with pytest.raises(DomainError):
        geo.frame(geo.ball(3), [0.2, 0.0, 0.0])


def test_make_domain_errors():
    with pytest.raises(DomainError):
        geo.make_domain("torus", 4)
    with pytest.raises(DomainError):
        geo.make_domain("shell", 3)
    with pytest.raises(DomainError):
        geo.make_domain("banana", 3)
    with pytest.raises(DomainError):
        geo.shell(3, 2, 1.5)
    assert geo.make_domain("shell", 3, k=1, r=0.3).name == "annulus"


def test_domain_membership_and_faces():
    d = geo.box_with_hole(3)
    assert d.contains([[0.1, 0.5, 0.5]])[0]
    assert not d.contains([[0.5, 0.5, 0.5]])[0]
    assert d.face_of([0.0, 0.3, 0.7]).flat
    X = geo.boundary_samples(d, 60)
    assert len(X) == 60
