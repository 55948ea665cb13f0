from itertools import permutations
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaffney_lab import multiindex as mi
from gaffney_lab.errors import DomainError
from gaffney_lab.exterior import KForm, dx, hodge, inner, interior, wedge, wedge_vectors


def brute_wedge(a: KForm, b: KForm) -> KForm:
    """a∧b from the alternating-tensor definition: permute and sign every index concatenation."""
    out = {}
    for I, x in zip(mi.enumerate_indices(a.n, a.k), a.coeffs):
        for J, y in zip(mi.enumerate_indices(b.n, b.k), b.coeffs):
            K = I + J
            if len(set(K)) < len(K):
                continue
            inv = sum(1 for p in range(len(K)) for q in range(p + 1, len(K)) if K[p] > K[q])
            key = tuple(sorted(K))
            out[key] = out.get(key, 0.0) + (-1) ** inv * x * y
    return KForm.from_dict(a.n, a.k + b.k, out)


def rand_form(rng, n, k, batch=()):
    return KForm(n, k, rng.standard_normal(batch + (comb(n, k),)))


forms = st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(0, n), st.integers(0, 2**32 - 1))
)


def test_basis_examples():
    assert dx(3, 1, 2).component((2, 1)) == -1.0
    assert dx(3, 2, 1).component((1, 2)) == -1.0
    assert dx(3, 1, 1).coeffs.sum() == 0
    e = wedge(dx(3, 1), dx(3, 2))
    np.testing.assert_array_equal(e.coeffs, dx(3, 1, 2).coeffs)


def test_component_rejects_wrong_length():
    with pytest.raises(DomainError):
        dx(3, 1, 2).component((1,))


def test_wedge_rank_overflow():
    with pytest.raises(DomainError):
        wedge(dx(3, 1, 2), dx(3, 2, 3))


def test_interior_needs_vector_and_positive_rank():
    with pytest.raises(DomainError):
        interior(dx(3, 1, 2), dx(3, 1, 2))
    with pytest.raises(DomainError):
        interior(dx(3, 1), KForm.scalar(3, 2.0))


def test_interior_examples():
    e1, e2 = dx(3, 1), dx(3, 2)
    np.testing.assert_array_equal(interior(e1, dx(3, 1, 2)).coeffs, e2.coeffs)
    np.testing.assert_array_equal(interior(e2, dx(3, 1, 2)).coeffs, (-e1).coeffs)


def test_hodge_examples_r3():
    np.testing.assert_array_equal(hodge(dx(3, 1)).coeffs, dx(3, 2, 3).coeffs)
    np.testing.assert_array_equal(hodge(dx(3, 2)).coeffs, (-dx(3, 1, 3)).coeffs)
    np.testing.assert_array_equal(hodge(KForm.scalar(3, 1.0)).coeffs, dx(3, 1, 2, 3).coeffs)


@settings(max_examples=60, deadline=None)
@given(forms, st.integers(0, 6))
def test_wedge_matches_brute_force(args, l):
    n, k, seed = args
    if k + l > n:
        l = n - k
    rng = np.random.default_rng(seed)
    a, b = rand_form(rng, n, k), rand_form(rng, n, l)
    np.testing.assert_allclose(wedge(a, b).coeffs, brute_wedge(a, b).coeffs, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(forms)
def test_graded_commutativity_and_associativity(args):
    n, k, seed = args
    rng = np.random.default_rng(seed)
    l = int(rng.integers(0, n - k + 1))
    a, b = rand_form(rng, n, k), rand_form(rng, n, l)
    np.testing.assert_allclose(wedge(a, b).coeffs, (-1) ** (k * l) * wedge(b, a).coeffs, atol=1e-12)
    if k + l < n:
        c = rand_form(rng, n, 1)
        np.testing.assert_allclose(wedge(wedge(a, b), c).coeffs, wedge(a, wedge(b, c)).coeffs, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(forms)
def test_hodge_defining_pairing(args):
    # ω∧λ = ⟨∗ω;λ⟩ dx^{1..n}
    n, k, seed = args
    rng = np.random.default_rng(seed)
    w, lam = rand_form(rng, n, k), rand_form(rng, n, n - k)
    top = wedge(w, lam).coeffs[0]
    assert abs(top - inner(hodge(w), lam)) < 1e-12 * (1 + abs(top))


@settings(max_examples=60, deadline=None)
@given(forms)
def test_interior_is_adjoint_of_wedge(args):
    n, k, seed = args
    if k == n:
        return
    rng = np.random.default_rng(seed)
    nu, a, b = rand_form(rng, n, 1), rand_form(rng, n, k), rand_form(rng, n, k + 1)
    assert abs(inner(wedge(nu, a), b) - inner(a, interior(nu, b))) < 1e-11


@settings(max_examples=60, deadline=None)
@given(forms)
def test_interior_antiderivation(args):
    # v⌟(a∧b) = (v⌟a)∧b + (−1)^k a∧(v⌟b)
    n, k, seed = args
    rng = np.random.default_rng(seed)
    if k == 0 or k == n:
        return
    v, a, b = rand_form(rng, n, 1), rand_form(rng, n, k), rand_form(rng, n, 1)
    lhs = interior(v, wedge(a, b))
    rhs = wedge(interior(v, a), b) + (-1) ** k * wedge(a, interior(v, b))
    np.testing.assert_allclose(lhs.coeffs, rhs.coeffs, atol=1e-11)


def test_batch_broadcasting():
    rng = np.random.default_rng(0)
    a = rand_form(rng, 4, 1, (5,))
    b = rand_form(rng, 4, 2, (5,))
    batched = wedge(a, b).coeffs
    for i in range(5):
        single = wedge(KForm(4, 1, a.coeffs[i]), KForm(4, 2, b.coeffs[i])).coeffs
        np.testing.assert_allclose(batched[i], single, atol=1e-14)
    assert inner(b, b).shape == (5,)


def test_wedge_vectors_are_minors():
    rng = np.random.default_rng(1)
    V = rng.standard_normal((3, 5))
    direct = wedge(wedge(KForm.vector(V[0]), KForm.vector(V[1])), KForm.vector(V[2]))
    np.testing.assert_allclose(wedge_vectors(V), direct.coeffs, atol=1e-12)
    assert wedge_vectors(np.zeros((0, 4))).tolist() == [1.0]


@pytest.mark.parametrize("n", range(1, 7))
def test_hodge_involution_sign(n):
    rng = np.random.default_rng(n)
    for k in range(n + 1):
        w = rand_form(rng, n, k)
        np.testing.assert_allclose(hodge(hodge(w)).coeffs, (-1) ** (k * (n - k)) * w.coeffs, atol=1e-14)


def test_norm_of_basis_forms_under_permutation():
    for p in permutations((1, 2, 4)):
        assert dx(5, *p).norm() == pytest.approx(1.0)
