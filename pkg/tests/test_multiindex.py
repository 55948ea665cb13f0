from itertools import combinations, permutations

import pytest
from hypothesis import given, strategies as st

from gaffney_lab import multiindex as mi
from gaffney_lab.errors import DomainError


def brute_sign(seq):
    """Sign of the permutation sorting ``seq`` by counting inversions."""
    inv = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return -1 if inv % 2 else 1


def test_enumerate_examples():
    assert mi.enumerate_indices(3, 2) == [(1, 2), (1, 3), (2, 3)]
    assert mi.enumerate_indices(4, 0) == [()]
    six = mi.enumerate_indices(6, 3)
    assert len(six) == 20 and six[0] == (1, 2, 3) and six[-1] == (4, 5, 6)


@pytest.mark.parametrize("n", range(1, 7))
def test_enumerate_matches_combinations(n):
    for k in range(n + 1):
        got = mi.enumerate_indices(n, k)
        assert got == sorted(combinations(range(1, n + 1), k))
        assert [mi.position(I, n) for I in got] == list(range(len(got)))


@pytest.mark.parametrize("k", [-1, 5])
def test_enumerate_rejects_bad_rank(k):
    with pytest.raises(DomainError):
        mi.enumerate_indices(4, k)


def test_dimension_cap():
    assert len(mi.enumerate_indices(12, 6)) == 924
    with pytest.raises(DomainError):
        mi.enumerate_indices(13, 1)


def test_sign_insert_examples():
    assert mi.sign_insert(1, (2, 3)) == (1, (1, 2, 3))
    assert mi.sign_insert(2, (1, 3)) == (-1, (1, 2, 3))
    assert mi.sign_insert(3, (1, 2)) == (1, (1, 2, 3))
    with pytest.raises(DomainError):
        mi.sign_insert(2, (1, 2))


def test_remove_examples():
    assert mi.remove((1, 2, 3), 2) == (-1, (1, 3))
    assert mi.remove((5,), 5) == (1, ())
    assert mi.remove((2, 4, 6), 6) == (1, (2, 4))
    with pytest.raises(DomainError):
        mi.remove((1, 3), 2)


@given(st.integers(1, 8).flatmap(lambda n: st.tuples(st.just(n), st.sets(st.integers(1, n)), st.integers(1, n))))
def test_insert_remove_round_trip(args):
    n, I, i = args
    I = tuple(sorted(I - {i}))
    s, J = mi.sign_insert(i, I)
    assert mi.remove(J, i) == (s, I)
    # sign_insert moves dx^i past the entries smaller than i
    assert s == brute_sign((i,) + I)


@given(st.lists(st.integers(1, 7), max_size=7))
def test_sort_sign_against_inversions(seq):
    s, J = mi.sort_sign(tuple(seq))
    if len(set(seq)) < len(seq):
        assert s == 0 and J is None
    else:
        assert J == tuple(sorted(seq)) and s == brute_sign(seq)


@pytest.mark.parametrize("n", range(1, 7))
def test_sign_lemma_exhaustive(n):
    cases = list(mi.sign_lemma_cases(n))
    assert all(lhs == rhs for *_, lhs, rhs in cases)


def test_sign_lemma_case_count():
    total = sum(1 for n in range(1, 7) for _ in mi.sign_lemma_cases(n))
    assert total > 1000


def test_rank_one_degenerate_case():
    for i, j in permutations(range(1, 6), 2):
        assert mi.sign_insert(i, (j,))[0] * mi.sign_insert(j, (i,))[0] == -1


def test_complement():
    assert mi.complement((2, 4), 5) == (1, 3, 5)
    assert mi.complement((), 3) == (1, 2, 3)
