"""Increasing multi-indices and their insertion/removal signs.

A multi-index is a plain tuple of strictly increasing 1-based integers.
``position`` is the only place where a multi-index becomes a 0-based array
offset; everything else works with the 1-based values directly.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb

from .errors import DomainError

MAX_DIM = 12

MultiIndex = tuple[int, ...]


def check_dimension(n: int) -> None:
    if not 1 <= n <= MAX_DIM:
        raise DomainError(f"dimension n={n} outside supported range 1..{MAX_DIM}")


def check_index(I: MultiIndex, n: int) -> None:
    """Raise unless ``I`` is strictly increasing with entries in 1..n."""
    if any(not 1 <= i <= n for i in I):
        raise DomainError(f"multi-index {I} has entries outside 1..{n}")
    if any(a >= b for a, b in zip(I, I[1:])):
        raise DomainError(f"multi-index {I} is not strictly increasing")


@lru_cache(maxsize=None)
def _enumerate(n: int, k: int) -> tuple[MultiIndex, ...]:
    return tuple(combinations(range(1, n + 1), k))


@lru_cache(maxsize=None)
def _positions(n: int, k: int) -> dict[MultiIndex, int]:
    return {I: p for p, I in enumerate(_enumerate(n, k))}


def enumerate_indices(n: int, k: int) -> list[MultiIndex]:
    """All increasing multi-indices of length ``k`` in 1..n, lexicographically.

    >>> enumerate_indices(3, 2)
    [(1, 2), (1, 3), (2, 3)]
    >>> enumerate_indices(4, 0)
    [()]
    """
    check_dimension(n)
    if not 0 <= k <= n:
        raise DomainError(f"rank k={k} outside 0..{n}")
    return list(_enumerate(n, k))


def count(n: int, k: int) -> int:
    """Number of increasing multi-indices, C(n, k)."""
    return comb(n, k)


def position(I: MultiIndex, n: int) -> int:
    """0-based lexicographic position of ``I`` among indices of its length."""
    check_dimension(n)
    try:
        return _positions(n, len(I))[tuple(I)]
    except KeyError:
        check_index(tuple(I), n)
        raise


def sort_sign(idx) -> tuple[int, MultiIndex | None]:
    """Sign of the permutation sorting ``idx`` and the sorted tuple.

    Returns ``(0, None)`` if an index is repeated, in which case the
    corresponding component of any alternating form vanishes.
    """
    idx = tuple(idx)
    if len(set(idx)) != len(idx):
        return 0, None
    inversions = sum(1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b])
    return (-1 if inversions % 2 else 1), tuple(sorted(idx))


def sign_insert(i: int, I: MultiIndex) -> tuple[int, MultiIndex]:
    """Insert ``i`` into ``I``: returns ``(s, J)`` with dx^J = s dx^i ∧ dx^I.

    ``s = (-1)^p`` where ``p`` counts the entries of ``I`` smaller than ``i``.

    >>> sign_insert(2, (1, 3))
    (-1, (1, 2, 3))
    """
    I = tuple(I)
    if i in I:
        raise DomainError(f"index {i} already present in {I}")
    if i < 1:
        raise DomainError(f"index {i} must be >= 1")
    p = sum(1 for a in I if a < i)
    return (-1 if p % 2 else 1), tuple(sorted(I + (i,)))


def remove(I: MultiIndex, i: int) -> tuple[int, MultiIndex]:
    """Remove ``i`` from ``I``: returns ``(sgn[i, I_î], I_î)``.

    >>> remove((1, 2, 3), 2)
    (-1, (1, 3))
    """
    I = tuple(I)
    if i not in I:
        raise DomainError(f"index {i} not present in {I}")
    rest = tuple(a for a in I if a != i)
    p = sum(1 for a in rest if a < i)
    return (-1 if p % 2 else 1), rest


def complement(I: MultiIndex, n: int) -> MultiIndex:
    """Increasing multi-index of the entries of 1..n not in ``I``."""
    s = set(I)
    return tuple(a for a in range(1, n + 1) if a not in s)


def sign_lemma_cases(n: int):
    """Yield every (first or second identity) sign-lemma case up to dimension n.

    Each item is ``(kind, I, i, j, lhs, rhs)``; the identity asserts lhs == rhs.
    """
    for m in range(2, n + 1):
        for I in _enumerate(n, m):
            for i in I:
                for j in I:
                    if i == j:
                        continue
                    _, Ii = remove(I, i)
                    _, Ij = remove(I, j)
                    _, Iij = remove(Ii, j)
                    lhs = sign_insert(i, Iij)[0] * sign_insert(j, Iij)[0]
                    rhs = -sign_insert(i, Ii)[0] * sign_insert(j, Ij)[0]
                    yield "first", I, i, j, lhs, rhs
    for m in range(0, n - 1):
        for I in _enumerate(n, m):
            out = complement(I, n)
            for i in out:
                for j in out:
                    if i == j:
                        continue
                    jI = sign_insert(j, I)[1]
                    iI = sign_insert(i, I)[1]
                    lhs = sign_insert(i, jI)[0] * sign_insert(j, iI)[0]
                    rhs = -sign_insert(i, I)[0] * sign_insert(j, I)[0]
                    yield "second", I, i, j, lhs, rhs
