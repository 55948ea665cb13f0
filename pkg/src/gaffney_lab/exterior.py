"""Pointwise algebra of k-forms on R^n.

A :class:`KForm` stores dense coefficients in lexicographic multi-index
order.  The coefficient array may carry leading batch axes, so one
``KForm`` can represent a form evaluated at many points; all operations
broadcast over those axes.

The sign bookkeeping lives in :func:`gaffney_lab.multiindex.sort_sign`.
The bilinear tables below are generated from it once per shape and cached.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from . import multiindex as mi
from .errors import DomainError


@dataclass(frozen=True, eq=False)
class KForm:
    """Element (or batch of elements) of Λ^k(R^n).

    Attributes:
        n: ambient dimension.
        k: form degree.
        coeffs: array of shape ``batch + (C(n, k),)``.
    """

    n: int
    k: int
    coeffs: np.ndarray

    def __post_init__(self):
        mi.check_dimension(self.n)
        if not 0 <= self.k <= self.n:
            raise DomainError(f"rank k={self.k} outside 0..{self.n}")
        c = np.array(self.coeffs, dtype=float)
        if c.ndim == 0:
            c = c.reshape(1)
        if c.shape[-1] != comb(self.n, self.k):
            raise DomainError(
                f"expected {comb(self.n, self.k)} coefficients for k={self.k}, n={self.n}, got {c.shape[-1]}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # construction helpers
    @classmethod
    def zero(cls, n: int, k: int, batch: tuple[int, ...] = ()) -> "KForm":
        return cls(n, k, np.zeros(batch + (comb(n, k),)))

    @classmethod
    def basis(cls, n: int, I) -> "KForm":
        """The form dx^{i1}∧...∧dx^{ik}; ``I`` may be unsorted (sign applied)."""
        s, J = mi.sort_sign(I)
        c = np.zeros(comb(n, len(tuple(I))))
        if s:
            c[mi.position(J, n)] = s
        return cls(n, len(tuple(I)), c)

    @classmethod
    def from_dict(cls, n: int, k: int, entries: dict) -> "KForm":
        c = np.zeros(comb(n, k))
        for I, v in entries.items():
            s, J = mi.sort_sign(I)
            if s:
                c[mi.position(J, n)] += s * v
        return cls(n, k, c)

    @classmethod
    def vector(cls, v) -> "KForm":
        """1-form with coefficients ``v`` (the last axis indexes dx^1..dx^n)."""
        v = np.asarray(v, dtype=float)
        return cls(v.shape[-1], 1, v)

    @classmethod
    def scalar(cls, n: int, value) -> "KForm":
        return cls(n, 0, np.asarray(value, dtype=float)[..., None])

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[:-1]

    def component(self, idx) -> np.ndarray | float:
        """Coefficient at a generalized index tuple.

        Unsorted indices pick up the permutation sign; repeated ones give 0.
        """
        idx = tuple(idx)
        if len(idx) != self.k:
            raise DomainError(f"index {idx} has length {len(idx)}, form has rank {self.k}")
        s, J = mi.sort_sign(idx)
        if s == 0:
            return np.zeros(self.batch_shape) if self.batch_shape else 0.0
        mi.check_index(J, self.n)
        v = s * self.coeffs[..., mi.position(J, self.n)]
        return v if self.batch_shape else float(v)

    def _same_space(self, other: "KForm") -> None:
        if self.n != other.n or self.k != other.k:
            raise DomainError(f"form spaces differ: (n={self.n}, k={self.k}) vs (n={other.n}, k={other.k})")

    def __add__(self, other: "KForm") -> "KForm":
        self._same_space(other)
        return KForm(self.n, self.k, self.coeffs + other.coeffs)

    def __sub__(self, other: "KForm") -> "KForm":
        self._same_space(other)
        return KForm(self.n, self.k, self.coeffs - other.coeffs)

    def __neg__(self) -> "KForm":
        return KForm(self.n, self.k, -self.coeffs)

    def __mul__(self, s) -> "KForm":
        s = np.asarray(s, dtype=float)
        return KForm(self.n, self.k, self.coeffs * s[..., None])

    __rmul__ = __mul__

    def __truediv__(self, s) -> "KForm":
        return self * (1.0 / np.asarray(s, dtype=float))

    def norm(self):
        return np.sqrt(inner(self, self))

    def __repr__(self) -> str:
        terms = []
        if not self.batch_shape:
            for I, c in zip(mi.enumerate_indices(self.n, self.k), self.coeffs):
                if c != 0:
                    terms.append(f"{c:+.6g} dx^{''.join(map(str, I)) or '()'}")
        body = " ".join(terms) if terms else f"shape={self.coeffs.shape}"
        return f"KForm(n={self.n}, k={self.k}, {body})"


def dx(n: int, *idx: int) -> KForm:
    """Basis form dx^{idx[0]}∧dx^{idx[1]}∧... in R^n (``dx(n)`` is the constant 1)."""
    return KForm.basis(n, idx)


# cached sign tables

@lru_cache(maxsize=None)
def wedge_table(n: int, k: int, l: int) -> np.ndarray:
    """Dense table W with (a∧b)^K = Σ W[I, J, K] a^I b^J."""
    if k + l > n:
        raise DomainError(f"wedge of ranks {k} and {l} exceeds dimension {n}")
    rows, cols = mi.enumerate_indices(n, k), mi.enumerate_indices(n, l)
    W = np.zeros((len(rows), len(cols), comb(n, k + l)))
    for p, I in enumerate(rows):
        for q, J in enumerate(cols):
            s, K = mi.sort_sign(I + J)
            if s:
                W[p, q, mi.position(K, n)] = s
    W.setflags(write=False)
    return W


@lru_cache(maxsize=None)
def interior_table(n: int, k: int) -> np.ndarray:
    """Dense table T with (v⌟w)^A = Σ_j Σ_I T[j, I, A] v^j w^I for w of rank k."""
    if k < 1:
        raise DomainError("interior product needs rank k >= 1")
    T = np.zeros((n, comb(n, k), comb(n, k - 1)))
    for a, A in enumerate(mi.enumerate_indices(n, k - 1)):
        for j in range(1, n + 1):
            s, K = mi.sort_sign((j,) + A)
            if s:
                T[j - 1, mi.position(K, n), a] = s
    T.setflags(write=False)
    return T


@lru_cache(maxsize=None)
def hodge_matrix(n: int, k: int) -> np.ndarray:
    """Matrix H with (∗ω)^J = Σ_I H[I, J] ω^I."""
    H = np.zeros((comb(n, k), comb(n, n - k)))
    for p, I in enumerate(mi.enumerate_indices(n, k)):
        Ic = mi.complement(I, n)
        s, _ = mi.sort_sign(I + Ic)
        H[p, mi.position(Ic, n)] = s
    H.setflags(write=False)
    return H


# array-level kernels (last axis = coefficients)

def wedge_array(a: np.ndarray, b: np.ndarray, n: int, k: int, l: int) -> np.ndarray:
    W = wedge_table(n, k, l)
    outer = a[..., :, None] * b[..., None, :]
    return outer.reshape(outer.shape[:-2] + (-1,)) @ W.reshape(-1, W.shape[-1])


def interior_array(v: np.ndarray, w: np.ndarray, n: int, k: int) -> np.ndarray:
    T = interior_table(n, k)
    outer = v[..., :, None] * w[..., None, :]
    return outer.reshape(outer.shape[:-2] + (-1,)) @ T.reshape(-1, T.shape[-1])


def hodge_array(w: np.ndarray, n: int, k: int) -> np.ndarray:
    return w @ hodge_matrix(n, k)


# KForm-level operations

def _check_n(a: KForm, b: KForm) -> None:
    if a.n != b.n:
        raise DomainError(f"dimension mismatch: {a.n} vs {b.n}")


def wedge(a: KForm, b: KForm) -> KForm:
    """Exterior product a∧b of a k-form and an l-form."""
    _check_n(a, b)
    if a.k + b.k > a.n:
        raise DomainError(f"wedge of ranks {a.k} and {b.k} exceeds dimension {a.n}")
    return KForm(a.n, a.k + b.k, wedge_array(a.coeffs, b.coeffs, a.n, a.k, b.k))


def interior(v: KForm, w: KForm) -> KForm:
    """Interior product v⌟w of a 1-form (vector) with a k-form, k >= 1."""
    _check_n(v, w)
    if v.k != 1:
        raise DomainError(f"interior product needs a 1-form on the left, got rank {v.k}")
    if w.k < 1:
        raise DomainError("interior product with a 0-form is undefined")
    return KForm(w.n, w.k - 1, interior_array(v.coeffs, w.coeffs, w.n, w.k))


def inner(a: KForm, b: KForm):
    """Scalar product: sum over increasing multi-indices of a^I b^I."""
    _check_n(a, b)
    if a.k != b.k:
        raise DomainError(f"rank mismatch: {a.k} vs {b.k}")
    out = np.sum(a.coeffs * b.coeffs, axis=-1)
    return float(out) if out.ndim == 0 else out


def hodge(w: KForm) -> KForm:
    """Hodge star, defined by ω∧λ = ⟨∗ω;λ⟩ dx^{1..n}."""
    return KForm(w.n, w.n - w.k, hodge_array(w.coeffs, w.n, w.k))


def norm(w: KForm):
    return w.norm()


def wedge_vectors(vectors: np.ndarray) -> np.ndarray:
    """Coefficients of v_1∧...∧v_m for stacked vectors of shape ``batch + (m, n)``.

    Component J is the m×m minor of the rows on the columns J.
    """
    vectors = np.asarray(vectors, dtype=float)
    m, n = vectors.shape[-2:]
    batch = vectors.shape[:-2]
    if m == 0:
        return np.ones(batch + (1,))
    cols = mi.enumerate_indices(n, m)
    out = np.empty(batch + (len(cols),))
    for p, J in enumerate(cols):
        out[..., p] = np.linalg.det(vectors[..., [j - 1 for j in J]])
    return out
