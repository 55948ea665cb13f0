"""Form-valued fields with exact first partial derivatives.

Every field implements ``jet(X)`` which, for points ``X`` of shape (N, n),
returns the coefficient values, shape (N, C), and the Jacobian, shape
(N, n, C) with ``jac[:, j, I] = ∂ω^I/∂x_{j+1}``.  Fields built from
polynomials or combinators of them can also return their partial
derivatives as fields (``partial_field``), which gives exact second
derivatives without nested finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb
from typing import Callable, Sequence

import numpy as np

from . import multiindex as mi
from .errors import DomainError, SingularGradientError
from .exterior import (
    KForm,
    hodge_matrix,
    interior_array,
    interior_table,
    wedge_array,
    wedge_table,
)


def as_points(X, n: int) -> tuple[np.ndarray, bool]:
    """Return ``X`` as an (N, n) float array and whether it was a single point."""
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[-1] != n:
        raise DomainError(f"points have dimension {X.shape[-1]}, field lives in R^{n}")
    return X, single


# polynomials

class Polynomial:
    """Multivariate polynomial with scalar or vector coefficients.

    Args:
        n: number of variables.
        exps: integer exponent array of shape (T, n).
        coefs: coefficients of shape (T,) or (T, C).
    """

    def __init__(self, n: int, exps, coefs):
        exps = np.asarray(exps, dtype=int).reshape(-1, n)
        coefs = np.asarray(coefs, dtype=float)
        if coefs.shape[0] != exps.shape[0]:
            raise DomainError("one coefficient row per monomial required")
        self.n = n
        self.exps = exps
        self.coefs = coefs
        self.degree = int(exps.sum(axis=1).max()) if len(exps) else 0

    @classmethod
    def constant(cls, n: int, c: float) -> "Polynomial":
        return cls(n, np.zeros((1, n), dtype=int), [float(c)])

    @classmethod
    def coordinate(cls, n: int, i: int) -> "Polynomial":
        """The polynomial x_i (1-based)."""
        e = np.zeros((1, n), dtype=int)
        e[0, i - 1] = 1
        return cls(n, e, [1.0])

    @classmethod
    def full_basis(cls, n: int, degree: int, coefs) -> "Polynomial":
        return cls(n, monomial_exponents(n, degree), coefs)

    @classmethod
    def sum_of_squares(cls, n: int, axes: Sequence[int] | None = None, scales=None) -> "Polynomial":
        """Σ (x_i / a_i)^2 over the given 1-based axes."""
        axes = list(range(1, n + 1)) if axes is None else list(axes)
        scales = np.ones(len(axes)) if scales is None else np.asarray(scales, dtype=float)
        exps = np.zeros((len(axes), n), dtype=int)
        for t, i in enumerate(axes):
            exps[t, i - 1] = 2
        return cls(n, exps, 1.0 / scales**2)

    def _combine(self) -> "Polynomial":
        terms: dict[tuple, np.ndarray] = {}
        for e, c in zip(map(tuple, self.exps), self.coefs):
            terms[e] = terms.get(e, 0.0) + c
        keys = sorted(terms)
        if not keys:
            return Polynomial(self.n, np.zeros((1, self.n), dtype=int), np.zeros((1,) + self.coefs.shape[1:]))
        return Polynomial(self.n, np.array(keys), np.array([terms[k] for k in keys]))

    def __add__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.n, other)
        return Polynomial(
            self.n, np.vstack([self.exps, other.exps]), np.concatenate([self.coefs, other.coefs])
        )._combine()

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.n, self.exps, -self.coefs)

    def __sub__(self, other) -> "Polynomial":
        return self + (-other if isinstance(other, Polynomial) else -float(other))

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return Polynomial(self.n, self.exps, self.coefs * float(other))
        if self.coefs.ndim > 1 and other.coefs.ndim > 1:
            raise DomainError("product of two vector-valued polynomials is not defined")
        exps = (self.exps[:, None, :] + other.exps[None, :, :]).reshape(-1, self.n)
        if self.coefs.ndim > 1:
            coefs = (other.coefs[None, :, None] * self.coefs[:, None, :]).reshape(-1, self.coefs.shape[1])
        elif other.coefs.ndim > 1:
            coefs = (self.coefs[:, None, None] * other.coefs[None, :, :]).reshape(-1, other.coefs.shape[1])
        else:
            coefs = np.outer(self.coefs, other.coefs).ravel()
        return Polynomial(self.n, exps, coefs)._combine()

    __rmul__ = __mul__

    def __pow__(self, p: int) -> "Polynomial":
        out = Polynomial.constant(self.n, 1.0)
        for _ in range(p):
            out = out * self
        return out

    def monomials(self, X: np.ndarray, powers: list | None = None) -> np.ndarray:
        """Monomial values, shape (N, T); ``powers`` may be a shared :func:`power_table`."""
        if powers is None:
            powers = power_table(X, int(self.exps.max(initial=0)))
        M = np.ones((X.shape[0], self.exps.shape[0]))
        for i in range(self.n):
            col = self.exps[:, i]
            if col.any():
                M *= powers[i][:, col]
        return M

    def __call__(self, X) -> np.ndarray:
        X, single = as_points(X, self.n)
        out = self.monomials(X) @ self.coefs
        return out[0] if single else out

    def deriv(self, j: int) -> "Polynomial":
        """Partial derivative with respect to x_{j+1} (0-based axis ``j``)."""
        e = self.exps.copy()
        factor = e[:, j].astype(float)
        e[:, j] = np.maximum(e[:, j] - 1, 0)
        c = self.coefs * (factor if self.coefs.ndim == 1 else factor[:, None])
        keep = factor != 0
        if not keep.any():
            keep[0] = True
        return Polynomial(self.n, e[keep], c[keep])

    def gradient(self, X) -> np.ndarray:
        """Gradient values, shape (N, n) for scalar polynomials."""
        X, single = as_points(X, self.n)
        g = np.stack([self.deriv(j)(X) for j in range(self.n)], axis=1)
        return g[0] if single else g

    def hessian(self, X) -> np.ndarray:
        X, single = as_points(X, self.n)
        H = np.empty((X.shape[0], self.n, self.n))
        for a in range(self.n):
            da = self.deriv(a)
            for b in range(a, self.n):
                H[:, a, b] = H[:, b, a] = da.deriv(b)(X)
        return H[0] if single else H


def power_table(X: np.ndarray, top: int) -> list[np.ndarray]:
    """Per axis, the columns X[:, i]**0..top built by repeated multiplication."""
    out = []
    for i in range(X.shape[1]):
        P = np.ones((X.shape[0], top + 1))
        for e in range(1, top + 1):
            P[:, e] = P[:, e - 1] * X[:, i]
        out.append(P)
    return out


def monomial_exponents(n: int, degree: int) -> np.ndarray:
    """All exponent vectors of total degree <= ``degree``, graded order."""
    exps = [e for e in product(range(degree + 1), repeat=n) if sum(e) <= degree]
    exps.sort(key=lambda e: (sum(e), tuple(-a for a in e)))
    return np.array(exps, dtype=int).reshape(-1, n)


# field base class and array kernels

def d_from_jac(jac: np.ndarray, n: int, k: int) -> np.ndarray:
    """(dω) coefficients from a Jacobian of shape (..., n, C(n,k))."""
    if k >= n:
        raise DomainError(f"exterior derivative of an {k}-form in R^{n} is undefined here")
    W = wedge_table(n, 1, k)
    return jac.reshape(jac.shape[:-2] + (-1,)) @ W.reshape(-1, W.shape[-1])


def delta_from_jac(jac: np.ndarray, n: int, k: int) -> np.ndarray:
    """(δω) coefficients, (δω)^A = Σ_j ∂_j ω^{jA}."""
    if k < 1:
        raise DomainError("codifferential of a 0-form is undefined")
    T = interior_table(n, k)
    return jac.reshape(jac.shape[:-2] + (-1,)) @ T.reshape(-1, T.shape[-1])


class FormField:
    """Base class: a k-form valued map on R^n with exact first partials."""

    n: int
    k: int

    @property
    def size(self) -> int:
        return comb(self.n, self.k)

    def jet(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def values(self, X: np.ndarray) -> np.ndarray:
        return self.jet(X)[0]

    def partial_field(self, j: int) -> "FormField":
        """The field ∂ω/∂x_{j+1}; only available for fields with closed-form partials."""
        raise NotImplementedError(f"{type(self).__name__} does not expose second derivatives")

    def value(self, x) -> KForm:
        X, single = as_points(x, self.n)
        v = self.values(X)
        return KForm(self.n, self.k, v[0] if single else v)

    def partial(self, x, j: int) -> KForm:
        """∂ω/∂x_j at ``x`` with 1-based axis ``j``."""
        if not 1 <= j <= self.n:
            raise DomainError(f"axis {j} outside 1..{self.n}")
        X, single = as_points(x, self.n)
        jac = self.jet(X)[1][:, j - 1]
        return KForm(self.n, self.k, jac[0] if single else jac)

    def __add__(self, other: "FormField") -> "FormField":
        return SumField([self, other])

    def __sub__(self, other: "FormField") -> "FormField":
        return SumField([self, other], [1.0, -1.0])

    def __mul__(self, c: float) -> "FormField":
        return SumField([self], [float(c)])

    __rmul__ = __mul__

    def __neg__(self) -> "FormField":
        return SumField([self], [-1.0])


@dataclass(frozen=True)
class GradientMatrix:
    """Entries ∂ω^I/∂x_j; rows follow lexicographic I, columns j = 1..n."""

    n: int
    k: int
    entries: np.ndarray

    def frobenius_sq(self) -> float:
        return float(np.sum(self.entries**2))


def d(f: FormField, x) -> KForm:
    """Exterior derivative dω at ``x``."""
    X, single = as_points(x, f.n)
    out = d_from_jac(f.jet(X)[1], f.n, f.k)
    return KForm(f.n, f.k + 1, out[0] if single else out)


def delta(f: FormField, x) -> KForm:
    """Codifferential (δω)^{i1..i(k-1)} = Σ_j ∂ω^{j i1..}/∂x_j at ``x``."""
    X, single = as_points(x, f.n)
    out = delta_from_jac(f.jet(X)[1], f.n, f.k)
    return KForm(f.n, f.k - 1, out[0] if single else out)


def gradient(f: FormField, x) -> GradientMatrix:
    X, single = as_points(x, f.n)
    if not single:
        raise DomainError("gradient() takes a single point")
    return GradientMatrix(f.n, f.k, f.jet(X)[1][0].T.copy())


# concrete fields

class PolynomialField(FormField):
    """k-form field whose coefficients are polynomials (exact to all orders)."""

    def __init__(self, n: int, k: int, poly: Polynomial):
        coefs = poly.coefs if poly.coefs.ndim == 2 else poly.coefs[:, None]
        if coefs.shape[1] != comb(n, k):
            raise DomainError(f"polynomial field needs {comb(n, k)} coefficient columns")
        self.n, self.k = n, k
        self.poly = Polynomial(n, poly.exps, coefs)
        self._derivs = [self.poly.deriv(j) for j in range(n)]
        self._top = int(self.poly.exps.max(initial=0))

    @classmethod
    def random(cls, n: int, k: int, degree: int, rng: np.random.Generator, scale: float = 1.0):
        exps = monomial_exponents(n, degree)
        return cls(n, k, Polynomial(n, exps, scale * rng.standard_normal((len(exps), comb(n, k)))))

    @classmethod
    def from_scalar(cls, p: Polynomial) -> "PolynomialField":
        return cls(p.n, 0, p)

    @classmethod
    def gradient_of(cls, p: Polynomial) -> "PolynomialField":
        """The 1-form Σ ∂p/∂x_j dx^j."""
        parts = [p.deriv(j) for j in range(p.n)]
        exps = np.vstack([q.exps for q in parts])
        coefs = np.zeros((len(exps), p.n))
        row = 0
        for j, q in enumerate(parts):
            coefs[row : row + len(q.exps), j] = q.coefs
            row += len(q.exps)
        return cls(p.n, 1, Polynomial(p.n, exps, coefs)._combine())

    def jet(self, X):
        X, _ = as_points(X, self.n)
        P = power_table(X, self._top)
        val = self.poly.monomials(X, P) @ self.poly.coefs
        jac = np.stack([q.monomials(X, P) @ q.coefs for q in self._derivs], axis=1)
        return val, jac

    def values(self, X):
        X, _ = as_points(X, self.n)
        return self.poly.monomials(X) @ self.poly.coefs

    def partial_field(self, j: int) -> "PolynomialField":
        return PolynomialField(self.n, self.k, self._derivs[j])


class ConstantField(FormField):
    def __init__(self, form: KForm):
        if form.batch_shape:
            raise DomainError("constant field needs a single form")
        self.n, self.k, self.form = form.n, form.k, form

    def jet(self, X):
        X, _ = as_points(X, self.n)
        N = X.shape[0]
        return np.broadcast_to(self.form.coeffs, (N, self.size)).copy(), np.zeros((N, self.n, self.size))

    def partial_field(self, j):
        return ConstantField(KForm.zero(self.n, self.k))


class SumField(FormField):
    """Linear combination Σ c_i f_i of fields of a common rank."""

    def __init__(self, fields: Sequence[FormField], weights: Sequence[float] | None = None):
        fields = list(fields)
        if not fields:
            raise DomainError("empty linear combination")
        n, k = fields[0].n, fields[0].k
        if any(f.n != n or f.k != k for f in fields):
            raise DomainError("linear combination of fields of different shape")
        self.n, self.k = n, k
        self.fields = fields
        self.weights = [1.0] * len(fields) if weights is None else [float(w) for w in weights]

    def jet(self, X):
        val = jac = 0.0
        for c, f in zip(self.weights, self.fields):
            v, j = f.jet(X)
            val = val + c * v
            jac = jac + c * j
        return val, jac

    def partial_field(self, j):
        return SumField([f.partial_field(j) for f in self.fields], self.weights)


class WedgeField(FormField):
    """Pointwise exterior product a∧b (product rule for partials)."""

    def __init__(self, a: FormField, b: FormField):
        if a.n != b.n or a.k + b.k > a.n:
            raise DomainError("incompatible wedge factors")
        self.a, self.b = a, b
        self.n, self.k = a.n, a.k + b.k

    def jet(self, X):
        va, ja = self.a.jet(X)
        vb, jb = self.b.jet(X)
        n, ka, kb = self.n, self.a.k, self.b.k
        val = wedge_array(va, vb, n, ka, kb)
        jac = wedge_array(ja, vb[:, None, :], n, ka, kb) + wedge_array(va[:, None, :], jb, n, ka, kb)
        return val, jac

    def partial_field(self, j):
        return SumField([WedgeField(self.a.partial_field(j), self.b), WedgeField(self.a, self.b.partial_field(j))])


class InteriorField(FormField):
    """Pointwise interior product v⌟w of a 1-form field with a k-form field."""

    def __init__(self, v: FormField, w: FormField):
        if v.k != 1 or w.k < 1 or v.n != w.n:
            raise DomainError("interior product needs a 1-form field and a field of rank >= 1")
        self.v, self.w = v, w
        self.n, self.k = w.n, w.k - 1

    def jet(self, X):
        vv, jv = self.v.jet(X)
        vw, jw = self.w.jet(X)
        n, k = self.n, self.w.k
        val = interior_array(vv, vw, n, k)
        jac = interior_array(jv, vw[:, None, :], n, k) + interior_array(vv[:, None, :], jw, n, k)
        return val, jac

    def partial_field(self, j):
        return SumField(
            [InteriorField(self.v.partial_field(j), self.w), InteriorField(self.v, self.w.partial_field(j))]
        )


class HodgeField(FormField):
    def __init__(self, f: FormField):
        self.f = f
        self.n, self.k = f.n, f.n - f.k

    def jet(self, X):
        v, j = self.f.jet(X)
        H = hodge_matrix(self.n, self.f.k)
        return v @ H, j @ H

    def partial_field(self, j):
        return HodgeField(self.f.partial_field(j))


class ExteriorDerivativeField(FormField):
    """dω as a field; its partials need the second derivatives of ω."""

    def __init__(self, f: FormField):
        self.f = f
        self.n, self.k = f.n, f.k + 1

    def jet(self, X):
        X, _ = as_points(X, self.n)
        val = d_from_jac(self.f.jet(X)[1], self.n, self.f.k)
        jac = np.stack(
            [d_from_jac(self.f.partial_field(j).jet(X)[1], self.n, self.f.k) for j in range(self.n)], axis=1
        )
        return val, jac

    def partial_field(self, j):
        return ExteriorDerivativeField(self.f.partial_field(j))


class CodifferentialField(FormField):
    def __init__(self, f: FormField):
        self.f = f
        self.n, self.k = f.n, f.k - 1

    def jet(self, X):
        X, _ = as_points(X, self.n)
        val = delta_from_jac(self.f.jet(X)[1], self.n, self.f.k)
        jac = np.stack(
            [delta_from_jac(self.f.partial_field(j).jet(X)[1], self.n, self.f.k) for j in range(self.n)], axis=1
        )
        return val, jac

    def partial_field(self, j):
        return CodifferentialField(self.f.partial_field(j))


class UnitGradientField(FormField):
    """ν = ∇φ/|∇φ| for a polynomial φ, with Jacobian from the Hessian."""

    def __init__(self, phi: Polynomial, min_gradient: float = 1e-12):
        self.phi = phi
        self.n, self.k = phi.n, 1
        self.min_gradient = min_gradient

    def jet(self, X):
        X, _ = as_points(X, self.n)
        g = self.phi.gradient(X)
        H = self.phi.hessian(X)
        gn = np.linalg.norm(g, axis=1)
        bad = gn < self.min_gradient
        if np.any(bad):
            raise SingularGradientError(f"|grad phi| = {gn[bad].min():.3e} at {X[bad][0].tolist()}")
        nu = g / gn[:, None]
        # ∂_j ν^l = H_lj/|g| − ν^l Σ_m ν^m H_mj/|g|; stored as jac[:, j, l]
        proj = np.einsum("nm,nmj->nj", nu, H)
        jac = (np.transpose(H, (0, 2, 1)) - proj[:, :, None] * nu[:, None, :]) / gn[:, None, None]
        return nu, jac


class ScaledField(FormField):
    """x ↦ f(x / t), the dilation used in the scale-covariance check."""

    def __init__(self, f: FormField, t: float):
        self.f, self.t = f, float(t)
        self.n, self.k = f.n, f.k

    def jet(self, X):
        X, _ = as_points(X, self.n)
        v, j = self.f.jet(X / self.t)
        return v, j / self.t


@dataclass(frozen=True)
class Profile:
    """A scalar profile λ(s) together with its derivative λ'(s)."""

    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    label: str = "custom"

    @classmethod
    def power(cls, p: float) -> "Profile":
        return cls(lambda s: s**p, lambda s: p * s ** (p - 1), f"s^{p:g}")


class ProfileField(FormField):
    """λ(|x|_p) (Σ_{i<=p} x_i dx^i) ∧ dx^{tail}, with |x|_p² = x_1² + ... + x_p².

    ``p = n`` and an empty tail give the radial annulus field; ``p = n−k+1``
    with tail (n−k+2, ..., n) gives the shell field.
    """

    def __init__(self, n: int, p: int, tail: tuple[int, ...], profile: Profile):
        if not 1 <= p <= n or any(t <= p or t > n for t in tail) or p + len(tail) > n:
            raise DomainError(f"invalid profile field layout p={p}, tail={tail} in R^{n}")
        self.n, self.k = n, 1 + len(tail)
        self.p, self.tail, self.profile = p, tuple(tail), profile
        self.slots = [mi.position((i,) + self.tail, n) for i in range(1, p + 1)]

    def _radius(self, X):
        s = np.linalg.norm(X[:, : self.p], axis=1)
        if np.any(s == 0):
            raise DomainError("profile field evaluated where |x|_p = 0")
        return s

    def jet(self, X):
        X, _ = as_points(X, self.n)
        s = self._radius(X)
        lam, dlam = self.profile.f(s), self.profile.df(s)
        N, p = X.shape[0], self.p
        val = np.zeros((N, self.size))
        jac = np.zeros((N, self.n, self.size))
        xp = X[:, :p]
        val[:, self.slots] = lam[:, None] * xp
        # ∂_j (λ x_i) = λ δ_ij + λ' x_i x_j / s
        block = (dlam / s)[:, None, None] * xp[:, :, None] * xp[:, None, :]
        block += lam[:, None, None] * np.eye(p)
        jac[:, :p, self.slots] = block
        return val, jac


class RadialScalarField(FormField):
    """0-form μ(|x|_p) (potential of the p-dimensional profile 1-form)."""

    def __init__(self, n: int, p: int, profile: Profile):
        self.n, self.k, self.p, self.profile = n, 0, p, profile

    def jet(self, X):
        X, _ = as_points(X, self.n)
        s = np.linalg.norm(X[:, : self.p], axis=1)
        if np.any(s == 0):
            raise DomainError("radial field evaluated where |x|_p = 0")
        jac = np.zeros((X.shape[0], self.n, 1))
        jac[:, : self.p, 0] = (self.profile.df(s) / s)[:, None] * X[:, : self.p]
        return self.profile.f(s)[:, None], jac


def build_radial_annulus_field(n: int, profile: Profile) -> ProfileField:
    """ω = λ(|x|) Σ x_i dx^i."""
    return ProfileField(n, n, (), profile)


def build_shell_field(n: int, k: int, profile: Profile) -> ProfileField:
    """ω_k = λ(|x|_k) φ_k ∧ dx^{n−k+2} ∧ ... ∧ dx^n, φ_k = Σ_{i<=n−k+1} x_i dx^i."""
    if not 2 <= k <= n - 1:
        raise DomainError(f"shell field needs 2 <= k <= n-1, got k={k}, n={n}")
    p = n - k + 1
    return ProfileField(n, p, tuple(range(p + 1, n + 1)), profile)


def bump_profile(rho: float = 0.5) -> Profile:
    """η(s) = (1 − ((s²−ρ²)/(1−ρ²))²)² on [ρ, 1], 1 below ρ, 0 above 1.

    η is C¹ across s = ρ and s = 1 (its second derivative jumps there).
    """
    w = 1.0 - rho**2

    def f(s):
        s = np.asarray(s, dtype=float)
        t = (s**2 - rho**2) / w
        mid = (1.0 - t**2) ** 2
        return np.where(s <= rho, 1.0, np.where(s >= 1.0, 0.0, mid))

    def df(s):
        s = np.asarray(s, dtype=float)
        t = (s**2 - rho**2) / w
        mid = 2.0 * (1.0 - t**2) * (-2.0 * t) * (2.0 * s / w)
        return np.where((s > rho) & (s < 1.0), mid, 0.0)

    return Profile(f, df, f"bump(rho={rho:g})")


class SinBumpField(FormField):
    """ω_m = sin(m x_1) η(|x|) dx^1∧...∧dx^k."""

    def __init__(self, n: int, k: int, m: float, cutoff: Profile | None = None):
        if not 0 <= k <= n:
            raise DomainError(f"rank {k} outside 0..{n}")
        self.n, self.k, self.m = n, k, float(m)
        self.cutoff = bump_profile() if cutoff is None else cutoff
        self.slot = mi.position(tuple(range(1, k + 1)), n)

    def jet(self, X):
        X, _ = as_points(X, self.n)
        s = np.linalg.norm(X, axis=1)
        eta, deta = self.cutoff.f(s), self.cutoff.df(s)
        sx, cx = np.sin(self.m * X[:, 0]), np.cos(self.m * X[:, 0])
        val = np.zeros((X.shape[0], self.size))
        jac = np.zeros((X.shape[0], self.n, self.size))
        val[:, self.slot] = sx * eta
        radial = np.divide(deta, s, out=np.zeros_like(s), where=s > 0)
        jac[:, :, self.slot] = (sx * radial)[:, None] * X
        jac[:, 0, self.slot] += self.m * cx * eta
        return val, jac


def build_sin_bump_field(n: int, k: int, m: float, cutoff: Profile | None = None) -> SinBumpField:
    return SinBumpField(n, k, m, cutoff)


class FiniteDifferenceField(FormField):
    """Wraps a black-box coefficient function; partials by central differences.

    The Jacobian carries O(h²) truncation error (``error_order = 2``).
    """

    error_order = 2

    def __init__(self, n: int, k: int, func: Callable[[np.ndarray], np.ndarray], h: float = 1e-5):
        self.n, self.k, self.func, self.h = n, k, func, float(h)

    def values(self, X):
        X, _ = as_points(X, self.n)
        return np.asarray(self.func(X), dtype=float).reshape(X.shape[0], self.size)

    def jet(self, X):
        X, _ = as_points(X, self.n)
        cols = []
        for j in range(self.n):
            e = np.zeros(self.n)
            e[j] = self.h
            cols.append((self.values(X + e) - self.values(X - e)) / (2.0 * self.h))
        return self.values(X), np.stack(cols, axis=1)
