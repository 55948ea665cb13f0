"""Domains, outward normals, principal-curvature frames and the boundary
operators L^ν and K^ν.

Every domain exposes volume charts and boundary faces.  A chart is a
parametrization of a product box in parameter space with an analytic
Jacobian; :mod:`gaffney_lab.quadrature` turns charts into rules.  Each face
carries a local defining polynomial φ (the domain lies in {φ < 0} near the
face), so the normal is always ν = ∇φ/|∇φ| and its derivatives come from
the Hessian of φ.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gamma as gamma_fn, pi
from typing import Callable, Sequence

import numpy as np

from . import multiindex as mi
from .errors import DomainError, FrameError, SingularGradientError
from .exterior import KForm, interior_array, wedge_array, wedge_vectors
from .fields import (
    FormField,
    Polynomial,
    UnitGradientField,
    as_points,
    d_from_jac,
    delta_from_jac,
)

JACOBI_TOL = 1e-13
BOUNDARY_TOL = 1e-10


def sphere_measure(n: int) -> float:
    """σ_n, the (n−1)-dimensional area of the unit sphere in R^n."""
    return 2.0 * pi ** (n / 2) / gamma_fn(n / 2)


def ball_volume(n: int) -> float:
    return pi ** (n / 2) / gamma_fn(n / 2 + 1)


# charts

@dataclass(frozen=True)
class Axis:
    """One parameter axis of a chart.

    ``kind`` selects the 1-D rule: ``radial`` and ``angle`` use
    Gauss-Legendre, ``periodic`` the trapezoid rule, ``linear`` the box
    Gauss-Legendre order.  ``log`` integrates a radial axis in log s.
    """

    lo: float
    hi: float
    kind: str
    breaks: tuple[float, ...] = ()
    log: bool = False


@dataclass(frozen=True, eq=False)
class Chart:
    """Map from a parameter box to R^n returning points and Jacobians."""

    n: int
    axes: tuple[Axis, ...]
    map: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]

    @property
    def dim(self) -> int:
        return len(self.axes)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        lo = np.array([a.lo for a in self.axes])
        hi = np.array([a.hi for a in self.axes])
        U = lo + (hi - lo) * rng.random((count, self.dim))
        return self.map(U)[0]


def unit_sphere_map(p: int, A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Iterated spherical coordinates on S^{p−1}.

    ``A`` has shape (N, p−1): polar angles in [0, π] then the azimuth in
    [0, 2π).  S_i = (Π_{m<i} sin a_m) cos a_i for i < p, S_p = Π sin a_m.
    Returns points (N, p) and the derivative (N, p, p−1).
    """
    N = A.shape[0]
    s, c = np.sin(A), np.cos(A)
    S = np.empty((N, p))
    dS = np.zeros((N, p, p - 1))
    for i in range(p):
        last = np.ones(N) if i == p - 1 else c[:, i]
        prefix = np.prod(s[:, :i], axis=1) if i else np.ones(N)
        S[:, i] = prefix * last
        for m in range(min(i, p - 1)):
            others = np.prod(np.delete(s[:, :i], m, axis=1), axis=1) if i > 1 else np.ones(N)
            dS[:, i, m] = others * c[:, m] * last
        if i < p - 1:
            dS[:, i, i] = -prefix * s[:, i]
    return S, dS


def _angle_axes(p: int) -> list[Axis]:
    return [Axis(0.0, pi, "angle") for _ in range(p - 2)] + [Axis(0.0, 2 * pi, "periodic")]


def sphere_chart(n: int, radius: float, center=None, linear=None) -> Chart:
    """Sphere of given radius, optionally mapped by a linear map (ellipsoids)."""
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    L = np.eye(n) if linear is None else np.asarray(linear, dtype=float)

    def m(U):
        S, dS = unit_sphere_map(n, U)
        return center + radius * S @ L.T, radius * np.einsum("ab,nbj->naj", L, dS)

    return Chart(n, tuple(_angle_axes(n)), m)


def ball_chart(n: int, outer: float, inner: float = 0.0, breaks=(), linear=None) -> Chart:
    """Radius × angles parametrization of a ball or annulus (log radius if inner > 0)."""
    L = np.eye(n) if linear is None else np.asarray(linear, dtype=float)

    def m(U):
        s = U[:, 0]
        S, dS = unit_sphere_map(n, U[:, 1:])
        J = np.concatenate([S[:, :, None], s[:, None, None] * dS], axis=2)
        return (s[:, None] * S) @ L.T, np.einsum("ab,nbj->naj", L, J)

    radial = Axis(inner, outer, "radial", tuple(breaks), log=inner > 0)
    return Chart(n, (radial, *_angle_axes(n)), m)


def product_chart(first: Chart, p: int, n: int, tail: Sequence[tuple[int, float | None]]) -> Chart:
    """Embed a chart on the first ``p`` coordinates into R^n.

    ``tail`` lists, for coordinates p+1..n in order, either
    ``(axis, None)`` for a free [0, 1] parameter or ``(axis, c)`` to pin
    that coordinate at c.
    """
    free = [a for a, c in tail if c is None]
    axes = first.axes + tuple(Axis(0.0, 1.0, "linear") for _ in free)

    def m(U):
        X0, J0 = first.map(U[:, : first.dim])
        N = U.shape[0]
        X = np.zeros((N, n))
        J = np.zeros((N, n, len(axes)))
        X[:, :p] = X0
        J[:, :p, : first.dim] = J0
        col = first.dim
        for a, c in tail:
            if c is None:
                X[:, a - 1] = U[:, col]
                J[:, a - 1, col] = 1.0
                col += 1
            else:
                X[:, a - 1] = c
        return X, J

    return Chart(n, axes, m)


def box_chart(n: int, lo: Sequence[float], hi: Sequence[float], fixed: dict[int, float] | None = None) -> Chart:
    """Axis-aligned box; ``fixed`` pins coordinates (1-based) to make a face."""
    fixed = fixed or {}
    free = [i for i in range(1, n + 1) if i not in fixed]

    def m(U):
        X = np.zeros((U.shape[0], n))
        J = np.zeros((U.shape[0], n, len(free)))
        for c, i in enumerate(free):
            X[:, i - 1] = U[:, c]
            J[:, i - 1, c] = 1.0
        for i, v in fixed.items():
            X[:, i - 1] = v
        return X, J

    return Chart(n, tuple(Axis(lo[i - 1], hi[i - 1], "linear") for i in free), m)


# faces and domains

@dataclass(frozen=True, eq=False)
class Face:
    """A smooth boundary piece with a local defining polynomial.

    Attributes:
        name: label used in reports.
        chart: parametrization of the face.
        phi: Ω lies in {phi < 0} near the face; ν = ∇phi/|∇phi|.
        lo, hi: bounding box used to attribute points to faces.
        flat: True when the face is a piece of a hyperplane.
    """

    name: str
    chart: Chart
    phi: Polynomial
    lo: np.ndarray
    hi: np.ndarray
    flat: bool = False

    @cached_property
    def normal_field(self) -> UnitGradientField:
        return UnitGradientField(self.phi)

    def distance(self, X: np.ndarray) -> np.ndarray:
        """|φ|/|∇φ| plus the excess outside the bounding box."""
        g = np.linalg.norm(self.phi.gradient(X), axis=-1)
        excess = np.maximum(self.lo - X, 0.0).sum(-1) + np.maximum(X - self.hi, 0.0).sum(-1)
        return np.abs(self.phi(X)) / np.maximum(g, 1e-300) + excess


@dataclass(eq=False)
class Domain:
    """Bounded domain with quadrature charts and boundary faces."""

    name: str
    n: int
    params: dict
    volume_charts: tuple[Chart, ...]
    faces: tuple[Face, ...]
    diameter: float
    inside: Callable[[np.ndarray], np.ndarray]
    volume: float | None = None
    area: float | None = None
    _rule_cache: dict = field(default_factory=dict, repr=False)

    @property
    def label(self) -> str:
        args = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}({args})"

    def contains(self, X) -> np.ndarray:
        X, _ = as_points(X, self.n)
        return self.inside(X)

    def face_of(self, x) -> Face:
        """The face a boundary point belongs to (closest by the distance estimate)."""
        X, _ = as_points(x, self.n)
        dists = [float(f.distance(X)[0]) for f in self.faces]
        return self.faces[int(np.argmin(dists))]


@dataclass(eq=False)
class LevelSetDomain(Domain):
    """Domain {φ < 0} with a single global defining polynomial."""

    phi: Polynomial | None = None


@dataclass(eq=False)
class PiecewiseDomain(Domain):
    """Domain whose boundary is a finite union of faces, each with its own φ."""


def _sphere_face(name, n, R, phi, center=None) -> Face:
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    return Face(name, sphere_chart(n, R, c), phi, c - R, c + R)


def ball(n: int, R: float = 1.0, radial_breaks: Sequence[float] = ()) -> LevelSetDomain:
    """Ball of radius R centered at the origin, φ = |x|² − R²."""
    if n < 2:
        raise DomainError("ball needs n >= 2")
    phi = Polynomial.sum_of_squares(n) - R**2
    return LevelSetDomain(
        "ball", n, {"n": n, "R": R},
        (ball_chart(n, R, breaks=tuple(radial_breaks)),),
        (_sphere_face("sphere", n, R, phi),),
        2.0 * R,
        lambda X: np.sum(X**2, axis=1) < R**2,
        ball_volume(n) * R**n,
        sphere_measure(n) * R ** (n - 1),
        phi=phi,
    )


def annulus(n: int, r: float) -> LevelSetDomain:
    """r < |x| < 1, φ = (|x|² − 1)(|x|² − r²)."""
    if not 0 < r < 1:
        raise DomainError(f"annulus inner radius must lie in (0, 1), got {r}")
    q = Polynomial.sum_of_squares(n)
    phi = (q - 1.0) * (q - r**2)
    return LevelSetDomain(
        "annulus", n, {"n": n, "r": r},
        (ball_chart(n, 1.0, inner=r),),
        (_sphere_face("outer sphere", n, 1.0, phi), _sphere_face("inner sphere", n, r, phi)),
        2.0,
        lambda X: (np.sum(X**2, axis=1) < 1.0) & (np.sum(X**2, axis=1) > r**2),
        ball_volume(n) * (1 - r**n),
        sphere_measure(n) * (1 + r ** (n - 1)),
        phi=phi,
    )


def ellipsoid(n: int, semiaxes: Sequence[float]) -> LevelSetDomain:
    a = np.asarray(semiaxes, dtype=float)
    if a.shape != (n,) or np.any(a <= 0):
        raise DomainError(f"ellipsoid needs {n} positive semiaxes")
    phi = Polynomial.sum_of_squares(n, scales=a) - 1.0
    L = np.diag(a)
    face = Face("ellipsoid surface", sphere_chart(n, 1.0, linear=L), phi, -a, a)
    return LevelSetDomain(
        "ellipsoid", n, {"n": n, "semiaxes": [float(v) for v in a]},
        (ball_chart(n, 1.0, linear=L),),
        (face,),
        2.0 * float(a.max()),
        lambda X: np.sum((X / a) ** 2, axis=1) < 1.0,
        ball_volume(n) * float(np.prod(a)),
        None,
        phi=phi,
    )


def torus(R: float = 2.0, a: float = 0.5) -> LevelSetDomain:
    """Solid torus in R³: tube radius a around a circle of radius R.

    φ = (|x|² + R² − a²)² − 4R²(x₁² + x₂²).  Principal curvatures are 1/a
    and cos v/(R + a cos v), so the mean curvature is nonnegative iff
    R >= 2a while the inner equator is never convex.
    """
    if not 0 < a < R:
        raise DomainError("torus needs 0 < a < R")
    q = Polynomial.sum_of_squares(3)
    phi = (q + (R**2 - a**2)) ** 2 - Polynomial.sum_of_squares(3, axes=[1, 2]) * (4 * R**2)

    def vol_map(U):
        rho, u, v = U.T
        w = R + rho * np.cos(v)
        X = np.stack([w * np.cos(u), w * np.sin(u), rho * np.sin(v)], axis=1)
        J = np.empty((U.shape[0], 3, 3))
        J[:, :, 0] = np.stack([np.cos(v) * np.cos(u), np.cos(v) * np.sin(u), np.sin(v)], axis=1)
        J[:, :, 1] = np.stack([-w * np.sin(u), w * np.cos(u), np.zeros_like(u)], axis=1)
        J[:, :, 2] = np.stack(
            [-rho * np.sin(v) * np.cos(u), -rho * np.sin(v) * np.sin(u), rho * np.cos(v)], axis=1
        )
        return X, J

    def surf_map(U):
        X, J = vol_map(np.column_stack([np.full(U.shape[0], a), U]))
        return X, J[:, :, 1:]

    per = Axis(0.0, 2 * pi, "periodic")
    vol = Chart(3, (Axis(0.0, a, "radial"), per, per), vol_map)
    surf = Chart(3, (per, per), surf_map)
    ext = np.array([R + a, R + a, a])

    def inside(X):
        rc = np.sqrt(X[:, 0] ** 2 + X[:, 1] ** 2)
        return (rc - R) ** 2 + X[:, 2] ** 2 < a**2

    return LevelSetDomain(
        "torus", 3, {"R": R, "a": a}, (vol,), (Face("torus surface", surf, phi, -ext, ext),),
        2.0 * (R + a), inside, 2 * pi**2 * R * a**2, 4 * pi**2 * R * a, phi=phi,
    )


def _flat_face(name, n, axis, value, outward_sign, chart, lo, hi) -> Face:
    phi = Polynomial.coordinate(n, axis) * float(outward_sign) - float(outward_sign) * value
    return Face(name, chart, phi, np.asarray(lo, float), np.asarray(hi, float), flat=True)


def box(n: int, lo: float = 0.0, hi: float = 1.0) -> PiecewiseDomain:
    """Cube [lo, hi]^n."""
    L, H = [lo] * n, [hi] * n
    faces = []
    for s in range(1, n + 1):
        for value, sign in ((lo, -1), (hi, +1)):
            flo, fhi = np.array(L, float), np.array(H, float)
            flo[s - 1] = fhi[s - 1] = value
            faces.append(_flat_face(f"x{s}={value:g}", n, s, value, sign, box_chart(n, L, H, {s: value}), flo, fhi))
    return PiecewiseDomain(
        "box", n, {"n": n, "lo": lo, "hi": hi}, (box_chart(n, L, H),), tuple(faces), np.sqrt(n) * (hi - lo),
        lambda X: np.all((X > lo) & (X < hi), axis=1), (hi - lo) ** n, 2 * n * (hi - lo) ** (n - 1),
    )


def box_with_hole(n: int, a: float = 1 / 3, b: float = 2 / 3) -> PiecewiseDomain:
    """Unit cube with the closed box [a, b]^n removed (a generalized polytope)."""
    if not 0 < a < b < 1:
        raise DomainError("hole must satisfy 0 < a < b < 1")
    cuts = [(0.0, a), (a, b), (b, 1.0)]
    charts = []
    for cell in np.ndindex(*(3,) * n):
        if all(c == 1 for c in cell):
            continue
        charts.append(box_chart(n, [cuts[c][0] for c in cell], [cuts[c][1] for c in cell]))
    outer = box(n)
    faces = list(outer.faces)
    for s in range(1, n + 1):
        for value, sign in ((a, +1), (b, -1)):
            L, H = np.full(n, a), np.full(n, b)
            L[s - 1] = H[s - 1] = value
            chart = box_chart(n, [a] * n, [b] * n, {s: value})
            faces.append(_flat_face(f"hole x{s}={value:g}", n, s, value, sign, chart, L, H))

    def inside(X):
        in_cube = np.all((X > 0) & (X < 1), axis=1)
        in_hole = np.all((X >= a) & (X <= b), axis=1)
        return in_cube & ~in_hole

    w = b - a
    return PiecewiseDomain(
        "box_with_hole", n, {"n": n, "a": a, "b": b}, tuple(charts), tuple(faces), np.sqrt(n), inside,
        1.0 - w**n, 2 * n + 2 * n * w ** (n - 1),
    )


def shell(n: int, k: int, r: float) -> Domain:
    """Ω_k = {r < |x|_k < 1, 0 < x_{n−k+2}, ..., x_n < 1}, |x|_k² = x_1² + ... + x_{n−k+1}².

    For k = 1 this is the annulus.
    """
    if not 1 <= k <= n - 1:
        raise DomainError(f"shell needs 1 <= k <= n-1, got k={k}, n={n}")
    if k == 1:
        return annulus(n, r)
    if not 0 < r < 1:
        raise DomainError(f"shell inner radius must lie in (0, 1), got {r}")
    p, tail = n - k + 1, list(range(n - k + 2, n + 1))
    free_tail = [(t, None) for t in tail]
    vol = product_chart(ball_chart(p, 1.0, inner=r), p, n, free_tail)
    qp = Polynomial.sum_of_squares(n, axes=range(1, p + 1))
    lo = np.concatenate([-np.ones(p), np.zeros(k - 1)])
    hi = np.ones(n)
    inner_lo = np.concatenate([-r * np.ones(p), np.zeros(k - 1)])
    inner_hi = np.concatenate([r * np.ones(p), np.ones(k - 1)])
    faces = [
        Face("outer cylinder", product_chart(sphere_chart(p, 1.0), p, n, free_tail), qp - 1.0, lo, hi),
        Face("inner cylinder", product_chart(sphere_chart(p, r), p, n, free_tail), r**2 - qp, inner_lo, inner_hi),
    ]
    for s in tail:
        for value, sign in ((0.0, -1), (1.0, +1)):
            pinned = [(t, value if t == s else None) for t in tail]
            chart = product_chart(ball_chart(p, 1.0, inner=r), p, n, pinned)
            flo, fhi = lo.copy(), hi.copy()
            flo[s - 1] = fhi[s - 1] = value
            faces.append(_flat_face(f"x{s}={value:g}", n, s, value, sign, chart, flo, fhi))

    def inside(X):
        rad = np.sum(X[:, :p] ** 2, axis=1)
        box_ok = np.all((X[:, p:] > 0) & (X[:, p:] < 1), axis=1)
        return (rad > r**2) & (rad < 1.0) & box_ok

    vp = ball_volume(p) * (1 - r**p)
    return PiecewiseDomain(
        "shell", n, {"n": n, "k": k, "r": r}, (vol,), tuple(faces), np.sqrt(4.0 + (k - 1)), inside,
        vp, sphere_measure(p) * (1 + r ** (p - 1)) + 2 * (k - 1) * vp,
    )


CATALOG = ("ball", "annulus", "shell", "box", "ellipsoid", "torus", "box_with_hole")


def make_domain(name: str, n: int, k: int | None = None, r: float | None = None, R: float = 1.0,
                semiaxes: Sequence[float] | None = None) -> Domain:
    """Build a catalog domain from its name and parameters."""
    if name == "ball":
        return ball(n, R)
    if name == "annulus":
        return annulus(n, 0.5 if r is None else r)
    if name == "shell":
        if k is None:
            raise DomainError("shell needs k")
        return shell(n, k, 0.5 if r is None else r)
    if name == "box":
        return box(n)
    if name == "box_with_hole":
        return box_with_hole(n)
    if name == "ellipsoid":
        axes = semiaxes if semiaxes is not None else np.linspace(1.0, 2.0, n)
        return ellipsoid(n, axes)
    if name == "torus":
        if n != 3:
            raise DomainError("torus is only available in R^3")
        return torus()
    raise DomainError(f"unknown domain {name!r}; choose from {', '.join(CATALOG)}")


# frames and curvatures

def jacobi_eigh(S: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigen-decomposition of stacked symmetric matrices.

    Returns eigenvalues sorted ascending, shape (N, m), and eigenvectors as
    columns, shape (N, m, m).
    """
    A = np.array(S, dtype=float, copy=True)
    N, m, _ = A.shape
    V = np.broadcast_to(np.eye(m), (N, m, m)).copy()
    scale = np.maximum(np.linalg.norm(A, axis=(1, 2)), 1e-300)
    offdiag = ~np.eye(m, dtype=bool)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(A[:, offdiag] ** 2, axis=1))
        if np.all(off <= tol * scale):
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = A[:, p, q]
                active = np.abs(apq) > 1e-300
                theta = np.where(active, (A[:, q, q] - A[:, p, p]) / (2.0 * np.where(active, apq, 1.0)), 0.0)
                t = np.where(active, np.sign(theta + (theta == 0)) / (np.abs(theta) + np.sqrt(theta**2 + 1.0)), 0.0)
                c = 1.0 / np.sqrt(t**2 + 1.0)
                s = t * c
                Ap, Aq = A[:, :, p].copy(), A[:, :, q].copy()
                A[:, :, p] = c[:, None] * Ap - s[:, None] * Aq
                A[:, :, q] = s[:, None] * Ap + c[:, None] * Aq
                Ap, Aq = A[:, p, :].copy(), A[:, q, :].copy()
                A[:, p, :] = c[:, None] * Ap - s[:, None] * Aq
                A[:, q, :] = s[:, None] * Ap + c[:, None] * Aq
                Vp, Vq = V[:, :, p].copy(), V[:, :, q].copy()
                V[:, :, p] = c[:, None] * Vp - s[:, None] * Vq
                V[:, :, q] = s[:, None] * Vp + c[:, None] * Vq
    w = np.diagonal(A, axis1=1, axis2=2).copy()
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    V = np.take_along_axis(V, order[:, None, :], axis=2)
    return w, V


def tangent_basis(nu: np.ndarray) -> np.ndarray:
    """Orthonormal bases of ν^⊥ as columns, shape (N, n, n−1)."""
    N, n = nu.shape
    M = np.concatenate([nu[:, :, None], np.broadcast_to(np.eye(n), (N, n, n))], axis=2)
    Q, _ = np.linalg.qr(M)
    return Q[:, :, 1:n]


def frames_from_jet(nu: np.ndarray, jac: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Principal directions (rows, shape (N, n−1, n)) and curvatures (N, n−1).

    ``jac[:, j, l] = ∂_j ν^l``; the shape operator acts as E ↦ Σ_j E^j ∂_j ν.
    """
    T = tangent_basis(nu)
    D = np.transpose(jac, (0, 2, 1))
    S = np.einsum("naj,nab,nbk->njk", T, D, T)
    S = 0.5 * (S + np.transpose(S, (0, 2, 1)))
    w, V = jacobi_eigh(S)
    E = np.einsum("nab,nbj->nja", T, V)
    return E, w


@dataclass(frozen=True)
class BoundaryFrame:
    """Outward normal, principal directions (rows of E) and curvatures at x."""

    x: np.ndarray
    nu: KForm
    E: np.ndarray
    gamma: np.ndarray

    def direction(self, i: int) -> KForm:
        """E_i as a 1-form (1-based)."""
        return KForm.vector(self.E[i - 1])


def _face_for(d: Domain, x: np.ndarray) -> Face:
    if isinstance(d, LevelSetDomain) and d.phi is not None:
        return d.faces[0] if len(d.faces) == 1 else d.face_of(x)
    return d.face_of(x)


def _phi_for(d: Domain, x: np.ndarray) -> Polynomial:
    if isinstance(d, LevelSetDomain) and d.phi is not None:
        return d.phi
    return _face_for(d, x).phi


def _check_on_boundary(d: Domain, phi: Polynomial, x: np.ndarray) -> None:
    g = np.linalg.norm(phi.gradient(x))
    if g < 1e-12:
        raise SingularGradientError(f"|grad phi| = {g:.3e} at {x.tolist()}")
    dist = abs(float(phi(x))) / g
    if dist > BOUNDARY_TOL * d.diameter:
        raise DomainError(f"point {x.tolist()} is not on the boundary (distance estimate {dist:.3e})")


def normal_jet(d: Domain, x) -> tuple[np.ndarray, np.ndarray]:
    """ν and its Jacobian (jac[j, l] = ∂_j ν^l) at a single point."""
    x = np.asarray(x, dtype=float)
    nu, jac = UnitGradientField(_phi_for(d, x)).jet(x[None])
    return nu[0], jac[0]


def normal(d: Domain, x) -> KForm:
    """Outward unit normal ∇φ/|∇φ| at a point near the boundary."""
    return KForm.vector(normal_jet(d, x)[0])


def frame(d: Domain, x) -> BoundaryFrame:
    """Principal-curvature frame at a boundary point."""
    x = np.asarray(x, dtype=float)
    phi = _phi_for(d, x)
    _check_on_boundary(d, phi, x)
    nu, jac = normal_jet(d, x)
    E, w = frames_from_jet(nu[None], jac[None])
    if not np.all(np.isfinite(w)):
        raise FrameError("non-finite curvature", location=x.tolist())
    return BoundaryFrame(x, KForm.vector(nu), E[0], w[0])


def boundary_samples(d: Domain, count: int, seed: int = 0) -> np.ndarray:
    """Seeded random boundary points, split across faces in proportion to count."""
    rng = np.random.default_rng(seed)
    per = max(1, count // len(d.faces))
    return np.vstack([f.chart.sample(per, rng) for f in d.faces])


def face_frames(face: Face, X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(ν, Dν, E, γ) at boundary nodes of one face."""
    nu, jac = face.normal_field.jet(X)
    if face.flat:
        N, n = nu.shape
        T = tangent_basis(nu)
        return nu, jac, np.transpose(T, (0, 2, 1)), np.zeros((N, n - 1))
    E, w = frames_from_jet(nu, jac)
    return nu, jac, E, w


def k_convexity(d: Domain, k: int, samples: int = 200, seed: int = 0) -> tuple[float, np.ndarray]:
    """Minimum over boundary samples of the sum of the k smallest curvatures."""
    if not 1 <= k <= d.n - 1:
        raise DomainError(f"k-convexity needs 1 <= k <= n-1, got {k}")
    rng = np.random.default_rng(seed)
    best, witness = np.inf, None
    per = max(1, samples // len(d.faces))
    for face in d.faces:
        X = face.chart.sample(per, rng)
        _, _, _, w = face_frames(face, X)
        sums = np.sort(w, axis=1)[:, :k].sum(axis=1)
        i = int(np.argmin(sums))
        if sums[i] < best:
            best, witness = float(sums[i]), X[i]
    return best, witness


# boundary operators

def L_nu_array(jac: np.ndarray, w: np.ndarray, n: int, k: int) -> np.ndarray:
    """L^ν(ω) = Σ_j dx^j ∧ (∂_j ν ⌟ ω), the same as Σ_I ω^I d(ν⌟dx^I)."""
    if k == 0:
        return np.zeros(w.shape)
    inner = interior_array(jac, w[..., None, :], n, k)
    return d_from_jac(inner, n, k - 1)


def K_nu_array(jac: np.ndarray, w: np.ndarray, n: int, k: int) -> np.ndarray:
    """K^ν(ω) = Σ_j e_j ⌟ (∂_j ν ∧ ω), the same as Σ_I ω^I δ(ν∧dx^I)."""
    if k == n:
        return np.zeros(w.shape)
    outer = wedge_array(jac, w[..., None, :], n, 1, k)
    return delta_from_jac(outer, n, k + 1)


def L_nu(d: Domain, x, w: KForm) -> KForm:
    """L^ν(ω) at x using the level-set extension of ν."""
    _, jac = normal_jet(d, x)
    return KForm(w.n, w.k, L_nu_array(jac, w.coeffs, w.n, w.k))


def K_nu(d: Domain, x, w: KForm) -> KForm:
    """K^ν(ω) at x using the level-set extension of ν."""
    _, jac = normal_jet(d, x)
    return KForm(w.n, w.k, K_nu_array(jac, w.coeffs, w.n, w.k))


def _tangent_products(E: np.ndarray, k: int) -> tuple[list, np.ndarray]:
    """Coefficients of E_I for all I ∈ T^k_{n−1}, shape (..., C(n−1,k), C(n,k))."""
    m = E.shape[-2]
    idx = mi.enumerate_indices(m, k) if k <= m else []
    if not idx:
        return [], np.zeros(E.shape[:-2] + (0, 0))
    prods = np.stack([wedge_vectors(E[..., [i - 1 for i in I], :]) for I in idx], axis=-2)
    return idx, prods


def L_quadratic_array(nu, E, gamma, a, b, k: int) -> np.ndarray:
    """Σ_{I∈T^k_{n−1}} ⟨a;E_I⟩⟨b;E_I⟩ Σ_{j∈I} γ_j at stacked points."""
    idx, P = _tangent_products(E, k)
    if not idx:
        return np.zeros(a.shape[:-1])
    weights = np.stack([gamma[..., [j - 1 for j in I]].sum(-1) if I else np.zeros(gamma.shape[:-1]) for I in idx], -1)
    pa = np.einsum("...ic,...c->...i", P, a)
    pb = np.einsum("...ic,...c->...i", P, b)
    return np.sum(pa * pb * weights, axis=-1)


def K_quadratic_array(nu, E, gamma, a, b, k: int) -> np.ndarray:
    """Σ_{I∈T^{k−1}_{n−1}} ⟨a;ν∧E_I⟩⟨b;ν∧E_I⟩ Σ_{j∉I} γ_j at stacked points."""
    if k == 0:
        return np.zeros(a.shape[:-1])
    m = E.shape[-2]
    n = nu.shape[-1]
    idx = mi.enumerate_indices(m, k - 1)
    total = gamma.sum(-1)
    out = np.zeros(a.shape[:-1])
    for I in idx:
        rows = np.concatenate([nu[..., None, :], E[..., [i - 1 for i in I], :]], axis=-2)
        P = wedge_vectors(rows)
        wsum = total - (gamma[..., [j - 1 for j in I]].sum(-1) if I else 0.0)
        out = out + np.sum(P * a, -1) * np.sum(P * b, -1) * wsum
    return out


def K_nu_quadratic(d: Domain, x, alpha: KForm, beta: KForm) -> float:
    """Curvature form Σ_{I∈T^{k−1}_{n−1}} ⟨α;ν∧E_I⟩⟨β;ν∧E_I⟩ Σ_{j∉I} γ_j."""
    fr = frame(d, x)
    return float(K_quadratic_array(fr.nu.coeffs, fr.E, fr.gamma, alpha.coeffs, beta.coeffs, alpha.k))


def L_nu_quadratic(d: Domain, x, alpha: KForm, beta: KForm) -> float:
    """Curvature form Σ_{I∈T^k_{n−1}} ⟨α;E_I⟩⟨β;E_I⟩ Σ_{j∈I} γ_j."""
    fr = frame(d, x)
    return float(L_quadratic_array(fr.nu.coeffs, fr.E, fr.gamma, alpha.coeffs, beta.coeffs, alpha.k))


class RotatedFrameField(FormField):
    """Frame vector field E(x) = R(x) e0 with R(x) the rotation taking ν(x0) to ν(x).

    For unit vectors a = ν(x0), b = ν(x) and e0 ⊥ a this reads
    E = e0 − (a + b)(b·e0)/(1 + a·b).  Orthonormality of {ν, E_i} holds
    in a neighborhood of x0 and E(x0) = e0.
    """

    def __init__(self, nu_field: FormField, nu0: np.ndarray, e0: np.ndarray):
        self.nu_field = nu_field
        self.nu0 = np.asarray(nu0, dtype=float)
        self.e0 = np.asarray(e0, dtype=float)
        self.n, self.k = nu_field.n, 1

    def jet(self, X):
        b, jb = self.nu_field.jet(X)
        a, e0 = self.nu0, self.e0
        c = b @ e0
        s = 1.0 + b @ a
        apb = a + b
        val = e0 - apb * (c / s)[:, None]
        dc = jb @ e0
        ds = jb @ a
        jac = -jb * (c / s)[:, None, None] - apb[:, None, :] * ((dc * s[:, None] - c[:, None] * ds) / s[:, None] ** 2)[:, :, None]
        return val, jac


def frame_fields(d: Domain, x0) -> tuple[FormField, list[FormField], BoundaryFrame]:
    """ν as a field and principal-direction fields E_i near a boundary point."""
    x0 = np.asarray(x0, dtype=float)
    fr = frame(d, x0)
    nu_field = UnitGradientField(_phi_for(d, x0))
    return nu_field, [RotatedFrameField(nu_field, fr.nu.coeffs, e) for e in fr.E], fr
