"""Named check suites and a deterministic runner.

A check is a zero-argument callable returning a list of
:class:`~gaffney_lab.verify.IdentityResidual`.  Suites are plain lists of
``(name, check)`` pairs; every randomized check draws from its own
generator seeded by ``(seed, position)``, so results do not depend on
scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from math import comb, factorial
from typing import Callable

import numpy as np

from . import geometry as geo
from . import multiindex as mi
from . import verify as v
from .errors import CoverageError, DomainError
from .exterior import hodge_array, interior_array, wedge_array, wedge_vectors
from .fields import (
    Polynomial,
    PolynomialField,
    ScaledField,
    UnitGradientField,
)
from .geometry import K_nu_array, L_nu_array, K_quadratic_array, L_quadratic_array, face_frames
from .quadrature import QuadratureOrder
from .verify import IdentityResidual

SUITES = ("algebra", "pointwise", "boundary", "integral", "examples")
ALGEBRA_TOL = 1e-10
LOCAL_TOL = 1e-9
FRAME_TOL = 1e-8

Check = Callable[[], list[IdentityResidual]]


@dataclass(frozen=True)
class SuiteOptions:
    n: int = 3
    k: int | None = None
    seed: int = 0
    domain: str | None = None
    r: float | None = None
    trials: int = 50
    order: QuadratureOrder | None = None


def worst(anchor: str, lhs: np.ndarray, rhs: np.ndarray, tol: float, relation: str = "abs", **details) -> IdentityResidual:
    """Residual record for the entry where lhs and rhs differ most."""
    lhs, rhs = np.broadcast_arrays(np.asarray(lhs, float), np.asarray(rhs, float))
    if lhs.size == 0:
        return IdentityResidual(anchor, 0.0, 0.0, tol, relation=relation, details={**details, "cases": 0})
    diff = np.abs(lhs - rhs)
    if relation == "eq":
        diff = diff / np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), v.SMALL)
    i = np.unravel_index(int(np.argmax(diff)), diff.shape)
    return IdentityResidual(anchor, float(lhs[i]), float(rhs[i]), tol, relation=relation,
                            details={**details, "cases": int(lhs.shape[0]) if lhs.ndim else 1})


def _rng(opts: SuiteOptions, slot: int) -> np.random.Generator:
    return np.random.default_rng([opts.seed, slot])


# algebra

def sign_lemma_check(n: int) -> list[IdentityResidual]:
    out = []
    for which in ("first", "second"):
        cases = [(l, r) for w, _, _, _, l, r in mi.sign_lemma_cases(n) if w == which]
        lhs = np.array([c[0] for c in cases], dtype=float)
        rhs = np.array([c[1] for c in cases], dtype=float)
        out.append(worst(f"sign-lemma/{which}", lhs, rhs, 0.0, n=n))
    round_trip = []
    for k in range(n):
        for I in mi.enumerate_indices(n, k):
            for i in mi.complement(I, n):
                s, J = mi.sign_insert(i, I)
                t, K = mi.remove(J, i)
                round_trip.append(float(s == t and K == I))
    out.append(worst("sign-insert-remove-round-trip", np.array(round_trip), 1.0, 0.0, n=n))
    return out


def _orthogonal_vectors(rng: np.random.Generator, cases: int, k: int, n: int) -> np.ndarray:
    """Random pairwise-orthogonal vectors with random lengths, shape (cases, k, n)."""
    Q, _ = np.linalg.qr(rng.standard_normal((cases, n, k)))
    lengths = rng.uniform(0.5, 2.0, (cases, k, 1))
    return np.transpose(Q, (0, 2, 1)) * lengths


def _generalized_table(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Signs and positions of (j, s_2, ..., s_k) for all j and all tuples s."""
    tails = list(product(range(1, n + 1), repeat=k - 1))
    sign = np.zeros((n, len(tails)))
    pos = np.zeros((n, len(tails)), dtype=int)
    for j in range(1, n + 1):
        for t, s in enumerate(tails):
            sg, J = mi.sort_sign((j,) + s)
            if sg:
                sign[j - 1, t], pos[j - 1, t] = sg, mi.position(J, n)
    return sign, pos


def algebra_checks(n: int, k: int, rng: np.random.Generator, cases: int = 200) -> list[IdentityResidual]:
    """Decomposition, adjunction, Hodge involution and orthogonal-wedge identities."""
    C = comb(n, k)
    nu = rng.standard_normal((cases, n))
    w = rng.standard_normal((cases, C))
    out = []
    lhs = np.zeros_like(w)
    if k >= 1:
        lhs += wedge_array(nu, interior_array(nu, w, n, k), n, 1, k - 1)
    if k <= n - 1:
        lhs += interior_array(nu, wedge_array(nu, w, n, 1, k), n, k + 1)
    out.append(worst("interior-wedge-decomposition", lhs, np.sum(nu**2, -1)[:, None] * w, ALGEBRA_TOL, n=n, k=k))
    if k <= n - 1:
        b = rng.standard_normal((cases, comb(n, k + 1)))
        out.append(worst("wedge-interior-adjunction",
                         np.sum(wedge_array(nu, w, n, 1, k) * b, -1),
                         np.sum(w * interior_array(nu, b, n, k + 1), -1), ALGEBRA_TOL, n=n, k=k))
    out.append(worst("hodge-involution-sign", hodge_array(hodge_array(w, n, k), n, n - k),
                     (-1) ** (k * (n - k)) * w, ALGEBRA_TOL, n=n, k=k))
    if 1 <= k <= n - 1:
        lam = _orthogonal_vectors(rng, cases, k, n)
        top = wedge_vectors(lam)
        out.append(worst("orthogonal-wedge-norm", np.linalg.norm(top, axis=-1),
                         np.prod(np.linalg.norm(lam, axis=-1), -1), ALGEBRA_TOL, n=n, k=k))
        contr = []
        for i in range(k):
            others = wedge_vectors(np.delete(lam, i, axis=1))
            contr.append(interior_array(lam[:, i], others, n, k - 1) if k >= 2 else np.zeros((cases, 1)))
        out.append(worst("orthogonal-wedge-contraction", np.concatenate(contr, -1), 0.0, ALGEBRA_TOL, n=n, k=k))
        if n <= 5 and k <= 4:
            sign, pos = _generalized_table(n, k)
            A = sign * top[:, pos]
            Cjl = A @ np.transpose(A, (0, 2, 1))
            hats = np.stack([np.sum(wedge_vectors(np.delete(lam, g, axis=1)) ** 2, -1) for g in range(k)], -1)
            formula = factorial(k - 1) * np.einsum("cg,cgj,cgl->cjl", hats, lam, lam)
            out.append(worst("orthogonal-wedge-matrix", Cjl.reshape(cases, -1), formula.reshape(cases, -1),
                             ALGEBRA_TOL, n=n, k=k))
    return out


# pointwise

def _random_points(rng, count: int, n: int, radius: float = 1.0) -> np.ndarray:
    X = rng.standard_normal((count, n))
    X *= (radius * rng.uniform(0, 1, (count, 1)) ** (1 / n)) / np.linalg.norm(X, axis=1, keepdims=True)
    return X


def pointwise_checks(n: int, k: int, rng: np.random.Generator, cases: int = 100) -> list[IdentityResidual]:
    gaps, ups, lows, rem, remk1 = [], [], [], [], []
    for _ in range(cases):
        f = PolynomialField.random(n, k, 3, rng)
        x = _random_points(rng, 1, n)
        jac = f.jet(x)[1]
        g, u, l = v.pointwise_gap_array(jac, n, k)
        gaps.append(g[0]), ups.append(u[0]), lows.append(l[0])
        if k == 1:
            J = jac[0]
            rem.append(2 * sum(J[i, i] * J[j, j] - J[i, j] * J[j, i] for i in range(n) for j in range(i + 1, n)))
            remk1.append(g[0])
    out = [
        worst("pointwise-gap-upper-form", gaps, ups, ALGEBRA_TOL, relation="eq", n=n, k=k),
        worst("pointwise-gap-lower-form", gaps, lows, ALGEBRA_TOL, relation="eq", n=n, k=k),
    ]
    if k == 1:
        out.append(worst("pointwise-gap-one-forms", remk1, rem, ALGEBRA_TOL, relation="eq", n=n))
        korn = []
        scale = []
        for _ in range(cases):
            u = PolynomialField.random(n, 1, 3, rng)
            x = _random_points(rng, 1, n)
            korn.append(v.korn_pointwise_residual(u, x)[0])
            scale.append(np.sum(u.jet(x)[1] ** 2))
        out.append(worst("korn-pointwise-identity", np.array(korn) / np.maximum(scale, v.SMALL), 0.0, 1e-12, n=n))
    return out


# boundary

def boundary_domains(n: int, name: str | None, r: float | None) -> list[geo.Domain]:
    if name is not None:
        return [geo.make_domain(name, n, k=2 if name == "shell" else None, r=r)]
    out = [geo.ball(n), geo.ellipsoid(n, np.linspace(1.0, 2.0, n))]
    if n >= 3:
        out.append(geo.shell(n, 2, 0.5))
    if n == 3:
        out.append(geo.torus())
    return out


def _curved_samples(d: geo.Domain, rng, count: int):
    """(face, nodes) pairs over the curved faces of a domain."""
    curved = [f for f in d.faces if not f.flat]
    per = max(1, count // max(len(curved), 1))
    return [(f, f.chart.sample(per, rng)) for f in curved]


def curvature_oracle(n: int, r: float = 0.5, samples: int = 50) -> list[IdentityResidual]:
    rng = np.random.default_rng(0)
    out = []
    _, _, _, gam = face_frames(geo.ball(n).faces[0], geo.ball(n).faces[0].chart.sample(samples, rng))
    out.append(worst("curvature-oracle-sphere", gam, 1.0, FRAME_TOL, n=n))
    for k in range(2, n):
        d = geo.shell(n, k, r)
        face = next(f for f in d.faces if f.name == "inner cylinder")
        _, _, _, gam = face_frames(face, face.chart.sample(samples, rng))
        want = np.sort(np.array([-1.0 / r] * (n - k) + [0.0] * (k - 1)))
        out.append(worst("curvature-oracle-cylinder", np.sort(gam, axis=1), want, FRAME_TOL, n=n, k=k, r=r))
    return out


def boundary_operator_checks(d: geo.Domain, rng: np.random.Generator, pairs: int = 50) -> list[IdentityResidual]:
    """Curvature formulas, symmetry, extension independence and Hodge duality on one domain."""
    n = d.n
    out = []
    parts = _curved_samples(d, rng, pairs)
    for k in range(1, n):
        C = comb(n, k)
        kf, kd, lf, ld, ks, ls, ext_l, ext_k, dual_l, dual_k = ([] for _ in range(10))
        for face, X in parts:
            nu, jac, E, gam = face_frames(face, X)
            a = rng.standard_normal((len(X), C))
            b = rng.standard_normal((len(X), C))
            na, nb = interior_array(nu, a, n, k), interior_array(nu, b, n, k)
            wa, wb = wedge_array(nu, a, n, 1, k), wedge_array(nu, b, n, 1, k)
            Kna = K_nu_array(jac, na, n, k - 1)
            Knb = K_nu_array(jac, nb, n, k - 1)
            kd.append(np.sum(Kna * nb, -1))
            kf.append(K_quadratic_array(nu, E, gam, a, b, k))
            ks.append(np.sum(Knb * na, -1))
            Lwa = L_nu_array(jac, wa, n, k + 1)
            Lwb = L_nu_array(jac, wb, n, k + 1)
            ld.append(np.sum(Lwa * wb, -1))
            lf.append(L_quadratic_array(nu, E, gam, a, b, k))
            ls.append(np.sum(Lwb * wa, -1))
            # extension φ·g with g > 0 near the boundary
            g = 1.0 + 0.3 * Polynomial.coordinate(n, 1) + 0.2 * Polynomial.coordinate(n, 2) ** 2
            _, jac2 = UnitGradientField(face.phi * g).jet(X)
            ext_l.append(np.stack([wedge_array(nu, L_nu_array(J, a, n, k), n, 1, k) for J in (jac, jac2)]))
            ext_k.append(np.stack([interior_array(nu, K_nu_array(J, a, n, k), n, k) for J in (jac, jac2)]))
            # Hodge duality: ω with ν⌟ω = 0 against ∗ω
            sigma = rng.standard_normal((len(X), comb(n, k + 1)))
            om = interior_array(nu, sigma, n, k + 1)
            wom = wedge_array(nu, om, n, 1, k)
            dual_l.append(np.sum(L_nu_array(jac, wom, n, k + 1) * wom, -1))
            star = hodge_array(om, n, k)
            nstar = interior_array(nu, star, n, n - k)
            dual_k.append(np.sum(K_nu_array(jac, nstar, n, n - k - 1) * nstar, -1))
        cat = np.concatenate
        meta = {"domain": d.label, "k": k}
        out.append(worst("K-curvature-formula", cat(kd), cat(kf), FRAME_TOL, **meta))
        out.append(worst("L-curvature-formula", cat(ld), cat(lf), FRAME_TOL, **meta))
        out.append(worst("K-symmetry", cat(kd), cat(ks), LOCAL_TOL, **meta))
        out.append(worst("L-symmetry", cat(ld), cat(ls), LOCAL_TOL, **meta))
        el, ek = cat(ext_l, axis=1), cat(ext_k, axis=1)
        out.append(worst("L-extension-independence", el[0], el[1], FRAME_TOL, **meta))
        out.append(worst("K-extension-independence", ek[0], ek[1], FRAME_TOL, **meta))
        out.append(worst("quadratic-form-hodge-duality", cat(dual_l), cat(dual_k), LOCAL_TOL, **meta))
    return out


def curvature_sum_checks(d: geo.Domain, rng: np.random.Generator, points: int = 4) -> list[IdentityResidual]:
    n = d.n
    out = []
    for face, X in _curved_samples(d, rng, points):
        for x in X:
            if isinstance(d, geo.PiecewiseDomain):
                # frame fields use the face's defining function
                d_face = geo.LevelSetDomain(d.name, n, d.params, (), (face,), d.diameter, d.inside, phi=face.phi)
            else:
                d_face = d
            for size in range(0, n - 1):
                sets = mi.enumerate_indices(n - 1, size)
                res = [v.curvature_sum_check(d_face, x, I) for I in sets]
                out.append(max(res, key=lambda r: r.abs))
                mixed = [v.curvature_sum_check(d_face, x, I, J) for I in sets for J in sets if I < J]
                if mixed:
                    out.append(max(mixed, key=lambda r: r.abs))
    return out


def annulus_sign_check(n: int, r: float = 0.5) -> list[IdentityResidual]:
    """⟨K^ν(ν⌟ω);ν⌟ω⟩ for the radial field on the inner sphere is negative."""
    d = geo.annulus(n, r)
    face = next(f for f in d.faces if f.name == "inner sphere")
    X = face.chart.sample(64, np.random.default_rng(0))
    nu, jac, _, _ = face_frames(face, X)
    w = v.blowup_field(n, 1).values(X)
    nw = interior_array(nu, w, n, 1)
    val = np.sum(K_nu_array(jac, nw, n, 0) * nw, -1)
    i = int(np.argmin(val))
    return [IdentityResidual("annulus-inner-sphere-sign", float(val[i]), 0.0, 0.0, location=X[i].tolist(),
                             relation="lt", details={"domain": d.label})]


# integral

def integral_domains(n: int, name: str | None, r: float | None, k: int | None) -> list[geo.Domain]:
    if name is not None:
        return [geo.make_domain(name, n, k=k, r=r)]
    return [geo.ball(n), geo.annulus(n, 0.5 if r is None else r)]


POLYTOPE_ORDER = QuadratureOrder(32, 64, 12)


def integral_identity_checks(d: geo.Domain, k: int, rng, pairs: int, order) -> list[IdentityResidual]:
    out = []
    for _ in range(pairs):
        a = PolynomialField.random(d.n, k, 3, rng)
        b = PolynomialField.random(d.n, k, 3, rng)
        out.append(v.integral_identity_residual(d, a, b, order))
    return out


def polytope_checks(d: geo.Domain, k: int, rng, order) -> list[IdentityResidual]:
    out = []
    for bc in ("tangential", "normal"):
        f, text = v.admissible_field(d, k, bc, rng)
        rec = v.energy_equality(d, f, bc, "polytope-equality", order or POLYTOPE_ORDER)
        rec.details["construction"] = text
        out.append(rec)
        out.append(v.piecewise_boundary_identity(d, f, bc, order or POLYTOPE_ORDER))
    return out


def smooth_face_cross_check(n: int, order) -> list[IdentityResidual]:
    """Piecewise formula on the ball against the integral identity's curvature terms."""
    d = geo.ball(n)
    rng = np.random.default_rng(1)
    out = []
    f, _ = v.admissible_field(d, 1, "normal", rng)
    pw = v.piecewise_boundary_identity(d, f, "normal", order)
    ii = v.integral_identity_residual(d, f, f, order)
    out.append(IdentityResidual("piecewise-vs-integral-identity", pw.rhs, ii.rhs, v.INTEGRAL_TOL,
                                details={"domain": d.label, "bc": "normal"}))
    f, _ = v.admissible_field(d, 1, "tangential", rng)
    pw = v.piecewise_boundary_identity(d, f, "tangential", order)
    ii = v.integral_identity_residual(d, f, f, order)
    out.append(IdentityResidual("piecewise-vs-integral-identity", pw.rhs, ii.rhs, v.INTEGRAL_TOL,
                                details={"domain": d.label, "bc": "tangential"}))
    return out


# examples

BLOWUP_CASES = ((3, 1, 0.1), (4, 2, 0.1), (3, 2, 0.1))


def blowup_checks() -> list[IdentityResidual]:
    out = []
    for n, k, r in BLOWUP_CASES:
        q = v.shell_quotient(n, k, r).quotient
        out.append(IdentityResidual("annulus-blowup-closed-form", q, v.annulus_quotient_closed_form(n, k, r),
                                    v.INTEGRAL_TOL, details={"n": n, "k": k, "r": r}))
    out.append(IdentityResidual("annulus-blowup-value", v.annulus_quotient_closed_form(3, 1, 0.1), 222.0,
                                v.INTEGRAL_TOL, details={"n": 3, "k": 1, "r": 0.1}))
    for n, k, tol in ((3, 1, 0.05), (4, 2, 0.05), (3, 2, 0.10), (4, 3, 0.10)):
        r = 1e-3
        q = v.annulus_quotient_closed_form(n, k, r)
        out.append(IdentityResidual("annulus-blowup-asymptote", q, v.annulus_asymptote(n, k, r), tol,
                                    details={"n": n, "k": k, "r": r}))
    return out


MS_VALUES = (5, 10, 20, 40)


def maximizing_sequence_checks(n: int = 3, k: int = 1) -> list[IdentityResidual]:
    reps = {m: v.maximizing_sequence_report(n, k, m) for m in MS_VALUES}
    out = [
        IdentityResidual("maximizing-sequence-equality", rep.numerator, rep.d_sq + rep.delta_sq, v.INTEGRAL_TOL,
                         details={"n": n, "k": k, "m": m, "quotient": rep.quotient})
        for m, rep in reps.items()
    ]
    for a, b in zip(MS_VALUES, MS_VALUES[1:]):
        out.append(IdentityResidual("maximizing-sequence-monotone", reps[a].quotient, reps[b].quotient, 0.0,
                                    relation="lt", details={"n": n, "k": k, "m": [a, b]}))
    out.append(IdentityResidual("maximizing-sequence-limit", reps[40].quotient, 0.9, 0.0, relation="gt",
                                details={"n": n, "k": k, "m": 40}))
    out.append(IdentityResidual("maximizing-sequence-growth", reps[40].numerator, 2 * reps[20].numerator, 0.0,
                                relation="ge", details={"n": n, "k": k, "m": [20, 40]}))
    return out


def _solenoidal_cube_field() -> PolynomialField:
    """c(x3)(∂_2ψ, −∂_1ψ, 0) with ψ = b(x1)²b(x2)², b(t) = t(1−t): divergence free, zero on ∂Q."""
    x = [Polynomial.coordinate(3, i) for i in (1, 2, 3)]
    b = [xi * (1.0 - xi) for xi in x]
    psi = b[0] ** 2 * b[1] ** 2
    c = b[2]
    zero = Polynomial.constant(3, 0.0)
    return v.polynomial_form(3, 1, [c * psi.deriv(1), -(c * psi.deriv(0)), zero])


def korn_checks(rng, order) -> list[IdentityResidual]:
    d = geo.box(3)
    out = []
    for bc in ("tangential", "normal"):
        u, text = v.admissible_field(d, 1, bc, rng)
        rec = v.korn_check(u, d, bc, order or POLYTOPE_ORDER)
        rec.details["construction"] = text
        out.append(rec)
    rec = v.korn_check(_solenoidal_cube_field(), d, "tangential", order or POLYTOPE_ORDER)
    margin = rec.lhs / rec.details["grad_sq"]
    out.append(IdentityResidual("korn-margin-solenoidal", margin, 0.0, 1e-10, relation="abs",
                                details={"domain": d.label, "div_sq": rec.details["div_sq"]}))
    return out


def duality_checks(rng) -> list[IdentityResidual]:
    out = []
    d = geo.ball(3)
    for k in range(4):
        f, _ = v.admissible_field(d, k, "tangential", rng)
        out.append(v.quotient_duality(d, f, v.harness_order(d)))
    return out


def scale_checks(rng, t: float = 1.7) -> list[IdentityResidual]:
    out = []
    n = 3
    for k in (1, 2):
        d, dt = geo.ball(n), geo.ball(n, t)
        f, _ = v.admissible_field(d, k, "tangential", rng)
        a = v.gaffney_quotient(d, f, "tangential", v.harness_order(d))
        b = v.gaffney_quotient(dt, ScaledField(f, t), "tangential", v.harness_order(d))
        meta = {"k": k, "t": t}
        out.append(IdentityResidual("scale-covariance-gradient", b.numerator, t ** (n - 2) * a.numerator, 1e-9, details=meta))
        out.append(IdentityResidual("scale-covariance-d-delta", b.d_sq + b.delta_sq, t ** (n - 2) * (a.d_sq + a.delta_sq),
                                    1e-9, details=meta))
        out.append(IdentityResidual("scale-covariance-mass", b.norm_sq, t**n * a.norm_sq, 1e-9, details=meta))
    return out


def harness_configs(n: int = 3):
    """(domain factory, k, bc, expect_counterexample) for the falsification runs."""
    out = [(lambda k=k: geo.ball(n), k, "tangential", False) for k in range(n + 1)]
    if n == 3:
        out += [(geo.torus, 1, "tangential", False), (geo.torus, 2, "normal", False), (geo.torus, 2, "tangential", False)]
    out.append((lambda: geo.annulus(n, 0.5), 1, "tangential", True))
    return out


def harness_check(factory, k: int, bc: str, expect: bool, trials: int, seed: int) -> list[IdentityResidual]:
    d = factory()
    extra = [(v.blowup_field(d.n, 1), "radial field s^-n")] if expect else []
    rep = v.sharp_inequality_harness(d, k, bc, trials, seed, extra=extra)
    details = {key: val for key, val in rep.record().items() if key != "constructions"}
    if expect:
        return [IdentityResidual("sharp-gaffney-counterexample", rep.max_sharp_ratio, 1.0, 0.0, relation="gt",
                                 details=details)]
    min_conv = geo.k_convexity(d, d.n - k if bc == "tangential" else k)[0] if 0 < k < d.n else None
    details["convexity_min"] = min_conv
    return [IdentityResidual("sharp-gaffney-harness", rep.max_quotient, 1.0, v.INTEGRAL_TOL, relation="le",
                             details=details)]


# assembling suites

def build_checks(suite: str, opts: SuiteOptions) -> list[tuple[str, Check]]:
    """Checks for one suite name (or ``"all"``); raises DomainError for invalid options."""
    if suite == "all":
        return [c for s in SUITES for c in build_checks(s, opts)]
    n = opts.n
    mi.check_dimension(n)
    ks = [opts.k] if opts.k is not None else None
    if opts.k is not None and not 0 <= opts.k <= n:
        raise DomainError(f"k={opts.k} outside 0..{n}")
    checks: list[tuple[str, Check]] = []
    slot = [0]

    def add(name, fn):
        s = slot[0]
        slot[0] += 1
        checks.append((name, lambda: fn(_rng(opts, s))))

    if suite == "algebra":
        checks.append((f"sign-lemma n={n}", lambda: sign_lemma_check(n)))
        for k in ks or range(n + 1):
            add(f"algebra n={n} k={k}", lambda rng, k=k: algebra_checks(n, k, rng))
    elif suite == "pointwise":
        if opts.k is not None and not 1 <= opts.k <= n - 1:
            raise DomainError(f"pointwise gap needs 1 <= k <= n-1, got k={opts.k}, n={n}")
        for k in ks or range(1, n):
            add(f"pointwise n={n} k={k}", lambda rng, k=k: pointwise_checks(n, k, rng))
    elif suite == "boundary":
        if n < 2:
            raise DomainError("boundary checks need n >= 2")
        checks.append((f"curvature-oracle n={n}", lambda: curvature_oracle(n)))
        for d in boundary_domains(n, opts.domain, opts.r):
            add(f"boundary operators {d.label}", lambda rng, d=d: boundary_operator_checks(d, rng))
            add(f"curvature sums {d.label}", lambda rng, d=d: curvature_sum_checks(d, rng))
        checks.append((f"annulus sign n={n}", lambda: annulus_sign_check(n)))
    elif suite == "integral":
        if n < 2:
            raise DomainError("integral checks need n >= 2")
        for d in integral_domains(n, opts.domain, opts.r, opts.k):
            if isinstance(d, geo.LevelSetDomain):
                for k in ks or range(n + 1):
                    add(f"integral identity {d.label} k={k}",
                        lambda rng, d=d, k=k: integral_identity_checks(d, k, rng, 10, opts.order))
            else:
                for k in ks or range(n + 1):
                    add(f"piecewise {d.label} k={k}", lambda rng, d=d, k=k: polytope_checks(d, k, rng, opts.order))
        if opts.domain is None:
            for d in (geo.box(n), geo.box_with_hole(n)):
                for k in ks or range(n + 1):
                    add(f"polytope {d.label} k={k}", lambda rng, d=d, k=k: polytope_checks(d, k, rng, opts.order))
            checks.append((f"smooth-face cross-check n={n}", lambda: smooth_face_cross_check(n, opts.order)))
    elif suite == "examples":
        checks.append(("blow-up", blowup_checks))
        checks.append(("maximizing sequence", maximizing_sequence_checks))
        add("korn", lambda rng: korn_checks(rng, opts.order))
        add("duality", duality_checks)
        add("scale covariance", scale_checks)
        for i, (factory, k, bc, expect) in enumerate(harness_configs(3)):
            checks.append((f"harness {i} k={k} {bc}",
                           lambda f=factory, k=k, bc=bc, e=expect, i=i: harness_check(f, k, bc, e, opts.trials,
                                                                                           opts.seed + 1000 * i)))
    else:
        raise DomainError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    return checks


def thread_count() -> int:
    raw = os.environ.get("GAFFNEY_LAB_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        return max(1, int(raw))
    except ValueError:
        raise DomainError(f"GAFFNEY_LAB_THREADS must be an integer, got {raw!r}") from None


def run_checks(checks: list[tuple[str, Check]], threads: int | None = None) -> list[dict]:
    """Run checks (possibly in parallel) and return records in check order."""
    threads = thread_count() if threads is None else threads

    def one(item):
        name, fn = item
        try:
            return [dict(rec.record(), check=name) for rec in fn()]
        except (DomainError, CoverageError) as exc:
            return [{"anchor": "check-error", "check": name, "pass": False, "error": f"{type(exc).__name__}: {exc}"}]

    if threads <= 1:
        results = [one(c) for c in checks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, checks))
    return [rec for group in results for rec in group]
