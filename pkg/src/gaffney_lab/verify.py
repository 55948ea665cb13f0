"""Executable residual checks for the Gaffney identities, quotient
evaluation, and the worked examples (annulus blow-up, sin-bump sequence).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, log
from typing import Callable, Sequence

import numpy as np

from . import multiindex as mi
from .errors import BoundaryConditionError, DomainError
from .exterior import KForm, hodge_matrix, interior_array, wedge_array
from .fields import (
    ConstantField,
    FormField,
    HodgeField,
    InteriorField,
    Polynomial,
    PolynomialField,
    Profile,
    SumField,
    WedgeField,
    as_points,
    build_radial_annulus_field,
    build_shell_field,
    build_sin_bump_field,
    d_from_jac,
    delta_from_jac,
)
from .geometry import (
    Domain,
    Face,
    LevelSetDomain,
    K_quadratic_array,
    L_quadratic_array,
    PiecewiseDomain,
    ball,
    face_frames,
    frame_fields,
    sphere_measure,
)
from .quadrature import (
    QuadratureOrder,
    boundary_rule,
    default_order,
    integrate,
    integrate_boundary,
    volume_integral,
    boundary_integral,
    volume_rule,
)

SMALL = 1e-10
POINTWISE_TOL = 1e-9
INTEGRAL_TOL = 1e-6
BC_TOL = 1e-8


@dataclass
class IdentityResidual:
    """Outcome of comparing two sides of an identity or inequality.

    ``relation`` is ``"eq"`` (lhs = rhs), ``"le"``/``"ge"`` (lhs <= / >= rhs
    up to relative slack), ``"lt"``/``"gt"`` (strict, no slack) or ``"abs"``
    (|lhs − rhs| <= tolerance).  Equalities pass iff the relative residual
    is within tolerance, with an absolute fallback when both sides are tiny.
    """

    anchor: str
    lhs: float
    rhs: float
    tolerance: float
    location: object = "integral"
    relation: str = "eq"
    details: dict = field(default_factory=dict)

    @property
    def abs(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def scale(self) -> float:
        return max(abs(self.lhs), abs(self.rhs))

    @property
    def rel(self) -> float:
        return self.abs / self.scale if self.scale > SMALL else self.abs

    @property
    def passed(self) -> bool:
        slack = self.tolerance * max(self.scale, SMALL)
        if self.relation == "abs":
            return self.abs <= self.tolerance
        if self.relation == "lt":
            return self.lhs < self.rhs
        if self.relation == "gt":
            return self.lhs > self.rhs
        if self.relation == "le":
            return self.lhs - self.rhs <= slack
        if self.relation == "ge":
            return self.rhs - self.lhs <= slack
        if self.scale < SMALL:
            return self.abs <= max(self.tolerance, SMALL)
        return self.rel <= self.tolerance

    def record(self) -> dict:
        out = {
            "anchor": self.anchor,
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "abs": float(self.abs),
            "rel": float(self.rel),
            "tol": float(self.tolerance),
            "pass": bool(self.passed),
            "relation": self.relation,
            "location": _jsonable(self.location),
        }
        if self.details:
            out["details"] = _jsonable(self.details)
        return out


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)) and not isinstance(v, bool):
        return int(v)
    return v


@dataclass
class GaffneyReport:
    """Terms of the Gaffney quotient ‖∇ω‖² / (‖dω‖² + ‖δω‖² + ‖ω‖²)."""

    numerator: float
    d_sq: float
    delta_sq: float
    norm_sq: float
    bc: str
    bc_residual: float
    errors: dict
    domain: str = ""

    @property
    def denominator(self) -> float:
        return self.d_sq + self.delta_sq + self.norm_sq

    @property
    def quotient(self) -> float:
        return self.numerator / self.denominator

    @property
    def sharp_ratio(self) -> float:
        """‖∇ω‖² / (‖dω‖² + ‖δω‖²), the ratio bounded by 1 in the sharp inequality."""
        s = self.d_sq + self.delta_sq
        return self.numerator / s if s > 0 else np.inf

    def record(self) -> dict:
        return _jsonable(
            {
                "domain": self.domain,
                "bc": self.bc,
                "numerator": self.numerator,
                "d_sq": self.d_sq,
                "delta_sq": self.delta_sq,
                "norm_sq": self.norm_sq,
                "quotient": self.quotient,
                "bc_residual": self.bc_residual,
                "errors": self.errors,
            }
        )


# pointwise gap

def _gap_terms(n: int, k: int):
    """Index tables for both multi-index forms of the pointwise gap."""
    upper, lower = [], []
    if k + 1 <= n:
        for I in mi.enumerate_indices(n, k + 1):
            for i in I:
                for j in I:
                    if i != j:
                        si, Ii = mi.remove(I, i)
                        sj, Ij = mi.remove(I, j)
                        upper.append((i - 1, mi.position(Ii, n), j - 1, mi.position(Ij, n), si * sj))
    if k >= 1:
        for I in mi.enumerate_indices(n, k - 1):
            out = mi.complement(I, n)
            for i in out:
                for j in out:
                    if i != j:
                        si, iI = mi.sign_insert(i, I)
                        sj, jI = mi.sign_insert(j, I)
                        lower.append((i - 1, mi.position(iI, n), j - 1, mi.position(jI, n), si * sj))
    return [np.array(t, dtype=int).reshape(-1, 5) for t in (upper, lower)]


def _gap_sum(jac: np.ndarray, table: np.ndarray) -> np.ndarray:
    if len(table) == 0:
        return np.zeros(jac.shape[0])
    i, A, j, B, s = table.T
    return np.sum(s * (jac[:, i, A] * jac[:, j, B] - jac[:, i, B] * jac[:, j, A]), axis=1)


def pointwise_gap_array(jac: np.ndarray, n: int, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(|dω|²+|δω|²−|∇ω|², upper-index form, lower-index form) per point.

    The lower form sums over ordered pairs i ≠ j ∉ I, i.e. twice the sum
    over i < j.
    """
    if not 1 <= k <= n - 1:
        raise DomainError(f"pointwise gap needs 1 <= k <= n-1, got k={k}, n={n}")
    dw = d_from_jac(jac, n, k)
    de = delta_from_jac(jac, n, k)
    gap = np.sum(dw**2, -1) + np.sum(de**2, -1) - np.sum(jac**2, axis=(-2, -1))
    upper, lower = _gap_terms(n, k)
    return gap, _gap_sum(jac, upper), _gap_sum(jac, lower)


def pointwise_gap(f: FormField, x) -> tuple[float, float, float]:
    """Gap |dω|²+|δω|²−|∇ω|² at x with both multi-index expansions."""
    X, single = as_points(x, f.n)
    out = pointwise_gap_array(f.jet(X)[1], f.n, f.k)
    return tuple(float(v[0]) for v in out) if single else out


# volume / boundary integrands

def _energy_columns(jac: np.ndarray, val: np.ndarray, n: int, k: int) -> np.ndarray:
    """Columns |∇ω|², |dω|², |δω|², |ω|² per node."""
    grad = np.sum(jac**2, axis=(-2, -1))
    dsq = np.sum(d_from_jac(jac, n, k) ** 2, -1) if k < n else np.zeros(len(val))
    esq = np.sum(delta_from_jac(jac, n, k) ** 2, -1) if k > 0 else np.zeros(len(val))
    return np.column_stack([grad, dsq, esq, np.sum(val**2, -1)])


def _trace(nu: np.ndarray, v: np.ndarray, n: int, k: int, bc: str) -> np.ndarray:
    """|ν∧ω| (tangential) or |ν⌟ω| (normal) per node."""
    if bc == "tangential":
        if k == n:
            return np.zeros(len(v))
        return np.linalg.norm(wedge_array(nu, v, n, 1, k), axis=-1)
    if bc == "normal":
        if k == 0:
            return np.zeros(len(v))
        return np.linalg.norm(interior_array(nu, v, n, k), axis=-1)
    raise DomainError(f"boundary condition must be 'tangential' or 'normal', got {bc!r}")


def boundary_condition_residual(d: Domain, f: FormField, bc: str, order: QuadratureOrder | None = None):
    """(max trace residual, field scale, worst face name, worst point) over boundary nodes."""
    rule = boundary_rule(d, order or default_order(d.n))
    worst, where, scale = 0.0, None, 0.0
    for face, r in rule.parts:
        vals = f.values(r.nodes)
        nu = face.normal_field.jet(r.nodes)[0]
        res = _trace(nu, vals, d.n, f.k, bc)
        scale = max(scale, float(np.max(np.linalg.norm(vals, axis=-1), initial=0.0)))
        i = int(np.argmax(res))
        if res[i] > worst:
            worst, where = float(res[i]), (face.name, r.nodes[i].tolist())
    return worst, scale, where


def _require_bc(d: Domain, f: FormField, bc: str, order, volume_scale: float) -> float:
    worst, scale, where = boundary_condition_residual(d, f, bc, order)
    ref = max(scale, volume_scale, SMALL)
    if worst > BC_TOL * ref:
        raise BoundaryConditionError(
            f"{bc} boundary condition violated: residual {worst:.3e} at {where}", worst, where
        )
    return worst


def gaffney_quotient(d: Domain, f: FormField, bc: str, order: QuadratureOrder | None = None,
                     check_bc: bool = True) -> GaffneyReport:
    """Evaluate ‖∇f‖²/(‖df‖²+‖δf‖²+‖f‖²) on ``d`` for an admissible field."""
    order = order or default_order(d.n)
    res = volume_integral(d, lambda X: _energy_columns(*reversed(f.jet(X)), f.n, f.k), order)
    grad, dsq, esq, nsq = (float(v) for v in res.value)
    if nsq <= 0.0:
        raise DomainError("quotient of the zero field is undefined")
    vol_scale = float(np.sqrt(nsq / d.volume)) if d.volume else 0.0
    resid = _require_bc(d, f, bc, order, vol_scale) if check_bc else float("nan")
    errs = dict(zip(("numerator", "d_sq", "delta_sq", "norm_sq"), (float(e) for e in res.error)))
    return GaffneyReport(grad, dsq, esq, nsq, bc, resid, errs, d.label)


def annulus_quotient_closed_form(n: int, k: int, r: float) -> float:
    """Exact quotient of the blow-up field on Ω_k (annulus when k = 1)."""
    if not 1 <= k < n:
        raise DomainError(f"need 1 <= k < n, got k={k}, n={n}")
    if not 0 < r < 1:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    p = n - k + 1
    sigma = sphere_measure(p)
    num = sigma * (n - k) * (r ** (-(n - k + 1)) - 1.0)
    if n > k + 1:
        den = sigma / (n - k - 1) * (r ** (-(n - k - 1)) - 1.0)
    else:
        den = -sigma * log(r)
    return num / den


def annulus_asymptote(n: int, k: int, r: float) -> float:
    """Small-r law: (n−k−1)(n−k)/r² for n > k+1, −1/(r² log r) for n = k+1."""
    if n > k + 1:
        return (n - k - 1) * (n - k) / r**2
    return -1.0 / (r**2 * log(r))


def blowup_field(n: int, k: int) -> FormField:
    """Radial (k = 1) or shell field with the co-closed profile s^{−(n−k+1)}."""
    prof = Profile.power(-(n - k + 1))
    return build_radial_annulus_field(n, prof) if k == 1 else build_shell_field(n, k, prof)


def shell_quotient(n: int, k: int, r: float, order: QuadratureOrder | None = None) -> GaffneyReport:
    from .geometry import shell

    return gaffney_quotient(shell(n, k, r), blowup_field(n, k), "tangential", order)


# integral identity

def _boundary_side_columns(face: Face, X: np.ndarray, alpha: FormField, beta: FormField) -> np.ndarray:
    """Per-node columns: ⟨ν∧d(ν⌟α);ν∧β⟩, ⟨ν⌟δ(ν∧α);ν⌟β⟩, L-curvature sum, K-curvature sum."""
    n, k = alpha.n, alpha.k
    nu, jnu, E, gam = face_frames(face, X)
    a, ja = alpha.jet(X)
    b = beta.values(X)
    N = len(X)
    t1 = np.zeros(N)
    t2 = np.zeros(N)
    if 1 <= k <= n - 1:
        jna = interior_array(jnu, a[:, None, :], n, k) + interior_array(nu[:, None, :], ja, n, k)
        dna = d_from_jac(jna, n, k - 1)
        t1 = np.sum(wedge_array(nu, dna, n, 1, k) * wedge_array(nu, b, n, 1, k), -1)
        jwa = wedge_array(jnu, a[:, None, :], n, 1, k) + wedge_array(nu[:, None, :], ja, n, 1, k)
        dwa = delta_from_jac(jwa, n, k + 1)
        t2 = np.sum(interior_array(nu, dwa, n, k) * interior_array(nu, b, n, k), -1)
    c1 = L_quadratic_array(nu, E, gam, a, b, k)
    c2 = K_quadratic_array(nu, E, gam, a, b, k)
    return np.column_stack([t1, t2, c1, c2])


def _volume_side(X: np.ndarray, alpha: FormField, beta: FormField) -> np.ndarray:
    n, k = alpha.n, alpha.k
    _, ja = alpha.jet(X)
    _, jb = beta.jet(X)
    out = -np.sum(ja * jb, axis=(-2, -1))
    if k < n:
        out += np.sum(d_from_jac(ja, n, k) * d_from_jac(jb, n, k), -1)
    if k > 0:
        out += np.sum(delta_from_jac(ja, n, k) * delta_from_jac(jb, n, k), -1)
    return out


def integral_identity_residual(d: Domain, alpha: FormField, beta: FormField,
                               order: QuadratureOrder | None = None, tol: float = INTEGRAL_TOL) -> IdentityResidual:
    """Compare ∫(⟨dα;dβ⟩+⟨δα;δβ⟩−⟨∇α;∇β⟩) with its boundary expression.

    The boundary side is −∫(⟨ν∧d(ν⌟α);ν∧β⟩ + ⟨ν⌟δ(ν∧α);ν⌟β⟩) plus the two
    curvature sums; ν is the level-set extension of every face.
    """
    if alpha.n != d.n or beta.n != d.n or alpha.k != beta.k:
        raise DomainError("fields must share the domain dimension and rank")
    order = order or default_order(d.n)
    lhs = volume_integral(d, lambda X: _volume_side(X, alpha, beta), order, tol=tol / 2)
    rhs = boundary_integral(d, lambda X, face: _boundary_side_columns(face, X, alpha, beta), order, tol=tol / 2)
    t1, t2, c1, c2 = (float(v) for v in rhs.value)
    return IdentityResidual(
        "integral-identity-with-curvatures",
        float(lhs.value),
        -t1 - t2 + c1 + c2,
        tol,
        details={
            "domain": d.label,
            "k": alpha.k,
            "normal_trace_term": t1,
            "tangential_trace_term": t2,
            "tangential_curvature_sum": c1,
            "normal_curvature_sum": c2,
            "lhs_error": float(lhs.error),
            "rhs_error": float(np.sum(rhs.error)),
        },
    )


def piecewise_boundary_identity(d: Domain, f: FormField, bc: str, order: QuadratureOrder | None = None,
                                tol: float = INTEGRAL_TOL) -> IdentityResidual:
    """‖df‖²+‖δf‖²−‖∇f‖² = Σ_faces ∫ Σ_l γ_l |E_l∧f|² (or |E_l⌟f|² for normal bc)."""
    order = order or default_order(d.n)
    n, k = f.n, f.k
    energy = volume_integral(d, lambda X: _energy_columns(*reversed(f.jet(X)), n, k), order, tol=tol / 2)
    grad, dsq, esq, nsq = (float(v) for v in energy.value)
    vol_scale = float(np.sqrt(nsq / d.volume)) if d.volume else 0.0
    resid = _require_bc(d, f, bc, order, vol_scale)

    def integrand(X, face):
        if face.flat:
            return np.zeros(len(X))
        _, _, E, gam = face_frames(face, X)
        v = f.values(X)
        total = np.zeros(len(X))
        for l in range(n - 1):
            if bc == "tangential":
                t = wedge_array(E[:, l], v, n, 1, k) if k < n else np.zeros((len(X), 1))
            else:
                t = interior_array(E[:, l], v, n, k) if k > 0 else np.zeros((len(X), 1))
            total += gam[:, l] * np.sum(t**2, -1)
        return total

    rhs = boundary_integral(d, integrand, order, tol=tol / 2)
    return IdentityResidual(
        "piecewise-curvature-identity",
        dsq + esq - grad,
        float(rhs.value),
        tol,
        details={"domain": d.label, "bc": bc, "grad_sq": grad, "d_sq": dsq, "delta_sq": esq, "bc_residual": resid},
    )


# Korn

def korn_check(u: FormField, d: Domain, bc: str = "tangential", order: QuadratureOrder | None = None,
               tol: float = INTEGRAL_TOL) -> IdentityResidual:
    """Margin ‖∇^sym u‖² − ½‖∇u‖² against ½‖div u‖² on a domain with γ <= 0.

    The margin equals ½‖div u‖² when every face is flat and dominates it
    when curvatures are nonpositive.
    """
    if u.k != 1:
        raise DomainError("Korn check needs a 1-form field")
    n = d.n
    order = order or default_order(n)
    rule = boundary_rule(d, order)
    gmax = max(float(np.max(face_frames(face, r.nodes)[3], initial=0.0)) for face, r in rule.parts)
    if gmax > 1e-9:
        raise DomainError(f"domain has a positive principal curvature ({gmax:.3e})")
    flat = all(face.flat for face in d.faces)

    def cols(X):
        _, jac = u.jet(X)
        A = jac  # A[:, j, i] = ∂_j u^i
        sym = 0.5 * (A + np.transpose(A, (0, 2, 1)))
        grad = np.sum(A**2, axis=(1, 2))
        symsq = np.sum(sym**2, axis=(1, 2))
        curl = np.sum(d_from_jac(jac, n, 1) ** 2, -1)
        div = np.trace(A, axis1=1, axis2=2) ** 2
        return np.column_stack([grad, symsq, curl, div, np.abs(grad - symsq - 0.5 * curl) / np.maximum(grad, SMALL)])

    res = volume_integral(d, cols, order, tol=tol / 2)
    grad, symsq, curl, div, _ = (float(v) for v in res.value)
    rule_v = volume_rule(d, order)
    pointwise = float(np.max(cols(rule_v.nodes[:: max(1, len(rule_v) // 4096)])[:, 4]))
    nsq = float(volume_integral(d, lambda X: np.sum(u.values(X) ** 2, -1), order).value)
    resid = _require_bc(d, u, bc, order, float(np.sqrt(nsq / d.volume)) if d.volume else 0.0)
    return IdentityResidual(
        "korn-margin",
        symsq - 0.5 * grad,
        0.5 * div,
        tol,
        relation="eq" if flat else "ge",
        details={
            "grad_sq": grad, "sym_sq": symsq, "curl_sq": curl, "div_sq": div,
            "korn_ratio": grad / (2 * symsq) if symsq > 0 else None,
            "pointwise_identity_residual": pointwise, "bc_residual": resid,
        },
    )


def korn_pointwise_residual(u: FormField, X) -> np.ndarray:
    """| |∇u|² − |∇^sym u|² − ½|curl u|² | per point."""
    X, _ = as_points(X, u.n)
    A = u.jet(X)[1]
    sym = 0.5 * (A + np.transpose(A, (0, 2, 1)))
    curl = np.sum(d_from_jac(A, u.n, 1) ** 2, -1)
    return np.abs(np.sum(A**2, axis=(1, 2)) - np.sum(sym**2, axis=(1, 2)) - 0.5 * curl)


# maximizing sequence

def sinbump_order(m: float, n: int) -> QuadratureOrder:
    """Order resolving sin(m x_1) on the split-radius ball rule."""
    radial = max(24, int(np.ceil(0.7 * m)) + 16)
    angular = max(32, int(np.ceil(1.4 * m)) + 24) if n <= 3 else max(16, int(np.ceil(m)) + 12)
    return QuadratureOrder(radial, angular, 8)


def maximizing_sequence_report(n: int, k: int, m: float, order: QuadratureOrder | None = None) -> GaffneyReport:
    """Gaffney terms of the sin-bump field ω_m on the unit ball."""
    d = ball(n, 1.0, radial_breaks=(0.5,))
    return gaffney_quotient(d, build_sin_bump_field(n, k, m), "tangential", order or sinbump_order(m, n))


def maximizing_sequence_ratio(n: int, k: int, m: float, order: QuadratureOrder | None = None) -> float:
    """Quotient of ω_m = sin(m x_1) η dx^{1..k} on the unit ball."""
    if m < 1:
        raise DomainError("m must be >= 1")
    return maximizing_sequence_report(n, k, m, order).quotient


# curvature-sum identity

def _wedge_fields(fields: Sequence[FormField], n: int) -> FormField:
    if not fields:
        return ConstantField(KForm.scalar(n, 1.0))
    out = fields[0]
    for f in fields[1:]:
        out = WedgeField(out, f)
    return out


def curvature_sum_check(d: Domain, x0, I: Sequence[int], J: Sequence[int] | None = None,
                        tol: float = 1e-8) -> IdentityResidual:
    """⟨δ(ν∧λ);λ⟩ = Σγ − Σ_{i∈I}γ_i for λ = E_{i1}∧... (I given by frame indices).

    With ``J`` (an index set of the same length, different from ``I``),
    checks the mixed identity ⟨δ(ν∧λ);μ⟩ + ⟨δ(ν∧μ);λ⟩ = 0 instead.
    """
    x0 = np.asarray(x0, dtype=float)
    n = d.n
    nu_f, E_f, fr = frame_fields(d, x0)
    lam = _wedge_fields([E_f[i - 1] for i in I], n)
    k1 = lam.k

    def dnu_wedge(f):
        jet = WedgeField(nu_f, f).jet(x0[None])[1]
        return delta_from_jac(jet, n, k1 + 1)[0]

    lam_val = lam.values(x0[None])[0]
    if J is None:
        lhs = float(dnu_wedge(lam) @ lam_val)
        rhs = float(fr.gamma.sum() - sum(fr.gamma[i - 1] for i in I))
        anchor = "curvature-sum"
    else:
        mu = _wedge_fields([E_f[j - 1] for j in J], n)
        mu_val = mu.values(x0[None])[0]
        lhs = float(dnu_wedge(lam) @ mu_val + dnu_wedge(mu) @ lam_val)
        rhs = 0.0
        anchor = "curvature-sum-mixed"
    return IdentityResidual(anchor, lhs, rhs, tol, location=x0.tolist(), relation="eq" if J is None else "abs",
                            details={"domain": d.label, "I": list(I), "J": None if J is None else list(J)})


# admissible trial fields and the falsification harness

def polynomial_form(n: int, k: int, polys: Sequence[Polynomial]) -> PolynomialField:
    """k-form field with the given scalar polynomial coefficients (lexicographic order)."""
    if len(polys) != comb(n, k):
        raise DomainError("one polynomial per coefficient required")
    exps = np.vstack([p.exps for p in polys])
    coefs = np.zeros((len(exps), len(polys)))
    row = 0
    for c, p in enumerate(polys):
        coefs[row : row + len(p.exps), c] = p.coefs
        row += len(p.exps)
    return PolynomialField(n, k, Polynomial(n, exps, coefs)._combine())


def _random_poly(n: int, degree: int, rng: np.random.Generator) -> Polynomial:
    from .fields import monomial_exponents

    e = monomial_exponents(n, degree)
    return Polynomial(n, e, rng.standard_normal(len(e)))


class BubbleField(FormField):
    """Σ_I p_I(x) Π_{s ∈ A_I} b(x_s) dx^I with b(t) = Π_c (t − c) / peak.

    The bubble factors are evaluated in factored form, so they vanish
    exactly at their roots.
    """

    def __init__(self, n: int, k: int, polys: Sequence[Polynomial], axes: Sequence[Sequence[int]],
                 roots: Sequence[float]):
        if len(polys) != comb(n, k) or len(axes) != len(polys):
            raise DomainError("one polynomial and one axis set per coefficient required")
        self.n, self.k = n, k
        self.polys = list(polys)
        self.axes = [tuple(a) for a in axes]
        self.roots = tuple(roots)
        t = np.linspace(0.0, 1.0, 2001)
        self.peak = float(np.max(np.abs(np.prod([t - c for c in roots], axis=0))))

    def _bubble(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        f = np.prod([t - c for c in self.roots], axis=0) / self.peak
        df = sum(np.prod([t - c for c in self.roots if c != r], axis=0) for r in self.roots) / self.peak
        return f, df

    def jet(self, X):
        X, _ = as_points(X, self.n)
        b, db = self._bubble(X)
        val = np.zeros((len(X), self.size))
        jac = np.zeros((len(X), self.n, self.size))
        for c, (p, A) in enumerate(zip(self.polys, self.axes)):
            B = np.prod(b[:, list(A)], axis=1) if A else np.ones(len(X))
            pv = p(X)
            val[:, c] = pv * B
            jac[:, :, c] = p.gradient(X) * B[:, None]
            for s in A:
                others = [a for a in A if a != s]
                rest = np.prod(b[:, others], axis=1) if others else np.ones(len(X))
                jac[:, s, c] += pv * db[:, s] * rest
        return val, jac


def admissible_field(d: Domain, k: int, bc: str, rng: np.random.Generator, degree: int = 2) -> tuple[FormField, str]:
    """Random field satisfying the boundary condition, with a description.

    Level-set domains use g = ∇φ: tangential fields g∧β + φγ, normal
    fields g⌟σ + φγ, where β, σ, γ are random polynomial forms and each
    part is switched on at random.  Boxes (with or without a hole) use
    polynomial coefficients times bubble factors vanishing on the faces
    whose normals break the condition.
    """
    n = d.n
    if bc not in ("tangential", "normal"):
        raise DomainError(f"unknown boundary condition {bc!r}")
    if isinstance(d, LevelSetDomain) and d.phi is not None:
        phi = d.phi
        g = PolynomialField.gradient_of(phi)
        phif = PolynomialField.from_scalar(phi)
        can_project = (bc == "tangential" and k >= 1) or (bc == "normal" and k <= n - 1)
        free = (bc == "tangential" and k == n) or (bc == "normal" and k == 0)
        choice = "free" if free else (rng.choice(["projected", "flattened", "mixed"]) if can_project else "flattened")
        parts, text = [], []
        if choice == "free":
            return PolynomialField.random(n, k, degree + 1, rng), f"unconstrained degree-{degree + 1} polynomial"
        if choice in ("projected", "mixed"):
            if bc == "tangential":
                beta = PolynomialField.random(n, k - 1, degree, rng)
                parts.append(WedgeField(g, beta))
                text.append(f"grad(phi)^beta, beta degree {degree}")
            else:
                sigma = PolynomialField.random(n, k + 1, degree, rng)
                parts.append(InteriorField(g, sigma))
                text.append(f"grad(phi)_|sigma, sigma degree {degree}")
        if choice in ("flattened", "mixed"):
            gam = PolynomialField.random(n, k, max(degree - 1, 0), rng)
            parts.append(WedgeField(phif, gam))
            text.append(f"phi*gamma, gamma degree {max(degree - 1, 0)}")
        return (parts[0] if len(parts) == 1 else SumField(parts)), " + ".join(text)
    if d.name in ("box", "box_with_hole"):
        roots = [0.0, 1.0] + ([d.params["a"], d.params["b"]] if d.name == "box_with_hole" else [])
        polys, axes = [], []
        for I in mi.enumerate_indices(n, k):
            axes.append([s - 1 for s in range(1, n + 1) if (s not in I) == (bc == "tangential")])
            polys.append(_random_poly(n, degree, rng))
        which = "outside I" if bc == "tangential" else "inside I"
        return BubbleField(n, k, polys, axes, roots), f"degree-{degree} polynomial times face bubbles on axes {which}"
    raise DomainError(f"no admissible-field generator for {d.label}")


class SineProductField(FormField):
    """g(x_a) Π_{j in sines} sin(π x_j) dx^I: the cube trial fields.

    With I = (1,), a = 1 and sines = 2..n the field is tangential on the
    unit cube; with a sine on x_1 and a free factor elsewhere it is normal.
    """

    def __init__(self, n: int, I: Sequence[int], profile_axis: int, profile: Profile, sines: Sequence[int]):
        self.n, self.k = n, len(I)
        self.slot = mi.position(tuple(I), n)
        self.axis, self.profile, self.sines = profile_axis, profile, tuple(sines)

    def jet(self, X):
        X, _ = as_points(X, self.n)
        factors = {self.axis: (self.profile.f(X[:, self.axis - 1]), self.profile.df(X[:, self.axis - 1]))}
        for j in self.sines:
            factors[j] = (np.sin(np.pi * X[:, j - 1]), np.pi * np.cos(np.pi * X[:, j - 1]))
        vals = np.prod([f for f, _ in factors.values()], axis=0)
        val = np.zeros((len(X), self.size))
        jac = np.zeros((len(X), self.n, self.size))
        val[:, self.slot] = vals
        for j, (f, df) in factors.items():
            others = np.prod([g for i, (g, _) in factors.items() if i != j], axis=0) if len(factors) > 1 else 1.0
            jac[:, j - 1, self.slot] = df * others
        return val, jac


@dataclass
class HarnessReport:
    """Summary of a randomized search for quotients above the sharp bound."""

    domain: str
    k: int
    bc: str
    trials: int
    seed: int
    max_quotient: float
    max_sharp_ratio: float
    worst_quotient_trial: str
    worst_sharp_trial: str
    counterexample: str | None
    constructions: list[str]

    def record(self) -> dict:
        return _jsonable(self.__dict__)


def harness_order(d: Domain) -> QuadratureOrder:
    return QuadratureOrder(12, 24, 8) if d.n <= 3 else QuadratureOrder(10, 12, 6)


def sharp_inequality_harness(d: Domain, k: int, bc: str, trials: int, seed: int,
                             order: QuadratureOrder | None = None,
                             extra: Sequence[tuple[FormField, str]] = (), bound_tol: float = INTEGRAL_TOL,
                             degree: int = 2) -> HarnessReport:
    """Evaluate many admissible fields; report the largest quotients seen.

    ``counterexample`` names the first trial with ‖∇ω‖² exceeding
    (1 + bound_tol)(‖dω‖² + ‖δω‖²), if any.
    """
    order = order or harness_order(d)
    rng = np.random.default_rng(seed)
    best_q, best_s = -np.inf, -np.inf
    wq = ws = ""
    counter = None
    names = []
    candidates = list(extra)
    for t in range(trials):
        candidates.append(admissible_field(d, k, bc, rng, degree))
    for t, (f, text) in enumerate(candidates):
        label = f"trial {t}: {text}"
        names.append(label)
        rep = gaffney_quotient(d, f, bc, order)
        if rep.quotient > best_q:
            best_q, wq = rep.quotient, label
        if rep.sharp_ratio > best_s:
            best_s, ws = rep.sharp_ratio, label
        if counter is None and rep.numerator > (1 + bound_tol) * (rep.d_sq + rep.delta_sq):
            counter = label
    return HarnessReport(d.label, k, bc, len(candidates), seed, float(best_q), float(best_s), wq, ws, counter, names)


def quotient_duality(d: Domain, f: FormField, order: QuadratureOrder | None = None, tol: float = 1e-9) -> IdentityResidual:
    """Tangential quotient of f equals the normal quotient of ∗f."""
    qt = gaffney_quotient(d, f, "tangential", order)
    qn = gaffney_quotient(d, HodgeField(f), "normal", order)
    return IdentityResidual("quotient-hodge-duality", qt.quotient, qn.quotient, tol,
                            details={"domain": d.label, "k": f.k})


def energy_equality(d: Domain, f: FormField, bc: str, anchor: str, order: QuadratureOrder | None = None,
                    tol: float = INTEGRAL_TOL) -> IdentityResidual:
    """‖∇f‖² against ‖df‖² + ‖δf‖² (equal on polytopes and for compact support)."""
    rep = gaffney_quotient(d, f, bc, order)
    return IdentityResidual(anchor, rep.numerator, rep.d_sq + rep.delta_sq, tol,
                            details={"domain": d.label, "k": f.k, "bc": bc, "quotient": rep.quotient,
                                     "bc_residual": rep.bc_residual})
