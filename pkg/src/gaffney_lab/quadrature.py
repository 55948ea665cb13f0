"""Product quadrature over the domain catalog.

Rules are tensor products of 1-D rules on chart parameter boxes:
Gauss-Legendre for radii, polar angles and box axes, the trapezoid rule
for azimuths.  Radii of annuli are integrated in log s, which turns the
s^{−p} profiles of the blow-up examples into entire functions.  Sums are
accumulated with ``math.fsum`` so results do not depend on chunking or
evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import CoverageError, DomainError
from .geometry import Axis, Chart, Domain, Face

CHUNK = 1 << 15


@dataclass(frozen=True)
class QuadratureOrder:
    """Points per radial axis, per angle, and per box axis."""

    radial: int = 32
    angular: int = 64
    box: int = 24

    def scaled(self, factor: float) -> "QuadratureOrder":
        return QuadratureOrder(
            max(2, round(self.radial * factor)), max(2, round(self.angular * factor)), max(2, round(self.box * factor))
        )


def default_order(n: int) -> QuadratureOrder:
    """Default order; angular and box counts shrink with n to bound node counts."""
    if n <= 3:
        return QuadratureOrder(32, 64, 24)
    if n == 4:
        return QuadratureOrder(32, 32, 16)
    return QuadratureOrder(24, 16, 8)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    order: QuadratureOrder

    def __len__(self) -> int:
        return len(self.weights)


@dataclass(frozen=True, eq=False)
class BoundaryRule:
    """One rule per face, in the domain's face order."""

    parts: tuple[tuple[Face, QuadratureRule], ...]
    order: QuadratureOrder

    @cached_property
    def total_weight(self) -> float:
        return math.fsum(math.fsum(r.weights) for _, r in self.parts)


@dataclass(frozen=True)
class IntegralResult:
    """Integral value(s) with an error estimate from a coarser rule."""

    value: np.ndarray | float
    error: np.ndarray | float
    order: QuadratureOrder


def gauss_legendre(m: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(m)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def axis_rule(axis: Axis, order: QuadratureOrder) -> tuple[np.ndarray, np.ndarray]:
    if axis.kind == "periodic":
        m = order.angular
        h = (axis.hi - axis.lo) / m
        return axis.lo + h * np.arange(m), np.full(m, h)
    m = {"radial": order.radial, "angle": order.angular, "linear": order.box}.get(axis.kind)
    if m is None:
        raise DomainError(f"unknown axis kind {axis.kind!r}")
    edges = [axis.lo, *axis.breaks, axis.hi]
    xs, ws = [], []
    for a, b in zip(edges, edges[1:]):
        if axis.log:
            u, w = gauss_legendre(m, math.log(a), math.log(b))
            xs.append(np.exp(u))
            ws.append(w * np.exp(u))
        else:
            x, w = gauss_legendre(m, a, b)
            xs.append(x)
            ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def chart_rule(chart: Chart, order: QuadratureOrder, kind: str) -> QuadratureRule:
    """Tensor rule on the chart's parameter box mapped to R^n."""
    rules = [axis_rule(a, order) for a in chart.axes]
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wgrid = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    U = np.stack([g.ravel() for g in grids], axis=1)
    w = np.prod(np.stack([g.ravel() for g in wgrid], axis=1), axis=1)
    X, J = chart.map(U)
    if kind == "volume":
        jac = np.abs(np.linalg.det(J))
    else:
        jac = np.sqrt(np.abs(np.linalg.det(np.einsum("nai,naj->nij", J, J))))
    w = w * jac
    keep = w > 0
    return QuadratureRule(X[keep], w[keep], kind, order)


def volume_rule(d: Domain, order: QuadratureOrder | None = None) -> QuadratureRule:
    order = order or default_order(d.n)
    key = ("volume", order)
    if key not in d._rule_cache:
        parts = [chart_rule(c, order, "volume") for c in d.volume_charts]
        d._rule_cache[key] = QuadratureRule(
            np.vstack([p.nodes for p in parts]), np.concatenate([p.weights for p in parts]), "volume", order
        )
    return d._rule_cache[key]


def boundary_rule(d: Domain, order: QuadratureOrder | None = None, check: bool = True) -> BoundaryRule:
    order = order or default_order(d.n)
    key = ("boundary", order)
    if key not in d._rule_cache:
        d._rule_cache[key] = BoundaryRule(tuple((f, chart_rule(f.chart, order, "boundary")) for f in d.faces), order)
    rule = d._rule_cache[key]
    if check and d.area is not None:
        total = rule.total_weight
        if abs(total - d.area) > 1e-8 * d.area:
            raise CoverageError(f"boundary patches of {d.label} integrate 1 to {total!r}, expected {d.area!r}")
    return rule


def _fsum_columns(parts: list[np.ndarray]) -> np.ndarray:
    stacked = np.concatenate(parts, axis=0)
    if stacked.ndim == 1:
        return np.array(math.fsum(stacked))
    return np.array([math.fsum(stacked[:, c]) for c in range(stacked.shape[1])])


def integrate(rule: QuadratureRule, f: Callable[[np.ndarray], np.ndarray], chunk: int = CHUNK) -> np.ndarray:
    """Σ w_i f(x_i); ``f`` may return (N,) or (N, m) values."""
    parts = []
    for start in range(0, len(rule), chunk):
        X = rule.nodes[start : start + chunk]
        w = rule.weights[start : start + chunk]
        v = np.asarray(f(X), dtype=float)
        parts.append(v * (w if v.ndim == 1 else w[:, None]))
    return _fsum_columns(parts)


def integrate_boundary(rule: BoundaryRule, f: Callable[[np.ndarray, Face], np.ndarray], chunk: int = CHUNK) -> np.ndarray:
    parts = []
    for face, r in rule.parts:
        for start in range(0, len(r), chunk):
            X = r.nodes[start : start + chunk]
            w = r.weights[start : start + chunk]
            v = np.asarray(f(X, face), dtype=float)
            parts.append(v * (w if v.ndim == 1 else w[:, None]))
    return _fsum_columns(parts)


def _with_estimate(run, order: QuadratureOrder, tol: float | None) -> IntegralResult:
    fine = run(order, True)
    # the half-order rule only feeds the estimate, so it skips the coverage check
    coarse = run(order.scaled(0.5), False)
    err = np.abs(fine - coarse)
    if tol is not None and np.any(err > tol * np.maximum(np.abs(fine), 1e-10)):
        bigger = order.scaled(2.0)
        finer = run(bigger, True)
        return IntegralResult(_scalar(finer), _scalar(np.abs(finer - fine)), bigger)
    return IntegralResult(_scalar(fine), _scalar(err), order)


def _scalar(v):
    v = np.asarray(v)
    return float(v) if v.ndim == 0 else v


def volume_integral(d: Domain, f, order: QuadratureOrder | None = None, tol: float | None = None) -> IntegralResult:
    """∫_Ω f with an error estimate from the half-order rule.

    If ``tol`` is given and the estimate exceeds it (relative), the order is
    doubled once.
    """
    order = order or default_order(d.n)
    return _with_estimate(lambda o, _: integrate(volume_rule(d, o), f), order, tol)


def boundary_integral(d: Domain, f, order: QuadratureOrder | None = None, tol: float | None = None) -> IntegralResult:
    """∫_∂Ω f; ``f(X, face)`` receives the nodes of one face at a time."""
    order = order or default_order(d.n)
    return _with_estimate(lambda o, check: integrate_boundary(boundary_rule(d, o, check), f), order, tol)
