"""Direct evaluation of the 1D fractional Laplacian as a singular integral.

Two routes are provided. :func:`frac_lap_second_difference` integrates the
symmetrized, absolutely convergent form

    (-Delta)^s u(x) = -C * int_0^inf [u(x+r) + u(x-r) - 2u(x)] r^(-1-2s) dr

and :func:`frac_lap_pv` evaluates the one-sided integrals outside a hole of
radius eps and extrapolates eps -> 0. Both integrate numerically out to a
truncation radius R and add the exact far-field contribution of the field's
:class:`~fraclap.fields.TailModel`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Sequence

import numpy as np

from . import _mesh
from .core import EvalReport, FracOrder, normalization_constant
from .errors import DivergenceError, DomainError, PreconditionError
from .fields import COMPACT, LIMITS, ScalarField1D, TailModel

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureBudget:
    """Discretization parameters of the singular-integral engines.

    ``near_radius`` is the radius below which the second difference is
    replaced by its even Taylor fit and integrated analytically;
    ``inner_radii`` is the decreasing hole-radius schedule of the PV route.
    """

    truncation_radius: float = 1e6
    inner_radii: tuple[float, ...] = (0.04, 0.02, 0.01)
    near_radius: float = 0.02
    panels_per_decade: int = 8
    gauss_order: int = 16
    refinement_levels: int = 48
    tolerance: float = 1e-3

    def __post_init__(self) -> None:
        if not self.truncation_radius > 0:
            raise DomainError("truncation radius must be positive")
        eps = tuple(float(e) for e in self.inner_radii)
        if len(eps) < 3 or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            raise DomainError("inner radius schedule must hold >= 3 strictly decreasing positive values")
        object.__setattr__(self, "inner_radii", eps)
        if not self.near_radius > 0:
            raise DomainError("near radius must be positive")
        if self.panels_per_decade < 1 or self.gauss_order < 2:
            raise DomainError("need at least one panel per decade and a 2-point rule")

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_BUDGET = QuadratureBudget()


def tail_correction(tail: TailModel, u_at_x: float, x: float, R: float, order: FracOrder) -> float:
    """``C * int_{|y-x|>R} (u(x) - u(y)) |x-y|^(-1-2s) dy`` under the tail model.

    Power tails are integrated with ``u(x +- r) ~ +-A r^-p`` (the shift by
    ``x`` is neglected; :func:`tail_remainder` bounds it).
    """
    if not R > 0:
        raise DomainError(f"truncation radius must be positive, got {R!r}")
    s = order.s
    c = normalization_constant(order)
    shell = R ** (-2.0 * s) / (2.0 * s)  # int_R^inf r^(-1-2s) dr
    if tail.kind == COMPACT:
        return c * 2.0 * u_at_x * shell
    if tail.kind == LIMITS:
        return c * ((u_at_x - tail.left) + (u_at_x - tail.right)) * shell
    p = tail.exponent
    if not p > 0:
        raise DomainError(f"power tail needs p > 0, got {p!r}")
    far = 2.0 * tail.amplitude * R ** (-p - 2.0 * s) / (p + 2.0 * s) if tail.parity == "even" else 0.0
    return c * (2.0 * u_at_x * shell - far)


def tail_remainder(tail: TailModel, x: float, R: float, order: FracOrder,
                   decay_coefficient: float = 0.0) -> float:
    """Bound on the error of :func:`tail_correction`."""
    s = order.s
    c = normalization_constant(order)
    if tail.kind == COMPACT:
        return 0.0
    if tail.kind == LIMITS:
        q = tail.approach
        return c * 2.0 * decay_coefficient * R ** (-q - 2.0 * s) / (q + 2.0 * s)
    p = tail.exponent
    # |(r+x)^-p - r^-p| <= p |x| (R-|x|)^(-p-1) for r >= R > 2|x|
    return c * 2.0 * abs(tail.amplitude) * p * abs(x) * (R - abs(x)) ** (-p - 1.0 - 2.0 * s) / (
        p + 1.0 + 2.0 * s) + c * 2.0 * abs(tail.amplitude) * abs(x) ** 2 * R ** (-p - 2.0 - 2.0 * s)


def _merge_close(dist: Sequence[float], rel: float = 1e-12) -> list[float]:
    """Sorted distinct radii, dropping any within ``rel`` of the previous one."""
    out: list[float] = []
    for d in sorted(dist):
        if not out or d - out[-1] > rel * max(1.0, d):
            out.append(d)
    return out


class _Integrand:
    """Point-evaluation context shared by both routes."""

    def __init__(self, u: ScalarField1D, order: FracOrder, x: float, budget: QuadratureBudget,
                 exact: bool):
        order.require_1d()
        self.u, self.order, self.budget, self.exact = u, order, budget, exact
        self.x = x = float(x)
        if not math.isfinite(x):
            raise DomainError(f"evaluation point must be finite, got {x!r}")
        lo, hi = u.window
        marks = list(u.breakpoints) + list(u.singular_points)
        if not exact:
            if u.singular_points:
                raise PreconditionError(
                    "field has singular points; use the closed-form integrand (exact mode)")
            h = u.spacing
            if not lo + h <= x <= hi - h:
                raise PreconditionError(
                    f"x={x} outside the sampled window shrunk by one spacing [{lo + h}, {hi - h}]")
            marks += [lo, hi]
        elif u.closed_form is None:
            raise PreconditionError("exact mode requested but the field has no closed form")
        dist = [abs(b - x) for b in marks]
        if any(d == 0.0 for d in dist):
            raise PreconditionError(f"x={x} sits on a breakpoint of the field")
        if any(abs(b - x) < 1e-12 for b in u.singular_points):
            raise PreconditionError(f"x={x} sits on a singular point of the field")
        self.breaks = _merge_close(dist)
        self.R = max(budget.truncation_radius, 2.0 * max(dist, default=0.0), 4.0 * abs(x))
        self.ux = float(self.ev(np.array([x]))[0])
        self.c = normalization_constant(order)

    def ev(self, t: np.ndarray) -> np.ndarray:
        return self.u.evaluate(t, exact=self.exact)

    def second_difference(self, r: np.ndarray) -> np.ndarray:
        return self.ev(self.x + r) + self.ev(self.x - r) - 2.0 * self.ux

    def edges(self, lo: float) -> np.ndarray:
        b = self.budget
        return _mesh.radial_edges(lo, self.R, b.panels_per_decade, self.breaks, b.refinement_levels)

    def tail(self) -> tuple[float, float]:
        u = self.u
        if u.tail.kind == LIMITS:
            if self.exact:
                R = self.R
                q = u.tail.approach
                vals = self.ev(np.array([self.x - R, self.x + R]))
                k = max(abs(vals[0] - u.tail.left), abs(vals[1] - u.tail.right)) * R**q
            else:
                k = u.decay_coefficient()
        else:
            k = 0.0
        return (tail_correction(u.tail, self.ux, self.x, self.R, self.order),
                tail_remainder(u.tail, self.x, self.R, self.order, k))

    def interpolation_bound(self, lo: float) -> float:
        """Effect of quadratic-interpolation error on the integral beyond ``lo``."""
        if self.exact:
            return 0.0
        s = self.order.s
        e = 0.0625 * self.u.max_third_difference() * self.u.spacing**3
        return self.c * 4.0 * e * lo ** (-2.0 * s) / (2.0 * s)

    def report(self, value: float, err: float, **extra) -> EvalReport:
        budget = self.budget.as_dict()
        budget.update(truncation_radius=self.R, mode="exact" if self.exact else "sampled", **extra)
        return EvalReport(value, err, budget)


def _near_field(ctx: _Integrand, rho: float) -> tuple[float, float]:
    """Integral of the second difference over (0, rho] via an even Taylor fit."""
    s = ctx.order.s
    frac = np.array([1.0, 0.75, 0.5])
    d = ctx.second_difference(rho * frac)
    # D(r) ~ sum_k a_k (r/rho)^(2k); int_0^rho (r/rho)^(2k) r^(-1-2s) dr = rho^(-2s) / (2k - 2s)
    moments = rho ** (-2 * s) / (2.0 * np.arange(1, 4) - 2 * s)
    three = np.linalg.solve(np.vander(frac**2, 4, increasing=True)[:, 1:], d)
    two = np.linalg.solve(np.vander(frac[[0, 2]] ** 2, 3, increasing=True)[:, 1:], d[[0, 2]])
    # interpolated samples are only piecewise smooth: the shorter fit is more robust there
    value, other = float(three @ moments), float(two @ moments[:2])
    if not ctx.exact:
        value, other = other, value
    err = abs(value - other)
    err += 64.0 * _EPS * max(abs(ctx.ux), 1e-300) * rho ** (-2 * s) / (2 - 2 * s)
    return value, err


def frac_lap_second_difference(u: ScalarField1D, order: FracOrder, x: float,
                               budget: QuadratureBudget = DEFAULT_BUDGET,
                               exact: bool = False) -> EvalReport:
    """Evaluate ``(-Delta)^s u(x)`` from the symmetrized second-difference integral.

    Parameters
    ----------
    u : ScalarField1D
        Samples plus tail model. With ``exact=True`` its closed form is used
        instead of interpolated samples (needed near unbounded points).
    order : FracOrder
        Fractional order; must be one-dimensional.
    x : float
        Evaluation point. In sampled mode it must lie one spacing inside the
        window.
    budget : QuadratureBudget
        Mesh and truncation parameters.

    Returns
    -------
    EvalReport
        Value, an error estimate (panel-rule comparison, Taylor remainder,
        tail remainder and interpolation bound) and the budget used.
    """
    ctx = _Integrand(u, order, x, budget, exact)
    s = order.s
    rho = budget.near_radius if exact else max(budget.near_radius, 4.0 * u.spacing)
    if ctx.breaks:
        rho = min(rho, 0.125 * ctx.breaks[0])
    near, near_err = _near_field(ctx, rho)
    weight = lambda r: ctx.second_difference(r) * r ** (-1.0 - 2.0 * s)  # noqa: E731
    far, far_err = _mesh.integrate(weight, ctx.edges(rho), budget.gauss_order)
    tail, tail_err = ctx.tail()
    value = -ctx.c * (near + far) + tail
    err = ctx.c * (near_err + far_err) + tail_err + ctx.interpolation_bound(rho)
    return ctx.report(value, err, near_radius=rho)


def _richardson(eps: Sequence[float], vals: Sequence[float], powers: Sequence[float]) -> float:
    k = len(powers) + 1
    a = np.array([[1.0] + [e**p for p in powers] for e in eps[:k]])
    return float(np.linalg.solve(a, np.asarray(vals[:k]))[0])


def frac_lap_pv(u: ScalarField1D, order: FracOrder, x: float,
                budget: QuadratureBudget = DEFAULT_BUDGET, exact: bool = False) -> EvalReport:
    """Evaluate ``(-Delta)^s u(x)`` as a principal value.

    For each hole radius ``eps`` in the schedule the two one-sided integrals
    ``int_eps^R [u(x) - u(x +- r)] r^(-1-2s) dr`` are computed separately;
    the hole-dependence ``a eps^(2-2s) + b eps^(4-2s)`` is then eliminated
    with three-point Richardson extrapolation. The schedule is shrunk
    automatically so the hole stays clear of breakpoints.

    Raises
    ------
    DivergenceError
        If the two-point extrapolants from consecutive radius pairs differ
        by more than ten times ``budget.tolerance`` (u is not regular enough
        at ``x`` for the limit to exist numerically).
    """
    ctx = _Integrand(u, order, x, budget, exact)
    s = order.s
    eps = np.asarray(budget.inner_radii)
    if ctx.breaks and eps[0] > 0.0625 * ctx.breaks[0]:
        eps = eps * (0.0625 * ctx.breaks[0] / eps[0])
    tail, tail_err = ctx.tail()
    vals, errs = [], []
    for e in eps:
        edges = ctx.edges(float(e))
        total, err = 0.0, 0.0
        for sign in (1.0, -1.0):
            f = lambda r, _sg=sign: (ctx.ux - ctx.ev(ctx.x + _sg * r)) * r ** (-1.0 - 2.0 * s)  # noqa: E731
            v, ev = _mesh.integrate(f, edges, budget.gauss_order)
            total += v
            err += ev
        vals.append(ctx.c * total + tail)
        errs.append(ctx.c * err)
    p1, p2 = 2.0 - 2.0 * s, 4.0 - 2.0 * s
    two_a = _richardson(eps[:2], vals[:2], [p1])
    two_b = _richardson(eps[1:], vals[1:], [p1])
    three = _richardson(eps, vals, [p1, p2])
    if abs(two_a - two_b) > 10.0 * budget.tolerance:
        raise DivergenceError(
            f"principal value did not settle at x={x}: extrapolants {two_a:.6g} vs {two_b:.6g}")
    err = abs(three - two_b) + max(errs) + tail_err + ctx.interpolation_bound(float(eps[-1]))
    return ctx.report(three, err, inner_radii=[float(e) for e in eps],
                      extrapolants=[two_a, two_b, three])


def frac_lap(u: ScalarField1D, order: FracOrder, points, budget: QuadratureBudget = DEFAULT_BUDGET,
             exact: bool = False, method: str = "second_difference") -> list[EvalReport]:
    """Evaluate at several points (each point independent and deterministic)."""
    fn = {"second_difference": frac_lap_second_difference, "pv": frac_lap_pv}.get(method)
    if fn is None:
        raise DomainError(f"unknown method {method!r}")
    return [fn(u, order, float(x), budget, exact) for x in np.atleast_1d(points)]


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    R: float
    value: float
    error: float


@dataclass(frozen=True)
class ConvergenceTable:
    rows: tuple[ConvergenceRow, ...]
    orders: tuple[float, ...]
    reference: float

    @property
    def observed_order(self) -> float:
        return self.orders[-1] if self.orders else math.nan

    def errors_decrease(self) -> bool:
        e = [r.error for r in self.rows if not math.isnan(r.error)]
        return all(b < a for a, b in zip(e, e[1:]))


def convergence_study(runs: Sequence[tuple[ScalarField1D, QuadratureBudget]], order: FracOrder,
                      x: float, reference: float | None = None, exact: bool = False,
                      method: str = "second_difference") -> ConvergenceTable:
    """Rerun the evaluator over successively refined (field, budget) pairs.

    Errors are taken against ``reference`` when given, otherwise against the
    last (finest) run. Observed orders are ``log(e_k / e_{k+1}) / log(h_k / h_{k+1})``.
    """
    if len(runs) < 3:
        raise DomainError("a convergence study needs at least three budgets")
    values = []
    for u, b in runs:
        rep = frac_lap(u, order, [x], b, exact, method)[0]
        values.append((u.spacing, rep.budget["truncation_radius"], rep.value))
    ref = values[-1][2] if reference is None else float(reference)
    rows = []
    for i, (h, R, v) in enumerate(values):
        err = math.nan if reference is None and i == len(values) - 1 else abs(v - ref)
        rows.append(ConvergenceRow(h, R, v, err))
    orders = []
    for a, b in zip(rows, rows[1:]):
        if math.isnan(b.error) or a.error <= 0 or b.error <= 0 or a.h == b.h:
            continue
        orders.append(math.log(a.error / b.error) / math.log(a.h / b.h))
    return ConvergenceTable(tuple(rows), tuple(orders), ref)


def with_radius(budget: QuadratureBudget, R: float) -> QuadratureBudget:
    return replace(budget, truncation_radius=R)
