"""Harmonic extension to the upper half-plane and its Neumann trace (s = 1/2).

The extension is the Poisson integral ``U(x, y) = int P_y(x - t) u(t) dt`` with
``P_y(r) = y / (pi (r^2 + y^2))``. Since ``P_y`` has unit mass,

    U(x, y) = u(x) + int_0^inf P_y(r) [u(x + r) + u(x - r) - 2 u(x)] dr,

which is what gets integrated (composite Gauss on a radial mesh plus an
analytic tail beyond the truncation radius). The half-Laplacian is recovered
as ``-dU/dy`` at ``y = 0+``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _mesh
from .core import EvalReport, FracOrder
from .errors import DivergenceError, DomainError, PreconditionError
from .fields import COMPACT, LIMITS, ScalarField1D
from .quadrature import DEFAULT_BUDGET, QuadratureBudget, _Integrand

HALF = FracOrder(0.5)
DEFAULT_HEIGHTS = (0.1, 0.05, 0.025, 0.0125)
# largest height relative to the distance to the nearest breakpoint
_HEIGHT_FRACTION = 0.0625
_EPS = np.finfo(float).eps


def require_half(order: FracOrder | float) -> None:
    s = order.s if isinstance(order, FracOrder) else float(order)
    if s != 0.5:
        raise PreconditionError(f"the harmonic extension realizes s = 1/2 only, got s={s}")


@dataclass(frozen=True, eq=False)
class HalfPlaneExtension:
    """Boundary field, trace heights and quadrature budget.

    ``heights`` must be strictly decreasing and positive with at least three
    entries (the ``y -> 0`` extrapolation schedule).
    """

    field: ScalarField1D
    heights: tuple[float, ...] = DEFAULT_HEIGHTS
    budget: QuadratureBudget = DEFAULT_BUDGET
    exact: bool = False

    def __post_init__(self) -> None:
        hs = tuple(float(y) for y in self.heights)
        if len(hs) < 3:
            raise DomainError("the height schedule needs at least three entries")
        if any(not (y > 0 and math.isfinite(y)) for y in hs):
            raise DomainError(f"heights must be positive, got {hs}")
        if any(b >= a for a, b in zip(hs, hs[1:])):
            raise DomainError(f"heights must be strictly decreasing, got {hs}")
        object.__setattr__(self, "heights", hs)

    def __call__(self, x: float, y: float) -> float:
        return harmonic_extension(self.field, x, y, self.budget, self.exact)


def _poisson_tail(ctx: _Integrand, y: float) -> tuple[float, float]:
    """``int_R^inf P_y(r) D(r) dr`` under the tail model, with a remainder bound."""
    tail, R, ux, x = ctx.u.tail, ctx.R, ctx.ux, ctx.x
    mass = math.atan(y / R) / math.pi
    if tail.kind == COMPACT:
        return -2.0 * ux * mass, 0.0
    if tail.kind == LIMITS:
        q = tail.approach
        if ctx.exact:
            far = ctx.ev(np.array([x - R, x + R]))
            k = max(abs(far[0] - tail.left), abs(far[1] - tail.right)) * R**q
        else:
            k = ctx.u.decay_coefficient()
        rem = 2.0 * mass * k * (R - abs(x)) ** -q
        return (tail.left + tail.right - 2.0 * ux) * mass, rem + _EPS * mass
    p, A = tail.exponent, tail.amplitude
    lead = 2.0 * A * y * R ** (-p - 1.0) / (math.pi * (p + 1.0)) if tail.parity == "even" else 0.0
    bound = 2.0 * abs(A) * y * R ** (-p - 1.0) / math.pi * (p * abs(x) / (R - abs(x)) + 1e-16)
    return lead - 2.0 * ux * mass, bound


def _radial_edges(ctx: _Integrand, y_min: float) -> np.ndarray:
    b = ctx.budget
    first = 0.1 * min([y_min] + ctx.breaks)
    return _mesh.radial_edges(0.0, ctx.R, b.panels_per_decade, ctx.breaks, b.refinement_levels,
                              first=(first,))


def _extension_increment(ctx: _Integrand, y: float, edges: np.ndarray) -> tuple[float, float]:
    """``U(x, y) - u(x)`` and its error estimate."""
    f = lambda r: y / (math.pi * (r * r + y * y)) * ctx.second_difference(r)  # noqa: E731
    val, err = _mesh.integrate(f, edges, ctx.budget.gauss_order)
    tail, rem = _poisson_tail(ctx, y)
    return val + tail, err + rem


def harmonic_extension(u: ScalarField1D, x: float, y: float,
                       budget: QuadratureBudget = DEFAULT_BUDGET, exact: bool = False) -> float:
    """Poisson extension ``U(x, y)`` of ``u`` at height ``y > 0``."""
    y = float(y)
    if not y > 0 or not math.isfinite(y):
        raise DomainError(f"height must be positive, got {y!r}")
    ctx = _Integrand(u, HALF, x, budget, exact)
    val, _ = _extension_increment(ctx, y, _radial_edges(ctx, y))
    return ctx.ux + val


def _neville(ys: Sequence[float], vals: Sequence[float]) -> list[list[float]]:
    """Neville table for the polynomial extrapolation of ``v(y)`` to ``y = 0``.

    Row ``k`` holds the degree-``k`` extrapolants from consecutive runs of
    ``k + 1`` heights; the last row has the single full-order value.
    """
    table = [list(vals)]
    for k in range(1, len(ys)):
        prev = table[-1]
        table.append([(ys[i + k] * prev[i] - ys[i] * prev[i + 1]) / (ys[i + k] - ys[i])
                      for i in range(len(prev) - 1)])
    return table


def _noise_gain(ys: Sequence[float]) -> float:
    """Sum of ``|weights|`` of the full extrapolant (amplification of sample errors)."""
    n = len(ys)
    return sum(abs(_neville(ys, np.eye(n)[j])[-1][0]) for j in range(n))


def neumann_trace(ext: HalfPlaneExtension, x: float) -> EvalReport:
    """``-dU/dy (x, 0+)``, equal to ``(-Delta)^(1/2) u (x)``.

    At each height ``y`` the derivative is a centered difference with step
    ``y / 4``; the values are extrapolated polynomially to ``y = 0`` through
    all heights. The schedule is shrunk proportionally when its first height
    exceeds 1/16 of the distance from ``x`` to the nearest breakpoint.
    Raises :class:`DivergenceError` when the last two linear extrapolants
    disagree by more than ten times the budget tolerance. The error estimate
    is the change between the two highest extrapolation orders plus the
    amplified quadrature error.
    """
    ctx = _Integrand(ext.field, HALF, x, ext.budget, ext.exact)
    ys = ext.heights
    if ctx.breaks and ys[0] > _HEIGHT_FRACTION * ctx.breaks[0]:
        scale = _HEIGHT_FRACTION * ctx.breaks[0] / ys[0]
        ys = tuple(scale * y for y in ys)
    edges = _radial_edges(ctx, 0.75 * ys[-1])
    slopes, errs = [], []
    for y in ys:
        d = 0.25 * y
        up, e_up = _extension_increment(ctx, y + d, edges)
        dn, e_dn = _extension_increment(ctx, y - d, edges)
        slopes.append(-(up - dn) / (2.0 * d))
        errs.append((e_up + e_dn) / (2.0 * d))
    table = _neville(ys, slopes)
    value = table[-1][0]
    a, b = table[1][-2:]
    tol = ext.budget.tolerance
    if abs(a - b) > 10.0 * tol:
        raise DivergenceError(
            f"trace extrapolation at x={x} did not settle (linear extrapolants {a:.6g}, {b:.6g}); "
            "the boundary data are probably not smooth there")
    err = abs(value - table[-2][-1]) + _noise_gain(ys) * max(errs)
    budget = ext.budget.as_dict()
    budget.update(truncation_radius=ctx.R, heights=list(ys), mode="exact" if ext.exact else "sampled",
                  slopes=slopes, extrapolants=[row[-1] for row in table])
    return EvalReport(value, err, budget)


def _energy_density(u: ScalarField1D, xs: np.ndarray, y: float, R: float, exact: bool,
                    per_decade: int, gauss_order: int) -> np.ndarray:
    """``|grad U|^2`` at the points ``(xs, y)``."""
    edges = _mesh.radial_edges(0.0, R, per_decade, first=(0.05 * y,))
    r, w = _mesh.panel_nodes(edges, gauss_order)
    ev = lambda t: u.evaluate(t, exact=exact)  # noqa: E731
    plus = ev(xs[:, None] + r[None, :])
    minus = ev(xs[:, None] - r[None, :])
    ux = ev(xs)
    den = (r * r + y * y) ** 2
    kx = 2.0 * y * r / (math.pi * den)
    ky = (r * r - y * y) / (math.pi * den)
    gx = (plus - minus) @ (w * kx)
    gy = (plus + minus - 2.0 * ux[:, None]) @ (w * ky)
    tail = u.tail
    if tail.kind == LIMITS:
        gx += (tail.right - tail.left) * y / (math.pi * (R * R + y * y))
        gy += (tail.left + tail.right - 2.0 * ux) * R / (math.pi * (R * R + y * y))
    elif tail.kind == COMPACT:
        gy += -2.0 * ux * R / (math.pi * (R * R + y * y))
    return gx * gx + gy * gy


def dirichlet_energy_check(u: ScalarField1D, window: tuple[float, float] = (-10.0, 10.0),
                           height: float = 5.0, *, refine: int = 0, exact: bool | None = None,
                           truncation_radius: float = 1e6) -> float:
    """Bulk energy ``1/2 int int |grad U|^2`` over ``window x (0, height]``.

    Tensor Gauss rule: unit-width panels in ``x`` and dyadically graded
    panels toward ``y = 0``; ``refine`` doubles both panel counts per step.
    The gradient is bounded up to ``y = 0`` for smooth data, so the grading
    stops at ``height / 2^10``.
    The gradient comes from differentiated Poisson kernels. A diagnostic
    only; no identity is asserted for it.
    """
    a, b = (float(v) for v in window)
    H = float(height)
    if not (math.isfinite(a) and math.isfinite(b) and b > a):
        raise DomainError(f"bad window {window!r}")
    if not (math.isfinite(H) and H > 0):
        raise DomainError(f"height must be positive and finite, got {height!r}")
    use_exact = u.has_closed_form if exact is None else exact
    if not use_exact and u.singular_points:
        raise PreconditionError("field has singular points; use the closed form")
    k = 2**int(refine)
    nx = max(1, math.ceil((b - a) * k))
    xe = np.linspace(a, b, nx + 1)
    levels = 10 + 2 * int(refine)
    ye = np.concatenate([[0.0], H * 2.0 ** -np.arange(levels, 0, -1), [H]])
    ye = np.unique(np.concatenate([np.linspace(ye[i], ye[i + 1], k + 1) for i in range(ye.size - 1)]))
    xs, wx = _mesh.panel_nodes(xe, 8)
    ys, wy = _mesh.panel_nodes(ye, 8)
    total = [0.5 * wyj * float(wx @ _energy_density(u, xs, yj, truncation_radius, use_exact, 8, 16))
             for yj, wyj in zip(ys, wy)]
    return math.fsum(total)
