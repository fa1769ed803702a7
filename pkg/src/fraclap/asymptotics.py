"""Polynomial tails: log-log exponent fits, image tails and the s = 1/2 layer."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import FracOrder
from .errors import DomainError, PreconditionError
from .fields import ScalarField1D, catalog_field
from .quadrature import DEFAULT_BUDGET, QuadratureBudget, frac_lap_second_difference

MIN_POINTS = 6


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of ``log|v| = log|A| - p log x``.

    ``amplitude`` carries the common sign of the samples.
    """

    exponent: float
    amplitude: float
    r_squared: float
    sample_range: tuple[float, float]
    residuals: tuple[float, ...]

    def as_dict(self) -> dict:
        return {"exponent": self.exponent, "amplitude": self.amplitude,
                "r_squared": self.r_squared, "sample_range": list(self.sample_range),
                "residuals": list(self.residuals)}


def dyadic_points(x0: float, count: int, per_octave: int = 1) -> np.ndarray:
    """``x0 * 2**(k / per_octave)`` for ``k = 0 .. count - 1``."""
    if not x0 > 0:
        raise DomainError(f"first point must be positive, got {x0!r}")
    return float(x0) * 2.0 ** (np.arange(int(count)) / int(per_octave))


def fit_tail_exponent(x: Sequence[float], v: Sequence[float]) -> DecayFit:
    """Fit ``v ~ A x^(-p)`` on positive increasing ``x`` with one-signed ``v``."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.shape != v.shape or x.ndim != 1:
        raise DomainError("x and v must be 1-D arrays of equal length")
    if x.size < MIN_POINTS:
        raise DomainError(f"a tail fit needs at least {MIN_POINTS} points, got {x.size}")
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(v)):
        raise DomainError("samples must be finite")
    if np.any(x <= 0) or np.any(np.diff(x) <= 0):
        raise DomainError("x must be positive and strictly increasing")
    if np.all(v > 0):
        sign = 1.0
    elif np.all(v < 0):
        sign = -1.0
    else:
        raise DomainError("samples change sign (or vanish); a power-law fit is meaningless")
    lx, lv = np.log(x), np.log(np.abs(v))
    design = np.column_stack([np.ones_like(lx), -lx])
    (log_a, p), *_ = np.linalg.lstsq(design, lv, rcond=None)
    res = lv - design @ np.array([log_a, p])
    ss_tot = float(np.sum((lv - lv.mean()) ** 2))
    r2 = 1.0 - float(np.sum(res**2)) / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(float(p), sign * math.exp(log_a), min(1.0, max(0.0, r2)),
                    (float(x[0]), float(x[-1])), tuple(float(r) for r in res))


def image_values(u: ScalarField1D, order: FracOrder, xs: Sequence[float],
                 budget: QuadratureBudget = DEFAULT_BUDGET, exact: bool = True) -> np.ndarray:
    """``(-Delta)^s u`` at far points by the quadrature engine."""
    return np.array([frac_lap_second_difference(u, order, float(x), budget, exact).value for x in xs])


def image_tail_fit(u: ScalarField1D, order: FracOrder, xs: Sequence[float],
                   budget: QuadratureBudget = DEFAULT_BUDGET, exact: bool = True) -> DecayFit:
    """Tail exponent of the image of ``u``; ``1 + 2s`` for compactly supported ``u``."""
    return fit_tail_exponent(xs, image_values(u, order, xs, budget, exact))


# ---------------------------------------------------------------------------
# Layer solution at s = 1/2: u = 1/2 + arctan(x)/pi

def layer_profile(x) -> np.ndarray:
    return 0.5 + np.arctan(np.asarray(x, dtype=float)) / math.pi


def layer_minus_heaviside(x) -> np.ndarray:
    """``u(x) - H(x)`` without cancellation: ``-arctan(1/x)/pi`` for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x > 0
    out[pos] = -np.arctan(1.0 / x[pos]) / math.pi
    out[~pos] = layer_profile(x[~pos])
    return out


def well(v) -> np.ndarray:
    """Periodic well ``W(v) = (1 - cos 2 pi v) / (4 pi^2)``; ``W''(0) = 1``."""
    return (1.0 - np.cos(2.0 * math.pi * np.asarray(v, dtype=float))) / (4.0 * math.pi**2)


def well_derivative(v) -> np.ndarray:
    return np.sin(2.0 * math.pi * np.asarray(v, dtype=float)) / (2.0 * math.pi)


def layer_nonlinearity(x) -> np.ndarray:
    """``-W'(u(x)) = x / (pi (1 + x^2))``, the value ``(-Delta)^(1/2) u`` must take."""
    return -well_derivative(layer_profile(x))


@dataclass(frozen=True)
class LayerTailReport:
    fit: DecayFit
    exponent_expected: float
    amplitude_measured: float
    amplitude_closed_form: float
    amplitude_general: float
    exponent_tol: float
    amplitude_rel_tol: float

    @property
    def exponent_ok(self) -> bool:
        return abs(self.fit.exponent - self.exponent_expected) <= self.exponent_tol

    @property
    def amplitude_ok(self) -> bool:
        ref = self.amplitude_closed_form
        return abs(self.amplitude_measured - ref) <= self.amplitude_rel_tol * ref

    @property
    def passed(self) -> bool:
        return self.exponent_ok and self.amplitude_ok

    def as_dict(self) -> dict:
        return {"fit": self.fit.as_dict(), "exponent_expected": self.exponent_expected,
                "amplitude_measured": self.amplitude_measured,
                "amplitude_closed_form": self.amplitude_closed_form,
                "amplitude_general": self.amplitude_general,
                "exponent_ok": self.exponent_ok, "amplitude_ok": self.amplitude_ok}


def layer_tail_check(s: float = 0.5, xs: Sequence[float] | None = None, *,
                     exponent_tol: float = 0.05, amplitude_rel_tol: float = 0.02) -> LayerTailReport:
    """Fit ``1 - u(x)`` for the arctan layer on dyadic ``x`` (default 16 .. 512).

    The closed form gives ``u - 1 = -1/(pi x) + O(x^-3)``: exponent ``2s = 1``
    and amplitude ``1/pi``. The amplitude ``1/(2s W''(0)) = 1`` read off the
    general expansion is reported next to it for comparison.
    """
    if float(s) != 0.5:
        raise PreconditionError(f"the explicit layer exists for s = 1/2 only, got s={s}")
    xs = dyadic_points(16.0, 6) if xs is None else np.asarray(xs, dtype=float)
    diff = layer_minus_heaviside(xs)
    fit = fit_tail_exponent(xs, diff)
    w2 = 1.0  # W''(0) for the periodic well
    return LayerTailReport(fit, 2.0 * s, abs(fit.amplitude), 1.0 / math.pi, 1.0 / (2.0 * s * w2),
                           exponent_tol, amplitude_rel_tol)


@dataclass(frozen=True)
class LayerResidual:
    points: tuple[float, ...]
    operator: tuple[float, ...]
    nonlinearity: tuple[float, ...]

    @property
    def max_residual(self) -> float:
        return max(abs(a - b) for a, b in zip(self.operator, self.nonlinearity))


def residual_check_layer(points: Sequence[float] | None = None,
                         budget: QuadratureBudget = DEFAULT_BUDGET, exact: bool = True) -> LayerResidual:
    """Compare ``(-Delta)^(1/2)`` of the layer with ``x / (pi (1 + x^2))``.

    Defaults to 21 equispaced points of ``[-5, 5]``.
    """
    pts = np.linspace(-5.0, 5.0, 21) if points is None else np.asarray(points, dtype=float)
    u = catalog_field("arctan_layer")
    op = image_values(u, FracOrder(0.5), pts, budget, exact)
    rhs = layer_nonlinearity(pts)
    return LayerResidual(tuple(float(p) for p in pts), tuple(float(v) for v in op),
                         tuple(float(v) for v in rhs))
