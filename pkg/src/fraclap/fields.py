"""Sampled 1D fields with a declarative far-field model.

A :class:`ScalarField1D` stores samples on a uniform grid together with a
:class:`TailModel` that says what the function does outside the window. The
nonlocal engines need both: samples for the near field, the tail model for
exact truncation corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, PreconditionError

COMPACT = "compact"
POWER = "power"
LIMITS = "limits"

GAUSSIAN_CUTOFF = 10.0


@dataclass(frozen=True)
class TailModel:
    """Far-field description of a field.

    ``compact``: zero outside the window. ``power``: ``A |x|**-p``, with
    ``parity="odd"`` meaning ``sign(x) A |x|**-p``. ``limits``: tends to
    ``left``/``right`` at minus/plus infinity with ``|u - L| <= c |x|**-q``.
    """

    kind: str = COMPACT
    amplitude: float = 0.0
    exponent: float = 1.0
    parity: str = "even"
    left: float = 0.0
    right: float = 0.0
    approach: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in (COMPACT, POWER, LIMITS):
            raise DomainError(f"unknown tail kind {self.kind!r}")
        if self.kind == POWER:
            if not self.exponent > 0:
                raise DomainError(f"power-decay tail needs p > 0, got {self.exponent!r}")
            if self.parity not in ("even", "odd"):
                raise DomainError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        if self.kind == LIMITS and not self.approach > 0:
            raise DomainError(f"approach exponent must be > 0, got {self.approach!r}")

    @classmethod
    def compact(cls) -> "TailModel":
        return cls(COMPACT)

    @classmethod
    def power(cls, amplitude: float, exponent: float, parity: str = "even") -> "TailModel":
        return cls(POWER, amplitude=float(amplitude), exponent=float(exponent), parity=parity)

    @classmethod
    def limits(cls, left: float, right: float, approach: float = 1.0) -> "TailModel":
        return cls(LIMITS, left=float(left), right=float(right), approach=float(approach))

    @classmethod
    def parse(cls, text: str) -> "TailModel":
        """Parse ``compact``, ``power:A,p[,odd]`` or ``limits:L-,L+,q``."""
        head, _, rest = text.strip().partition(":")
        parts = [p for p in rest.split(",") if p]
        try:
            if head == "compact" and not parts:
                return cls.compact()
            if head == "power" and len(parts) in (2, 3):
                parity = parts[2] if len(parts) == 3 else "even"
                return cls.power(float(parts[0]), float(parts[1]), parity)
            if head == "limits" and len(parts) == 3:
                return cls.limits(*(float(p) for p in parts))
        except ValueError as exc:
            raise DomainError(f"bad tail spec {text!r}: {exc}") from None
        raise DomainError(f"bad tail spec {text!r}")

    def far_value(self, t: np.ndarray) -> np.ndarray:
        """Pure model value (no edge matching) at points ``t`` away from 0."""
        t = np.asarray(t, dtype=float)
        if self.kind == COMPACT:
            return np.zeros_like(t)
        if self.kind == LIMITS:
            return np.where(t < 0, self.left, self.right)
        with np.errstate(divide="ignore"):
            v = self.amplitude * np.abs(t) ** (-self.exponent)
        return np.sign(t) * v if self.parity == "odd" else v

    def scaled(self, a: float) -> "TailModel":
        if self.kind == COMPACT:
            return self
        return replace(self, amplitude=a * self.amplitude, left=a * self.left, right=a * self.right)

    def plus(self, other: "TailModel") -> "TailModel":
        """Tail of the sum of two fields, when expressible."""
        if self.kind == COMPACT:
            return other
        if other.kind == COMPACT:
            return self
        if self.kind == LIMITS and other.kind == LIMITS:
            return TailModel.limits(self.left + other.left, self.right + other.right,
                                    min(self.approach, other.approach))
        if (self.kind == POWER and other.kind == POWER and self.exponent == other.exponent
                and self.parity == other.parity):
            return TailModel.power(self.amplitude + other.amplitude, self.exponent, self.parity)
        raise DomainError(f"cannot combine tails {self.kind!r} and {other.kind!r}")

    def as_dict(self) -> dict:
        if self.kind == COMPACT:
            return {"kind": COMPACT}
        if self.kind == POWER:
            return {"kind": POWER, "amplitude": self.amplitude, "exponent": self.exponent,
                    "parity": self.parity}
        return {"kind": LIMITS, "left": self.left, "right": self.right, "approach": self.approach}


@dataclass(frozen=True, eq=False)
class ScalarField1D:
    """Samples ``values[i]`` at ``origin + i * spacing`` plus a tail model.

    ``closed_form`` (optional) is the exact function the samples came from;
    engines use it instead of interpolation when asked for exact mode.
    ``breakpoints`` are abscissae where the function is not smooth;
    ``singular_points`` are where it is unbounded (sampled mode refused).
    """

    origin: float
    spacing: float
    values: np.ndarray
    tail: TailModel = field(default_factory=TailModel.compact)
    closed_form: Callable[[np.ndarray], np.ndarray] | None = None
    breakpoints: tuple[float, ...] = ()
    singular_points: tuple[float, ...] = ()
    name: str = ""

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "origin", float(self.origin))
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "breakpoints", tuple(sorted(float(b) for b in self.breakpoints)))
        object.__setattr__(self, "singular_points", tuple(sorted(float(b) for b in self.singular_points)))
        if values.ndim != 1 or values.size < 2:
            raise DomainError("a field needs at least two samples")
        if not self.spacing > 0 or not math.isfinite(self.spacing):
            raise DomainError(f"grid spacing must be positive, got {self.spacing!r}")
        if not self.singular_points and not np.all(np.isfinite(values)):
            raise DomainError("non-finite samples require declared singular points")
        if self.tail.kind == COMPACT:
            finite = values[np.isfinite(values)]
            scale = float(np.max(np.abs(finite))) if finite.size else 0.0
            if max(abs(values[0]), abs(values[-1])) > 1e-12 * max(scale, 1e-300):
                raise PreconditionError(
                    "compact tail declared but samples do not vanish at the window edges")

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def window(self) -> tuple[float, float]:
        return self.origin, self.coord(self.n - 1)

    def coord(self, i):
        """Grid coordinate of node ``i`` (scalar or array)."""
        return self.origin + i * self.spacing

    def coords(self) -> np.ndarray:
        return self.origin + np.arange(self.n) * self.spacing

    @property
    def has_closed_form(self) -> bool:
        return self.closed_form is not None

    def evaluate(self, t, exact: bool = False) -> np.ndarray:
        """Field value at arbitrary points.

        Inside the window: piecewise-quadratic interpolation on the nearest
        node triple. Outside: the tail model, matched to the edge sample for
        ``limits`` tails. In exact mode the closed form is used everywhere.
        """
        t = np.asarray(t, dtype=float)
        if exact:
            if self.closed_form is None:
                raise PreconditionError(f"field {self.name or '<samples>'} has no closed form")
            return np.asarray(self.closed_form(t), dtype=float)
        if self.singular_points:
            raise PreconditionError(
                "field has singular points; use the closed-form integrand (exact mode)")
        lo, hi = self.window
        h = self.spacing
        out = np.empty_like(t)
        inside = (t >= lo) & (t <= hi)
        ti = t[inside]
        pos = (ti - lo) / h
        j = np.clip(np.rint(pos).astype(np.int64), 1, self.n - 2)
        xi = pos - j
        v = self.values
        out[inside] = (0.5 * xi * (xi - 1.0) * v[j - 1] + (1.0 - xi * xi) * v[j]
                       + 0.5 * xi * (xi + 1.0) * v[j + 1])
        left = t < lo
        right = t > hi
        out[left] = self._extrapolate(t[left], lo, v[0], self.tail.left)
        out[right] = self._extrapolate(t[right], hi, v[-1], self.tail.right)
        return out

    def _extrapolate(self, t: np.ndarray, edge: float, edge_value: float, limit: float) -> np.ndarray:
        tail = self.tail
        if tail.kind != LIMITS:
            return tail.far_value(t)
        if edge == 0.0 or t.size == 0:
            return np.full_like(t, limit)
        return limit + (edge_value - limit) * np.abs(edge / t) ** tail.approach

    def decay_coefficient(self) -> float:
        """Estimate of ``c`` in ``|u - L| <= c |x|**-q`` from the edge samples."""
        if self.tail.kind != LIMITS:
            return 0.0
        lo, hi = self.window
        q = self.tail.approach
        return max(abs(self.values[0] - self.tail.left) * abs(lo) ** q,
                   abs(self.values[-1] - self.tail.right) * abs(hi) ** q)

    def max_third_difference(self) -> float:
        """``max |Delta^3 v| / h**3``, a finite-difference bound on ``|u'''|``."""
        if self.n < 4 or self.singular_points:
            return math.inf if self.singular_points else 0.0
        return float(np.max(np.abs(np.diff(self.values, 3)))) / self.spacing**3

    def translated(self, shift: float) -> "ScalarField1D":
        """The field ``x -> u(x - shift)``."""
        cf = self.closed_form
        tail = self.tail
        if tail.kind == POWER and shift != 0.0:
            raise DomainError("translation of power-decay tails is not exact")
        return replace(
            self,
            origin=self.origin + shift,
            closed_form=None if cf is None else (lambda t, _f=cf, _d=shift: _f(np.asarray(t) - _d)),
            breakpoints=tuple(b + shift for b in self.breakpoints),
            singular_points=tuple(b + shift for b in self.singular_points),
        )


def lincomb(a: float, u: ScalarField1D, b: float, v: ScalarField1D) -> ScalarField1D:
    """``a*u + b*v`` for fields on the same grid."""
    if u.n != v.n or u.origin != v.origin or u.spacing != v.spacing:
        raise DomainError("linear combination needs identical grids")
    cu, cv = u.closed_form, v.closed_form
    cf = None
    if cu is not None and cv is not None:
        cf = lambda t, _a=a, _b=b: _a * np.asarray(cu(t)) + _b * np.asarray(cv(t))  # noqa: E731
    return ScalarField1D(
        origin=u.origin,
        spacing=u.spacing,
        values=a * u.values + b * v.values,
        tail=u.tail.scaled(a).plus(v.tail.scaled(b)),
        closed_form=cf,
        breakpoints=tuple(sorted(set(u.breakpoints) | set(v.breakpoints))),
        singular_points=tuple(sorted(set(u.singular_points) | set(v.singular_points))),
        name=f"{a}*{u.name}+{b}*{v.name}",
    )


def _node_count(lo: float, hi: float, h: float) -> int:
    if not hi > lo:
        raise DomainError(f"empty grid window [{lo}, {hi}]")
    if not h > 0:
        raise DomainError(f"grid spacing must be positive, got {h!r}")
    steps = (hi - lo) / h
    k = round(steps)
    if abs(steps - k) > 1e-9 * max(1.0, steps):
        raise DomainError(f"window [{lo}, {hi}] is not a whole number of spacings h={h}")
    return int(k) + 1


def field_from_function(fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, h: float,
                        tail: TailModel, *, breakpoints: Sequence[float] = (),
                        singular_points: Sequence[float] = (), name: str = "") -> ScalarField1D:
    """Sample ``fn`` on ``[lo, hi]`` with spacing ``h`` and keep it as closed form."""
    n = _node_count(lo, hi, h)
    x = lo + np.arange(n) * h
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.asarray(fn(x), dtype=float)
    return ScalarField1D(lo, h, v, tail, closed_form=fn, breakpoints=tuple(breakpoints),
                         singular_points=tuple(singular_points), name=name)


def field_from_samples(x: Sequence[float], v: Sequence[float], tail: TailModel,
                       name: str = "") -> ScalarField1D:
    """Build a field from a uniform two-column table."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.shape != v.shape or x.size < 2:
        raise DomainError("need matching x and value columns with at least two rows")
    dx = np.diff(x)
    h = float(x[-1] - x[0]) / (x.size - 1)
    if not h > 0 or np.max(np.abs(dx - h)) > 1e-9 * max(1.0, abs(h)):
        raise DomainError("x column must be uniformly spaced and increasing")
    return ScalarField1D(float(x[0]), h, v, tail, name=name)


# ---------------------------------------------------------------------------
# Closed-form catalog

def _sqrt_torsion(t):
    t = np.asarray(t, dtype=float)
    return np.sqrt(np.clip(1.0 - t * t, 0.0, None))


def _inv_sqrt_harmonic(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = np.abs(t) < 1.0
    out[m] = 1.0 / np.sqrt(1.0 - t[m] * t[m])
    out[np.abs(t) == 1.0] = np.inf
    return out


def _bump(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    m = np.abs(t) < 1.0
    out[m] = np.exp(1.0 - 1.0 / (1.0 - t[m] * t[m]))
    return out


def _gaussian(t):
    t = np.asarray(t, dtype=float)
    return np.where(np.abs(t) < GAUSSIAN_CUTOFF, np.exp(-t * t), 0.0)


def _arctan_layer(t):
    return 0.5 + np.arctan(np.asarray(t, dtype=float)) / math.pi


def _arctan(t):
    return np.arctan(np.asarray(t, dtype=float))


HEAVISIDE_WIDTH = 0.25


def _heaviside_mollified(t):
    return 0.5 * (1.0 + np.tanh(np.asarray(t, dtype=float) / HEAVISIDE_WIDTH))


def _cauchy(t):
    t = np.asarray(t, dtype=float)
    return 1.0 / (math.pi * (1.0 + t * t))


# id -> (function, tail, breakpoints, singular points, support)
CATALOG: dict[str, tuple] = {
    "bump": (_bump, TailModel.compact(), (), (), (-1.0, 1.0)),
    "gaussian": (_gaussian, TailModel.compact(), (), (), (-GAUSSIAN_CUTOFF, GAUSSIAN_CUTOFF)),
    "sqrt_torsion": (_sqrt_torsion, TailModel.compact(), (-1.0, 1.0), (), (-1.0, 1.0)),
    "inv_sqrt_harmonic": (_inv_sqrt_harmonic, TailModel.compact(), (-1.0, 1.0), (-1.0, 1.0),
                          (-1.0, 1.0)),
    "arctan_layer": (_arctan_layer, TailModel.limits(0.0, 1.0, 1.0), (), (), None),
    "arctan": (_arctan, TailModel.limits(-math.pi / 2, math.pi / 2, 1.0), (), (), None),
    "heaviside_mollified": (_heaviside_mollified, TailModel.limits(0.0, 1.0, 4.0), (), (), None),
    "cauchy_kernel": (_cauchy, TailModel.power(1.0 / math.pi, 2.0), (), (), None),
}


def closed_form(name: str) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized closed form of a catalog function."""
    try:
        return CATALOG[name][0]
    except KeyError:
        raise DomainError(f"unknown catalog function {name!r}; known: {sorted(CATALOG)}") from None


def field_from_closed_form(name: str, lo: float, hi: float, h: float,
                           tail: TailModel | None = None) -> ScalarField1D:
    """Sample a catalog function on ``[lo, hi]``.

    The catalog's own tail model is attached unless ``tail`` overrides it.
    Compactly supported entries (the gaussian counts as compact beyond
    ``|x| = 10``) require the window to contain the support.
    """
    fn = closed_form(name)
    _, default_tail, breaks, singular, support = CATALOG[name]
    if support is not None and (lo > support[0] or hi < support[1]):
        raise DomainError(f"window [{lo}, {hi}] does not contain the support {support} of {name}")
    return field_from_function(fn, lo, hi, h, tail or default_tail, breakpoints=breaks,
                               singular_points=singular, name=name)


# window used when a catalog function is requested without one
DEFAULT_WINDOWS: dict[str, tuple[float, float]] = {
    "bump": (-2.0, 2.0),
    "gaussian": (-12.0, 12.0),
    "sqrt_torsion": (-2.0, 2.0),
    "inv_sqrt_harmonic": (-2.0, 2.0),
    "arctan_layer": (-50.0, 50.0),
    "arctan": (-50.0, 50.0),
    "heaviside_mollified": (-20.0, 20.0),
    "cauchy_kernel": (-50.0, 50.0),
}


def catalog_field(name: str, h: float = 0.01, window: tuple[float, float] | None = None) -> ScalarField1D:
    """Catalog function on its default window (or ``window``) with spacing ``h``."""
    closed_form(name)
    lo, hi = window if window is not None else DEFAULT_WINDOWS[name]
    return field_from_closed_form(name, lo, hi, h)
