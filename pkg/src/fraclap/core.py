"""Fractional order, operator normalization and evaluation reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import DomainError
from .special import gamma


@dataclass(frozen=True)
class FracOrder:
    """Exponent ``s`` in (0, 1) and spatial dimension ``N``.

    ``paper_constant`` switches :func:`normalization_constant` to the literal
    formula without the leading factor ``s`` (comparison runs only; the three
    engines only agree under the default convention).
    """

    s: float
    N: int = 1
    paper_constant: bool = False

    def __post_init__(self) -> None:
        s = float(self.s)
        if not math.isfinite(s) or not 0.0 < s < 1.0:
            raise DomainError(f"fractional order must satisfy 0 < s < 1, got {self.s!r}")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "N", int(self.N))

    def require_1d(self) -> None:
        if self.N != 1:
            raise DomainError(f"numerical engines are one-dimensional, got N={self.N}")


def normalization_constant(order: FracOrder) -> float:
    r"""Constant in front of the singular integral.

    Uses ``s * 4**s * Gamma(N/2 + s) / (pi**(N/2) * Gamma(1 - s))``, the value
    for which the integral operator has Fourier symbol ``|xi|**(2s)``. With
    ``order.paper_constant`` set the factor ``s`` is dropped.
    """
    s, n = order.s, order.N
    c = 4.0**s * gamma(0.5 * n + s) / (math.pi ** (0.5 * n) * gamma(1.0 - s))
    return c if order.paper_constant else s * c


@dataclass(frozen=True)
class EvalReport:
    """Value of a nonlocal evaluation with its error estimate and budget."""

    value: float
    estimated_error: float
    budget: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise DomainError(f"evaluation produced a non-finite value {self.value!r}")
        if not self.estimated_error >= 0.0:
            raise DomainError(f"estimated error must be >= 0, got {self.estimated_error!r}")


def oracle_integral(s: float) -> float:
    """``int_R (1 - cos z) |z|^(-1-2s) dz`` by adaptive quadrature (QUADPACK).

    On ``[0, 1]`` the integrand is ``2 sin^2(z/2) / z^2`` against the
    algebraic weight ``z^(1-2s)``; on ``[1, inf)`` the constant part is
    ``1/(2s)`` in closed form and the cosine part uses the Fourier-integral
    routine. Independent of :func:`normalization_constant`.
    """
    from scipy.integrate import quad

    s = float(s)
    if not 0.0 < s < 1.0:
        raise DomainError(f"fractional order must satisfy 0 < s < 1, got {s!r}")

    def smooth(z):
        half = 0.5 * z
        return 0.5 * (math.sin(half) / half) ** 2 if z > 0 else 0.5

    near, _ = quad(smooth, 0.0, 1.0, weight="alg", wvar=(1.0 - 2.0 * s, 0.0),
                   epsabs=1e-15, epsrel=1e-13, limit=200)
    cos_part, _ = quad(lambda z: z ** (-1.0 - 2.0 * s), 1.0, math.inf, weight="cos", wvar=1.0,
                       epsabs=1e-12, limit=200)
    return 2.0 * (near + 1.0 / (2.0 * s) - cos_part)
