"""Gamma function via the Lanczos approximation (g = 7, nine terms)."""

from __future__ import annotations

import math

from .errors import DomainError

_G = 7.0
_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _lanczos(x: float) -> float:
    # valid for x >= 0.5
    x -= 1.0
    acc = _COEFFS[0]
    for k, c in enumerate(_COEFFS[1:], start=1):
        acc += c / (x + k)
    t = x + _G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def gamma(x: float) -> float:
    """Gamma function for real ``x > 0``.

    Relative error stays below 1e-12 on [0.05, 50]. Arguments below 1/2
    go through the reflection formula.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"gamma is only defined here for x > 0, got {x!r}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * _lanczos(1.0 - x))
    return _lanczos(x)
