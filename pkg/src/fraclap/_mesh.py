"""Composite Gauss-Legendre panels on radial meshes.

Meshes are geometric (a fixed number of panels per decade) with extra
geometric refinement toward break radii, where the integrand has a kink or
an integrable singularity.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

# finest panel width next to a break, relative to max(1, |break|)
_MIN_WIDTH = 1e-12


@lru_cache(maxsize=None)
def gauss_unit(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def radial_edges(lo: float, hi: float, per_decade: int, breaks: Iterable[float] = (),
                 levels: int = 48, first: Iterable[float] = ()) -> np.ndarray:
    """Sorted panel edges on ``[lo, hi]``.

    ``lo`` may be 0 only if ``first`` supplies a positive edge to start the
    geometric part from.
    """
    start = min([e for e in first if lo < e < hi], default=lo)
    edges = {lo, hi}
    edges.update(e for e in first if lo < e < hi)
    if start > 0:
        k = max(1, math.ceil(per_decade * math.log10(hi / start)))
        edges.update(np.geomspace(start, hi, k + 1).tolist())
    inner = sorted(b for b in set(breaks) if lo <= b <= hi)
    edges.update(inner)
    # dyadic refinement toward each break, spanning half the way to the
    # neighbouring break (or all the way to an end), at most max(1, b);
    # a break on an end is refined from the inside only
    extra: list[float] = []
    for i, b in enumerate(inner):
        left = (b - inner[i - 1]) / 2 if i > 0 else b - lo
        right = (inner[i + 1] - b) / 2 if i + 1 < len(inner) else hi - b
        floor = _MIN_WIDTH * max(1.0, abs(b))
        for gap, sign in ((left, -1.0), (right, 1.0)):
            gap = min(gap, max(1.0, abs(b)))
            if gap <= 0:
                continue
            nlev = min(levels, max(0, int(math.log2(gap / floor))))
            extra.extend(b + sign * gap * 2.0 ** -np.arange(0, nlev + 1))
    base = np.array(sorted(edges))
    out = np.unique(np.concatenate([base, np.asarray(extra, dtype=float)]))
    return out[(out >= lo) & (out <= hi)]


def panel_nodes(edges: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``n``-point rule on every panel, ascending."""
    x, w = gauss_unit(n)
    a = edges[:-1, None]
    width = np.diff(edges)[:, None]
    return (a + width * x).ravel(), (width * w).ravel()


def integrate(f: Callable[[np.ndarray], np.ndarray], edges: np.ndarray,
              n: int = 16) -> tuple[float, float]:
    """Composite Gauss rule with an ``n`` versus ``n/2`` error estimate.

    Sums are exactly rounded (``math.fsum``), so the result does not depend
    on summation order.
    """
    r, w = panel_nodes(edges, n)
    fine = math.fsum((w * f(r)).tolist())
    r2, w2 = panel_nodes(edges, max(2, n // 2))
    coarse = math.fsum((w2 * f(r2)).tolist())
    return fine, abs(fine - coarse)
