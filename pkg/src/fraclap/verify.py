"""Reproduction suite: one scenario per claim plus the constant and cross-engine checks.

Each check returns a :class:`CheckResult` with ``passed == |measured - claimed|
<= tolerance``. Results are ordered by check id and depend only on the
configuration, so two runs give identical reports (timings are kept out of
the serialized report unless asked for).
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Any, Callable, Iterable, Mapping

import numpy as np

from . import asymptotics, dirichlet, extension, spectral
from .core import FracOrder, normalization_constant, oracle_integral
from .errors import DomainError
from .fields import catalog_field
from .quadrature import DEFAULT_BUDGET, QuadratureBudget, frac_lap_second_difference

SCHEMA = "fraclap.verify/1"
PAPER, DERIVED, TRIVIAL = "[PAPER]", "[DERIVED]", "[TRIVIAL]"
PROPERTY = "property"


@dataclass(frozen=True)
class SuiteConfig:
    """Numerical settings of the suite (all defaults are printed in reports)."""

    budget: QuadratureBudget = DEFAULT_BUDGET
    heat_grid: spectral.SpectralGrid = spectral.DEFAULT_GRID
    cross_grid: spectral.SpectralGrid = spectral.SpectralGrid(16384.0, 2**19)
    heat_sigma: float = spectral.DEFAULT_SIGMA
    dirichlet_h: float = 1.0 / 256.0
    dirichlet_scheme: str = "auto"
    gap_trials: int = 20
    seed: int = 20240601

    def as_dict(self) -> dict:
        return {"budget": self.budget.as_dict(), "heat_grid": self.heat_grid.as_dict(),
                "cross_grid": self.cross_grid.as_dict(), "heat_sigma": self.heat_sigma,
                "dirichlet_h": self.dirichlet_h, "dirichlet_scheme": self.dirichlet_scheme,
                "gap_trials": self.gap_trials, "seed": self.seed}

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "SuiteConfig":
        """Build from a (possibly partial) mapping shaped like :meth:`as_dict`."""
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown configuration keys: {sorted(unknown)}")
        cfg = cls()
        kw: dict[str, Any] = {}
        if "budget" in data:
            b = dict(data["budget"])
            for key in ("inner_radii",):
                if key in b:
                    b[key] = tuple(b[key])
            kw["budget"] = replace(cfg.budget, **b)
        for key in ("heat_grid", "cross_grid"):
            if key in data:
                kw[key] = spectral.SpectralGrid(**data[key])
        for key in ("heat_sigma", "dirichlet_h"):
            if key in data:
                kw[key] = float(data[key])
        for key in ("gap_trials", "seed"):
            if key in data:
                kw[key] = int(data[key])
        if "dirichlet_scheme" in data:
            kw["dirichlet_scheme"] = str(data["dirichlet_scheme"])
        return replace(cfg, **kw)


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    claimed: float | str
    measured: float
    tolerance: float
    passed: bool
    provenance: str
    runtime_millis: int = 0
    detail: Mapping[str, Any] = field(default_factory=dict)

    def as_dict(self, timing: bool = False) -> dict:
        d = asdict(self)
        d["detail"] = dict(self.detail)
        if not timing:
            d.pop("runtime_millis")
        return d


def _numeric(claimed: float, measured: float, tol: float) -> bool:
    return bool(math.isfinite(measured) and abs(measured - claimed) <= tol)


# ---------------------------------------------------------------------------
# individual checks; each returns (claimed, measured, tolerance, provenance, detail)

def _constant_oracle(s: float):
    def run(cfg: SuiteConfig):
        c = normalization_constant(FracOrder(s))
        i1 = oracle_integral(s)
        return 1.0, c * i1, 1e-8, DERIVED, {"constant": c, "oracle_integral": i1}
    return run


def _surprise2_kernel(cfg: SuiteConfig):
    grid = cfg.heat_grid
    u = spectral.heat_evolve(spectral.delta_approximation(cfg.heat_sigma), grid, FracOrder(0.5), 1.0)
    x = grid.nodes()
    m = np.abs(x) <= 10.0
    diff = float(np.max(np.abs(u[m] - spectral.cauchy_kernel(1.0, x[m]))))
    return 0.0, diff, 2e-3, DERIVED, {"sigma": cfg.heat_sigma, "mass": spectral.mass(u, grid),
                                      "min_value": float(u.min())}


def _surprise2_exponent(cfg: SuiteConfig):
    xs = asymptotics.dyadic_points(8.0, 6)
    fit = asymptotics.fit_tail_exponent(xs, spectral.cauchy_kernel(1.0, xs))
    return 2.0, fit.exponent, 0.01, PAPER, fit.as_dict()


def _gap_exteriors():
    ext1 = lambda y: np.zeros_like(np.asarray(y, dtype=float))  # noqa: E731

    def ext2(y):
        d = np.abs(np.asarray(y, dtype=float)) - 1.0
        return np.where(d > 0, d * np.exp(-np.clip(d, 0, None)), 0.0) * (np.abs(y) <= 40.0)

    return ext1, ext2


def _surprise3_gap(cfg: SuiteConfig):
    ext1, ext2 = _gap_exteriors()
    order = FracOrder(0.5)
    u_omega = lambda t: np.sqrt(np.clip(1.0 - np.asarray(t) ** 2, 0.0, None))  # noqa: E731
    gap = dirichlet.illposedness_gap(u_omega, ext1, ext2, order, 0.0, budget=cfg.budget,
                                     breakpoints=(-1.0, 1.0))
    ref = dirichlet.exterior_difference_integral(ext1, ext2, order, 0.0)
    return ref, gap, 1e-6, DERIVED, {"gap": gap, "independent": ref}


def _random_perturbation(rng: np.random.Generator):
    """Smooth exterior bump vanishing at +-1: sum of two shifted gaussian packets."""
    a = rng.uniform(-1.0, 1.0, size=2)
    c = rng.uniform(1.5, 6.0, size=2)
    w = rng.uniform(0.3, 1.5, size=2)

    def ext(y):
        y = np.asarray(y, dtype=float)
        d = np.abs(y) - 1.0
        side = np.where(y > 0, 0, 1)
        pk = a[side] * np.exp(-((np.abs(y) - c[side]) / w[side]) ** 2)
        return np.where(d > 0, pk * (1.0 - np.exp(-4.0 * np.clip(d, 0, None) ** 2)), 0.0) * (np.abs(y) <= 40.0)

    return ext


def _surprise3_random(cfg: SuiteConfig):
    rng = np.random.default_rng(cfg.seed)
    order = FracOrder(0.5)
    zero = lambda y: np.zeros_like(np.asarray(y, dtype=float))  # noqa: E731
    u_omega = lambda t: np.sqrt(np.clip(1.0 - np.asarray(t) ** 2, 0.0, None))  # noqa: E731
    worst, smallest = 0.0, math.inf
    for _ in range(cfg.gap_trials):
        ext = _random_perturbation(rng)
        x = float(rng.uniform(-0.8, 0.8))
        gap = dirichlet.illposedness_gap(u_omega, zero, ext, order, x, budget=cfg.budget,
                                         breakpoints=(-1.0, 1.0))
        ref = dirichlet.exterior_difference_integral(zero, ext, order, x)
        worst = max(worst, abs(gap - ref))
        smallest = min(smallest, abs(ref))
    return 0.0, worst, 1e-6, DERIVED, {"trials": cfg.gap_trials, "smallest_gap": smallest}


def _torsion_points():
    return np.linspace(-0.9, 0.9, 11)


def _farthest(values: Iterable[float], target: float) -> float:
    vals = list(values)
    return max(vals, key=lambda v: abs(v - target))


def _surprise4_harmonic(cfg: SuiteConfig):
    u = catalog_field("inv_sqrt_harmonic")
    vals = [frac_lap_second_difference(u, FracOrder(0.5), x, cfg.budget, exact=True).value
            for x in _torsion_points()]
    return 0.0, _farthest(vals, 0.0), 1e-2, PAPER, {"values": vals}


def _harnack(lo: float):
    def run(cfg: SuiteConfig):
        row = dirichlet.harnack_violation_report([(-lo, lo)])[0]
        claimed = (1.0 - lo * lo) ** -0.5
        return claimed, row.ratio, 1e-9, DERIVED, {"sup": row.sup, "inf": row.inf}
    return run


def _torsion_quadrature(cfg: SuiteConfig):
    u = catalog_field("sqrt_torsion")
    vals = [frac_lap_second_difference(u, FracOrder(0.5), x, cfg.budget, exact=True).value
            for x in _torsion_points()]
    return 1.0, _farthest(vals, 1.0), 1e-3, PAPER, {"values": vals}


def _torsion_extension(cfg: SuiteConfig):
    u = catalog_field("sqrt_torsion")
    ext = extension.HalfPlaneExtension(u, budget=cfg.budget, exact=True)
    vals = [extension.neumann_trace(ext, x).value for x in _torsion_points()]
    return 1.0, _farthest(vals, 1.0), 1e-3, PAPER, {"values": vals}


def _torsion_dirichlet(cfg: SuiteConfig):
    order = FracOrder(0.5)
    system = dirichlet.assemble((-1.0, 1.0), cfg.dirichlet_h, order, scheme=cfg.dirichlet_scheme)
    sol = dirichlet.solve(system, 1.0)
    err = sol.max_error(dirichlet.fractional_torsion_profile(0.5))
    return 0.0, err, 1e-2, PAPER, {"h": cfg.dirichlet_h, "scheme": cfg.dirichlet_scheme,
                                   "residual": sol.residual}


def _bump_tail(s: float):
    def run(cfg: SuiteConfig):
        xs = asymptotics.dyadic_points(4.0, 9, 2)
        fit = asymptotics.image_tail_fit(catalog_field("bump"), FracOrder(s), xs, cfg.budget)
        return 1.0 + 2.0 * s, fit.exponent, 0.05, PAPER, fit.as_dict()
    return run


def _layer_tail(cfg: SuiteConfig):
    rep = asymptotics.layer_tail_check()
    return 1.0, rep.fit.exponent, 0.01, DERIVED, rep.as_dict()


def _layer_amplitude(cfg: SuiteConfig):
    rep = asymptotics.layer_tail_check()
    return 1.0 / math.pi, rep.amplitude_measured, 0.02 / math.pi, DERIVED, {
        "general_formula_amplitude": rep.amplitude_general}


def _layer_residual(cfg: SuiteConfig):
    res = asymptotics.residual_check_layer(budget=cfg.budget)
    return 0.0, res.max_residual, 1e-3, DERIVED, {"points": len(res.points)}


def _cross_gaussian(s: float):
    def run(cfg: SuiteConfig):
        pts = np.linspace(-3.0, 3.0, 21)
        u = catalog_field("gaussian")
        order = FracOrder(s)
        quad = np.array([frac_lap_second_difference(u, order, x, cfg.budget, exact=True).value
                         for x in pts])
        spec = spectral.frac_lap_spectral_at(u, cfg.cross_grid, order, pts)
        rel = np.abs(spec - quad) / np.abs(quad)
        scale = float(np.max(np.abs(quad)))
        return 0.0, float(np.max(rel)), 1e-4, DERIVED, {
            "max_abs_difference": float(np.max(np.abs(spec - quad))),
            "max_norm_relative": float(np.max(np.abs(spec - quad)) / scale)}
    return run


def _cross_extension(cfg: SuiteConfig):
    u = catalog_field("gaussian")
    ext = extension.HalfPlaneExtension(u, budget=cfg.budget, exact=True)
    worst = 0.0
    for x in np.linspace(-2.0, 2.0, 11):
        q = frac_lap_second_difference(u, FracOrder(0.5), x, cfg.budget, exact=True)
        t = extension.neumann_trace(ext, x)
        worst = max(worst, abs(q.value - t.value) / (q.estimated_error + t.estimated_error))
    # measured is the largest discrepancy in units of the combined error bar
    return 0.0, worst, 1.0, DERIVED, {}


CHECKS: dict[str, Callable[[SuiteConfig], tuple]] = {
    **{f"constant-oracle-s{s:.1f}": _constant_oracle(s) for s in np.round(np.arange(1, 10) / 10, 1)},
    "surprise2-kernel": _surprise2_kernel,
    "surprise2-tail-exponent": _surprise2_exponent,
    "surprise3-gap": _surprise3_gap,
    "surprise3-gap-random": _surprise3_random,
    "surprise4-harmonic": _surprise4_harmonic,
    "harnack-0.5": _harnack(0.5),
    "harnack-0.99": _harnack(0.99),
    "surprise5-torsion-quadrature": _torsion_quadrature,
    "surprise5-torsion-extension": _torsion_extension,
    "surprise5-torsion-dirichlet": _torsion_dirichlet,
    **{f"bump-tail-s{s}": _bump_tail(s) for s in (0.25, 0.5, 0.75)},
    "layer-tail": _layer_tail,
    "layer-amplitude": _layer_amplitude,
    "layer-residual": _layer_residual,
    **{f"cross-engine-gaussian-s{s}": _cross_gaussian(s) for s in (0.25, 0.5, 0.75)},
    "cross-engine-extension": _cross_extension,
}


def check_ids() -> list[str]:
    return sorted(CHECKS)


def resolve(selection: Iterable[str] | str | None) -> list[str]:
    """Sorted check ids; ``"all"`` or ``None`` selects every check.

    An entry that is not a check id but prefixes some (``surprise5``,
    ``constant-oracle``) selects the whole group.
    """
    if selection is None or selection == "all":
        return check_ids()
    if isinstance(selection, str):
        selection = [selection]
    chosen: set[str] = set()
    for item in selection:
        if item in CHECKS:
            chosen.add(item)
            continue
        group = [c for c in CHECKS if c.startswith(item + "-")]
        if not group:
            raise DomainError(f"unknown check id {item!r}")
        chosen.update(group)
    return sorted(chosen)


def run_check(check_id: str, config: SuiteConfig) -> CheckResult:
    fn = CHECKS.get(check_id)
    if fn is None:
        raise DomainError(f"unknown check id {check_id!r}")
    t0 = time.perf_counter()
    try:
        claimed, measured, tol, tag, detail = fn(config)
        passed = _numeric(claimed, measured, tol)
    except Exception as exc:  # failures never abort the suite
        claimed, measured, tol, tag = math.nan, math.nan, math.nan, DERIVED
        detail, passed = {"error": f"{type(exc).__name__}: {exc}"}, False
    ms = int(round(1000 * (time.perf_counter() - t0)))
    return CheckResult(check_id, claimed, float(measured), tol, passed, tag, ms, detail)


def run_suite(selection: Iterable[str] | str | None = "all",
              config: SuiteConfig | None = None) -> list[CheckResult]:
    """Run the selected checks in check-id order."""
    cfg = config or SuiteConfig()
    if selection is not None and not isinstance(selection, str):
        selection = list(selection)
        if not selection:
            return []
    return [run_check(c, cfg) for c in resolve(selection)]


def _clean(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (np.floating, np.integer)):
        return _clean(obj.item())
    if isinstance(obj, Mapping):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    return obj


def report_dict(results: list[CheckResult], config: SuiteConfig, timing: bool = False) -> dict:
    return _clean({
        "schema": SCHEMA,
        "config": config.as_dict(),
        "summary": {"total": len(results), "passed": sum(r.passed for r in results),
                    "failed": sum(not r.passed for r in results)},
        "results": [r.as_dict(timing) for r in results],
    })


def report_json(results: list[CheckResult], config: SuiteConfig, timing: bool = False) -> str:
    return json.dumps(report_dict(results, config, timing), indent=2, sort_keys=True) + "\n"


def report_table(results: list[CheckResult], config: SuiteConfig | None = None) -> str:
    """Aligned plain-text table with the configuration as a header."""
    lines = []
    if config is not None:
        lines.append(f"# {SCHEMA}")
        lines.append("# config " + json.dumps(_clean(config.as_dict()), sort_keys=True))
    head = ("check", "claimed", "measured", "tolerance", "status", "source")
    rows = [head]
    for r in results:
        claimed = r.claimed if isinstance(r.claimed, str) else f"{r.claimed:.10g}"
        rows.append((r.check_id, claimed, f"{r.measured:.10g}", f"{r.tolerance:.3g}",
                     "PASS" if r.passed else "FAIL", r.provenance))
    widths = [max(len(row[i]) for row in rows) for i in range(len(head))]
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    passed = sum(r.passed for r in results)
    lines.append(f"# {passed}/{len(results)} passed")
    return "\n".join(lines) + "\n"
