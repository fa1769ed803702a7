"""Command-line front end: ``fraclap apply | heat | dirichlet | verify | decay-fit``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 engine
precondition failure. CSV output starts with ``#`` comment lines holding the
full configuration (grids, budgets, defaults) so every number can be
reproduced from its own file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__, asymptotics, dirichlet, extension, spectral, verify
from .core import FracOrder
from .errors import DomainError, FracLapError, PreconditionError
from .fields import (CATALOG, ScalarField1D, TailModel, catalog_field, closed_form,
                     field_from_samples)
from .quadrature import DEFAULT_BUDGET, QuadratureBudget, frac_lap

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECONDITION = 0, 1, 2, 3
CONFIG_ENV = "FRACLAP_CONFIG"
# the default window of +-40 leaves periodic images of order 1e-4 in (-Delta)^s u
APPLY_GRID = spectral.SpectralGrid(16384.0, 2**19)
CONFIG_SECTIONS = ("budget", "apply_grid", "heat_grid", "verify")


class UsageError(FracLapError):
    """Bad flags or unreadable inputs (exit code 2)."""


# ---------------------------------------------------------------------------
# parsing helpers

def parse_points(text: str) -> np.ndarray:
    """``start:end:count``, a single number or a comma-separated list."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1 or (n == 1 and a != b):
                raise ValueError
            pts = np.linspace(a, b, n)
        else:
            pts = np.array([float(p) for p in text.split(",")])
    except ValueError:
        raise UsageError(f"bad point list {text!r}; use start:end:count or x1,x2,...") from None
    if not np.all(np.isfinite(pts)):
        raise UsageError(f"point list {text!r} has non-finite entries")
    return pts


def parse_grid(text: str) -> spectral.SpectralGrid:
    """``L,M``: half-width and mode count."""
    try:
        L, M = text.split(",")
        return spectral.SpectralGrid(float(L), int(M))
    except ValueError:
        raise UsageError(f"bad grid {text!r}; use half_width,modes") from None


def read_table(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Two-column numeric CSV; ``#`` comments and one header row are skipped."""
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"input file not found: {path}")
    xs, vs = [], []
    with p.open(newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.lstrip().startswith("#")) if r]
    for i, row in enumerate(rows):
        try:
            x, v = float(row[0]), float(row[1])
        except (ValueError, IndexError):
            if i == 0:
                continue
            raise UsageError(f"{path}: row {i + 1} is not two numbers: {row}") from None
        xs.append(x)
        vs.append(v)
    if len(xs) < 2:
        raise UsageError(f"{path}: need at least two data rows")
    return np.array(xs), np.array(vs)


def load_config(path: str | None) -> dict:
    """JSON configuration from ``path`` or ``$FRACLAP_CONFIG``; empty when neither is set."""
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"configuration file not found: {path}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict) or set(data) - set(CONFIG_SECTIONS):
        raise UsageError(f"{path}: top-level keys must be among {CONFIG_SECTIONS}")
    return data


def budget_from(cfg: dict) -> QuadratureBudget:
    b = dict(cfg.get("budget", {}))
    if "inner_radii" in b:
        b["inner_radii"] = tuple(b["inner_radii"])
    try:
        return replace(DEFAULT_BUDGET, **b)
    except TypeError as exc:
        raise UsageError(f"bad budget configuration: {exc}") from None


def grid_from(cfg: dict, key: str, default: spectral.SpectralGrid) -> spectral.SpectralGrid:
    if key not in cfg:
        return default
    try:
        return spectral.SpectralGrid(**cfg[key])
    except TypeError as exc:
        raise UsageError(f"bad {key} configuration: {exc}") from None


def order_from(args) -> FracOrder:
    return FracOrder(args.s, paper_constant=getattr(args, "paper_constant", False))


# ---------------------------------------------------------------------------
# output

def _fmt(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render(rows: list[dict], header: dict, fmt: str) -> str:
    """CSV (with ``#`` header lines) or JSON ``{"header": ..., "rows": [...]}``."""
    if fmt == "json":
        return json.dumps({"header": header, "rows": rows}, indent=2, sort_keys=True) + "\n"
    out = io.StringIO()
    for key in sorted(header):
        out.write(f"# {key}: {json.dumps(header[key], sort_keys=True)}\n")
    if rows:
        cols = list(rows[0])
        out.write(",".join(cols) + "\n")
        for r in rows:
            out.write(",".join(_fmt(r[c]) for c in cols) + "\n")
    return out.getvalue()


def emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, newline="\n")
    else:
        sys.stdout.write(text)


def _header(args, **extra) -> dict:
    h = {"fraclap_version": __version__, "command": args.command}
    h.update(extra)
    return h


# ---------------------------------------------------------------------------
# subcommands

def _input_field(args) -> ScalarField1D:
    if args.fn and args.input:
        raise UsageError("give either --fn or --input, not both")
    if args.fn:
        if args.fn not in CATALOG:
            raise UsageError(f"unknown function {args.fn!r}; known: {sorted(CATALOG)}")
        return catalog_field(args.fn, args.h)
    if args.input:
        x, v = read_table(args.input)
        try:
            tail = TailModel.parse(args.tail)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
        return field_from_samples(x, v, tail, name=Path(args.input).name)
    raise UsageError("one of --fn or --input is required")


def cmd_apply(args, cfg: dict) -> int:
    order = order_from(args)
    pts = parse_points(args.points)
    if args.engine != "integral" and args.paper_constant:
        raise UsageError("--paper-constant only affects the integral engine")
    if args.engine == "extension":
        extension.require_half(order)
    u = _input_field(args)
    exact = u.has_closed_form and not args.sampled
    budget = budget_from(cfg)
    header = _header(args, engine=args.engine, s=order.s, paper_constant=order.paper_constant,
                     function=args.fn or args.input, tail=u.tail.as_dict(), spacing=u.spacing,
                     window=list(u.window), mode="exact" if exact else "sampled")
    if args.engine == "integral":
        reps = frac_lap(u, order, pts, budget, exact, args.method)
        vals = [(r.value, r.estimated_error) for r in reps]
        header.update(budget=budget.as_dict(), method=args.method)
    elif args.engine == "extension":
        ext = extension.HalfPlaneExtension(u, budget=budget, exact=exact)
        vals = [(r.value, r.estimated_error) for r in (extension.neumann_trace(ext, x) for x in pts)]
        header.update(budget=budget.as_dict(), heights=list(ext.heights))
    else:
        grid = parse_grid(args.grid) if args.grid else grid_from(cfg, "apply_grid", APPLY_GRID)
        src = u if exact else (lambda t: u.evaluate(t))
        v, e = spectral.frac_lap_spectral_report(src, grid, order, pts)
        vals = list(zip(v.tolist(), e.tolist()))
        header.update(grid=grid.as_dict())
    rows = [{"x": float(x), "value": float(v), "est_error": float(e)} for x, (v, e) in zip(pts, vals)]
    emit(render(rows, header, args.format), args.output)
    return EXIT_OK


def _heat_initial(name: str, sigma: float):
    if name == "delta":
        return spectral.delta_approximation(sigma)
    if name not in CATALOG:
        raise UsageError(f"unknown initial datum {name!r}; use delta or one of {sorted(CATALOG)}")
    return closed_form(name)


def cmd_heat(args, cfg: dict) -> int:
    order = order_from(args)
    times = [float(t) for t in args.t]
    for t in times:
        if not (math.isfinite(t) and t >= 0):
            raise UsageError(f"time must be finite and >= 0, got {t}")
    grid = parse_grid(args.grid) if args.grid else grid_from(cfg, "heat_grid", spectral.DEFAULT_GRID)
    u0 = _heat_initial(args.initial, args.sigma)
    x = grid.nodes()
    outdir = Path(args.output_dir) if args.output_dir else None
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
    chunks = []
    for t in times:
        u = spectral.heat_evolve(u0, grid, order, t, periodic=args.periodic)
        header = _header(args, s=order.s, t=t, initial=args.initial, grid=grid.as_dict(),
                         sigma=args.sigma if args.initial == "delta" else None,
                         mass=spectral.mass(u, grid))
        rows = [{"x": float(a), "value": float(b)} for a, b in zip(x, u)]
        text = render(rows, header, args.format)
        if outdir is not None:
            ext = "json" if args.format == "json" else "csv"
            (outdir / f"heat_t{t:g}.{ext}").write_text(text)
        else:
            chunks.append(text)
    if chunks:
        emit("".join(chunks), args.output)
    return EXIT_OK


def _function_spec(text: str, what: str):
    """``zero``, ``const:c``, ``fn:<catalog id>`` or ``file:<path>`` -> (value, tail)."""
    head, _, rest = text.partition(":")
    if head == "zero" and not rest:
        return 0.0, TailModel.compact()
    if head == "const":
        try:
            c = float(rest)
        except ValueError:
            raise UsageError(f"bad {what} spec {text!r}") from None
        return c, TailModel.limits(c, c, 1.0)
    if head == "fn":
        if rest not in CATALOG:
            raise UsageError(f"unknown function {rest!r} in {what} spec")
        return closed_form(rest), CATALOG[rest][1]
    if head == "file":
        x, v = read_table(rest)
        return (x, v), None
    raise UsageError(f"bad {what} spec {text!r}; use zero, const:c, fn:<id> or file:<path>")


def _torsion_reference(args, order: FracOrder, f, g, interval):
    """Exact solution when it is known (constant load, zero exterior data on (-1, 1))."""
    if not (isinstance(f, float) and isinstance(g, float) and g == 0.0 and interval == (-1.0, 1.0)):
        return None
    lam = dirichlet.torsion_eigenvalue(order)
    prof = dirichlet.fractional_torsion_profile(order.s)
    return lambda t: f / lam * prof(t)


def cmd_dirichlet(args, cfg: dict) -> int:
    order = order_from(args)
    try:
        a, b = (float(v) for v in args.interval.split(","))
    except ValueError:
        raise UsageError(f"bad interval {args.interval!r}; use a,b") from None
    f, _ = _function_spec(args.f, "--f")
    g, g_tail = _function_spec(args.g, "--g")
    if isinstance(f, tuple):
        x, v = f
        f = lambda t, _x=x, _v=v: np.interp(t, _x, _v)  # noqa: E731
    if isinstance(g, tuple):
        try:
            tail = TailModel.parse(args.g_tail)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
        g, g_tail = field_from_samples(*g, tail), tail
    g_arg = None if (isinstance(g, float) and g == 0.0) else (
        (lambda t, _c=g: np.full_like(np.asarray(t, dtype=float), _c)) if isinstance(g, float) else g)
    exact_g = not isinstance(g, ScalarField1D)
    h = args.h
    reference = _torsion_reference(args, order, f, g, (a, b))
    if args.levels < 1:
        raise UsageError("--levels must be at least 1")
    conv, sols = [], []
    for level in range(args.levels - 1, -1, -1):
        hk = h * 2**level
        system = dirichlet.assemble((a, b), hk, order, g_arg, g_tail=g_tail,
                                    exterior_radius=args.exterior_radius, exact_g=exact_g,
                                    scheme=args.scheme)
        sol = dirichlet.solve(system, f)
        row = {"h": hk, "unknowns": int(system.n), "residual": sol.residual}
        if reference is not None:
            row["max_error"] = sol.max_error(reference)
        conv.append(row)
        sols.append((2**level, sol))
    if reference is None:
        # self-convergence against the finest solution at the shared nodes
        for row, (step, coarse) in zip(conv[:-1], sols[:-1]):
            row["difference_to_finest"] = float(np.max(np.abs(coarse.values - sol.values[step - 1::step])))
    header = _header(args, s=order.s, paper_constant=order.paper_constant, interval=[a, b], h=h,
                     f=args.f, g=args.g, scheme=args.scheme, exterior_radius=args.exterior_radius,
                     convergence=conv)
    rows = [{"x": float(x), "value": float(v)} for x, v in zip(sol.nodes, sol.values)]
    emit(render(rows, header, args.format), args.output)
    return EXIT_OK


def cmd_verify(args, cfg: dict) -> int:
    if args.all and args.check:
        raise UsageError("give either --all or --check, not both")
    selection = "all" if (args.all or not args.check) else args.check
    try:
        config = verify.SuiteConfig.from_mapping(cfg.get("verify", {}))
        ids = verify.resolve(selection)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    results = [verify.run_check(c, config) for c in ids]
    if args.report:
        Path(args.report).write_text(verify.report_json(results, config, args.timing))
    if args.format == "json":
        sys.stdout.write(verify.report_json(results, config, args.timing))
    else:
        sys.stdout.write(verify.report_table(results, config))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


SCENARIOS = ("bump-image", "cauchy-kernel", "layer")


def cmd_decay_fit(args, cfg: dict) -> int:
    if bool(args.input) == bool(args.scenario):
        raise UsageError("give exactly one of --input or --scenario")
    if args.input:
        x, v = read_table(args.input)
        source = args.input
    else:
        x = parse_points(args.points) if args.points else None
        if args.scenario == "bump-image":
            x = asymptotics.dyadic_points(4.0, 9, 2) if x is None else x
            v = asymptotics.image_values(catalog_field("bump"), FracOrder(args.s), x, budget_from(cfg))
        elif args.scenario == "cauchy-kernel":
            x = asymptotics.dyadic_points(8.0, 6) if x is None else x
            v = spectral.cauchy_kernel(1.0, x)
        else:
            x = asymptotics.dyadic_points(16.0, 6) if x is None else x
            v = asymptotics.layer_minus_heaviside(x)
        source = args.scenario
    fit = asymptotics.fit_tail_exponent(x, v)
    doc = {"header": {"fraclap_version": __version__, "command": "decay-fit", "source": source,
                      "s": args.s if args.scenario == "bump-image" else None},
           "fit": fit.as_dict()}
    emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 already; keep the message terse
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fraclap", description="Numerical fractional Laplacian toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help=f"JSON configuration file (default: ${CONFIG_ENV})")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, s_default=None, fmt=True):
        sp.add_argument("--s", type=float, default=s_default, required=s_default is None,
                        help="fractional order in (0, 1)")
        if fmt:
            sp.add_argument("--format", choices=("csv", "json"), default="csv")
            sp.add_argument("--output", "-o", help="output file (default: stdout)")

    a = sub.add_parser("apply", help="evaluate (-Delta)^s u at points")
    common(a)
    a.add_argument("--engine", choices=("integral", "spectral", "extension"), default="integral")
    a.add_argument("--fn", help=f"catalog function: {', '.join(sorted(CATALOG))}")
    a.add_argument("--input", help="two-column CSV x,value on a uniform grid")
    a.add_argument("--tail", default="compact", help="tail of --input: compact | power:A,p | limits:L-,L+,q")
    a.add_argument("--points", required=True, help="start:end:count or x1,x2,...")
    a.add_argument("--h", type=float, default=0.01, help="sample spacing for catalog functions")
    a.add_argument("--sampled", action="store_true", help="use interpolated samples, not the closed form")
    a.add_argument("--method", choices=("second_difference", "pv"), default="second_difference")
    a.add_argument("--grid", help="spectral grid half_width,modes")
    a.add_argument("--paper-constant", action="store_true", help="literal constant without the factor s")
    a.set_defaults(func=cmd_apply)

    h = sub.add_parser("heat", help="fractional heat evolution from a catalog datum")
    common(h, 0.5)
    h.add_argument("--t", nargs="+", type=float, required=True, help="one or more times")
    h.add_argument("--initial", default="delta", help="delta or a catalog id")
    h.add_argument("--sigma", type=float, default=spectral.DEFAULT_SIGMA, help="width of the delta stand-in")
    h.add_argument("--grid", help="half_width,modes")
    h.add_argument("--periodic", action="store_true", help="skip the decay check at the window edge")
    h.add_argument("--output-dir", help="write one file per time into this directory")
    h.set_defaults(func=cmd_heat)

    d = sub.add_parser("dirichlet", help="solve (-Delta)^s u = f in (a, b), u = g outside")
    common(d)
    d.add_argument("--f", default="const:1", help="zero | const:c | fn:<id> | file:<path>")
    d.add_argument("--g", default="zero", help="zero | const:c | fn:<id> | file:<path>")
    d.add_argument("--g-tail", default="compact", help="tail of a file exterior datum")
    d.add_argument("--interval", default="-1,1")
    d.add_argument("--h", type=float, default=1.0 / 256.0)
    d.add_argument("--levels", type=int, default=3, help="grids in the convergence table")
    d.add_argument("--scheme", choices=dirichlet.SCHEMES, default="auto")
    d.add_argument("--exterior-radius", type=float, default=20.0)
    d.add_argument("--paper-constant", action="store_true")
    d.set_defaults(func=cmd_dirichlet)

    v = sub.add_parser("verify", help="run the reproduction suite")
    v.add_argument("--all", action="store_true", help="run every check (default)")
    v.add_argument("--check", action="append", help="check id or group prefix (repeatable)")
    v.add_argument("--report", help="write the JSON report here")
    v.add_argument("--format", choices=("table", "json"), default="table", help="stdout format")
    v.add_argument("--timing", action="store_true", help="include runtimes in the JSON report")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("decay-fit", help="fit a power-law tail")
    f.add_argument("--input", help="two-column CSV x,value")
    f.add_argument("--scenario", choices=SCENARIOS)
    f.add_argument("--s", type=float, default=0.5, help="order for the bump-image scenario")
    f.add_argument("--points", help="override the sample points")
    f.add_argument("--output", "-o")
    f.set_defaults(func=cmd_decay_fit)
    return p


# flags whose values may start with "-" (e.g. ``--points -1:1:5``)
_DASH_VALUE_FLAGS = ("--points", "--interval", "--tail", "--g-tail")


def _join_dash_values(argv: Sequence[str]) -> list[str]:
    out, i = [], 0
    argv = list(argv)
    while i < len(argv):
        tok = argv[i]
        if tok in _DASH_VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parser.parse_args(_join_dash_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except PreconditionError as exc:
        sys.stderr.write(f"fraclap: precondition failed: {exc}\n")
        return EXIT_PRECONDITION
    except (UsageError, DomainError) as exc:
        sys.stderr.write(f"fraclap: {exc}\n")
        return EXIT_USAGE
    except FracLapError as exc:
        sys.stderr.write(f"fraclap: {exc}\n")
        return EXIT_PRECONDITION
    except OSError as exc:
        sys.stderr.write(f"fraclap: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
