"""Command-line front end.

Subcommands::

    interpconst bound   --a A --b B [--level L] [--degree K] [--format text|json|csv]
    interpconst table   [--level L] [--degree K] [--format ...]
    interpconst contour [--a-min ... --b-max ... --steps N] [--level L] [--output FILE]

Exit codes: 0 success, 2 degenerate input, 3 eigensolver non-convergence,
4 contour grid with failed points, 1 any other pipeline error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bounds import DEFAULT_DEGREE, DEFAULT_LEVEL, BoundsReport, ct_bounds, level_for_mesh_size, rounded
from .errors import DegenerateTriangle, InterpConstError, NoConvergence
from .geometry import make_triangle

EXIT_OK, EXIT_ERROR, EXIT_DEGENERATE, EXIT_NOCONV, EXIT_PARTIAL = 0, 1, 2, 3, 4
THREADS_ENV = "INTERP_CONSTANT_THREADS"
DEFAULT_CONTOUR_LEVEL = 3

TABLE_ROWS = (
    ("(0,1)", 0.0, 1.0),
    ("(0,sqrt(3)/3)", 0.0, math.sqrt(3) / 3),
    ("(1/2,sqrt(3)/2)", 0.5, math.sqrt(3) / 2),
    ("(-1/2,sqrt(3)/2)", -0.5, math.sqrt(3) / 2),
)
REPORT_FIELDS = (
    "a", "b", "level", "h", "poly_degree", "lambda_h1", "lambda_low",
    "lambda_upper", "c_low", "c_upper", "residual_fm", "residual_rr",
)

log = logging.getLogger("interpconst")


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    a: float | None = None
    b: float | None = None
    level: int = DEFAULT_LEVEL
    degree: int = DEFAULT_DEGREE
    max_h: float | None = None
    a_min: float = -1.0
    a_max: float = 1.0
    b_min: float = 0.01
    b_max: float = 1.0
    a_steps: int = 9
    b_steps: int = 5
    fmt: str = "text"
    output: str | None = None
    jobs: int = 1

    def validate(self):
        if self.subcommand not in ("bound", "table", "contour"):
            raise ValueError(f"unknown subcommand {self.subcommand!r}")
        if self.level < 1:
            raise ValueError("level must be >= 1")
        if self.degree < 3:
            raise ValueError("degree must be >= 3")
        if self.subcommand == "contour":
            if self.b_min <= 0:
                raise ValueError("b_min must be > 0")
            if min(self.a_steps, self.b_steps) < 2:
                raise ValueError("steps must be >= 2")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")


def _level_for(cfg: RunConfig, t) -> int:
    return level_for_mesh_size(t, cfg.max_h) if cfg.max_h else cfg.level


def _report_row(r: BoundsReport) -> dict:
    d = r.to_dict()
    d["a"], d["b"] = r.triangle
    return {k: d[k] for k in REPORT_FIELDS}


def _write_csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if row.get(k) is None else _fmt_value(row[k]) for k in header])
    return buf.getvalue()


def _fmt_value(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def format_report_text(r: BoundsReport) -> str:
    rr = rounded(r)
    a, b = r.triangle
    lines = [
        f"triangle (a, b)  = ({a:.10g}, {b:.10g})",
        f"level            = {r.level}   (h = {r.h:.6g})",
        f"poly degree      = {r.poly_degree}",
        f"lambda_h1 (FEM)  = {r.lambda_h1:.10g}",
        f"lambda_low       = {rr['lambda_low']:.4f}",
        f"lambda_upper     = {rr['lambda_upper']:.4f}",
        f"C_low            = {rr['c_low']:.4f}",
        f"C_upper          = {rr['c_upper']:.4f}",
        f"residuals        = fm {r.residual_fm:.2e}, rr {r.residual_rr:.2e}",
    ]
    return "\n".join(lines) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_bound(cfg: RunConfig) -> int:
    t = make_triangle(cfg.a, cfg.b)
    r = ct_bounds(t, _level_for(cfg, t), cfg.degree)
    if cfg.fmt == "json":
        text = r.to_json(indent=2) + "\n"
    elif cfg.fmt == "csv":
        text = _write_csv([_report_row(r)], REPORT_FIELDS)
    else:
        text = format_report_text(r)
    _emit(text, cfg.output)
    return EXIT_OK


def _table_task(args):
    a, b, level, max_h, degree = args
    t = make_triangle(a, b)
    lvl = level_for_mesh_size(t, max_h) if max_h else level
    return ct_bounds(t, lvl, degree)


def _map(fn, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, tasks))


def cmd_table(cfg: RunConfig) -> int:
    tasks = [(a, b, cfg.level, cfg.max_h, cfg.degree) for _, a, b in TABLE_ROWS]
    reports = _map(_table_task, tasks, cfg.jobs)
    if cfg.fmt == "json":
        text = json.dumps([dict(label=lab, **r.to_dict()) for (lab, _, _), r in zip(TABLE_ROWS, reports)], indent=2) + "\n"
    elif cfg.fmt == "csv":
        rows = [dict(_report_row(r)) for r in reports]
        text = _write_csv(rows, REPORT_FIELDS)
    else:
        head = f"{'(a,b)':<18}{'lambda_low':>12}{'lambda_upper':>14}{'C_low':>9}{'C_upper':>9}   level     h\n"
        body = []
        for (lab, _, _), r in zip(TABLE_ROWS, reports):
            rr = rounded(r)
            body.append(
                f"{lab:<18}{rr['lambda_low']:>12.4f}{rr['lambda_upper']:>14.4f}"
                f"{rr['c_low']:>9.4f}{rr['c_upper']:>9.4f}   {r.level:>5} {r.h:.3e}\n"
            )
        text = head + "".join(body)
    _emit(text, cfg.output)
    return EXIT_OK


def _contour_task(args):
    a, b, level, degree = args
    try:
        r = ct_bounds(make_triangle(a, b), level, degree)
    except InterpConstError as exc:
        return {"a": a, "b": b, "error": str(exc)}
    return {"a": a, "b": b, "c_approx": r.lambda_h1**-0.5, "c_low": r.c_low, "c_upper": r.c_upper}


def contour_grid(cfg: RunConfig) -> list[tuple[float, float]]:
    """Grid points in row-major order: ``b`` is the row index, ``a`` the column."""
    a_vals = np.linspace(cfg.a_min, cfg.a_max, cfg.a_steps)
    b_vals = np.linspace(cfg.b_min, cfg.b_max, cfg.b_steps)
    return [(float(a), float(b)) for b in b_vals for a in a_vals]


def cmd_contour(cfg: RunConfig) -> int:
    tasks = [(a, b, cfg.level, cfg.degree) for a, b in contour_grid(cfg)]
    rows = _map(_contour_task, tasks, cfg.jobs)
    failed = [r for r in rows if "error" in r]
    for r in failed:
        print(f"grid point ({r['a']!r}, {r['b']!r}) failed: {r['error']}", file=sys.stderr)
    _emit(_write_csv(rows, ("a", "b", "c_approx", "c_low", "c_upper")), cfg.output)
    return EXIT_PARTIAL if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="interpconst", description=__doc__.split("\n\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def common(sp, level_default):
        sp.add_argument("--level", type=int, default=level_default, help="red-refinement level")
        sp.add_argument("--degree", type=int, default=DEFAULT_DEGREE, help="Rayleigh-Ritz polynomial degree")
        sp.add_argument("--jobs", type=int, default=1, help=f"worker processes (env {THREADS_ENV} overrides)")
        sp.add_argument("--output", "-o", default=None)

    b = sub.add_parser("bound", help="bounds for the triangle (0,0), (1,0), (a,b)")
    b.add_argument("--a", type=float, required=True)
    b.add_argument("--b", type=float, required=True)
    b.add_argument("--max-h", type=float, default=None, help="pick the level from a mesh-size target")
    b.add_argument("--format", dest="fmt", choices=("text", "json", "csv"), default="text")
    common(b, DEFAULT_LEVEL)

    t = sub.add_parser("table", help="reproduce the four reference triangles")
    t.add_argument("--max-h", type=float, default=None, help="pick the level per triangle from a mesh-size target")
    t.add_argument("--format", dest="fmt", choices=("text", "json", "csv"), default="text")
    common(t, DEFAULT_LEVEL)

    c = sub.add_parser("contour", help="CSV sweep of C_T over a grid of apex positions")
    c.add_argument("--a-min", type=float, default=-1.0)
    c.add_argument("--a-max", type=float, default=1.0)
    c.add_argument("--b-min", type=float, default=0.01)
    c.add_argument("--b-max", type=float, default=1.0)
    c.add_argument("--steps", type=int, default=None, help="points per axis (both)")
    c.add_argument("--a-steps", type=int, default=None)
    c.add_argument("--b-steps", type=int, default=None)
    common(c, DEFAULT_CONTOUR_LEVEL)
    return p


def config_from_args(ns: argparse.Namespace, environ=os.environ) -> RunConfig:
    jobs = ns.jobs
    if environ.get(THREADS_ENV):
        jobs = int(environ[THREADS_ENV])
    kw = dict(subcommand=ns.subcommand, level=ns.level, degree=ns.degree, output=ns.output, jobs=jobs)
    if ns.subcommand in ("bound", "table"):
        kw.update(fmt=ns.fmt, max_h=ns.max_h)
    if ns.subcommand == "bound":
        kw.update(a=ns.a, b=ns.b)
    if ns.subcommand == "contour":
        a_steps = ns.a_steps or ns.steps or 9
        b_steps = ns.b_steps or ns.steps or 5
        kw.update(
            a_min=ns.a_min, a_max=ns.a_max, b_min=ns.b_min, b_max=ns.b_max,
            a_steps=a_steps, b_steps=b_steps, fmt="csv",
        )
    cfg = RunConfig(**kw)
    cfg.validate()
    return cfg


COMMANDS = {"bound": cmd_bound, "table": cmd_table, "contour": cmd_contour}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    try:
        return COMMANDS[cfg.subcommand](cfg)
    except DegenerateTriangle as exc:
        print(f"error: degenerate triangle: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except InterpConstError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
