"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 input error,
3 unsupported polygon class, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import catalog, geometry
from .errors import DegenerateMapError, DomainError, InputError, StepError, UnsupportedError
from .momentum import add_variation, match_outline
from .polygon import classify, load_polygon, normalize, polygon_to_dict
from .render import heat_quads, render_svg
from .verification import verify_polygon

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_UNSUPPORTED, EXIT_IO = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) != 6:
            raise InputError("grid must be xmin:xmax:ymin:ymax:nx:ny")
        try:
            x0, x1, y0, y1 = (float(p) for p in parts[:4])
            nx, ny = int(parts[4]), int(parts[5])
        except ValueError:
            raise InputError(f"bad grid spec {text!r}") from None
        if not (y0 > 0):
            raise InputError("grid y_min must be > 0")
        if nx < 2 or ny < 2:
            raise InputError("grid needs nx, ny >= 2")
        if not (x1 > x0 and y1 > y0):
            raise InputError("grid bounds must be increasing")
        return cls(x0, x1, y0, y1, nx, ny)

    def axes(self):
        return np.linspace(self.x_min, self.x_max, self.nx), np.linspace(self.y_min, self.y_max, self.ny)


class _Fail(Exception):
    def __init__(self, code, msg):
        super().__init__(msg)
        self.code = code


def _emit(text: str, out: str | None):
    if out:
        try:
            with open(out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise _Fail(EXIT_IO, f"cannot write {out}: {exc}") from None
    else:
        sys.stdout.write(text)


def _load(path):
    try:
        return load_polygon(path)
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read {path}: {exc}") from None


def _variation(args) -> dict:
    return {k: getattr(args, k) for k in ("c1", "c2", "m", "c3") if getattr(args, k, None) is not None}


def _catalog_params(args) -> dict:
    out = {}
    for name in ("k", "M", "s0", "s1", "C"):
        v = getattr(args, f"p_{name}", None)
        if v is not None:
            out[name] = v
    return out


def _momentum_from_args(args):
    """(momentum map, polygon or None, title) from a file or catalog id."""
    if getattr(args, "catalog", None):
        ex = catalog.get(args.catalog, **_catalog_params(args))
        if ex.momentum is None:
            raise _Fail(EXIT_UNSUPPORTED, f"{ex.id} has no momentum map")
        return ex.momentum, ex.polygon, ex.id
    if not args.polygon:
        raise InputError("give a polygon file or --catalog ID")
    poly = _load(args.polygon)
    mm = match_outline(poly)
    var = {k: v for k, v in _variation(args).items() if v}
    if var:
        mm = add_variation(mm, **var)
    return mm, poly, args.polygon


def cmd_classify(args):
    poly = _load(args.polygon)
    cls = classify(poly)
    report = {"class": cls.value, "orientation": poly.orientation}
    try:
        T, norm = normalize(poly)
        report["normalize"] = {
            "linear": T.linear.tolist(),
            "translation": [T.translation.m, T.translation.n],
            "polygon": polygon_to_dict(norm),
        }
    except UnsupportedError:
        report["note"] = "outline matching unsupported for this class"
    if args.json:
        _emit(json.dumps(report, indent=2) + "\n", args.out)
    else:
        lines = [f"class: {cls.value}"]
        if "normalize" in report:
            n = report["normalize"]
            lines.append(f"linear: {n['linear']}")
            lines.append(f"translation: {n['translation']}")
            lines.append(f"labels: {n['polygon']['labels']}")
        else:
            lines.append("note: " + report["note"])
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_match(args):
    poly = _load(args.polygon)
    mm = match_outline(poly, x1=args.x1)
    var = _variation(args)
    if var:
        mm = add_variation(mm, **var)
    _emit(json.dumps(mm.describe(), indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_sample(args):
    grid = GridSpec.parse(args.grid)
    mm, _, _ = _momentum_from_args(args)
    xs, ys = grid.axes()
    rows = ["x,y,phi1,phi2,lambda,V,K"]
    for y in ys:
        j1, j2 = mm.jets(xs, np.full_like(xs, y))
        det = mm.orientation * (j1.dx * j2.dy - j1.dy * j2.dx)
        lam = det / y
        for i, x in enumerate(xs):
            k = ""
            if y >= 3.0 * args.h and lam[i] > 0:
                try:
                    k = f"{geometry.gaussian_curvature(mm, x, y, args.h) + 0.0:.17g}"
                except (StepError, DegenerateMapError):
                    k = ""
            rows.append(
                ",".join(f"{v:.17g}" for v in (x, y, j1.value[i], j2.value[i], lam[i], y * y)) + "," + k
            )
    _emit("\n".join(rows) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args):
    if getattr(args, "catalog", None):
        report = catalog.verify(args.catalog, h=args.h, **_catalog_params(args))
    else:
        if not args.polygon:
            raise InputError("give a polygon file or --catalog ID")
        poly = _load(args.polygon)
        report = verify_polygon(poly, _variation(args), n_points=args.points, tol=args.tol, h=args.h)
    if args.json:
        _emit(json.dumps(report, indent=2, default=float) + "\n", args.out)
    else:
        lines = []
        for c in report["checks"]:
            val = c.get("value", c.get("detail", ""))
            lines.append(f"{c['status'].upper():7s} {c['name']}: {val}")
        lines.append("PASS" if report["passed"] else "FAIL")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_render(args):
    mm, poly, title = _momentum_from_args(args)
    heat = None
    if args.heatmap:
        grid = GridSpec.parse(args.grid)
        xs, ys = grid.axes()
        X, Y = np.meshgrid(xs, ys)
        if args.heatmap == "lambda":
            j1, j2 = mm.jets(X, Y)
            vals = mm.orientation * (j1.dx * j2.dy - j1.dy * j2.dx) / Y
        else:
            vals = np.full(X.shape, np.nan)
            ok = Y >= 3.0 * args.h
            try:
                vals[ok] = geometry.gaussian_curvature(mm, X[ok], Y[ok], args.h)
            except DegenerateMapError:
                raise _Fail(EXIT_FAIL, "degenerate map on the heatmap grid") from None
        quads, cell = heat_quads(mm, xs, ys, vals)
        heat = (quads, cell, args.heatmap)
    svg = render_svg(poly, heat, title=str(title))
    _emit(svg, args.out)
    return EXIT_OK


def cmd_catalog(args):
    if args.action == "list":
        data = [{"id": i, "defaults": catalog._DEFAULTS[i]} for i in catalog.ids()]
    else:
        if not args.id:
            raise InputError("catalog show needs an id")
        data = catalog.describe(args.id, **_catalog_params(args))
    _emit(json.dumps(data, indent=2, default=float) + "\n", args.out)
    return EXIT_OK


def _add_common(p, grid=False, catalog_src=False, variation=False):
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--h", type=float, default=1e-3, help="finite-difference step (default 1e-3)")
    p.add_argument("--tol", type=float, default=1e-8, help="residual/label tolerance (default 1e-8)")
    if grid:
        p.add_argument(
            "--grid",
            default="-2:2:0.1:2:9:9",
            help="xmin:xmax:ymin:ymax:nx:ny (use --grid=... when xmin is negative)",
        )
    if catalog_src:
        p.add_argument("--catalog", metavar="ID", help="use a catalog entry instead of a file")
        for name in ("k", "M", "s0", "s1", "C"):
            p.add_argument(f"--{name}", dest=f"p_{name}", type=float, help=f"catalog parameter {name}")
    if variation:
        for name in ("c1", "c2", "m", "c3"):
            p.add_argument(f"--{name}", type=float, help=f"variation parameter {name} (>= 0)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scalarflat", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="classify and normalise a polygon")
    p.add_argument("polygon")
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("match", help="outline-match a polygon")
    p.add_argument("polygon")
    p.add_argument("--x1", type=float, default=0.0, help="position of the first breakpoint")
    _add_common(p, variation=True)
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("sample", help="CSV of momentum, conformal factor and curvature on a grid")
    p.add_argument("polygon", nargs="?")
    _add_common(p, grid=True, catalog_src=True, variation=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="run the invariant checks")
    p.add_argument("polygon", nargs="?")
    p.add_argument("--points", type=int, default=1000, help="random interior points for residual checks")
    _add_common(p, catalog_src=True, variation=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", help="SVG of the outline with an optional heatmap")
    p.add_argument("polygon", nargs="?")
    p.add_argument("--heatmap", choices=["K", "lambda"])
    _add_common(p, grid=True, catalog_src=True, variation=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("catalog", help="list or show reference examples")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("id", nargs="?")
    _add_common(p, catalog_src=False)
    for name in ("k", "M", "s0", "s1", "C"):
        p.add_argument(f"--{name}", dest=f"p_{name}", type=float)
    p.set_defaults(func=cmd_catalog)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except UnsupportedError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (InputError, DomainError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
