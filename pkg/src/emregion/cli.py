"""Command-line interface: ``emregion <command> [options]``.

Exit codes: 0 success, 2 input error, 3 degenerate triangle, 4 empty result.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .curve import (
    Box,
    EmptyTrace,
    compare_e_eprime,
    default_box,
    default_shape_grid,
    eprime_area,
    eprime_component,
    epsilon_sweep,
    sweep_minimizer,
    trace_curve,
)
from .geometry import CanonicalTriangle, DegenerateTriangle, Isometry, parse_triangle
from .regions import RegionModel
from .svg import PALETTE, SvgCanvas
from .vertex_region import TABLE1_REPRESENTATIVES, existence_pattern

EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_EMPTY = 4

RASTER_SIZE = 512
DEFAULT_TRIANGLE = {"p": -1.0, "q": 1.0, "r": math.sqrt(3.0)}


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    triangle: dict = field(default_factory=lambda: dict(DEFAULT_TRIANGLE))
    resolution: int = 256
    box_margin: float = 8.0
    samples: int = 100
    seed: int = 0
    out: Optional[str] = None
    tolerance: float = 1e-7

    def __post_init__(self):
        if self.resolution < 64:
            raise InputError("--resolution must be >= 64")
        if self.samples < 100:
            raise InputError("--samples must be >= 100")
        if not self.box_margin > 0:
            raise InputError("--box-margin must be positive")
        if not self.tolerance >= 0:
            raise InputError("--tolerance must be non-negative")


def slope_json(k):
    if k is None:
        return None
    if math.isinf(k):
        return "Infinity"
    return k


def _load_triangle(spec: Optional[str]) -> dict:
    if spec is None:
        return dict(DEFAULT_TRIANGLE)
    text = spec
    path = Path(spec)
    if not spec.lstrip().startswith("{") and path.exists():
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"bad triangle JSON: {exc}") from exc


def read_points(text: str) -> list[tuple[float, float]]:
    """Parse ``x,y`` rows; a non-numeric first row is taken as a header."""
    pts = []
    for n, row in enumerate(csv.reader(io.StringIO(text))):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise InputError(f"line {n + 1}: expected x,y")
        try:
            x, y = float(row[0]), float(row[1])
        except ValueError:
            if n == 0 and not pts:
                continue
            raise InputError(f"line {n + 1}: not numeric") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise InputError(f"line {n + 1}: non-finite value")
        pts.append((x, y))
    return pts


def _write(text: str, path: Optional[str]):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


# --- commands ------------------------------------------------------------------

def cmd_classify(cfg: RunConfig, points_text: str) -> str:
    t, iso = parse_triangle(cfg.triangle)
    model = RegionModel(t)
    reports = []
    for x, y in read_points(points_text):
        fx, fy = iso.apply(x, y)
        rep = model.membership((float(fx), float(fy))).to_dict()
        rep["point"] = [x, y]
        rep["near_boundary"] = any(
            abs(rep["normalized_residuals"][k]) <= cfg.tolerance for k in ("EA", "EB", "EC"))
        reports.append(rep)
    return _dump(reports)


def _frame_summary(model: RegionModel) -> dict:
    out = {}
    for label, fr in model.frames.items():
        a = fr.analysis
        out[label] = {
            "frame": fr.triangle.to_dict(),
            "angle": a.angle.kind.value,
            "k1": slope_json(a.k1),
            "k1_valid": a.k1_valid,
            "k2": slope_json(a.k2),
            "k3": slope_json(a.k3),
            "ahat": a.trinomial.a,
            "bhat": a.trinomial.b,
            "chat": a.trinomial.c,
            "ahat_sign": a.ahat_sign,
        }
    return out


def _region_box(model: RegionModel) -> Box:
    t = model.triangle
    poly = model.polygon
    if "unbounded" in poly.flags:
        return default_box(t, 3.0)
    xy = np.vstack([poly.as_array(), [[0.0, t.r], [t.p, 0.0], [t.q, 0.0]]])
    lo, hi = xy.min(axis=0), xy.max(axis=0)
    c = 0.5 * (lo + hi)
    h = 0.625 * float(max(hi - lo))
    return Box(c[0] - h, c[0] + h, c[1] - h, c[1] + h)


def _raster_layer(canvas: SvgCanvas, model: RegionModel, box: Box):
    n = RASTER_SIZE
    xs = box.xmin + (np.arange(n) + 0.5) * box.width / n
    ys = box.ymin + (np.arange(n) + 0.5) * box.height / n
    X, Y = np.meshgrid(xs, ys)
    c = model.classify(X, Y)
    codes = (c["EA"].astype(int) * 4 + c["EB"].astype(int) * 2 + c["EC"].astype(int))
    colors = {a * 4 + b * 2 + cc: col for (a, b, cc), col in PALETTE.items()}
    canvas.raster(canvas.layer("E-raster"), codes, colors)


def _triangle_layer(canvas: SvgCanvas, t: CanonicalTriangle):
    layer = canvas.layer("triangle")
    pts = [(0.0, t.r), (t.p, 0.0), (t.q, 0.0)]
    canvas.polygon(layer, pts, "fill:none;stroke:#000000;stroke-width:2")
    for name, P in zip("ABC", pts):
        canvas.circle(layer, P, 3, "fill:#000000")
        canvas.text(layer, P, name)


def _critical_lines(canvas: SvgCanvas, model: RegionModel, box: Box):
    layer = canvas.layer("critical-lines")
    span = 2.0 * math.hypot(box.width, box.height)
    for fr in model.frames.values():
        a = fr.analysis
        inv = fr.isometry.inverse()
        apex = inv.apply_point(fr.triangle.A)
        styles = [(a.k1, "stroke:#1d3557;stroke-dasharray:6,4")] if a.k1_valid else []
        styles += [(k, "stroke:#e63946") for k in (a.k2, a.k3) if k is not None]
        for k, style in styles:
            fdx, fdy = (0.0, 1.0) if math.isinf(k) else (1.0, k)
            dx, dy = inv.apply_vector(fdx, fdy)
            n = math.hypot(dx, dy)
            dx, dy = dx / n * span, dy / n * span
            canvas.line(layer, (apex.x - dx, apex.y - dy), (apex.x + dx, apex.y + dy),
                        style + ";stroke-width:1")


def cmd_regions(cfg: RunConfig) -> tuple[str, dict]:
    t, iso = parse_triangle(cfg.triangle)
    model = RegionModel(t)
    box = _region_box(model)
    canvas = SvgCanvas(box)
    _raster_layer(canvas, model, box)
    _critical_lines(canvas, model, box)
    mlayer = canvas.layer("M")
    canvas.polygon(mlayer, model.polygon.as_array(),
                   "fill:#457b9d;fill-opacity:0.25;stroke:#1d3557;stroke-width:2")
    _triangle_layer(canvas, t)
    summary = {
        "triangle": t.to_dict(),
        "isometry": _iso_json(iso),
        "vertices": _frame_summary(model),
        "M": {
            "vertices": model.polygon.as_array().tolist(),
            "vertex_count": len(model.polygon),
            "flags": list(model.polygon.flags),
        },
    }
    return canvas.render(), summary


def _iso_json(iso: Isometry) -> dict:
    return {"angle": iso.angle, "translation": list(iso.translation), "reflect": iso.reflect}


def cmd_curve(cfg: RunConfig) -> tuple[str, dict]:
    t, iso = parse_triangle(cfg.triangle)
    box = default_box(t, cfg.box_margin)
    trace = trace_curve(t, box, cfg.resolution)
    model = RegionModel(t)
    canvas = SvgCanvas(box)
    _raster_layer(canvas, model, box)
    layer = canvas.layer("em-curve")
    for pl in trace.polylines:
        canvas.polyline(layer, pl, "fill:none;stroke:#d62828;stroke-width:2")
    _triangle_layer(canvas, t)
    data = {"triangle": t.to_dict(), "isometry": _iso_json(iso), **trace.to_dict()}
    return canvas.render(), data


def cmd_table1() -> str:
    lines = ["row  p     q     r     a1 a2 a3 a4"]
    for n, (p, q, r) in enumerate(TABLE1_REPRESENTATIVES, 1):
        pattern = existence_pattern(CanonicalTriangle(p, q, r))
        lines.append(f"{n:<4d} {p:<5g} {q:<5g} {r:<5g} " + "  ".join(pattern.split()))
    return "\n".join(lines) + "\n"


def parse_grid(spec: Optional[str]) -> list[tuple[float, float]]:
    """``lo:hi:step`` in degrees for both free angles."""
    if spec is None:
        return default_shape_grid()
    try:
        lo, hi, step = (float(v) for v in spec.split(":"))
    except ValueError:
        raise InputError("--grid must be lo:hi:step") from None
    if not (0 < lo <= hi < 180 and step > 0):
        raise InputError("--grid needs 0 < lo <= hi < 180 and step > 0")
    vals = list(np.arange(lo, hi + 1e-9, step))
    shapes = [(float(a), float(b)) for a in vals for b in vals if a + b < 180]
    if not shapes:
        raise InputError("--grid yields no valid triangle")
    return shapes


def cmd_sweep(cfg: RunConfig, grid: Optional[str]) -> tuple[str, str]:
    shapes = parse_grid(grid)
    rows = epsilon_sweep(shapes, cfg.resolution, cfg.samples, cfg.box_margin, cfg.seed)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha_deg", "beta_deg", "gamma_deg", "epsilon", "stderr", "bounded", "flags"])
    for r in rows:
        w.writerow([f"{r.alpha_deg:.6g}", f"{r.beta_deg:.6g}", f"{r.gamma_deg:.6g}",
                    f"{r.epsilon:.10g}", f"{r.stderr:.6g}", int(r.bounded), ";".join(r.flags)])
    best = sweep_minimizer(rows)
    if best is None:
        summary = "no bounded shape in the sweep"
    else:
        summary = (f"bounded minimum epsilon {best.epsilon:.6g} at angles "
                   f"({best.alpha_deg:g}, {best.beta_deg:g}, {best.gamma_deg:g})")
    return buf.getvalue(), summary


def cmd_area(cfg: RunConfig) -> dict:
    t, _ = parse_triangle(cfg.triangle)
    box = default_box(t, cfg.box_margin)
    comp = eprime_component(t, box, cfg.resolution)
    est = eprime_area(t, box, cfg.resolution, cfg.samples, cfg.seed, component=comp)
    cmp = compare_e_eprime(t, comp, samples=max(100_000, cfg.samples), seed=cfg.seed,
                           band=cfg.tolerance)
    return {"triangle": t.to_dict(), "triangle_area": t.area,
            "eprime": est.to_dict(), "comparison": cmp.to_dict()}


# --- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--triangle", help="JSON file or inline JSON")
    common.add_argument("--resolution", type=int, default=None)
    common.add_argument("--box-margin", type=float, default=8.0)
    common.add_argument("--samples", type=int, default=100)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out")
    common.add_argument("--tolerance", type=float, default=1e-7)

    parser = argparse.ArgumentParser(prog="emregion", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("classify", parents=[common], help="membership report per point")
    p.add_argument("--points", help="CSV of x,y (stdin if omitted)")
    sub.add_parser("regions", parents=[common], help="critical lines, M and E raster")
    sub.add_parser("curve", parents=[common], help="trace the Erdős–Mordell curve")
    sub.add_parser("table1", parents=[common], help="corner-area existence table")
    p = sub.add_parser("sweep", parents=[common], help="epsilon over triangle shapes")
    p.add_argument("--grid", help="lo:hi:step in degrees")
    sub.add_parser("area", parents=[common], help="area of E' and comparison with E")
    return parser


def _config(args) -> RunConfig:
    default_res = 128 if args.command == "sweep" else 256
    return RunConfig(
        triangle=_load_triangle(args.triangle),
        resolution=args.resolution if args.resolution is not None else default_res,
        box_margin=args.box_margin,
        samples=args.samples,
        seed=args.seed,
        out=args.out,
        tolerance=args.tolerance,
    )


def _side_file(out: Optional[str], default: str) -> tuple[str, str]:
    svg = Path(out or default)
    return str(svg), str(svg.with_suffix(".json"))


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "classify":
            if args.points:
                text = Path(args.points).read_text()
            else:
                text = sys.stdin.read()
            _write(cmd_classify(cfg, text), cfg.out)
        elif args.command == "regions":
            svg, summary = cmd_regions(cfg)
            svg_path, json_path = _side_file(cfg.out, "regions.svg")
            Path(svg_path).write_text(svg)
            Path(json_path).write_text(_dump(summary))
            sys.stdout.write(_dump(summary))
        elif args.command == "curve":
            svg, data = cmd_curve(cfg)
            svg_path, json_path = _side_file(cfg.out, "curve.svg")
            Path(svg_path).write_text(svg)
            Path(json_path).write_text(_dump(data))
            print(f"{len(data['polylines'])} polylines -> {svg_path}, {json_path}")
        elif args.command == "table1":
            _write(cmd_table1(), cfg.out)
        elif args.command == "sweep":
            text, summary = cmd_sweep(cfg, args.grid)
            _write(text, cfg.out)
            print(summary, file=sys.stderr)
        elif args.command == "area":
            _write(_dump(cmd_area(cfg)), cfg.out)
    except DegenerateTriangle as exc:
        print(f"error: degenerate triangle: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except EmptyTrace as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())
