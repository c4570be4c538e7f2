"""E = E_A ∩ E_B ∩ E_C, the wedge polygon M, and the direct inequality oracles.

The residual functions evaluate each inequality straight from vertex
coordinates with a generic point-to-line distance.  They never go
through the slope analysis, so they serve as the independent check on
the analytic classifier in ``vertex_region``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import CanonicalTriangle, Point, as_point
from .vertex_region import VertexFrame, vertex_frames

RESIDUAL_NAMES = ("EA", "EB", "EC", "weighted", "erdos_mordell", "child")


def _line_distance(P1, P2, x, y):
    nx, ny = -(P2[1] - P1[1]), P2[0] - P1[0]
    d = -(nx * P1[0] + ny * P1[1])
    return np.abs(nx * x + ny * y + d) / math.hypot(nx, ny)


def _verts(t: CanonicalTriangle):
    return {"A": (0.0, t.r), "B": (t.p, 0.0), "C": (t.q, 0.0)}


def _dist(P1, P2) -> float:
    return math.hypot(P1[0] - P2[0], P1[1] - P2[1])


def distances(t: CanonicalTriangle, x, y) -> dict:
    """R_A, R_B, R_C and r_a, r_b, r_c at (x, y)."""
    V = _verts(t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return {
        "RA": np.hypot(x - V["A"][0], y - V["A"][1]),
        "RB": np.hypot(x - V["B"][0], y - V["B"][1]),
        "RC": np.hypot(x - V["C"][0], y - V["C"][1]),
        "ra": _line_distance(V["B"], V["C"], x, y),
        "rb": _line_distance(V["C"], V["A"], x, y),
        "rc": _line_distance(V["A"], V["B"], x, y),
    }


def vertex_inequality_residual(t: CanonicalTriangle, x, y, vertex: str):
    """R_V minus the side-weighted distances to the two sides through V."""
    V = _verts(t)
    order = {"A": ("B", "C"), "B": ("C", "A"), "C": ("A", "B")}[vertex]
    P, U1, U2 = V[vertex], V[order[0]], V[order[1]]
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    opposite = _dist(U1, U2)
    R = np.hypot(x - P[0], y - P[1])
    rhs = (_dist(P, U1) * _line_distance(P, U2, x, y)
           + _dist(P, U2) * _line_distance(P, U1, x, y)) / opposite
    return R - rhs


def erdos_mordell_residual(t: CanonicalTriangle, x, y):
    d = distances(t, x, y)
    return d["RA"] + d["RB"] + d["RC"] - 2.0 * (d["ra"] + d["rb"] + d["rc"])


def weighted_em_residual(t: CanonicalTriangle, x, y):
    d = distances(t, x, y)
    s = t.sides
    a, b, c = s.a, s.b, s.c
    rhs = (c / b + b / c) * d["ra"] + (c / a + a / c) * d["rb"] + (a / b + b / a) * d["rc"]
    return d["RA"] + d["RB"] + d["RC"] - rhs


def child_residual(t: CanonicalTriangle, x, y):
    d = distances(t, x, y)
    return d["RA"] * d["RB"] * d["RC"] - 8.0 * d["ra"] * d["rb"] * d["rc"]


def all_residuals(t: CanonicalTriangle, x, y) -> dict:
    return {
        "EA": vertex_inequality_residual(t, x, y, "A"),
        "EB": vertex_inequality_residual(t, x, y, "B"),
        "EC": vertex_inequality_residual(t, x, y, "C"),
        "weighted": weighted_em_residual(t, x, y),
        "erdos_mordell": erdos_mordell_residual(t, x, y),
        "child": child_residual(t, x, y),
    }


def normalize_residuals(t: CanonicalTriangle, res: dict) -> dict:
    per = t.perimeter
    return {k: v / (per ** 3 if k == "child" else per) for k, v in res.items()}


# --- polygon M -------------------------------------------------------------

@dataclass(frozen=True)
class RegionPolygon:
    vertices: tuple[Point, ...]
    convex: bool = True
    flags: tuple[str, ...] = ()

    def __len__(self):
        return len(self.vertices)

    def as_array(self) -> np.ndarray:
        return np.array([v.as_tuple() for v in self.vertices], dtype=float)

    @property
    def area(self) -> float:
        xy = self.as_array()
        x, y = xy[:, 0], xy[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def contains(self, x, y, tol: float = 0.0):
        """Points inside or on a counter-clockwise convex polygon."""
        xy = self.as_array()
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        inside = np.ones(np.broadcast(x, y).shape, dtype=bool)
        for (x0, y0), (x1, y1) in zip(xy, np.roll(xy, -1, axis=0)):
            cross = (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0)
            inside &= cross >= -tol * math.hypot(x1 - x0, y1 - y0)
        return inside

    def boundary_distance(self, pt) -> float:
        px, py = as_point(pt)
        xy = self.as_array()
        best = math.inf
        for (x0, y0), (x1, y1) in zip(xy, np.roll(xy, -1, axis=0)):
            ex, ey = x1 - x0, y1 - y0
            s = max(0.0, min(1.0, ((px - x0) * ex + (py - y0) * ey) / (ex * ex + ey * ey)))
            best = min(best, math.hypot(px - x0 - s * ex, py - y0 - s * ey))
        return best


def clip_halfplane(poly: list[tuple[float, float]], origin, normal) -> list[tuple[float, float]]:
    """Keep the part of ``poly`` with  normal · (P - origin) >= 0."""
    if not poly:
        return []
    ox, oy = origin
    nx, ny = normal

    def side(P):
        return nx * (P[0] - ox) + ny * (P[1] - oy)

    out = []
    prev = poly[-1]
    sp = side(prev)
    for cur in poly:
        sc = side(cur)
        if sc >= 0:
            if sp < 0:
                out.append(_cut(prev, cur, sp, sc))
            out.append(cur)
        elif sp >= 0:
            out.append(_cut(prev, cur, sp, sc))
        prev, sp = cur, sc
    return out


def _cut(P, Q, sp, sq):
    s = sp / (sp - sq)
    return (P[0] + s * (Q[0] - P[0]), P[1] + s * (Q[1] - P[1]))


def _clean(poly, tol):
    pts = []
    for P in poly:
        if not pts or math.hypot(P[0] - pts[-1][0], P[1] - pts[-1][1]) > tol:
            pts.append(P)
    if len(pts) > 1 and math.hypot(pts[0][0] - pts[-1][0], pts[0][1] - pts[-1][1]) <= tol:
        pts.pop()
    changed = True
    while changed and len(pts) > 3:
        changed = False
        for i in range(len(pts)):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % len(pts)]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if abs(cross) <= tol * (math.hypot(c[0] - a[0], c[1] - a[1]) + tol):
                pts.pop(i)
                changed = True
                break
    return pts


def wedge_halfplanes(frame: VertexFrame, inside: Point) -> list[tuple[tuple, tuple]]:
    """Half-planes (origin, inward normal) cutting out the valid wedge at one vertex.

    Empty when every line through the vertex satisfies the inequality.
    """
    bounds = frame.analysis.boundary_slopes
    if bounds is None:
        return []
    inv = frame.isometry.inverse()
    apex = inv.apply_point(frame.triangle.A)
    planes = []
    for k in bounds:
        fdx, fdy = (0.0, 1.0) if math.isinf(k) else (1.0, k)
        dx, dy = inv.apply_vector(fdx, fdy)
        nx, ny = -dy, dx
        if nx * (inside.x - apex.x) + ny * (inside.y - apex.y) < 0:
            nx, ny = -nx, -ny
        planes.append(((apex.x, apex.y), (float(nx), float(ny))))
    return planes


def m_polygon(t: CanonicalTriangle, frames: Optional[dict[str, VertexFrame]] = None,
              extent: float = 1e3) -> RegionPolygon:
    frames = frames or vertex_frames(t)
    g = t.centroid
    L = extent * t.circumradius
    poly = [(g.x - L, g.y - L), (g.x + L, g.y - L), (g.x + L, g.y + L), (g.x - L, g.y + L)]
    for label in ("A", "B", "C"):
        for origin, normal in wedge_halfplanes(frames[label], g):
            poly = clip_halfplane(poly, origin, normal)
    tol = 1e-9 * t.scale
    poly = _clean(poly, tol)
    flags = []
    if any(abs(abs(P[0] - g.x) - L) <= 1e-6 * L or abs(abs(P[1] - g.y) - L) <= 1e-6 * L
           for P in poly):
        flags.append("unbounded")
    if len(poly) not in (4, 6):
        flags.append(f"vertex_count_{len(poly)}")
    return RegionPolygon(tuple(Point(float(x), float(y)) for x, y in poly), True, tuple(flags))


# --- membership ------------------------------------------------------------

@dataclass(frozen=True)
class MembershipReport:
    point: Point
    in_EA: bool
    in_EB: bool
    in_EC: bool
    in_E: bool
    in_M: bool
    residuals: dict = field(default_factory=dict)
    normalized: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "point": [self.point.x, self.point.y],
            "in_EA": self.in_EA,
            "in_EB": self.in_EB,
            "in_EC": self.in_EC,
            "in_E": self.in_E,
            "in_M": self.in_M,
            "residuals": dict(self.residuals),
            "normalized_residuals": dict(self.normalized),
        }


class RegionModel:
    """Per-triangle state shared by batch membership queries."""

    def __init__(self, t: CanonicalTriangle):
        self.triangle = t
        self.frames = vertex_frames(t)
        self.polygon = m_polygon(t, self.frames)

    def classify(self, x, y) -> dict:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        ea = self.frames["A"].classify(x, y)
        eb = self.frames["B"].classify(x, y)
        ec = self.frames["C"].classify(x, y)
        tol = 1e-12 * self.triangle.scale
        return {
            "EA": ea, "EB": eb, "EC": ec,
            "E": ea & eb & ec,
            "M": self.polygon.contains(x, y, tol),
        }

    def residuals(self, x, y) -> dict:
        return all_residuals(self.triangle, x, y)

    def membership(self, m) -> MembershipReport:
        pt = as_point(m)
        c = self.classify(pt.x, pt.y)
        res = {k: float(v) for k, v in self.residuals(pt.x, pt.y).items()}
        return MembershipReport(
            pt, bool(c["EA"]), bool(c["EB"]), bool(c["EC"]), bool(c["E"]), bool(c["M"]),
            res, normalize_residuals(self.triangle, res))


def membership(t: CanonicalTriangle, m) -> MembershipReport:
    return RegionModel(t).membership(m)


def strict_band(t: CanonicalTriangle, x, y, band: float = 1e-7):
    """Points whose per-vertex residuals are all farther than ``band``·perimeter from zero."""
    per = t.perimeter
    ok = np.ones(np.broadcast(np.asarray(x), np.asarray(y)).shape, dtype=bool)
    for v in ("A", "B", "C"):
        ok &= np.abs(vertex_inequality_residual(t, x, y, v)) > band * per
    return ok
