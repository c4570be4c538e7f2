"""Tracing of F = R_A+R_B+R_C - 2(r_a+r_b+r_c) = 0 and the region E'.

F is sampled on a node grid over a box.  The zero set is contoured with
marching squares, each crossing edge refined by bisection.  E' is the
4-connected component of {F >= 0} nodes containing the centroid; its
area is the count of fully covered cells plus a Monte Carlo estimate
inside the cells it only partly covers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from .geometry import CanonicalTriangle, canonicalize
from .regions import RegionModel, erdos_mordell_residual, strict_band

DEFAULT_MARGIN = 8.0
BISECTION_STEPS = 64


class EmptyTrace(RuntimeError):
    """No sign change of F inside the box."""


@dataclass(frozen=True)
class Box:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def area(self) -> float:
        return self.width * self.height

    def to_list(self) -> list[float]:
        return [self.xmin, self.xmax, self.ymin, self.ymax]


def default_box(t: CanonicalTriangle, margin: float = DEFAULT_MARGIN) -> Box:
    """Centroid-centred square with half-width ``margin`` circumradii."""
    g = t.centroid
    h = margin * t.circumradius
    return Box(g.x - h, g.x + h, g.y - h, g.y + h)


def em_field(t: CanonicalTriangle, x, y):
    return erdos_mordell_residual(t, x, y)


def _sign_tol(t: CanonicalTriangle) -> float:
    # keeps the isolated zero at the equilateral centre from seeding contours
    return 1e-12 * t.scale


@dataclass
class SignGrid:
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # shape (len(ys), len(xs))
    inside: np.ndarray

    @property
    def h(self) -> tuple[float, float]:
        return self.xs[1] - self.xs[0], self.ys[1] - self.ys[0]


def sample_grid(t: CanonicalTriangle, box: Box, resolution: int) -> SignGrid:
    xs = np.linspace(box.xmin, box.xmax, resolution + 1)
    ys = np.linspace(box.ymin, box.ymax, resolution + 1)
    X, Y = np.meshgrid(xs, ys)
    F = em_field(t, X, Y)
    return SignGrid(xs, ys, F, F >= -_sign_tol(t))


# --- contouring --------------------------------------------------------------

# edge codes per cell: 0 bottom, 1 right, 2 top, 3 left
# corner bits: 1 bottom-left, 2 bottom-right, 4 top-right, 8 top-left
_CASES = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)],
    6: [(0, 2)], 7: [(3, 2)], 8: [(2, 3)], 9: [(0, 2)],
    11: [(1, 2)], 12: [(3, 1)], 13: [(0, 1)], 14: [(3, 0)],
}
_SADDLE = {
    # (centre inside, centre outside)
    5: ([(3, 2), (0, 1)], [(3, 0), (1, 2)]),
    10: ([(3, 0), (1, 2)], [(0, 1), (2, 3)]),
}


@dataclass
class CurveTrace:
    polylines: list[np.ndarray]
    resolution: int
    box: Box
    closed: list[bool] = field(default_factory=list)

    def points(self) -> np.ndarray:
        if not self.polylines:
            return np.zeros((0, 2))
        return np.vstack(self.polylines)

    @property
    def cell_diagonal(self) -> float:
        return math.hypot(self.box.width, self.box.height) / self.resolution

    def to_dict(self) -> dict:
        return {
            "resolution": self.resolution,
            "box": self.box.to_list(),
            "polylines": [pl.tolist() for pl in self.polylines],
            "closed": list(self.closed),
        }


def _edge_ids(nx: int, ny: int, j, i, code):
    """Global id of a cell edge.  Horizontal edges first, then vertical."""
    n_h = (ny + 1) * nx
    return np.select(
        [code == 0, code == 2, code == 3, code == 1],
        [j * nx + i, (j + 1) * nx + i, n_h + j * (nx + 1) + i, n_h + j * (nx + 1) + i + 1],
    )


def _edge_endpoints(grid: SignGrid, ids: np.ndarray):
    nx, ny = len(grid.xs) - 1, len(grid.ys) - 1
    n_h = (ny + 1) * nx
    horiz = ids < n_h
    j = np.where(horiz, ids // nx, (ids - n_h) // (nx + 1))
    i = np.where(horiz, ids % nx, (ids - n_h) % (nx + 1))
    j2 = np.where(horiz, j, j + 1)
    i2 = np.where(horiz, i + 1, i)
    p0 = np.stack([grid.xs[i], grid.ys[j]], axis=1)
    p1 = np.stack([grid.xs[i2], grid.ys[j2]], axis=1)
    return p0, grid.inside[j, i], p1


def _bisect(t: CanonicalTriangle, p0, in0, p1) -> np.ndarray:
    tol = _sign_tol(t)
    lo = np.where(in0[:, None], p1, p0)   # outside end
    hi = np.where(in0[:, None], p0, p1)   # inside end
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        inside = em_field(t, mid[:, 0], mid[:, 1]) >= -tol
        hi = np.where(inside[:, None], mid, hi)
        lo = np.where(inside[:, None], lo, mid)
    f_lo = np.abs(em_field(t, lo[:, 0], lo[:, 1]))
    f_hi = np.abs(em_field(t, hi[:, 0], hi[:, 1]))
    return np.where((f_lo < f_hi)[:, None], lo, hi)


def _segments(t: CanonicalTriangle, grid: SignGrid) -> np.ndarray:
    ins = grid.inside.astype(np.int8)
    case = ins[:-1, :-1] + 2 * ins[:-1, 1:] + 4 * ins[1:, 1:] + 8 * ins[1:, :-1]
    nx, ny = len(grid.xs) - 1, len(grid.ys) - 1
    segs = []

    def emit(j, i, pairs):
        for e0, e1 in pairs:
            a = _edge_ids(nx, ny, j, i, np.full_like(j, e0))
            b = _edge_ids(nx, ny, j, i, np.full_like(j, e1))
            segs.append(np.stack([a, b], axis=1))

    for c, pairs in _CASES.items():
        j, i = np.nonzero(case == c)
        if len(j):
            emit(j, i, pairs)
    for c, (if_in, if_out) in _SADDLE.items():
        j, i = np.nonzero(case == c)
        if not len(j):
            continue
        cx = 0.5 * (grid.xs[i] + grid.xs[i + 1])
        cy = 0.5 * (grid.ys[j] + grid.ys[j + 1])
        centre_in = em_field(t, cx, cy) >= -_sign_tol(t)
        if centre_in.any():
            emit(j[centre_in], i[centre_in], if_in)
        if (~centre_in).any():
            emit(j[~centre_in], i[~centre_in], if_out)
    if not segs:
        return np.zeros((0, 2), dtype=np.int64)
    return np.vstack(segs)


def _chain(segs: np.ndarray) -> list[tuple[list[int], bool]]:
    adj: dict[int, list[int]] = {}
    for s, (a, b) in enumerate(segs.tolist()):
        adj.setdefault(a, []).append(s)
        adj.setdefault(b, []).append(s)
    used = np.zeros(len(segs), dtype=bool)
    chains = []

    def walk(edge, seg):
        path = []
        while True:
            used[seg] = True
            a, b = segs[seg]
            nxt = int(b) if int(a) == edge else int(a)
            path.append(nxt)
            cands = [s for s in adj[nxt] if not used[s]]
            if not cands:
                return path
            edge, seg = nxt, cands[0]

    # open chains start at edges used by a single segment (box boundary)
    starts = [e for e, ss in adj.items() if len(ss) == 1]
    for e in starts:
        s = adj[e][0]
        if used[s]:
            continue
        chains.append(([e] + walk(e, s), False))
    for s in range(len(segs)):
        if used[s]:
            continue
        e = int(segs[s][0])
        path = [e] + walk(e, s)
        chains.append((path, path[0] == path[-1]))
    return chains


def _orient(t: CanonicalTriangle, pts: np.ndarray, h: float) -> np.ndarray:
    """Reverse if needed so that {F >= 0} lies to the left."""
    if len(pts) < 2:
        return pts
    d = np.diff(pts, axis=0)
    norm = np.hypot(d[:, 0], d[:, 1])
    ok = norm > 0
    if not ok.any():
        return pts
    mid = 0.5 * (pts[1:] + pts[:-1])[ok]
    left = np.stack([-d[ok, 1], d[ok, 0]], axis=1) / norm[ok, None]
    probe = mid + 1e-3 * h * left
    votes = np.sign(em_field(t, probe[:, 0], probe[:, 1]))
    return pts if votes.sum() >= 0 else pts[::-1].copy()


def trace_curve(t: CanonicalTriangle, box: Optional[Box] = None, resolution: int = 256,
                ) -> CurveTrace:
    if resolution < 64:
        raise ValueError("resolution must be at least 64")
    box = box or default_box(t)
    grid = sample_grid(t, box, resolution)
    segs = _segments(t, grid)
    if len(segs) == 0:
        raise EmptyTrace("F has no sign change in the box; enlarge it")
    edges = np.unique(segs)
    p0, in0, p1 = _edge_endpoints(grid, edges)
    roots = _bisect(t, p0, in0, p1)
    where = {int(e): k for k, e in enumerate(edges)}
    h = min(grid.h)
    polylines, closed = [], []
    for path, is_closed in _chain(segs):
        pts = roots[[where[e] for e in path]]
        polylines.append(_orient(t, pts, h))
        closed.append(is_closed)
    return CurveTrace(polylines, resolution, box, closed)


# --- E' ------------------------------------------------------------------------

@dataclass
class Component:
    """Grid component of {F >= 0} containing the centroid."""

    triangle: CanonicalTriangle
    box: Box
    grid: SignGrid
    mask: np.ndarray

    @property
    def bounded(self) -> bool:
        m = self.mask
        return not (m[0].any() or m[-1].any() or m[:, 0].any() or m[:, -1].any())

    def cell_touch(self) -> np.ndarray:
        m = self.mask
        return m[:-1, :-1] | m[:-1, 1:] | m[1:, :-1] | m[1:, 1:]

    def cell_full(self) -> np.ndarray:
        m = self.mask
        return m[:-1, :-1] & m[:-1, 1:] & m[1:, :-1] & m[1:, 1:]

    def contains(self, x, y):
        """F >= 0 and the enclosing grid cell touches the component."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        g = self.grid
        nx, ny = len(g.xs) - 1, len(g.ys) - 1
        i = np.floor((x - self.box.xmin) / self.box.width * nx).astype(int)
        j = np.floor((y - self.box.ymin) / self.box.height * ny).astype(int)
        in_box = (i >= 0) & (i < nx) & (j >= 0) & (j < ny)
        touch = self.cell_touch()
        hit = np.zeros(np.broadcast(x, y).shape, dtype=bool)
        hit[in_box] = touch[j[in_box], i[in_box]]
        return hit & (em_field(self.triangle, x, y) >= -_sign_tol(self.triangle))


def eprime_component(t: CanonicalTriangle, box: Optional[Box] = None, resolution: int = 256,
                     ) -> Component:
    box = box or default_box(t)
    grid = sample_grid(t, box, resolution)
    labels, _ = ndimage.label(grid.inside)
    g = t.centroid
    nx, ny = len(grid.xs) - 1, len(grid.ys) - 1
    i = int(round((g.x - box.xmin) / box.width * nx))
    j = int(round((g.y - box.ymin) / box.height * ny))
    seed = labels[j, i]
    if seed == 0:
        # centroid node fell on a rounding-negative value: take the nearest inside node
        jj, ii = np.nonzero(grid.inside)
        k = np.argmin((jj - j) ** 2 + (ii - i) ** 2)
        seed = labels[jj[k], ii[k]]
    return Component(t, box, grid, labels == seed)


@dataclass(frozen=True)
class EprimeEstimate:
    area: float
    stderr: float
    bounded: bool
    box: Box
    ratio: float
    epsilon: float
    resolution: int
    boundary_cells: int

    def to_dict(self) -> dict:
        return {
            "area": self.area,
            "stderr": self.stderr,
            "bounded": self.bounded,
            "box": self.box.to_list(),
            "ratio": self.ratio,
            "epsilon": self.epsilon,
            "resolution": self.resolution,
            "boundary_cells": self.boundary_cells,
        }


def eprime_area(t: CanonicalTriangle, box: Optional[Box] = None, resolution: int = 256,
                samples: int = 100, seed: int = 0,
                component: Optional[Component] = None) -> EprimeEstimate:
    """Area of E' with a Monte Carlo standard error.

    ``samples`` is the number of uniform points drawn in each partly
    covered cell.
    """
    comp = component or eprime_component(t, box, resolution)
    box = comp.box
    grid = comp.grid
    hx, hy = grid.h
    full = comp.cell_full()
    partial = comp.cell_touch() & ~full
    j, i = np.nonzero(partial)
    rng = np.random.default_rng(seed)
    u = rng.random((len(j), samples))
    v = rng.random((len(j), samples))
    x = grid.xs[i][:, None] + u * hx
    y = grid.ys[j][:, None] + v * hy
    hits = em_field(t, x, y) >= -_sign_tol(t)
    frac = hits.mean(axis=1) if len(j) else np.zeros(0)
    cell = hx * hy
    area = cell * (full.sum() + frac.sum())
    var = cell ** 2 * np.sum(frac * (1 - frac) / max(samples - 1, 1))
    ratio = area / t.area
    return EprimeEstimate(float(area), float(math.sqrt(var)), comp.bounded, box,
                          float(ratio), float(ratio - 1.0), resolution, int(len(j)))


@dataclass(frozen=True)
class RegionComparison:
    samples: int
    box_area: float
    area_E: float
    area_Eprime: float
    area_Eprime_minus_E: float
    area_E_minus_Eprime: float
    strict_E_points: int
    strict_E_outside_Eprime: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def compare_e_eprime(t: CanonicalTriangle, component: Component, samples: int = 100_000,
                     seed: int = 0, band: float = 1e-7) -> RegionComparison:
    """Uniform sampling of the box: mass of E, E', and their differences."""
    box = component.box
    rng = np.random.default_rng(seed)
    x = rng.uniform(box.xmin, box.xmax, samples)
    y = rng.uniform(box.ymin, box.ymax, samples)
    in_e = RegionModel(t).classify(x, y)["E"]
    in_ep = component.contains(x, y)
    strict = in_e & strict_band(t, x, y, band)
    w = box.area / samples
    return RegionComparison(
        samples, box.area,
        float(in_e.sum() * w), float(in_ep.sum() * w),
        float((in_ep & ~in_e).sum() * w), float((in_e & ~in_ep).sum() * w),
        int(strict.sum()), int((strict & ~in_ep).sum()))


# --- shape sweep -----------------------------------------------------------------

def triangle_from_angles(alpha: float, beta: float) -> CanonicalTriangle:
    """Triangle with angles alpha at A, beta at B (radians) and unit perimeter."""
    gamma = math.pi - alpha - beta
    if min(alpha, beta, gamma) <= 0:
        raise ValueError("angles must be positive and sum to less than pi")
    a, b, c = math.sin(alpha), math.sin(beta), math.sin(gamma)
    s = a + b + c
    a, c = a / s, c / s
    B = (0.0, 0.0)
    C = (a, 0.0)
    A = (c * math.cos(beta), c * math.sin(beta))
    t, _ = canonicalize(A, B, C, "A")
    return t


def shape_distance(t: CanonicalTriangle) -> float:
    """Largest deviation of an angle from pi/3 (radians)."""
    return max(abs(a - math.pi / 3) for a in t.angles())


@dataclass(frozen=True)
class SweepRow:
    alpha_deg: float
    beta_deg: float
    gamma_deg: float
    epsilon: float
    stderr: float
    bounded: bool
    flags: tuple[str, ...]


def default_shape_grid() -> list[tuple[float, float]]:
    steps = range(20, 121, 20)
    return [(a, b) for a in steps for b in steps if a + b < 180]


def epsilon_sweep(shapes: Optional[Sequence[tuple[float, float]]] = None,
                  resolution: int = 128, samples: int = 100, margin: float = DEFAULT_MARGIN,
                  seed: int = 0) -> list[SweepRow]:
    """Estimate epsilon = area(E')/area(triangle) - 1 over a grid of shapes.

    Shapes are (alpha, beta) pairs in degrees.  The result is exploratory:
    rows whose component touches the box are flagged unbounded and their
    epsilon is only a lower bound within that box.
    """
    shapes = list(shapes if shapes is not None else default_shape_grid())
    seeds = np.random.SeedSequence(seed).generate_state(len(shapes))
    rows = []
    for (a_deg, b_deg), s in zip(shapes, seeds):
        g_deg = 180.0 - a_deg - b_deg
        t = triangle_from_angles(math.radians(a_deg), math.radians(b_deg))
        est = eprime_area(t, default_box(t, margin), resolution, samples, int(s))
        flags = []
        if min(a_deg, b_deg, g_deg) < 5.0:
            flags.append("near_degenerate")
        if not est.bounded:
            flags.append("unbounded")
        rows.append(SweepRow(a_deg, b_deg, g_deg, est.epsilon, est.stderr, est.bounded,
                             tuple(flags)))
    return rows


def sweep_minimizer(rows: Sequence[SweepRow]) -> Optional[SweepRow]:
    bounded = [r for r in rows if r.bounded]
    return min(bounded, key=lambda r: r.epsilon) if bounded else None
