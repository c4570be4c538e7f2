"""Acceptance criteria, one test each, at the stated tolerances.

The terminal summary prints one PASS/FAIL line per criterion.
"""
import math
import time

import numpy as np
import pytest
from scipy.spatial import cKDTree

from emregion.curve import (
    compare_e_eprime,
    eprime_area,
    eprime_component,
    em_field,
    epsilon_sweep,
    shape_distance,
    trace_curve,
    triangle_from_angles,
)
from emregion.geometry import AngleKind, CanonicalTriangle, random_triangles
from emregion.regions import (
    RegionModel,
    all_residuals,
    child_residual,
    erdos_mordell_residual,
    strict_band,
    vertex_inequality_residual,
)
from emregion.vertex_region import (
    TABLE1_REPRESENTATIVES,
    ahat_expanded,
    ahat_roots,
    corner_area_of_slope,
    critical_slopes,
    existence_pattern,
    slope_coefficients,
    slope_residual,
    trinomial,
    vertex_frames,
)

from conftest import SQRT3, barycentric

SEED = 20240611

TABLE1 = [
    "+ + + -", "+ - + +", "- + + +", "- + + +", "+ + - +",
    "+ + + -", "+ - + -", "- + - +", "- - + +", "+ + - -",
]


def box_points(rng, t, n, half):
    g = t.centroid
    x = rng.uniform(g.x - half, g.x + half, n)
    y = rng.uniform(g.y - half, g.y + half, n)
    return x, y


@pytest.mark.criterion("1", "analytic classifier agrees with direct evaluation off the 1e-7 band")
def test_c1_oracle_equivalence():
    rng = np.random.default_rng(SEED)
    start = time.perf_counter()
    disagreements = checked = 0
    for t in random_triangles(rng, 100):
        frames = vertex_frames(t)
        x, y = box_points(rng, t, 1000, 6 * t.circumradius)
        for label, fr in frames.items():
            verdict = fr.classify(x, y)
            res = vertex_inequality_residual(t, x, y, label) / t.perimeter
            far = np.abs(res) > 1e-7
            checked += int(far.sum())
            disagreements += int(np.sum(verdict[far] != (res[far] >= 0)))
    elapsed = time.perf_counter() - start
    print(f"criterion 1: {checked} checked, {disagreements} disagreements, {elapsed:.2f} s")
    assert disagreements == 0
    assert elapsed < 10.0


@pytest.mark.criterion("2", "no interior violations of the five inequalities")
def test_c2_interior_containment():
    rng = np.random.default_rng(SEED + 1)
    worst = math.inf
    for t in random_triangles(rng, 100):
        x, y = barycentric(rng, t, 10_000)
        res = all_residuals(t, x, y)
        for name in ("EA", "EB", "EC", "weighted", "erdos_mordell"):
            worst = min(worst, float(res[name].min()) / t.perimeter)
    print(f"criterion 2: worst normalized residual {worst:.3e}")
    assert worst >= -1e-9


def _centres(t):
    out = [t.incenter, t.centroid]
    c = t.circumcenter
    # circumcentre counts only when it is an interior point
    if max(t.angles()) < math.pi / 2 - 1e-12:
        out.append(c)
    return out


@pytest.mark.criterion("3", "equality only at the centre of the equilateral triangle")
def test_c3_equality_case():
    eq = CanonicalTriangle(-1.0, 1.0, SQRT3)
    g = eq.centroid
    assert abs(erdos_mordell_residual(eq, g.x, g.y)) <= 1e-12 * eq.perimeter

    rng = np.random.default_rng(SEED + 2)
    shapes = list(random_triangles(rng, 1000))
    third = math.pi / 3
    for d in (1e-1, 1e-2):
        for a, b in ((third + d, third), (third - d, third), (third + d, third - d / 2),
                     (third - d / 2, third - d / 2)):
            shapes.append(triangle_from_angles(a, b))
    lowest = math.inf
    for t in shapes:
        if shape_distance(t) < 1e-3:
            continue
        for P in _centres(t):
            val = float(erdos_mordell_residual(t, P.x, P.y)) / t.perimeter
            lowest = min(lowest, val)
    print(f"criterion 3: lowest centre residual off the near-equilateral set {lowest:.3e}")
    assert lowest >= 1e-6


@pytest.mark.criterion("4", "corner-area existence matches all ten table rows")
def test_c4_table1():
    got = [existence_pattern(CanonicalTriangle(*pqr)) for pqr in TABLE1_REPRESENTATIVES]
    assert got == TABLE1


@pytest.mark.criterion("5", "critical-slope identities")
def test_c5_critical_slopes():
    rng = np.random.default_rng(SEED + 3)
    # (a) right angle at A
    for _ in range(100):
        p, q = -rng.uniform(0.1, 3), rng.uniform(0.1, 3)
        a = critical_slopes(CanonicalTriangle(p, q, math.sqrt(-p * q)))
        assert a.angle.kind is AngleKind.RIGHT and a.k2 == 0.0 and a.k3 == 0.0
    # (b) equilateral
    a = critical_slopes(CanonicalTriangle(-1.0, 1.0, SQRT3))
    assert abs(a.k2 + math.sqrt(2)) <= 1e-12 and abs(a.k3 - math.sqrt(2)) <= 1e-12
    # (c) zeros of the leading coefficient in r
    for r in ahat_roots(1.0, 6.0).present():
        t = CanonicalTriangle(1.0, 6.0, r).normalized()
        assert abs(ahat_expanded(t.p, t.q, t.r)) <= 1e-7
    # (d) base straddling the foot of the altitude
    for _ in range(1000):
        p, q = -rng.uniform(0.01, 3), rng.uniform(0.01, 3)
        r = rng.choice([-1, 1]) * rng.uniform(0.01, 3)
        assert trinomial(CanonicalTriangle(p, q, r)).a > 0
    # (e) obtuse at A: strict inequality on the supplementary wedges
    n_obtuse = 0
    smallest = math.inf
    for t in random_triangles(rng, 2000):
        a = critical_slopes(t)
        if a.angle.kind is not AngleKind.OBTUSE:
            continue
        n_obtuse += 1
        assert a.trinomial.a > 0
        tn = t.normalized()
        ks = np.tan(rng.uniform(-math.pi / 2, math.pi / 2, 200))
        outside = [k for k in ks if not corner_area_of_slope(t, k).in_angle]
        dx = np.ones(len(outside))
        dy = np.array(outside)
        n = np.hypot(dx, dy)
        res = slope_residual(tn, dx / n, dy / n)
        if len(res):
            smallest = min(smallest, float(res.min()))
    print(f"criterion 5e: {n_obtuse} obtuse triangles, smallest residual {smallest:.3e}")
    assert n_obtuse > 100
    assert smallest > 1e-9


@pytest.mark.criterion("6", "finite critical slope tends to -eps/(delta+lambda) as r -> r2")
def test_c6_limit_behaviour():
    p, q = 1.0, 6.0
    r2 = ahat_roots(p, q).r2
    co = slope_coefficients(CanonicalTriangle(p, q, r2))
    target = -co.eps / (co.delta + co.lam)
    report = []
    for side in (1, -1):
        prev = 0.0
        for texp in range(3, 7):
            step = r2 * 10.0 ** -texp
            a = critical_slopes(CanonicalTriangle(p, q, r2 + side * step))
            finite, other = sorted((a.k2, a.k3), key=abs)
            report.append((side, texp, finite, abs(finite - target), 10 * step))
            assert abs(other) > prev
            prev = abs(other)
    for side, texp, finite, err, tol in report:
        print(f"criterion 6: side {side:+d} t={texp} slope {finite:.9f} "
              f"target {target:.9f} err {err:.3e} tol {tol:.1e}")
    assert all(err <= tol for *_, err, tol in report)


def _sample_polygon(rng, poly, n):
    xy = poly.as_array()
    lo, hi = xy.min(axis=0), xy.max(axis=0)
    parts, have = [], 0
    while have < n:
        pts = rng.uniform(lo, hi, size=(4 * n, 2))
        pts = pts[poly.contains(pts[:, 0], pts[:, 1])]
        parts.append(pts)
        have += len(pts)
    pts = np.concatenate(parts)[:n]
    return pts[:, 0], pts[:, 1]


def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _is_simple(xy):
    n = len(xy)
    for i in range(n):
        a, b = xy[i], xy[(i + 1) % n]
        for j in range(i + 2, n):
            if (j + 1) % n == i:
                continue
            c, d = xy[j], xy[(j + 1) % n]
            o1, o2 = _cross(b - a, c - a), _cross(b - a, d - a)
            o3, o4 = _cross(d - c, a - c), _cross(d - c, b - c)
            if o1 * o2 < 0 and o3 * o4 < 0:
                return False
    return True


@pytest.mark.criterion("7", "M is a simple 4- or 6-gon through the vertices and lies in E")
def test_c7_m_polygon():
    rng = np.random.default_rng(SEED + 4)
    flagged = counted = 0
    for t in random_triangles(rng, 100):
        model = RegionModel(t)
        poly = model.polygon
        if poly.flags:
            flagged += 1
            continue
        counted += 1
        xy = poly.as_array()
        assert len(poly) in (4, 6) and _is_simple(xy) and poly.area > 0
        tol = 1e-9 * t.scale
        for label, fr in model.frames.items():
            P = t.vertex(label)
            assert poly.contains(P.x, P.y, tol)
            if fr.analysis.angle.kind is AngleKind.ACUTE:
                # an acute vertex is the apex of a bounding wedge
                assert poly.boundary_distance(P) <= tol
        x, y = _sample_polygon(rng, poly, 10_000)
        band = strict_band(t, x, y)
        assert model.classify(x, y)["E"][band].all()
    print(f"criterion 7: {counted} polygons checked, {flagged} flagged")
    assert counted >= 90


@pytest.mark.criterion("8", "Child's inequality holds at sampled points of E")
def test_c8_child_in_E():
    rng = np.random.default_rng(SEED + 5)
    kept = 0
    worst = math.inf
    tris = list(random_triangles(rng, 100))
    while kept < 10_000:
        for t in tris:
            model = RegionModel(t)
            x, y = box_points(rng, t, 400, 3 * t.circumradius)
            ok = model.classify(x, y)["E"] & strict_band(t, x, y)
            if ok.any():
                res = child_residual(t, x[ok], y[ok]) / t.perimeter ** 3
                worst = min(worst, float(res.min()))
                kept += int(ok.sum())
    print(f"criterion 8: {kept} points in E, worst normalized Child residual {worst:.3e}")
    assert worst >= -1e-9


@pytest.mark.criterion("9", "curve trace quality, symmetry, area convergence and epsilon > 0")
def test_c9_curve():
    eq = CanonicalTriangle(-1.0, 1.0, SQRT3)
    shapes = [eq, triangle_from_angles(math.radians(50), math.radians(70)),
              CanonicalTriangle(-1.0, 1.0, 1.0)]
    for t in shapes:
        pts = trace_curve(t, resolution=256).points()
        assert np.abs(em_field(t, pts[:, 0], pts[:, 1])).max() <= 1e-9 * t.scale

    tr = trace_curve(eq, resolution=256)
    pts = tr.points()
    d, _ = cKDTree(pts).query(pts * [-1, 1])
    assert d.max() <= tr.cell_diagonal

    ests = [eprime_area(eq, resolution=n, samples=100, seed=1) for n in (256, 512, 1024)]
    for e in ests:
        print(f"criterion 9: resolution {e.resolution} area {e.area:.5f} "
              f"stderr {e.stderr:.5f} ratio {e.ratio:.4f}")
    for lo, hi in zip(ests, ests[1:]):
        assert abs(hi.area - lo.area) < 3 * lo.stderr
    assert all(e.bounded for e in ests) and ests[-1].epsilon > 0

    rows = epsilon_sweep(resolution=128, seed=1)
    bounded = [r for r in rows if r.bounded]
    assert bounded and all(r.epsilon + 1 >= 1 for r in bounded)


@pytest.mark.criterion("10", "strict points of E lie in E'; mass of E' \\ E reported")
def test_c10_e_vs_eprime():
    shapes = [CanonicalTriangle(-1.0, 1.0, SQRT3),
              triangle_from_angles(math.radians(50), math.radians(70)),
              triangle_from_angles(math.radians(40), math.radians(80))]
    for i, t in enumerate(shapes):
        comp = eprime_component(t, resolution=512)
        cmp = compare_e_eprime(t, comp, samples=100_000, seed=i)
        print(f"criterion 10: shape {i} strict E points {cmp.strict_E_points}, "
              f"outside E' {cmp.strict_E_outside_Eprime}, |E'\\E| {cmp.area_Eprime_minus_E:.4f}, "
              f"|E\\E'| {cmp.area_E_minus_Eprime:.4f}, bounded {comp.bounded}")
        assert cmp.strict_E_points > 0
        assert cmp.strict_E_outside_Eprime == 0
