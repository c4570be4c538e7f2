"""Per-vertex validity region E_A via the pencil of lines through A.

Along a line y = kx + r through A the per-vertex inequality scales with
|x|, so membership depends on the slope k alone.  Slopes live on the
projective line; ``math.inf`` stands for the vertical direction and
``-inf`` is folded into it.

Point-level routines take a direction (dx, dy) from A, flipped so that
dx > 0 (or dx = 0, dy > 0).  Then pk + r has the sign of p*dy + r*dx and
the comparisons k <= k0 become dy <= k0*dx, which needs no division and
treats the vertical exactly.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .geometry import (
    AngleClass,
    AngleKind,
    DEGENERATE_TOL,
    CanonicalTriangle,
    Isometry,
    angle_class_at_A,
    canonicalize,
    side_lengths,
)

AHAT_ZERO_TOL = 1e-9
SIGN_CONDITION_TOL = 1e-9
INF = math.inf


class NoRealRoots(ValueError):
    pass


class NotApplicable(ValueError):
    pass


class Corner(Enum):
    ALPHA1 = "alpha1"
    ALPHA2 = "alpha2"
    ALPHA3 = "alpha3"
    ALPHA4 = "alpha4"

    @property
    def in_angle(self) -> bool:
        """True for the wedge BAC and its cross angle."""
        return self in (Corner.ALPHA1, Corner.ALPHA4)


CORNERS = (Corner.ALPHA1, Corner.ALPHA2, Corner.ALPHA3, Corner.ALPHA4)


def _corner_from_signs(u_nonneg: bool, v_nonneg: bool) -> Corner:
    if u_nonneg and v_nonneg:
        return Corner.ALPHA1
    if v_nonneg:
        return Corner.ALPHA2
    if u_nonneg:
        return Corner.ALPHA3
    return Corner.ALPHA4


def normalize_slope(k: float) -> float:
    return INF if math.isinf(k) else float(k)


@dataclass(frozen=True)
class SlopeCoefficients:
    lam: float
    beta: float
    gamma: float
    delta: float
    eps: float


@dataclass(frozen=True)
class Trinomial:
    a: float
    b: float
    c: float

    def __call__(self, k):
        return (self.a * k + self.b) * k + self.c


@dataclass(frozen=True)
class AhatRoots:
    r1: Optional[float] = None
    r2: Optional[float] = None
    r3: Optional[float] = None
    r4: Optional[float] = None

    def present(self) -> list[float]:
        return [r for r in (self.r1, self.r2, self.r3, self.r4) if r is not None]


@dataclass(frozen=True)
class VertexSlopeAnalysis:
    triangle: CanonicalTriangle
    coefficients: SlopeCoefficients
    trinomial: Trinomial
    k1: Optional[float]
    k1_valid: bool
    k2: Optional[float]
    k3: Optional[float]
    angle: AngleClass
    ahat_sign: int
    # both roots of the trinomial before the sign filter; a dropped root lies
    # in the closed angle, where it still bounds the invalid arc
    roots: tuple[float, ...] = ()

    @property
    def boundary_slopes(self) -> Optional[tuple[float, float]]:
        """Slopes bounding the invalid arc, or None when every line is valid."""
        if self.angle.kind is not AngleKind.ACUTE or len(self.roots) != 2:
            return None
        return self.roots


def slope_coefficients(t: CanonicalTriangle) -> SlopeCoefficients:
    p, q, r = t.p, t.q, t.r
    lam = (q - p) * math.hypot(r, p) * math.hypot(r, q)
    beta = (p * q - r * r) * (q - p)
    gamma = r * (q * q - p * p)
    delta = (r * r + p * q) * (q + p)
    eps = r * (2 * r * r + q * q + p * p)
    return SlopeCoefficients(lam, beta, gamma, delta, eps)


def trinomial(t: CanonicalTriangle) -> Trinomial:
    p, q, r = t.p, t.q, t.r
    r2 = r * r
    a = (q - p) ** 2 * (r2 + p * p) * (r2 + q * q) - (r2 + p * q) ** 2 * (q + p) ** 2
    b = -2 * r * (r2 + p * q) * (q + p) * (2 * r2 + q * q + p * p)
    c = (r2 + p * q) * ((p * q - r2) * (q - p) ** 2 - 2 * r2 * (2 * r2 + q * q + p * p))
    return Trinomial(a, b, c)


def ahat_expanded(p: float, q: float, r: float) -> float:
    """Leading coefficient as a polynomial in r (degree 6, even)."""
    r2 = r * r
    return (-4 * p * q * r2 * r2
            + (p ** 4 + q ** 4 - 4 * p * q ** 3 - 4 * p ** 3 * q - 2 * p * p * q * q) * r2
            - 4 * p ** 3 * q ** 3)


def corner_area_of_slope(t: CanonicalTriangle, k: float) -> Corner:
    """Label of the slope k by the signs of pk + r and -qk - r.

    For the vertical the signs are the k -> +inf limits: sign(p) and
    sign(-q), with a zero leading coefficient counting as >= 0.
    """
    if math.isinf(k):
        return _corner_from_signs(t.p >= 0, -t.q >= 0)
    return _corner_from_signs(t.p * k + t.r >= 0, -t.q * k - t.r >= 0)


def corner_area_existence(t: CanonicalTriangle) -> set[Corner]:
    """Labels attained by some finite slope."""
    with np.errstate(over="ignore"):
        crit = sorted({k for v in (t.p, t.q) if v != 0 and math.isfinite(k := -t.r / v)})
    probes = list(crit)
    if crit:
        # step by the magnitude so the probe survives rounding at large slopes
        big = sys.float_info.max
        probes += [max(crit[0] - (1.0 + abs(crit[0])), -big),
                   min(crit[-1] + (1.0 + abs(crit[-1])), big)]
        probes += [0.5 * (x + y) for x, y in zip(crit, crit[1:])]
    else:
        probes += [0.0]
    return {corner_area_of_slope(t, k) for k in probes}


def k1_slope(t: CanonicalTriangle) -> tuple[float, bool]:
    """Unique equality slope inside the angle at A and whether it qualifies.

    The slope qualifies when it falls in alpha1 (with +beta*k + gamma >= 0)
    or in alpha4 (with -beta*k - gamma >= 0).
    """
    p, q, r = t.p, t.q, t.r
    denom = r * (p + q)
    # p + q = 0 only up to rounding once a frame has been rotated
    if abs(denom) <= DEGENERATE_TOL * t.scale ** 2:
        k1 = INF
    else:
        k1 = (p * q - r * r) / denom
    corner = corner_area_of_slope(t, k1)
    if not corner.in_angle:
        return k1, False
    co = slope_coefficients(t)
    if math.isinf(k1):
        # direction (0, 1): beta*k + gamma -> beta
        value = co.beta
    else:
        value = co.beta * k1 + co.gamma
    sign = 1.0 if corner is Corner.ALPHA1 else -1.0
    scale = t.scale ** 3 * max(1.0, abs(k1) if not math.isinf(k1) else 1.0)
    return k1, bool(sign * value >= -SIGN_CONDITION_TOL * scale)


def ahat_roots(p: float, q: float) -> AhatRoots:
    """Values of r at which the leading coefficient vanishes, for fixed p, q."""
    if p * q <= 0:
        raise NotApplicable("leading coefficient has no zero in r unless p*q > 0")
    d2 = (q - p) ** 2
    disc = d2 * d2 - 16 * p * p * q * q
    if disc < 0:
        raise NoRealRoots(f"no real r for p={p}, q={q}")
    s = math.sqrt(disc)
    w = 4 * math.sqrt(p * q)
    r1, r2 = (d2 + s) / w, (d2 - s) / w
    return AhatRoots(r1, r2, -r1, -r2)


def _case_two_sign(t: CanonicalTriangle, k: float) -> float:
    """+1 where the right-hand side equals +(delta*k + eps), -1 otherwise."""
    if math.isinf(k):
        return 1.0 if t.p >= 0 else -1.0
    return 1.0 if t.p * k + t.r >= 0 else -1.0


def _keep_root(t: CanonicalTriangle, co: SlopeCoefficients, k: float) -> bool:
    s = _case_two_sign(t, k)
    if math.isinf(k):
        value = s * co.delta
        size = 1.0
    else:
        value = s * (co.delta * k + co.eps)
        size = max(1.0, abs(k))
    return value >= -SIGN_CONDITION_TOL * t.scale ** 3 * size


def critical_slopes(t: CanonicalTriangle) -> VertexSlopeAnalysis:
    co = slope_coefficients(t)
    tri = trinomial(t)
    angle = angle_class_at_A(t)
    k1, k1_valid = k1_slope(t)
    s6 = t.scale ** 6
    a_norm = tri.a / s6
    if abs(a_norm) <= AHAT_ZERO_TOL:
        ahat_sign = 0
    else:
        ahat_sign = 1 if a_norm > 0 else -1

    k2 = k3 = None
    roots = ()
    if angle.kind is AngleKind.RIGHT:
        k2 = k3 = 0.0
    elif angle.kind is AngleKind.ACUTE:
        if ahat_sign == 0:
            roots = [-tri.c / tri.b, INF]
        else:
            # half-discriminant lam^2 (delta^2 + eps^2 - lam^2) in closed form
            b2c2 = (t.r ** 2 + t.p ** 2) * (t.r ** 2 + t.q ** 2)
            root_disc = 2 * b2c2 * (t.q - t.p) * math.sqrt(max(angle.discriminant, 0.0))
            de = co.delta * co.eps
            big = de + math.copysign(root_disc, de)
            if big == 0:
                roots = [0.0, 0.0]
            else:
                roots = sorted([big / tri.a, tri.c / big])
        kept = [k for k in roots if _keep_root(t, co, k)]
        if len(kept) == 2:
            k2, k3 = kept
        elif len(kept) == 1:
            k2 = kept[0]
        roots = tuple(float(k) for k in roots)
    return VertexSlopeAnalysis(t, co, tri, k1, k1_valid, k2, k3, angle, ahat_sign, roots)


def slope_residual(t: CanonicalTriangle, dx, dy):
    """Left minus right side of the single-slope inequality, direction form.

    Equals lam*sqrt(1+k^2) - (...) when (dx, dy) = (1, k); homogeneous of
    degree one in (dx, dy).
    """
    p, q, r = t.p, t.q, t.r
    b2, c2 = r * r + q * q, r * r + p * p
    lam = (q - p) * math.sqrt(b2) * math.sqrt(c2)
    return (lam * np.hypot(dx, dy)
            - c2 * np.abs(-q * dy - r * dx)
            - b2 * np.abs(p * dy + r * dx))


def _oriented_direction(dx, dy):
    dx = np.asarray(dx, dtype=float)
    dy = np.asarray(dy, dtype=float)
    flip = (dx < 0) | ((dx == 0) & (dy < 0))
    sgn = np.where(flip, -1.0, 1.0)
    return dx * sgn, dy * sgn


def directions_valid(analysis: VertexSlopeAnalysis, dx, dy):
    """Vectorized classification of directions from A (not both zero)."""
    t = analysis.triangle
    dx, dy = _oriented_direction(dx, dy)
    u = t.p * dy + t.r * dx
    v = -t.q * dy - t.r * dx
    in_angle = (u >= 0) == (v >= 0)
    kind = analysis.angle.kind
    if kind is not AngleKind.ACUTE:
        return np.ones_like(in_angle, dtype=bool)
    # outside the angle validity is the sign of the trinomial, so the raw
    # roots decide even when one of them is not an equality slope
    k2, k3 = analysis.roots
    if analysis.ahat_sign > 0:
        ok = (dy <= k2 * dx) | (dy >= k3 * dx)
    elif analysis.ahat_sign < 0:
        ok = (dy >= k2 * dx) & (dy <= k3 * dx)
    elif analysis.trinomial.b < 0:
        ok = (dy <= k2 * dx) | (dx == 0)
    else:
        ok = dy >= k2 * dx
    return in_angle | ok


def slope_inequality_holds(t_or_analysis, k: float) -> bool:
    """Analytic verdict for the line of slope ``k`` through A."""
    analysis = _as_analysis(t_or_analysis)
    if math.isinf(k):
        dx, dy = 0.0, 1.0
    else:
        dx, dy = 1.0, float(k)
    return bool(directions_valid(analysis, dx, dy))


def _as_analysis(obj) -> VertexSlopeAnalysis:
    if isinstance(obj, VertexSlopeAnalysis):
        return obj
    return critical_slopes(obj)


@dataclass(frozen=True)
class MembershipVerdict:
    member: bool
    residual: float
    normalized: float
    equality: bool


def vertex_residual_canonical(t: CanonicalTriangle, x, y):
    """Residual of the scaled per-vertex inequality at A (both sides times a*b*c)."""
    p, q, r = t.p, t.q, t.r
    b2, c2 = r * r + q * q, r * r + p * p
    lhs = (q - p) * math.sqrt(c2) * math.sqrt(b2) * np.sqrt(x * x + (y - r) ** 2)
    rhs = c2 * np.abs(-q * y - r * x + q * r) + b2 * np.abs(p * y + r * x - p * r)
    return lhs - rhs


def classify_EA(analysis: VertexSlopeAnalysis, x, y):
    """Membership array for points (x, y) given in the frame of ``analysis``."""
    t = analysis.triangle
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx, dy = x, y - t.r
    # rigid motions leave a vertex a few ulps off the apex; no direction there
    at_apex = np.hypot(dx, dy) <= 1e-12 * t.scale
    safe_dx = np.where(at_apex, 1.0, dx)
    return directions_valid(analysis, safe_dx, dy) | at_apex


def point_in_EA(t: CanonicalTriangle, m, analysis: Optional[VertexSlopeAnalysis] = None,
                ) -> MembershipVerdict:
    analysis = analysis or critical_slopes(t)
    x, y = float(m[0]), float(m[1])
    member = bool(classify_EA(analysis, x, y))
    res = float(vertex_residual_canonical(t, x, y))
    s = side_lengths(t)
    norm = res / (s.a * s.b * s.c * s.perimeter)
    return MembershipVerdict(member, res, norm, abs(norm) <= 1e-12)


@dataclass(frozen=True)
class VertexFrame:
    """One vertex moved to the apex position, with its analysis."""

    vertex: str
    triangle: CanonicalTriangle
    isometry: Isometry
    analysis: VertexSlopeAnalysis

    def classify(self, x, y):
        fx, fy = self.isometry.apply(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return classify_EA(self.analysis, fx, fy)

    def verdict(self, m) -> MembershipVerdict:
        fx, fy = self.isometry.apply(float(m[0]), float(m[1]))
        return point_in_EA(self.triangle, (fx, fy), self.analysis)


def vertex_frames(t: CanonicalTriangle) -> dict[str, VertexFrame]:
    frames = {"A": VertexFrame("A", t, Isometry(), critical_slopes(t))}
    for label in ("B", "C"):
        ft, iso = canonicalize(t.A, t.B, t.C, label)
        frames[label] = VertexFrame(label, ft, iso, critical_slopes(ft))
    return frames


def point_in_EB(t: CanonicalTriangle, m) -> MembershipVerdict:
    return vertex_frames(t)["B"].verdict(m)


def point_in_EC(t: CanonicalTriangle, m) -> MembershipVerdict:
    return vertex_frames(t)["C"].verdict(m)


# one (p, q, r) per sign pattern of the corner-area existence table
TABLE1_REPRESENTATIVES = (
    (1.0, 2.0, 1.0),
    (-1.0, 2.0, 1.0),
    (-2.0, -1.0, 1.0),
    (1.0, 2.0, -1.0),
    (-1.0, 2.0, -1.0),
    (-2.0, -1.0, -1.0),
    (0.0, 1.0, 1.0),
    (0.0, 1.0, -1.0),
    (-1.0, 0.0, 1.0),
    (-1.0, 0.0, -1.0),
)


def existence_pattern(t: CanonicalTriangle) -> str:
    """'+'/'-' per corner area alpha1..alpha4, space separated."""
    present = corner_area_existence(t)
    return " ".join("+" if c in present else "-" for c in CORNERS)
