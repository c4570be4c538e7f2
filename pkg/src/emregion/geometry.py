"""Canonical triangle frame, rigid placement into it, and raw distances.

Every triangle is handled in the frame A(0, r), B(p, 0), C(q, 0) with
p < q and r != 0.  Distance helpers accept floats or numpy arrays for
the point coordinates and broadcast like numpy ufuncs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

RIGHT_ANGLE_TOL = 1e-9
DEGENERATE_TOL = 1e-12

VERTICES = ("A", "B", "C")
SIDES = ("a", "b", "c")


class DegenerateTriangle(ValueError):
    """Collinear, repeated or otherwise unusable vertices."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


def as_point(obj) -> Point:
    if isinstance(obj, Point):
        return obj
    x, y = obj
    return Point(float(x), float(y))


@dataclass(frozen=True)
class SideLengths:
    a: float
    b: float
    c: float

    @property
    def perimeter(self) -> float:
        return self.a + self.b + self.c

    def satisfies_triangle_inequality(self) -> bool:
        a, b, c = self.a, self.b, self.c
        return a < b + c and b < a + c and c < a + b


class AngleKind(Enum):
    ACUTE = "acute"
    RIGHT = "right"
    OBTUSE = "obtuse"


@dataclass(frozen=True)
class AngleClass:
    """Angle type at A, decided by the sign of r^2 + pq.

    ``discriminant`` is the raw value; ``normalized`` is the same quantity
    after scaling the triangle so that max(|p|, |q|, |r|) = 1, which is what
    the right-angle band is applied to.
    """

    kind: AngleKind
    discriminant: float
    normalized: float


@dataclass(frozen=True)
class CanonicalTriangle:
    p: float
    q: float
    r: float

    def __post_init__(self):
        for v in (self.p, self.q, self.r):
            if not math.isfinite(v):
                raise DegenerateTriangle(f"non-finite parameter in {self}")
        if not self.p < self.q:
            raise DegenerateTriangle(f"need p < q, got p={self.p}, q={self.q}")
        if self.r == 0:
            raise DegenerateTriangle("r must be non-zero")

    @property
    def A(self) -> Point:
        return Point(0.0, self.r)

    @property
    def B(self) -> Point:
        return Point(self.p, 0.0)

    @property
    def C(self) -> Point:
        return Point(self.q, 0.0)

    def vertex(self, label: str) -> Point:
        return {"A": self.A, "B": self.B, "C": self.C}[label]

    @property
    def scale(self) -> float:
        """Normalization factor max(|p|, |q|, |r|)."""
        return max(abs(self.p), abs(self.q), abs(self.r))

    def normalized(self) -> "CanonicalTriangle":
        s = self.scale
        return CanonicalTriangle(self.p / s, self.q / s, self.r / s)

    @property
    def sides(self) -> SideLengths:
        return side_lengths(self)

    @property
    def perimeter(self) -> float:
        return self.sides.perimeter

    @property
    def area(self) -> float:
        return 0.5 * (self.q - self.p) * abs(self.r)

    @property
    def centroid(self) -> Point:
        return Point((self.p + self.q) / 3.0, self.r / 3.0)

    @property
    def circumradius(self) -> float:
        s = self.sides
        return s.a * s.b * s.c / (4.0 * self.area)

    @property
    def circumcenter(self) -> Point:
        # perpendicular bisector of BC is x = (p+q)/2; |OA| = |OB| fixes y
        x = 0.5 * (self.p + self.q)
        y = (self.r ** 2 + self.p * self.q) / (2.0 * self.r)
        return Point(x, y)

    @property
    def incenter(self) -> Point:
        s = self.sides
        w = s.perimeter
        x = (s.a * 0.0 + s.b * self.p + s.c * self.q) / w
        y = (s.a * self.r) / w
        return Point(x, y)

    def angles(self) -> tuple[float, float, float]:
        """Interior angles at A, B, C (radians)."""
        s = self.sides
        alpha = math.acos(_clamp((s.b ** 2 + s.c ** 2 - s.a ** 2) / (2 * s.b * s.c)))
        beta = math.acos(_clamp((s.a ** 2 + s.c ** 2 - s.b ** 2) / (2 * s.a * s.c)))
        return alpha, beta, math.pi - alpha - beta

    def to_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "r": self.r}


def _clamp(v: float) -> float:
    return max(-1.0, min(1.0, v))


@dataclass(frozen=True)
class Isometry:
    """Rigid motion  P -> F (R(angle) P + translation),  F = diag(1, -1) if reflect."""

    angle: float = 0.0
    translation: tuple[float, float] = (0.0, 0.0)
    reflect: bool = False

    @property
    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.angle), math.sin(self.angle)
        m = np.array([[c, -s], [s, c]])
        if self.reflect:
            m[1] = -m[1]
        return m

    @property
    def offset(self) -> np.ndarray:
        t = np.array(self.translation, dtype=float)
        if self.reflect:
            t[1] = -t[1]
        return t

    @classmethod
    def from_matrix(cls, m: np.ndarray, offset: Sequence[float]) -> "Isometry":
        m = np.asarray(m, dtype=float)
        o = np.array(offset, dtype=float)
        reflect = bool(np.linalg.det(m) < 0)
        rot = m.copy()
        if reflect:
            rot[1] = -rot[1]
            o[1] = -o[1]
        angle = math.atan2(rot[1, 0], rot[0, 0])
        return cls(angle, (float(o[0]), float(o[1])), reflect)

    def apply(self, x, y):
        m, o = self.matrix, self.offset
        return m[0, 0] * x + m[0, 1] * y + o[0], m[1, 0] * x + m[1, 1] * y + o[1]

    def apply_point(self, pt) -> Point:
        x, y = self.apply(*as_point(pt))
        return Point(float(x), float(y))

    def apply_vector(self, dx, dy):
        m = self.matrix
        return m[0, 0] * dx + m[0, 1] * dy, m[1, 0] * dx + m[1, 1] * dy

    def inverse(self) -> "Isometry":
        m = self.matrix
        return Isometry.from_matrix(m.T, -m.T @ self.offset)

    def compose(self, other: "Isometry") -> "Isometry":
        """``self`` after ``other``."""
        m1, m2 = self.matrix, other.matrix
        return Isometry.from_matrix(m1 @ m2, m1 @ other.offset + self.offset)


IDENTITY = Isometry()


def _cyclic_others(focus: str) -> tuple[str, str]:
    i = VERTICES.index(focus)
    return VERTICES[(i + 1) % 3], VERTICES[(i + 2) % 3]


def canonicalize(A, B, C, focus: str = "A") -> tuple[CanonicalTriangle, Isometry]:
    """Place the triangle so ``focus`` sits at (0, r), r > 0, and the
    opposite side lies on the x-axis with p < q.

    The two remaining vertices are taken in cyclic order (B, C for focus A;
    C, A for B; A, B for C), so the first of them becomes (p, 0).
    """
    if focus not in VERTICES:
        raise ValueError(f"focus must be one of {VERTICES}, got {focus!r}")
    pts = {"A": as_point(A), "B": as_point(B), "C": as_point(C)}
    arr = {k: np.array(v.as_tuple()) for k, v in pts.items()}

    scale = max(np.linalg.norm(arr["A"] - arr["B"]),
                np.linalg.norm(arr["B"] - arr["C"]),
                np.linalg.norm(arr["C"] - arr["A"]))
    d1, d2 = arr["B"] - arr["A"], arr["C"] - arr["A"]
    twice_area = d1[0] * d2[1] - d1[1] * d2[0]
    if scale == 0 or abs(twice_area) <= DEGENERATE_TOL * scale ** 2:
        raise DegenerateTriangle("vertices are collinear or repeated")

    u1, u2 = _cyclic_others(focus)
    V, U1, U2 = arr[focus], arr[u1], arr[u2]
    u = (U2 - U1) / np.linalg.norm(U2 - U1)
    H = U1 + np.dot(V - U1, u) * u
    # exact perpendicular of u; V - H loses its direction on thin triangles
    n = np.array([-u[1], u[0]])
    h = float(np.dot(V - U1, n))
    if h < 0:
        n, h = -n, -h
    r = h
    m = np.vstack([u, n])
    iso = Isometry.from_matrix(m, -m @ H)
    p = float(np.dot(U1 - H, u))
    q = float(np.dot(U2 - H, u))
    return CanonicalTriangle(p, q, r), iso


def distance_to_vertex(t: CanonicalTriangle, x, y, vertex: str = "A"):
    v = t.vertex(vertex)
    return np.hypot(x - v.x, y - v.y)


def distance_to_vertex_A(t: CanonicalTriangle, x, y):
    return np.sqrt(x * x + (y - t.r) ** 2)


def distance_to_side(t: CanonicalTriangle, x, y, side: str):
    """Unsigned distance to the line through side ``side`` ('a', 'b' or 'c')."""
    p, q, r = t.p, t.q, t.r
    if side == "a":
        return np.abs(y) + 0.0 * x
    if side == "b":
        return np.abs(-q * y - r * x + q * r) / math.hypot(r, q)
    if side == "c":
        return np.abs(p * y + r * x - p * r) / math.hypot(r, p)
    raise ValueError(f"side must be one of {SIDES}, got {side!r}")


def side_lengths(t: CanonicalTriangle) -> SideLengths:
    return SideLengths(t.q - t.p, math.hypot(t.r, t.q), math.hypot(t.r, t.p))


def angle_class_at_A(t: CanonicalTriangle, tol: float = RIGHT_ANGLE_TOL) -> AngleClass:
    disc = t.r ** 2 + t.p * t.q
    norm = disc / t.scale ** 2
    if abs(norm) <= tol:
        kind = AngleKind.RIGHT
    elif norm > 0:
        kind = AngleKind.ACUTE
    else:
        kind = AngleKind.OBTUSE
    return AngleClass(kind, disc, norm)


def parse_triangle(obj: dict) -> tuple[CanonicalTriangle, Isometry]:
    """Read the shared triangle JSON format.

    Returns the canonical triangle and the isometry taking input coordinates
    into its frame (identity for the {"p", "q", "r"} form).
    """
    if not isinstance(obj, dict):
        raise ValueError("triangle JSON must be an object")
    if {"p", "q", "r"} <= obj.keys():
        return CanonicalTriangle(float(obj["p"]), float(obj["q"]), float(obj["r"])), IDENTITY
    if {"A", "B", "C"} <= obj.keys():
        return canonicalize(obj["A"], obj["B"], obj["C"], "A")
    raise ValueError('triangle JSON needs keys "p","q","r" or "A","B","C"')


def random_triangles(rng: np.random.Generator, n: int, min_angle: float = 0.02,
                     ) -> Iterable[CanonicalTriangle]:
    """Random triangles from uniform vertices in the unit square."""
    count = 0
    while count < n:
        pts = rng.uniform(-1.0, 1.0, size=(3, 2))
        try:
            t, _ = canonicalize(*pts)
        except DegenerateTriangle:
            continue
        if min(t.angles()) < min_angle:
            continue
        count += 1
        yield t
