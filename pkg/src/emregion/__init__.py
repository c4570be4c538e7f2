"""Regions of the triangle plane where the Erdős–Mordell inequality and its
per-vertex building blocks hold."""
from .curve import (
    Box,
    CurveTrace,
    EmptyTrace,
    EprimeEstimate,
    default_box,
    em_field,
    eprime_area,
    epsilon_sweep,
    trace_curve,
)
from .geometry import (
    AngleClass,
    AngleKind,
    CanonicalTriangle,
    DegenerateTriangle,
    Isometry,
    Point,
    SideLengths,
    angle_class_at_A,
    canonicalize,
    distance_to_side,
    distance_to_vertex_A,
    side_lengths,
)
from .regions import (
    MembershipReport,
    RegionModel,
    RegionPolygon,
    child_residual,
    erdos_mordell_residual,
    m_polygon,
    membership,
    weighted_em_residual,
)
from .vertex_region import (
    Corner,
    NoRealRoots,
    NotApplicable,
    VertexSlopeAnalysis,
    ahat_roots,
    corner_area_existence,
    corner_area_of_slope,
    critical_slopes,
    k1_slope,
    point_in_EA,
    point_in_EB,
    point_in_EC,
    slope_coefficients,
    slope_inequality_holds,
    trinomial,
)

__version__ = "0.1.0"
