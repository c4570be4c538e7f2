import math

import numpy as np
import pytest
from hypothesis import assume
from hypothesis import strategies as st

from emregion.geometry import CanonicalTriangle

SQRT3 = math.sqrt(3.0)

_criteria: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, text): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    cid, text = marker.args
    outcome = "FAIL" if call.excinfo is not None else "PASS"
    prev = _criteria.get(cid)
    if prev is None or prev[0] == "PASS":
        _criteria[cid] = (outcome, text)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_criteria, key=lambda c: (int("".join(filter(str.isdigit, c))), c)):
        outcome, text = _criteria[cid]
        terminalreporter.write_line(f"[{outcome}] criterion {cid}: {text}")


@pytest.fixture
def equilateral():
    return CanonicalTriangle(-1.0, 1.0, SQRT3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@st.composite
def triangles(draw, max_coord=3.0):
    p = draw(st.floats(-max_coord, max_coord, allow_nan=False))
    q = draw(st.floats(-max_coord, max_coord, allow_nan=False))
    r = draw(st.floats(-max_coord, max_coord, allow_nan=False))
    assume(q - p > 0.05 and abs(r) > 0.05)
    return CanonicalTriangle(p, q, r)


def barycentric(rng, t, n):
    w = rng.dirichlet([1.0, 1.0, 1.0], size=n)
    x = w[:, 1] * t.p + w[:, 2] * t.q
    y = w[:, 0] * t.r
    return x, y
