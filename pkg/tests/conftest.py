import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from liouquake.hyp_core import MobiusMap

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_line():
    """Records one PASS/FAIL line per criterion, echoed in the terminal summary."""
    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


# ---------------------------------------------------------------------------
# hypothesis strategies shared by the property tests

coords = st.floats(-20, 20, allow_nan=False, allow_infinity=False)


def well_separated(values, gap=1e-3):
    vs = sorted(values)
    return all(b - a > gap for a, b in zip(vs, vs[1:]))


@st.composite
def distinct_reals(draw, n, lo=-20.0, hi=20.0, gap=1e-2):
    xs = draw(st.lists(st.floats(lo, hi, allow_nan=False), min_size=n, max_size=n).filter(
        lambda v: well_separated(v, gap)))
    return xs


@st.composite
def real_mobius(draw, orientation_preserving=True):
    a, b, c, d = (draw(st.floats(-3, 3, allow_nan=False)) for _ in range(4))
    det = a * d - b * c
    if abs(det) < 0.1:
        a, d = a + 1.0, d + 1.0
        det = a * d - b * c
    if abs(det) < 0.1:
        a, b, c, d = 1.0, b, 0.0, 1.0
        det = 1.0
    if orientation_preserving and det < 0:
        a, b = -a, -b
    return MobiusMap(a, b, c, d)


@st.composite
def complex_mobius(draw):
    parts = [complex(draw(st.floats(-2, 2)), draw(st.floats(-2, 2))) for _ in range(4)]
    a, b, c, d = parts
    if abs(a * d - b * c) < 0.1:
        a, d = a + 1.0, d + 1.0
    if abs(a * d - b * c) < 0.1:
        a, b, c, d = 1.0, b, 0.0, 1.0
    return MobiusMap(a, b, c, d)


def random_real_mobius(rng: np.random.Generator, orientation_preserving=True) -> MobiusMap:
    while True:
        a, b, c, d = rng.normal(size=4)
        det = a * d - b * c
        if abs(det) > 0.2 and max(abs(a), abs(b), abs(c), abs(d)) / math.sqrt(abs(det)) < 10:
            break
    if orientation_preserving and det < 0:
        a, b = -a, -b
    return MobiusMap(a, b, c, d)
