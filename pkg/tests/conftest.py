import os
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def rationals(lo=-50, hi=50, max_den=12):
    return st.builds(
        lambda p, q: Fraction(p, q),
        st.integers(lo * max_den, hi * max_den),
        st.integers(1, max_den),
    )


def points(dim, **kw):
    return st.tuples(*[rationals(**kw)] * dim)


@st.composite
def horofunctions(draw, max_dim=5):
    from horostar import Horofunction

    dim = draw(st.integers(1, max_dim))
    support = sorted(draw(st.sets(st.integers(1, dim), min_size=1)))
    signs = [draw(st.sampled_from((-1, 1))) for _ in support]
    offsets = [draw(rationals(0, 20)) for _ in support]
    return Horofunction.normalize(dim, support, signs, offsets)


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion."""
    from test_acceptance import TITLES

    lines = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            name = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in name or rep.when != "call" and status != "error":
                continue
            number = int(name.split("test_criterion_")[1][:2])
            lines[number] = ("PASS" if status == "passed" else "FAIL", rep.duration)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(lines):
        status, seconds = lines[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {seconds:7.2f}s  {TITLES[number]}")
