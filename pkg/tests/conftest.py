from __future__ import annotations

import pytest
from hypothesis import strategies as st

from dvbench.setalg import ArithSet, PiecewiseArithMap
from dvbench.topology import ArithCompactification

WINDOW = 64


def brute(s: ArithSet, width: int = WINDOW) -> frozenset[int]:
    return frozenset(n for n in range(width) if n in s)


@st.composite
def arith_sets(draw, max_threshold: int = 8, periods=(1, 2, 3, 4, 6)) -> ArithSet:
    t = draw(st.integers(0, max_threshold))
    p = draw(st.sampled_from(periods))
    init = draw(st.sets(st.integers(0, max(t - 1, 0)), max_size=t)) if t else set()
    res = draw(st.sets(st.integers(0, p - 1)))
    return ArithSet.make(t, p, res, init)


@st.composite
def shift_maps(draw) -> PiecewiseArithMap:
    m = draw(st.sampled_from((1, 2, 4)))
    offs = draw(st.lists(st.integers(0, 5), min_size=m, max_size=m))
    return PiecewiseArithMap(m, tuple(offs))


@pytest.fixture
def parity() -> ArithCompactification:
    return ArithCompactification.parity()


@pytest.fixture
def y_prime() -> ArithCompactification:
    return ArithCompactification.from_partition(4, [{0, 3}, {1, 2}])


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, whatever the capture mode."""
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])
