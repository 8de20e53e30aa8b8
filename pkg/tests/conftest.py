import itertools
from functools import lru_cache

import pytest
from hypothesis import strategies as st

from btableau.core import Grid, GridRow, realize, step_outcome
from btableau.enumeration import iter_tableaux

# Worked examples, top row first.
SIX_ROWS = [[1], [0, 0], [1, 0, 1], [0, 1], [0, 0], []]
SIX_HISTORY = ("1", "S", "S", "0010", "110", "S")
SMALL_PARENT = ("1", "01")


@lru_cache(maxsize=None)
def all_tableaux(n):
    return tuple(iter_tableaux(n))


@pytest.fixture
def six():
    return realize(SIX_HISTORY)


@pytest.fixture
def small_parent():
    return realize(SMALL_PARENT)


def shape_grid(border: str, fill=None) -> Grid:
    """Empty-filled (or ``fill``-filled) shifted diagram with the given border."""
    k = border.count("W")
    lengths = [i + 1 for i in range(k)]
    lengths += [border[j + 1:].count("W") for j, s in enumerate(border) if s == "S"]
    cells = iter(fill) if fill is not None else itertools.repeat(0)
    rows = tuple(
        GridRow(tuple(next(cells) for _ in range(length)), i < k)
        for i, length in enumerate(lengths)
    )
    return Grid(rows)


def all_fillings(n: int):
    """Every 0/1 filling of every shifted diagram with half-perimeter n."""
    for border in map("".join, itertools.product("SW", repeat=n)):
        size = sum(len(r.cells) for r in shape_grid(border).rows)
        for bits in itertools.product((0, 1), repeat=size):
            yield shape_grid(border, bits)


@st.composite
def histories(draw, max_size=9):
    n = draw(st.integers(0, max_size))
    u = 0
    hist = []
    for _ in range(n):
        if draw(st.booleans()):
            hist.append("S")
        else:
            v = draw(st.integers(1, 2 ** (u + 1) - 1))
            hist.append(format(v, f"0{u + 1}b"))
        u = step_outcome(u, hist[-1])[0]
    return tuple(hist)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
