"""Exhaustive streaming enumeration of type-B tableaux and brute-force expectations.

Enumeration is a depth-first walk of the extension tree.  Each parent of size
``n - 1`` has one south child and one west child for every nonzero fill of its
``U + 1`` free cells; children are visited south first, then fills in
ascending binary order.  Only the current root-to-leaf path is held in memory.

Visitors are mergeable accumulators: anything with ``visit(tableau)``,
``merge(other)`` and ``spawn()`` (an empty accumulator with the same
configuration).  Totals are plain integers, so merge order never matters.
"""
from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from .core import SOUTH, STAT_FIELDS, Tableau, from_trusted, stats, step_outcome
from .errors import IndexOutOfRange, ResourceCap

DEFAULT_CAP = 8

EMPTY = Tableau((), (), ())


def _fills(u: int) -> list[str]:
    width = u + 1
    return [format(v, f"0{width}b") for v in range(1, 1 << width)]


_FILL_CACHE: dict[int, list[tuple[str, int, int]]] = {}


def _moves(u: int) -> list[tuple[str, int, int | None]]:
    """Children of a state with ``U = u`` as ``(entry, new U, G)``, in visit order."""
    moves = _FILL_CACHE.get(u)
    if moves is None:
        moves = [(SOUTH, u + 1, None)]
        moves += [(f, *step_outcome(u, f)) for f in _fills(u)]
        _FILL_CACHE[u] = moves
    return moves


@dataclass(frozen=True)
class ParentGroup:
    parent: Tableau
    children: tuple[Tableau, ...]


def children(parent: Tableau) -> ParentGroup:
    u = parent.u_trace[-1] if parent.u_trace else 0
    kids = tuple(
        from_trusted(parent.history + (e,), parent.u_trace + (nu,), parent.g_trace + (g,))
        for e, nu, g in _moves(u)
    )
    return ParentGroup(parent, kids)


def _check_cap(n: int, cap: int | None) -> None:
    if n < 0:
        raise ValueError("n must be nonnegative")
    if cap is not None and n > cap:
        raise ResourceCap(f"n = {n} exceeds the enumeration cap {cap}")


def _walk(root: Tableau, depth: int) -> Iterator[Tableau]:
    """All descendants of ``root`` exactly ``depth`` steps below it."""
    if depth == 0:
        yield root
        return
    hist, ut, gt = root.history, root.u_trace, root.g_trace
    # Explicit stack keeps memory O(n) and avoids recursion overhead.
    stack = [(hist, ut, gt, 0)]
    while stack:
        hist, ut, gt, d = stack.pop()
        u = ut[-1] if ut else 0
        moves = _moves(u)
        if d + 1 == depth:
            for e, nu, g in moves:
                yield Tableau(hist + (e,), ut + (nu,), gt + (g,))
        else:
            for e, nu, g in reversed(moves):
                stack.append((hist + (e,), ut + (nu,), gt + (g,), d + 1))


def iter_tableaux(n: int, cap: int | None = DEFAULT_CAP) -> Iterator[Tableau]:
    """Stream every tableau of size ``n`` in the canonical visit order."""
    _check_cap(n, cap)
    return _walk(EMPTY, n)


def _subtree_job(args):
    root, depth, visitor = args
    for t in _walk(root, depth):
        visitor.visit(t)
    return visitor


def enumerate_all(n: int, visitor=None, cap: int | None = DEFAULT_CAP, workers: int = 1) -> int:
    """Visit all of B_n and return the exact count.

    With ``workers > 1`` the subtrees below depth two are farmed out to
    processes and the partial accumulators merged into ``visitor``.
    """
    _check_cap(n, cap)
    if workers <= 1 or n < 3 or visitor is None:
        count = 0
        for t in _walk(EMPTY, n):
            count += 1
            if visitor is not None:
                visitor.visit(t)
        return count
    roots = list(_walk(EMPTY, 2))
    counter = CountVisitor()
    jobs = [(r, n - 2, _Pair(counter.spawn(), visitor.spawn())) for r in roots]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for part in ex.map(_subtree_job, jobs):
            counter.merge(part.first)
            visitor.merge(part.second)
    return counter.count


class CountVisitor:
    def __init__(self):
        self.count = 0

    def visit(self, t: Tableau) -> None:
        self.count += 1

    def merge(self, other: CountVisitor) -> None:
        self.count += other.count

    def spawn(self) -> CountVisitor:
        return CountVisitor()


class _Pair:
    def __init__(self, first, second):
        self.first, self.second = first, second

    def visit(self, t):
        self.first.visit(t)
        self.second.visit(t)


class StatAccumulator:
    """Integer totals of every StatRecord field plus per-position event counts."""

    def __init__(self, n: int):
        self.n = n
        self.count = 0
        self.totals = dict.fromkeys(STAT_FIELDS, 0)
        self.south = [0] * (n + 1)  # index k: tableaux with S_k
        self.ss = [0] * (n + 1)  # S_{k-1} and S_k
        self.ww = [0] * (n + 1)
        self.g1 = [0] * (n + 1)  # G_k = 1

    def visit(self, t: Tableau) -> None:
        rec = stats(t)
        self.count += 1
        totals = self.totals
        for f in STAT_FIELDS:
            totals[f] += getattr(rec, f)
        border = t.border
        for k, s in enumerate(border, start=1):
            if s == SOUTH:
                self.south[k] += 1
                if k >= 2 and border[k - 2] == SOUTH:
                    self.ss[k] += 1
            elif k >= 2 and border[k - 2] != SOUTH:
                self.ww[k] += 1
            if t.g_trace[k - 1] == 1:
                self.g1[k] += 1

    def merge(self, other: StatAccumulator) -> None:
        self.count += other.count
        for f in STAT_FIELDS:
            self.totals[f] += other.totals[f]
        for name in ("south", "ss", "ww", "g1"):
            mine, theirs = getattr(self, name), getattr(other, name)
            for k, v in enumerate(theirs):
                mine[k] += v

    def spawn(self) -> StatAccumulator:
        return StatAccumulator(self.n)

    def mean(self, field: str) -> Fraction:
        return Fraction(self.totals[field], self.count)


class SumVisitor:
    """Exact running sum of an integer- or Fraction-valued function."""

    def __init__(self, fn: Callable[[Tableau], int | Fraction]):
        self.fn = fn
        self.count = 0
        self.total = 0

    def visit(self, t: Tableau) -> None:
        self.count += 1
        self.total += self.fn(t)

    def merge(self, other: SumVisitor) -> None:
        self.count += other.count
        self.total += other.total

    def spawn(self) -> SumVisitor:
        return SumVisitor(self.fn)


@dataclass(frozen=True)
class BruteReport:
    n: int
    statistic: str
    total: int | Fraction
    count: int
    mean: Fraction

    def as_record(self) -> dict:
        return {
            "n": self.n,
            "statistic": self.statistic,
            "numerator": self.mean.numerator,
            "denominator": self.mean.denominator,
            "count": self.count,
        }


def _stat_fn(statistic) -> tuple[str, Callable[[Tableau], int]]:
    if callable(statistic):
        return getattr(statistic, "__name__", "custom"), statistic
    if statistic not in STAT_FIELDS:
        raise ValueError(f"unknown statistic {statistic!r}; choose from {STAT_FIELDS}")
    return statistic, lambda t: getattr(stats(t), statistic)


def brute_expectation(n: int, statistic, cap: int | None = DEFAULT_CAP) -> BruteReport:
    """Exact mean of ``statistic`` over B_n under the uniform measure."""
    name, fn = _stat_fn(statistic)
    acc = SumVisitor(fn)
    count = enumerate_all(n, acc, cap=cap)
    return BruteReport(n, name, acc.total, count, Fraction(acc.total, count))


EVENTS = ("S_k", "SS_k", "WW_k", "G1_k")


def event_indicator(event: str, k: int) -> Callable[[Tableau], int]:
    """Indicator of a per-position event on the k-th step (1-based)."""
    if event == "S_k":
        return lambda t: int(t.history[k - 1] == SOUTH)
    if event == "SS_k":
        return lambda t: int(t.history[k - 1] == SOUTH and t.history[k - 2] == SOUTH)
    if event == "WW_k":
        return lambda t: int(t.history[k - 1] != SOUTH and t.history[k - 2] != SOUTH)
    if event == "G1_k":
        return lambda t: int(t.g_trace[k - 1] == 1)
    raise ValueError(f"unknown event {event!r}; choose from {EVENTS}")


def per_position_probability(n: int, event: str, k: int, cap: int | None = DEFAULT_CAP) -> Fraction:
    low = 2 if event in ("SS_k", "WW_k") else 1
    if not low <= k <= n:
        raise IndexOutOfRange(f"k = {k} outside {low}..{n} for event {event}")
    return brute_expectation(n, event_indicator(event, k), cap=cap).mean


def child_histogram(parent: Tableau) -> dict[int, int]:
    """Number of children of ``parent`` for each value of the new U."""
    hist = Counter(c.u_trace[-1] for c in children(parent).children)
    return dict(sorted(hist.items()))


def binomial_histogram(u: int) -> dict[int, int]:
    """The histogram predicted by U_n = 1 + Bin(U_{n-1}): 2 C(u, j) at 1 + j."""
    return {1 + j: 2 * math.comb(u, j) for j in range(u + 1)}


@dataclass(frozen=True)
class MeasureCheck:
    m: int
    a: Fraction
    statistic: str
    lhs: Fraction
    rhs: Fraction

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs


PREFIX_STATS: dict[str, Callable[[Tableau], int]] = {
    "one": lambda t: 1,
    "rows": lambda t: t.border.count(SOUTH),
    "unrestricted": lambda t: t.u_trace[-1] if t.u_trace else 0,
}


def measure_identity_check(m: int, a, statistic="one", cap: int | None = DEFAULT_CAP) -> MeasureCheck:
    """Compare E_m[X a^{U_m}] with (a/m) E_{m-1}[X (a+1)^{U_{m-1}}] exactly.

    ``statistic`` is a function of the size-(m-1) prefix, or a key of
    PREFIX_STATS.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    a = Fraction(a)
    if isinstance(statistic, str):
        name, x = statistic, PREFIX_STATS[statistic]
    else:
        name, x = getattr(statistic, "__name__", "custom"), statistic
    lhs = brute_expectation(
        m, lambda t: x(t.prefix(m - 1)) * a ** t.u_trace[-1], cap=cap
    ).mean
    prev = brute_expectation(
        m - 1,
        lambda t: x(t) * (a + 1) ** (t.u_trace[-1] if t.u_trace else 0),
        cap=cap,
    ).mean
    return MeasureCheck(m, a, name, lhs, a / m * prev)


def u_moment_brute(m: int, a, cap: int | None = DEFAULT_CAP) -> Fraction:
    """E_m[a^{U_m}] by enumeration."""
    a = Fraction(a)
    return brute_expectation(m, lambda t: a ** (t.u_trace[-1] if t.u_trace else 0), cap=cap).mean


def measure_identity_table(
    m: int, a_values, statistics=tuple(PREFIX_STATS), cap: int | None = DEFAULT_CAP
) -> list[MeasureCheck]:
    """``measure_identity_check`` for many (a, X) pairs with one pass over B_m and B_{m-1}."""
    if m < 1:
        raise ValueError("m must be at least 1")
    _check_cap(m, cap)
    a_values = [Fraction(a) for a in a_values]
    fns = {name: PREFIX_STATS[name] for name in statistics}
    lhs = {(a, s): Fraction(0) for a in a_values for s in fns}
    rhs = dict.fromkeys(lhs, Fraction(0))
    count_m = 0
    for t in _walk(EMPTY, m):
        count_m += 1
        pre = t.prefix(m - 1)
        u = t.u_trace[-1]
        for s, x in fns.items():
            xv = x(pre)
            if xv:
                for a in a_values:
                    lhs[a, s] += xv * a**u
    count_prev = 0
    for t in _walk(EMPTY, m - 1):
        count_prev += 1
        u = t.u_trace[-1] if t.u_trace else 0
        for s, x in fns.items():
            xv = x(t)
            if xv:
                for a in a_values:
                    rhs[a, s] += xv * (a + 1) ** u
    return [
        MeasureCheck(m, a, s, lhs[a, s] / count_m, a / m * rhs[a, s] / count_prev)
        for a in a_values
        for s in fns
    ]
