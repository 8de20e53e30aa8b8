"""Type-B permutation tableaux: growth histories, realized grids and statistics.

A tableau of size ``n`` is stored canonically as its growth history: one entry
per border step, read from the northeast corner.  An entry is either ``"S"``
(a new empty bottom row) or the fill bitstring of a new leftmost column.  The
fill lists only the column's free cells, top to bottom: position 1 is the new
diagonal cell, the remaining positions are the rows that were unrestricted
just before the step.  Restricted rows always receive a 0 and are not recorded.

Grid conventions: rows are left-aligned and listed top to bottom.  The
diagonal rows form the top block with lengths 1..k (k = number of columns);
the newest column is the leftmost one and its diagonal cell is the single
cell of the top row.  The original rows follow, oldest south step on top.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property

from .errors import AllZeroFill, FillLengthMismatch, InvalidGrid, MalformedShape, ParseError

SOUTH = "S"
WEST = "W"

History = tuple  # tuple[str, ...]; each entry is SOUTH or a fill bitstring


def step_outcome(u: int, entry: str) -> tuple[int, int | None]:
    """Return ``(U_k, G_k)`` after applying ``entry`` to a state with ``U_{k-1} = u``.

    ``G_k`` is the 1-based position of the topmost 1 among the free cells and
    is ``None`` for a south step.
    """
    if entry == SOUTH:
        return u + 1, None
    if len(entry) != u + 1:
        raise FillLengthMismatch(
            f"column fill {entry!r} has {len(entry)} cells, expected {u + 1}"
        )
    g = entry.find("1") + 1
    if g == 0:
        raise AllZeroFill(f"column fill {entry!r} contains no 1")
    # Zeros above the topmost 1 stay unrestricted, except a zero diagonal cell.
    return entry.count("1") + max(g - 2, 0), g


@dataclass(frozen=True)
class GridRow:
    cells: tuple[int, ...]
    diagonal: bool = False

    @property
    def diagonal_cell(self) -> int | None:
        """Index of the diagonal cell (the rightmost one), or None."""
        return len(self.cells) - 1 if self.diagonal else None


@dataclass(frozen=True)
class Grid:
    rows: tuple[GridRow, ...] = ()

    @classmethod
    def from_lists(cls, rows, n_diagonal: int | None = None) -> Grid:
        """Build a grid from nested lists.

        When ``n_diagonal`` is omitted, the leading rows of lengths 1, 2, ...
        are taken as the diagonal block.
        """
        rows = [tuple(int(c) for c in r) for r in rows]
        if n_diagonal is None:
            n_diagonal = 0
            while n_diagonal < len(rows) and len(rows[n_diagonal]) == n_diagonal + 1:
                n_diagonal += 1
            # The last of those rows may belong to the original block instead;
            # a valid shape needs every original row no longer than the block.
            while n_diagonal and any(len(r) > n_diagonal for r in rows[n_diagonal:]):
                n_diagonal -= 1
        return cls(tuple(GridRow(r, i < n_diagonal) for i, r in enumerate(rows)))

    @property
    def n_columns(self) -> int:
        return sum(1 for r in self.rows if r.diagonal)

    def column(self, c: int) -> list[tuple[int, int]]:
        """``(row index, bit)`` pairs of column ``c``, top to bottom."""
        return [(i, r.cells[c]) for i, r in enumerate(self.rows) if len(r.cells) > c]

    def check_shape(self) -> None:
        k = self.n_columns
        for i, row in enumerate(self.rows):
            if any(c not in (0, 1) for c in row.cells):
                raise MalformedShape(f"row {i} has a cell that is not 0 or 1")
            if row.diagonal != (i < k):
                raise MalformedShape("diagonal rows must form the top block")
            if row.diagonal and len(row.cells) != i + 1:
                raise MalformedShape(
                    f"diagonal row {i} has length {len(row.cells)}, expected {i + 1}"
                )
        lengths = [len(r.cells) for r in self.rows[k:]]
        if any(length > k for length in lengths):
            raise MalformedShape("an original row is longer than the number of columns")
        if any(a < b for a, b in zip(lengths, lengths[1:])):
            raise MalformedShape("original row lengths must weakly decrease")

    @property
    def border(self) -> str:
        """South/west step string of the southeast border."""
        self.check_shape()
        k = self.n_columns
        steps = []
        west = 0
        for row in self.rows[k:]:
            while west < k - len(row.cells):
                steps.append(WEST)
                west += 1
            steps.append(SOUTH)
        steps.extend(WEST * (k - west))
        return "".join(steps)

    def to_text(self) -> str:
        return "".join(
            ("d" if r.diagonal else "") + "[" + "".join(map(str, r.cells)) + "]"
            for r in self.rows
        )

    @classmethod
    def from_text(cls, text: str) -> Grid:
        """Parse the bracket format, e.g. ``d[1]d[00]d[101][01][00][]``."""
        text = text.strip()
        rows = []
        pos = 0
        for m in re.finditer(r"(d?)\[([01]*)\]", text):
            if m.start() != pos:
                raise ParseError("unexpected character in grid text", pos)
            rows.append(GridRow(tuple(int(c) for c in m.group(2)), bool(m.group(1))))
            pos = m.end()
        if pos != len(text):
            raise ParseError("unexpected character in grid text", pos)
        return cls(tuple(rows))

    def __str__(self) -> str:
        lines = []
        for r in self.rows:
            body = " ".join(map(str, r.cells))
            lines.append(body + (" *" if r.diagonal else ""))
        return "\n".join(lines)


@dataclass
class _Row:
    step: int
    cells: list = field(default_factory=list)
    diagonal: bool = False
    restricted: bool = False


class _Builder:
    """Mutable grid grown one step at a time; used by realize and decoding."""

    def __init__(self):
        self.rows: list[_Row] = []  # top to bottom
        self.step = 0

    def free_rows(self) -> list[_Row]:
        return [r for r in self.rows if not r.restricted]

    def south(self) -> None:
        self.step += 1
        self.rows.append(_Row(self.step))

    def west(self, fill: str) -> None:
        free = self.free_rows()
        if len(fill) != len(free) + 1:
            raise FillLengthMismatch(
                f"column fill {fill!r} at step {self.step + 1} has {len(fill)} cells,"
                f" expected {len(free) + 1}"
            )
        if "1" not in fill:
            raise AllZeroFill(f"column fill {fill!r} at step {self.step + 1} contains no 1")
        self.step += 1
        bits = iter(int(b) for b in fill)
        top = _Row(self.step, [next(bits)], diagonal=True)
        top.restricted = top.cells[0] == 0
        seen_one = top.cells[0] == 1
        for row in self.rows:
            bit = 0 if row.restricted else next(bits)
            row.cells.insert(0, bit)
            if bit == 0 and seen_one:
                row.restricted = True
            seen_one = seen_one or bit == 1
        self.rows.insert(0, top)

    def unrestricted(self) -> int:
        return sum(1 for r in self.rows if not r.restricted)

    def grid(self) -> Grid:
        return Grid(tuple(GridRow(tuple(r.cells), r.diagonal) for r in self.rows))


def _check_entry(entry, k: int) -> None:
    if entry == SOUTH:
        return
    if not isinstance(entry, str) or not entry or set(entry) - {"0", "1"}:
        raise ValueError(f"history entry {k} is neither 'S' nor a 0/1 fill: {entry!r}")


@dataclass(frozen=True)
class Tableau:
    """A type-B permutation tableau in canonical (growth history) form."""

    history: tuple[str, ...]
    u_trace: tuple[int, ...]
    g_trace: tuple[int | None, ...]

    @property
    def n(self) -> int:
        return len(self.history)

    @property
    def border(self) -> str:
        return "".join(SOUTH if e == SOUTH else WEST for e in self.history)

    @property
    def fills(self) -> tuple[str, ...]:
        return tuple(e for e in self.history if e != SOUTH)

    @cached_property
    def grid(self) -> Grid:
        return _build(self.history)[0]

    def prefix(self, k: int) -> Tableau:
        """The size-``k`` tableau this one was grown from."""
        return Tableau(self.history[:k], self.u_trace[:k], self.g_trace[:k])

    def __str__(self) -> str:
        return serialize(self)


def _build(history) -> tuple[Grid, tuple[int, ...]]:
    b = _Builder()
    trace = []
    for k, entry in enumerate(history):
        _check_entry(entry, k)
        if entry == SOUTH:
            b.south()
        else:
            b.west(entry)
        trace.append(b.unrestricted())
    return b.grid(), tuple(trace)


def realize(history) -> Tableau:
    """Grow the tableau described by ``history`` from the empty tableau."""
    history = tuple(history)
    grid, trace = _build(history)
    g_trace = tuple(None if e == SOUTH else e.find("1") + 1 for e in history)
    t = Tableau(history, trace, g_trace)
    t.__dict__["grid"] = grid
    return t


def from_trusted(history: tuple, u_trace: tuple, g_trace: tuple) -> Tableau:
    """Wrap precomputed traces without rebuilding the grid (enumeration hot path)."""
    return Tableau(history, u_trace, g_trace)


# -- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    row: int
    column: int
    condition: int
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate(grid: Grid) -> ValidationReport:
    """Check a filling against the three type-B tableau conditions.

    Raises MalformedShape when the row lengths do not form a shifted diagram.
    """
    grid.check_shape()
    out = []
    for c in range(grid.n_columns):
        col = grid.column(c)
        if not any(bit for _, bit in col):
            out.append(Violation(col[0][0], c, 1, "column contains no 1"))
        seen_one = False
        for i, bit in col:
            if bit == 0 and seen_one and any(grid.rows[i].cells[:c]):
                out.append(Violation(i, c, 2, "0 with a 1 above and a 1 to its left"))
            seen_one = seen_one or bit == 1
    for i, row in enumerate(grid.rows):
        if row.diagonal and row.cells[-1] == 0 and any(row.cells):
            out.append(
                Violation(i, len(row.cells) - 1, 3, "diagonal 0 in a row that contains a 1")
            )
    return ValidationReport(tuple(out))


def _unrestricted_rows(rows: list[GridRow]) -> int:
    """Rows of a (prefix) grid containing no restricted 0."""
    width = max((len(r.cells) for r in rows), default=0)
    restricted = [r.diagonal and r.cells[-1] == 0 for r in rows]
    for c in range(width):
        seen_one = False
        for i, r in enumerate(rows):
            if len(r.cells) <= c:
                continue
            if r.cells[c] == 0 and seen_one:
                restricted[i] = True
            seen_one = seen_one or r.cells[c] == 1
    return restricted.count(False)


def unrestricted_trace(tableau: Tableau) -> tuple[int, ...]:
    """Recount ``U_1..U_n`` from the realized grid, one prefix at a time."""
    grid = tableau.grid
    border = tableau.border
    k_total = border.count(WEST)
    # Row index of the grid row created by each step.
    row_of = []
    south = west = 0
    for s in border:
        if s == SOUTH:
            row_of.append(k_total + south)
            south += 1
        else:
            west += 1
            row_of.append(k_total - west)
    trace = []
    west = 0
    for k, s in enumerate(border):
        west += s == WEST
        present = sorted(row_of[: k + 1])
        cut = k_total - west
        rows = [
            GridRow(grid.rows[i].cells[cut:], grid.rows[i].diagonal) for i in present
        ]
        trace.append(_unrestricted_rows(rows))
    return tuple(trace)


def grid_to_history(grid: Grid) -> tuple[str, ...]:
    """Recover the unique growth history whose realization is ``grid``."""
    try:
        report = validate(grid)
        border = grid.border
    except MalformedShape as exc:
        raise InvalidGrid(f"not a shifted Ferrers diagram: {exc}") from exc
    if not report.ok:
        raise InvalidGrid(f"filling violates condition(s): {report.violations}")
    k_total = border.count(WEST)
    b = _Builder()
    history = []
    south = west = 0
    step_row = {}
    for step, s in enumerate(border, start=1):
        if s == SOUTH:
            step_row[step] = k_total + south
            south += 1
            b.south()
            history.append(SOUTH)
            continue
        west += 1
        c = k_total - west
        step_row[step] = k_total - west
        bits = [grid.rows[step_row[step]].cells[c]]
        bits += [grid.rows[step_row[r.step]].cells[c] for r in b.free_rows()]
        fill = "".join(map(str, bits))
        try:
            b.west(fill)
        except (AllZeroFill, FillLengthMismatch) as exc:
            raise InvalidGrid(str(exc)) from exc
        history.append(fill)
    if b.grid() != grid:
        raise InvalidGrid("forced cells of restricted rows are not all 0")
    return tuple(history)


# -- statistics ---------------------------------------------------------------


STAT_FIELDS = (
    "rows",
    "columns",
    "unrestricted",
    "diagonal_ones",
    "ss_pairs",
    "ww_pairs",
    "sw_pairs",
    "ws_pairs",
)


@dataclass(frozen=True)
class StatRecord:
    rows: int
    columns: int
    unrestricted: int
    diagonal_ones: int
    ss_pairs: int
    ww_pairs: int
    sw_pairs: int
    ws_pairs: int
    g_trace: tuple[int | None, ...]

    def as_dict(self) -> dict:
        return {f: getattr(self, f) for f in STAT_FIELDS}


def stats(tableau: Tableau) -> StatRecord:
    border = tableau.border
    pairs = {"SS": 0, "WW": 0, "SW": 0, "WS": 0}
    for a, b in zip(border, border[1:]):
        pairs[a + b] += 1
    return StatRecord(
        rows=border.count(SOUTH),
        columns=border.count(WEST),
        unrestricted=tableau.u_trace[-1] if tableau.u_trace else 0,
        diagonal_ones=sum(1 for g in tableau.g_trace if g == 1),
        ss_pairs=pairs["SS"],
        ww_pairs=pairs["WW"],
        sw_pairs=pairs["SW"],
        ws_pairs=pairs["WS"],
        g_trace=tableau.g_trace,
    )


# -- text format --------------------------------------------------------------


def serialize(tableau: Tableau) -> str:
    """Canonical one-line form ``<steps>;<fill_1>;<fill_2>;...``."""
    return ";".join((tableau.border,) + tableau.fills)


def parse(text: str) -> Tableau:
    text = text.rstrip("\r\n")
    fields = text.split(";")
    steps = fields[0]
    for i, ch in enumerate(steps):
        if ch not in (SOUTH, WEST):
            raise ParseError(f"invalid step character {ch!r}", i)
    fills = fields[1:]
    pos = len(steps)
    for f in fills:
        pos += 1
        for i, ch in enumerate(f):
            if ch not in "01":
                raise ParseError(f"invalid fill character {ch!r}", pos + i)
        if not f:
            raise ParseError("empty column fill", pos)
        pos += len(f)
    n_west = steps.count(WEST)
    if len(fills) != n_west:
        raise ParseError(
            f"{n_west} west steps but {len(fills)} column fills", len(text)
        )
    it = iter(fills)
    return realize(SOUTH if s == SOUTH else next(it) for s in steps)
