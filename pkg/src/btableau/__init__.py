"""Type-B permutation tableaux: enumeration, sampling, exact expectations and PASEP types."""
from .core import (
    Grid,
    GridRow,
    StatRecord,
    Tableau,
    grid_to_history,
    parse,
    realize,
    serialize,
    stats,
    unrestricted_trace,
    validate,
)
from .enumeration import (
    brute_expectation,
    child_histogram,
    children,
    enumerate_all,
    measure_identity_check,
    per_position_probability,
)

__all__ = [
    "Grid",
    "GridRow",
    "StatRecord",
    "Tableau",
    "brute_expectation",
    "child_histogram",
    "children",
    "enumerate_all",
    "grid_to_history",
    "measure_identity_check",
    "parse",
    "per_position_probability",
    "realize",
    "serialize",
    "stats",
    "unrestricted_trace",
    "validate",
]
