"""Closed-form expectations and per-position probabilities under the uniform measure.

Every value is an exact ``Fraction``.  Formulas are only exposed on the domain
where they hold; outside it they raise instead of extrapolating.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, IndexOutOfRange, ResourceCap


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


def _position(n: int, k: int, low: int) -> None:
    if not low <= k <= n:
        raise IndexOutOfRange(f"k = {k} outside {low}..{n}")


def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, n + 1)), Fraction(0))


def expected_rows(n: int) -> Fraction:
    _need(n >= 1, "expected_rows needs n >= 1")
    return Fraction(n + 1, 4)


def expected_unrestricted(n: int) -> Fraction:
    _need(n >= 1, "expected_unrestricted needs n >= 1")
    return harmonic(n)


def expected_diag_ones(n: int) -> Fraction:
    _need(n >= 0, "expected_diag_ones needs n >= 0")
    return Fraction(n, 2)


def expected_ss(n: int) -> Fraction:
    _need(n >= 2, "adjacent-pair expectations need n >= 2")
    return Fraction(2 * n - 1, 24)


def expected_ww(n: int) -> Fraction:
    _need(n >= 2, "adjacent-pair expectations need n >= 2")
    return Fraction(14 * n - 25, 24) + Fraction(1, 2 * n)


def p_south(n: int, k: int) -> Fraction:
    """P_n(S_k) = (1/2)(1 - (k-1)/n)."""
    _position(n, k, 1)
    return Fraction(1, 2) * (1 - Fraction(k - 1, n))


def p_south_proof_form(n: int, k: int) -> Fraction:
    """The variant (1/2)(1 - (k+1)/n); kept only to show it disagrees with enumeration."""
    _position(n, k, 1)
    return Fraction(1, 2) * (1 - Fraction(k + 1, n))


def p_ss(n: int, k: int) -> Fraction:
    _position(n, k, 2)
    return Fraction((n - k + 1) ** 2, 4 * n * (n - 1))


def p_ww(n: int, k: int) -> Fraction:
    _position(n, k, 2)
    return Fraction(k, n) - Fraction(3, 2 * n) + Fraction((n - k + 1) ** 2, 4 * n * (n - 1))


def p_g1(n: int, k: int) -> Fraction:
    """Probability that step k is west with a 1 in its diagonal cell."""
    _position(n, k, 1)
    return Fraction(1, 2)


def u_moment(m: int, a) -> Fraction:
    """E_m[a^{U_m}] = a(a+1)...(a+m-1) / m!."""
    a = Fraction(a)
    _need(m >= 1, "u_moment needs m >= 1")
    _need(a > 0, "u_moment needs a > 0")
    num = Fraction(1)
    for i in range(m):
        num *= a + i
    return num / math.factorial(m)


def u_moment_gamma_form(m: int, a) -> Fraction:
    """Gamma(m+a-1) / (m! Gamma(a-1)), evaluated as the polynomial (a-1)(a)...(a+m-2)/m!.

    This shifted form does not match enumeration; it exists so the mismatch
    can be reported.
    """
    a = Fraction(a)
    _need(m >= 1, "u_moment_gamma_form needs m >= 1")
    num = Fraction(1)
    for i in range(m):
        num *= a - 1 + i
    return num / math.factorial(m)


@dataclass(frozen=True)
class IdentityCheck:
    m: int
    a: Fraction
    lhs: Fraction
    rhs: Fraction

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs


def binomial_identity_check(m: int, a) -> IdentityCheck:
    """E[1{G=1} a^{G + Bin(m-G)}] against (a/(a+1)) ((a+1)/2)^m.

    The left side sums over all 2^m fair-coin outcomes; G is the position of
    the first success.
    """
    a = Fraction(a)
    _need(m >= 1, "binomial_identity_check needs m >= 1")
    _need(a > 0, "binomial_identity_check needs a > 0")
    if m > 20:
        raise ResourceCap(f"m = {m} exceeds 20 (2^m outcomes)")
    total = Fraction(0)
    for outcome in itertools.product((0, 1), repeat=m):
        if outcome[0] != 1:
            continue  # G = 1 means the first trial succeeds
        g = 1
        total += a ** (g + sum(outcome[g:]))
    lhs = total / 2**m
    rhs = a / (a + 1) * ((a + 1) / 2) ** m
    return IdentityCheck(m, a, lhs, rhs)


AGGREGATES = {
    "rows": expected_rows,
    "unrestricted": expected_unrestricted,
    "diagonal_ones": expected_diag_ones,
    "ss_pairs": expected_ss,
    "ww_pairs": expected_ww,
}

POSITIONAL = {
    "p_south": (p_south, 1),
    "p_ss": (p_ss, 2),
    "p_ww": (p_ww, 2),
    "p_g1": (p_g1, 1),
}


@dataclass(frozen=True)
class FormulaTable:
    n: int
    values: dict  # statistic -> Fraction
    positional: dict  # p_* -> {k: Fraction}

    @classmethod
    def build(cls, n: int) -> FormulaTable:
        _need(n >= 1, "FormulaTable needs n >= 1")
        values = {}
        for name, fn in AGGREGATES.items():
            if name in ("ss_pairs", "ww_pairs") and n < 2:
                continue
            values[name] = fn(n)
        positional = {
            name: {k: fn(n, k) for k in range(low, n + 1)}
            for name, (fn, low) in POSITIONAL.items()
        }
        return cls(n, values, positional)

    def sum_checks(self) -> dict[str, bool]:
        """Per-position vectors must add up to the aggregate closed forms."""
        pairs = {
            "p_south": "rows",
            "p_ss": "ss_pairs",
            "p_ww": "ww_pairs",
            "p_g1": "diagonal_ones",
        }
        return {
            p: sum(self.positional[p].values(), Fraction(0)) == self.values[agg]
            for p, agg in pairs.items()
            if agg in self.values
        }

    def records(self) -> list[dict]:
        out = []
        for name, v in self.values.items():
            out.append(_record(self.n, name, None, v))
        for name, vec in self.positional.items():
            for k, v in vec.items():
                out.append(_record(self.n, name, k, v))
        return out


def _record(n, name, k, v: Fraction) -> dict:
    return {
        "n": n,
        "statistic": name,
        "k": "" if k is None else k,
        "numerator": v.numerator,
        "denominator": v.denominator,
        "decimal": f"{float(v):.12g}",
    }
