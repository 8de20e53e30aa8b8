"""Random type-B tableaux under the uniform measure.

Two generators share the growth process:

* ``sample_uniform`` is exact.  The number of unrestricted rows is a Markov
  chain along the growth, so big-integer completion counts ``N[k][u]`` give
  the exact probability of every step.
* ``sample_weighted`` picks uniformly among the children at each step and
  returns the likelihood ratio against the uniform law, which makes it cheap
  for large ``n`` at the price of a self-normalized estimator.

Random streams come from ``random.Random`` instances (MT19937 state); the
module never touches the global RNG.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .core import SOUTH, STAT_FIELDS, Tableau, stats
from .errors import DomainError, ResourceCap

UCHAIN_CAP = 300


def make_rng(seed: int | None, stream: int = 0) -> random.Random:
    """Independent, reproducible stream ``stream`` derived from ``seed``."""
    ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    return random.Random(int.from_bytes(ss.generate_state(4, np.uint64).tobytes(), "little"))


@dataclass(frozen=True)
class UChainTable:
    n: int
    counts: tuple[tuple[int, ...], ...]  # counts[k][u], 0 <= u <= k

    def __getitem__(self, k: int) -> tuple[int, ...]:
        return self.counts[k]

    @property
    def total(self) -> int:
        return self.counts[0][0]


def _west_children(u: int, j: int) -> int:
    """West children of a U = u state whose new U is 1 + j."""
    return 2 * math.comb(u, j) - (j == u)


def build_uchain(n: int, cap: int = UCHAIN_CAP) -> UChainTable:
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n > cap:
        raise ResourceCap(f"n = {n} exceeds the U-chain cap {cap}")
    return _build_uchain(n)


@lru_cache(maxsize=16)
def _build_uchain(n: int) -> UChainTable:
    rows: list[list[int]] = [[0] * (k + 1) for k in range(n + 1)]
    rows[n] = [1] * (n + 1)
    for k in range(n - 1, -1, -1):
        nxt = rows[k + 1]
        for u in range(k + 1):
            total = nxt[u + 1]
            for j in range(u + 1):
                total += _west_children(u, j) * nxt[1 + j]
            rows[k][u] = total
    # Only U = 0 is reachable at k = 0 but the table keeps the full triangle.
    return UChainTable(n, tuple(tuple(r) for r in rows))


def _pick(rng: random.Random, weights) -> int:
    r = rng.randrange(sum(weights))
    for i, w in enumerate(weights):
        if r < w:
            return i
        r -= w
    raise AssertionError("unreachable")


def draw_fill(u: int, j: int, diagonal: int, rng: random.Random) -> str:
    """Uniform fill of ``u + 1`` free cells with diagonal bit ``diagonal`` and new U = 1 + j."""
    if diagonal:
        ones = set(rng.sample(range(u), j))
        return "1" + "".join("1" if i in ones else "0" for i in range(u))
    # Diagonal 0: g leading zeros stay unrestricted, then the topmost 1, then
    # j - g further ones among the remaining u - 1 - g cells.
    g = _pick(rng, [math.comb(u - 1 - g, j - g) for g in range(j + 1)])
    rest = u - 1 - g
    ones = set(rng.sample(range(rest), j - g))
    return "0" + "0" * g + "1" + "".join("1" if i in ones else "0" for i in range(rest))


def _draw_history(n: int, rng: random.Random, table: UChainTable):
    history, u_trace, g_trace = [], [], []
    u = 0
    for k in range(n):
        nxt = table[k + 1]
        # Outcome order: south, then (diagonal 1, j), then (diagonal 0, j).
        weights = [nxt[u + 1]]
        weights += [math.comb(u, j) * nxt[1 + j] for j in range(u + 1)]
        weights += [(math.comb(u, j) - (j == u)) * nxt[1 + j] for j in range(u + 1)]
        i = _pick(rng, weights)
        if i == 0:
            history.append(SOUTH)
            g_trace.append(None)
            u += 1
        else:
            i -= 1
            diagonal, j = (1, i) if i <= u else (0, i - u - 1)
            fill = draw_fill(u, j, diagonal, rng)
            history.append(fill)
            g_trace.append(fill.index("1") + 1)
            u = 1 + j
        u_trace.append(u)
    return tuple(history), tuple(u_trace), tuple(g_trace)


def sample_uniform(n: int, rng: random.Random, table: UChainTable | None = None) -> Tableau:
    """Draw one tableau of size ``n`` exactly uniformly."""
    if table is None or table.n != n:
        table = build_uchain(n)
    return Tableau(*_draw_history(n, rng, table))


def _weighted_history(n: int, rng: random.Random):
    history, u_trace, g_trace = [], [], []
    u = 0
    log_w = 0.0
    for k in range(1, n + 1):
        width = u + 1
        log_w += width * math.log(2) - math.log(2 * k)
        v = rng.getrandbits(width)
        if v == 0:
            # The all-zero fill is not a column; its slot stands for the south child.
            history.append(SOUTH)
            g_trace.append(None)
            u += 1
        else:
            fill = format(v, f"0{width}b")
            g = fill.index("1") + 1
            history.append(fill)
            g_trace.append(g)
            u = fill.count("1") + max(g - 2, 0)
        u_trace.append(u)
    return (tuple(history), tuple(u_trace), tuple(g_trace)), log_w


def sample_weighted(n: int, rng: random.Random) -> tuple[Tableau, float]:
    """Grow uniformly among children; return the tableau and its importance weight.

    The weight is prod_k 2^{U_{k-1}+1} / (2k), accumulated in log space.
    """
    if n < 1:
        raise DomainError("sample_weighted needs n >= 1")
    parts, log_w = _weighted_history(n, rng)
    return Tableau(*parts), math.exp(log_w)


@dataclass(frozen=True)
class EstimateReport:
    statistic: str
    n: int
    num_samples: int
    seed: int | None
    mean: float
    std_error: float
    ess: float
    mean_weight: float
    weight_std_error: float
    # Sufficient statistics so independent streams pool exactly.
    sum_w: float = 0.0
    sum_w2: float = 0.0
    sum_wx: float = 0.0
    sum_w2x: float = 0.0
    sum_w2x2: float = 0.0

    def merge(self, other: EstimateReport) -> EstimateReport:
        if (self.statistic, self.n) != (other.statistic, other.n):
            raise ValueError("can only pool reports for the same statistic and n")
        return _report(
            self.statistic,
            self.n,
            self.num_samples + other.num_samples,
            self.seed,
            self.sum_w + other.sum_w,
            self.sum_w2 + other.sum_w2,
            self.sum_wx + other.sum_wx,
            self.sum_w2x + other.sum_w2x,
            self.sum_w2x2 + other.sum_w2x2,
        )

    def as_record(self) -> dict:
        return {
            "statistic": self.statistic,
            "n": self.n,
            "num_samples": self.num_samples,
            "seed": self.seed,
            "mean": self.mean,
            "std_error": self.std_error,
            "ess": self.ess,
            "mean_weight": self.mean_weight,
            "weight_std_error": self.weight_std_error,
        }


def _report(statistic, n, count, seed, sw, sw2, swx, sw2x, sw2x2) -> EstimateReport:
    mean = swx / sw
    # Delta-method variance of the ratio estimator sum(w x) / sum(w).
    resid = max(sw2x2 - 2 * mean * sw2x + mean * mean * sw2, 0.0)
    se = math.sqrt(resid) / sw
    mean_w = sw / count
    var_w = max(sw2 / count - mean_w * mean_w, 0.0) * count / (count - 1)
    return EstimateReport(
        statistic=statistic,
        n=n,
        num_samples=count,
        seed=seed,
        mean=mean,
        std_error=se,
        ess=sw * sw / sw2,
        mean_weight=mean_w,
        weight_std_error=math.sqrt(var_w / count),
        sum_w=sw,
        sum_w2=sw2,
        sum_wx=swx,
        sum_w2x=sw2x,
        sum_w2x2=sw2x2,
    )


METHODS = ("weighted", "uniform")


def _scored_draws(n: int, num_samples: int, rng: random.Random, method: str):
    """Yield ``(weight, StatRecord)`` pairs from the chosen sampler."""
    if method == "weighted":
        for _ in range(num_samples):
            parts, log_w = _weighted_history(n, rng)
            yield math.exp(log_w), stats(Tableau(*parts))
    elif method == "uniform":
        table = build_uchain(n)
        for _ in range(num_samples):
            yield 1.0, stats(Tableau(*_draw_history(n, rng, table)))
    else:
        raise DomainError(f"unknown method {method!r}; choose from {METHODS}")


def estimate_all(
    n: int,
    num_samples: int,
    seed: int | None,
    stream: int = 0,
    method: str = "weighted",
) -> dict[str, EstimateReport]:
    """Score one sample stream on every StatRecord field.

    ``method="weighted"`` is the self-normalized importance sampler;
    ``method="uniform"`` uses exact uniform draws (all weights 1).
    """
    if num_samples < 2:
        raise DomainError("estimate needs at least 2 samples")
    if n < 1:
        raise DomainError("estimate needs n >= 1")
    rng = make_rng(seed, stream)
    sums = {f: [0.0] * 3 for f in STAT_FIELDS}
    sw = sw2 = 0.0
    for w, rec in _scored_draws(n, num_samples, rng, method):
        w2 = w * w
        sw += w
        sw2 += w2
        for f in STAT_FIELDS:
            x = getattr(rec, f)
            acc = sums[f]
            acc[0] += w * x
            acc[1] += w2 * x
            acc[2] += w2 * x * x
    return {
        f: _report(f, n, num_samples, seed, sw, sw2, *sums[f]) for f in STAT_FIELDS
    }


def estimate(
    n: int,
    statistic: str,
    num_samples: int,
    seed: int | None,
    stream: int = 0,
    method: str = "weighted",
) -> EstimateReport:
    """Estimate E_n[statistic]; deterministic for a given seed and stream."""
    if statistic not in STAT_FIELDS:
        raise DomainError(f"unknown statistic {statistic!r}")
    return estimate_all(n, num_samples, seed, stream, method)[statistic]


def pooled(reports: list[EstimateReport]) -> EstimateReport:
    out = reports[0]
    for r in reports[1:]:
        out = out.merge(r)
    return replace(out, seed=reports[0].seed)
