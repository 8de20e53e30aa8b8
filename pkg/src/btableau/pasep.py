"""Tableau borders as PASEP states, plus a small dense PASEP chain engine.

States are bit tuples indexed from site 1; 1 is an occupied site.  The state
index used by the generator reads the sites as a binary number with site 1 as
the most significant bit, so ``format(i, f"0{m}b")`` is the state's bitstring.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NotErgodic, ResourceCap, SolverFailure

FILLED = "•"  # •
EMPTY = "∘"  # ∘

DENSE_CAP = 12


@dataclass(frozen=True)
class PasepParams:
    alpha: float
    beta: float
    q: float

    def __post_init__(self):
        if min(self.alpha, self.beta, self.q) < 0:
            raise DomainError("PASEP rates must be nonnegative")


@dataclass(frozen=True)
class PasepState:
    sites: tuple[int, ...]

    def __str__(self) -> str:
        return "".join(FILLED if s else EMPTY for s in self.sites)

    @property
    def bits(self) -> str:
        return "".join(map(str, self.sites))

    @classmethod
    def from_text(cls, text: str) -> PasepState:
        table = {FILLED: 1, EMPTY: 0, "1": 1, "0": 0}
        try:
            return cls(tuple(table[c] for c in text))
        except KeyError as exc:
            raise DomainError(f"bad site character {exc.args[0]!r}") from None


def border_to_state(path: str) -> PasepState:
    """Doubled symmetric state: mirror of the steps, then the steps (S filled, W empty)."""
    half = tuple(1 if s == "S" else 0 for s in path)
    if len(half) != len(path) or any(s not in "SW" for s in path):
        raise DomainError(f"border must be a string of S and W: {path!r}")
    return PasepState(half[::-1] + half)


def occupancy_summary(state: PasepState) -> tuple[int, int, int]:
    """(filled sites, adjacent filled pairs, adjacent empty pairs)."""
    s = state.sites
    pairs = list(zip(s, s[1:]))
    return sum(s), sum(1 for a, b in pairs if a and b), sum(1 for a, b in pairs if not a and not b)


def _transitions(m: int, state: int, p: PasepParams):
    """Outgoing (target, rate) pairs of ``state`` on ``m`` sites."""
    first = 1 << (m - 1)
    out = []
    if not state & first and p.alpha > 0:
        out.append((state | first, p.alpha))
    if state & 1 and p.beta > 0:
        out.append((state & ~1, p.beta))
    for i in range(m - 1):
        left = 1 << (m - 1 - i)
        right = left >> 1
        occ_l, occ_r = bool(state & left), bool(state & right)
        if occ_l and not occ_r:
            out.append((state ^ left ^ right, 1.0))
        elif occ_r and not occ_l and p.q > 0:
            out.append((state ^ left ^ right, p.q))
    return out


def build_generator(m: int, params: PasepParams) -> np.ndarray:
    if m < 1:
        raise DomainError("need at least one site")
    if m > DENSE_CAP:
        raise ResourceCap(f"{m} sites exceeds the dense cap of {DENSE_CAP}")
    size = 1 << m
    Q = np.zeros((size, size))
    for s in range(size):
        for t, rate in _transitions(m, s, params):
            Q[s, t] += rate
        Q[s, s] = -Q[s].sum()
    return Q


def _residual(pi: np.ndarray, Q: np.ndarray) -> float:
    return float(np.abs(pi @ Q).max())


def stationary(m: int, params: PasepParams, tol: float = 1e-10) -> np.ndarray:
    """Stationary distribution, indexed like the generator."""
    if params.alpha <= 0 or params.beta <= 0:
        raise NotErgodic("alpha and beta must both be positive")
    Q = build_generator(m, params)
    size = Q.shape[0]
    # Replace one balance equation by the normalization.
    A = Q.T.copy()
    A[-1, :] = 1.0
    b = np.zeros(size)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        pi = None
    if pi is None or _residual(pi, Q) >= tol or pi.min() < -tol:
        pi = _power_iteration(Q)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    if _residual(pi, Q) >= tol:
        raise SolverFailure(f"stationary residual {_residual(pi, Q):.3g} above {tol}")
    return pi


def _power_iteration(Q: np.ndarray, tol: float = 1e-12, max_iter: int = 1_000_000) -> np.ndarray:
    lam = 1.05 * float(-Q.diagonal().min())
    P = np.eye(Q.shape[0]) + Q / lam
    pi = np.full(Q.shape[0], 1.0 / Q.shape[0])
    for _ in range(max_iter):
        nxt = pi @ P
        if np.abs(nxt - pi).max() < tol:
            return nxt
        pi = nxt
    raise SolverFailure("power iteration did not converge")


def site_marginals(m: int, pi: np.ndarray) -> np.ndarray:
    """Probability that each site (1..m) is occupied."""
    idx = np.arange(1 << m)
    return np.array([pi[(idx >> (m - 1 - i)) & 1 == 1].sum() for i in range(m)])


@dataclass(frozen=True)
class SimulationResult:
    occupancy: np.ndarray  # time-averaged occupation of each site
    std_error: np.ndarray  # batch-means standard error per site
    visits: np.ndarray  # number of entries into each state index
    time_in_state: np.ndarray
    events: int
    horizon: float


def simulate(
    m: int, params: PasepParams, horizon: float, seed: int | None, batches: int = 50
) -> SimulationResult:
    """Event-by-event (Gillespie) trajectory from the empty state."""
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    if m < 1:
        raise DomainError("need at least one site")
    rng = np.random.default_rng(seed)
    size = 1 << m
    table = [_transitions(m, s, params) for s in range(size)]
    targets = [np.array([t for t, _ in tr], dtype=np.int64) for tr in table]
    rates = [np.array([r for _, r in tr]) for tr in table]
    totals = [r.sum() for r in rates]
    cums = [np.cumsum(r) for r in rates]

    site_bits = np.array([[(s >> (m - 1 - i)) & 1 for i in range(m)] for s in range(size)], float)
    batch_len = horizon / batches
    batch_time = np.zeros((batches, size))
    time_in = np.zeros(size)
    visits = np.zeros(size, dtype=np.int64)
    state, t, events = 0, 0.0, 0
    visits[state] += 1

    def hold(s, start, end):
        # Spread the holding interval [start, end) over the batches it crosses.
        time_in[s] += end - start
        b = int(start // batch_len)
        while start < end and b < batches:
            stop = min(end, (b + 1) * batch_len)
            batch_time[b, s] += stop - start
            start = stop
            b += 1

    while t < horizon:
        total = totals[state]
        if total == 0:
            hold(state, t, horizon)
            break
        dt = rng.exponential(1.0 / total)
        end = min(t + dt, horizon)
        hold(state, t, end)
        t = end
        if t >= horizon:
            break
        k = int(np.searchsorted(cums[state], rng.random() * total, side="right"))
        state = int(targets[state][min(k, len(targets[state]) - 1)])
        visits[state] += 1
        events += 1

    occupancy = time_in @ site_bits / horizon
    per_batch = batch_time @ site_bits / batch_len
    se = per_batch.std(axis=0, ddof=1) / np.sqrt(batches)
    return SimulationResult(occupancy, se, visits, time_in, events, horizon)
