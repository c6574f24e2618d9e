"""Stochastic validators for the queue analytics and the switching dynamics.

Two independent simulators cross-check the closed forms:

* ``simulate_priority_queue`` replays the order book event by event.  Which
  arrival each buy clears depends only on the i.i.d. event-type sequence, not
  on the event times, so types are drawn in bulk and the walk tracks queue
  contents; waits are recovered from the cumulative event clock.  Buys that
  find the book empty are discarded and counted.
* ``simulate_agents`` runs the finite-population switching process exactly
  (event-driven, no time discretisation): with k of N agents on the cheap
  price, the next switch happens at total rate k alpha1(k/N) + (N-k)
  alpha2(k/N) and moves one agent.

Every run owns a numpy PCG64 generator seeded from the config's 64-bit seed.
Replication streams are derived deterministically: child seed i is the i-th
64-bit word of ``SeedSequence(base_seed).generate_state``, so replications
are independent, reproducible, and order-insensitive.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

import numpy as np

from .dynamics import rates_at
from .model import ModelParams, check_ratio

__all__ = [
    "QueueSimConfig",
    "QueueSimStats",
    "PooledQueueStats",
    "AgentSimConfig",
    "AgentSimPath",
    "simulate_priority_queue",
    "simulate_agents",
    "replication_seeds",
    "replicate",
    "pool_queue_stats",
]

_EVENT_CHUNK = 1 << 15


@dataclass(frozen=True)
class QueueSimConfig:
    """One order-book run: execute n_orders sells, measure after warmup_orders."""

    params: ModelParams
    p: float = 0.9
    n_orders: int = 100_000
    warmup_orders: int = 10_000
    seed: int = 12345

    def __post_init__(self):
        check_ratio(self.p, "p")
        if self.warmup_orders < 0:
            raise ValueError("warmup_orders must be >= 0")
        if self.n_orders <= self.warmup_orders:
            raise ValueError("n_orders must exceed warmup_orders")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class QueueSimStats:
    """Per-class empirical waits; means/sems are nan for a class with no samples."""

    mean_wait_1: float
    mean_wait_2: float
    sem_1: float
    sem_2: float
    n_1: int
    n_2: int
    discarded_buys: int


@dataclass(frozen=True)
class PooledQueueStats:
    """Across-replication aggregate: mean of replication means, sem across them."""

    mean_wait_1: float
    mean_wait_2: float
    sem_1: float
    sem_2: float
    n_1: int
    n_2: int
    discarded_buys: int
    n_replications: int


def _mean_sem(count: int, total: float, total_sq: float) -> tuple[float, float]:
    if count == 0:
        return math.nan, math.nan
    mean = total / count
    if count < 2:
        return mean, math.nan
    var = max(0.0, (total_sq - count * mean * mean) / (count - 1))
    return mean, math.sqrt(var / count)


def simulate_priority_queue(config: QueueSimConfig) -> QueueSimStats:
    """Event-driven replay of the two-class priority book.

    Sells arrive at rate lam and join the priority queue with probability p;
    buys arrive at rate mu and clear the head of the priority queue, else the
    head of the other queue, else are discarded.  An order's wait is the span
    from its arrival to the buy that clears it.  Waits are recorded only for
    sells that arrive after the first warmup_orders sell arrivals, to damp
    the empty-book transient; the run stops once n_orders sells have executed.
    """
    params = config.params
    rng = np.random.default_rng(config.seed)
    p_sell = params.lam / (params.lam + params.mu)
    clock_scale = 1.0 / (params.lam + params.mu)

    queue1: deque[tuple[int, float]] = deque()
    queue2: deque[tuple[int, float]] = deque()
    clock = 0.0
    sell_arrivals = 0
    executed = 0
    discarded = 0
    n1 = n2 = 0
    sum1 = sum2 = 0.0
    sumsq1 = sumsq2 = 0.0

    warmup = config.warmup_orders
    target = config.n_orders
    ratio = config.p

    while executed < target:
        gaps = rng.exponential(clock_scale, _EVENT_CHUNK)
        kind_draw = rng.random(_EVENT_CHUNK)
        class_draw = rng.random(_EVENT_CHUNK)  # drawn per event to keep the stream layout fixed
        epochs = clock + np.cumsum(gaps)
        clock = float(epochs[-1])
        for i in range(_EVENT_CHUNK):
            if kind_draw[i] < p_sell:
                sell_arrivals += 1
                entry = (sell_arrivals, epochs[i])
                if class_draw[i] < ratio:
                    queue1.append(entry)
                else:
                    queue2.append(entry)
            elif queue1:
                number, arrived = queue1.popleft()
                executed += 1
                if number > warmup:
                    wait = epochs[i] - arrived
                    n1 += 1
                    sum1 += wait
                    sumsq1 += wait * wait
                if executed == target:
                    break
            elif queue2:
                number, arrived = queue2.popleft()
                executed += 1
                if number > warmup:
                    wait = epochs[i] - arrived
                    n2 += 1
                    sum2 += wait
                    sumsq2 += wait * wait
                if executed == target:
                    break
            else:
                discarded += 1

    mean1, sem1 = _mean_sem(n1, sum1, sumsq1)
    mean2, sem2 = _mean_sem(n2, sum2, sumsq2)
    return QueueSimStats(
        mean_wait_1=mean1,
        mean_wait_2=mean2,
        sem_1=sem1,
        sem_2=sem2,
        n_1=n1,
        n_2=n2,
        discarded_buys=discarded,
    )


@dataclass(frozen=True)
class AgentSimConfig:
    """One finite-population run of N agents over [0, t_end]."""

    params: ModelParams
    n_agents: int = 10_000
    p0: float = 0.9
    t_end: float = 10.0
    seed: int = 12345

    def __post_init__(self):
        check_ratio(self.p0, "p0")
        if self.n_agents < 1:
            raise ValueError("n_agents must be >= 1")
        if not (self.t_end > 0.0 and math.isfinite(self.t_end)):
            raise ValueError("t_end must be positive and finite")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class AgentSimPath:
    """Empirical cheap-price fraction over time; jumps by exactly 1/N."""

    times: np.ndarray
    fractions: np.ndarray

    def at(self, t) -> np.ndarray:
        """Right-continuous step-function value(s) at time(s) t >= 0."""
        idx = np.searchsorted(self.times, t, side="right") - 1
        return self.fractions[np.maximum(idx, 0)]


def simulate_agents(config: AgentSimConfig) -> AgentSimPath:
    """Exact event-driven run of the N-agent switching process.

    The initial count is round(p0 * N).  In state k the total switch rate is
    k alpha1(k/N) + (N-k) alpha2(k/N); the waiting time to the next switch is
    exponential and the direction is chosen proportionally.  Stops at t_end,
    or early if every rate vanishes (absorbed, possible only for beta = 0).
    """
    params = config.params
    n = config.n_agents
    rng = np.random.default_rng(config.seed)

    k = int(round(config.p0 * n))
    t = 0.0
    times = [0.0]
    counts = [k]
    while True:
        rates = rates_at(params, k / n)
        rate_down = k * float(rates.alpha1)
        rate_up = (n - k) * float(rates.alpha2)
        total = rate_down + rate_up
        if total <= 0.0:
            break
        t += rng.exponential(1.0 / total)
        if t > config.t_end:
            break
        if rng.random() * total < rate_up:
            k += 1
        else:
            k -= 1
        times.append(t)
        counts.append(k)
    return AgentSimPath(np.asarray(times), np.asarray(counts, dtype=float) / n)


def replication_seeds(base_seed: int, n_replications: int) -> list[int]:
    """Child seed i = i-th 64-bit word of SeedSequence(base_seed)."""
    if n_replications < 1:
        raise ValueError("n_replications must be >= 1")
    words = np.random.SeedSequence(base_seed).generate_state(n_replications, np.uint64)
    return [int(w) for w in words]


T = TypeVar("T")


def replicate(run: Callable[[int], T], n_replications: int, base_seed: int) -> list[T]:
    """Run independent replications with deterministically derived seeds.

    ``run`` receives the child seed for its replication.  Replications are
    independent by stream construction, so executing them in any order (or in
    parallel) yields the same list; results are returned in replication order.
    """
    return [run(seed) for seed in replication_seeds(base_seed, n_replications)]


def pool_queue_stats(stats: Sequence[QueueSimStats]) -> PooledQueueStats:
    """Aggregate replications: unweighted mean of replication means, and the
    standard error of those means (classes with no samples are skipped)."""
    if not stats:
        raise ValueError("stats must be non-empty")

    def pool(values: list[float], sems: list[float]) -> tuple[float, float]:
        kept = [v for v in values if not math.isnan(v)]
        if not kept:
            return math.nan, math.nan
        mean = float(np.mean(kept))
        if len(kept) >= 2:
            return mean, float(np.std(kept, ddof=1) / math.sqrt(len(kept)))
        return mean, sems[values.index(kept[0])]

    mean1, sem1 = pool([s.mean_wait_1 for s in stats], [s.sem_1 for s in stats])
    mean2, sem2 = pool([s.mean_wait_2 for s in stats], [s.sem_2 for s in stats])
    return PooledQueueStats(
        mean_wait_1=mean1,
        mean_wait_2=mean2,
        sem_1=sem1,
        sem_2=sem2,
        n_1=sum(s.n_1 for s in stats),
        n_2=sum(s.n_2 for s in stats),
        discarded_buys=sum(s.discarded_buys for s in stats),
        n_replications=len(stats),
    )
