"""
Slotted queue simulator for Max-Weight style scheduling.

Every slot the scheduler picks a k-independent set using the current queue
lengths as node weights, then each queue evolves as
``q <- max(0, q + arrivals - served)`` with unit service for scheduled nodes.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, ParameterError
from .gcn import forward
from .graph import normalized_laplacian
from .kis import ScheduleSet, feasible_subsets, greedy_k_independent_set, is_k_independent

ARRIVAL_KINDS = ("bernoulli", "poisson", "constant")


@dataclass
class QueueState:
    q: np.ndarray
    t: int = 0

    @classmethod
    def empty(cls, n):
        return cls(np.zeros(n), 0)


@dataclass
class ArrivalProcess:
    kind: str
    rate: object  # scalar or per-node array
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ARRIVAL_KINDS:
            raise ParameterError(f"arrival kind must be one of {ARRIVAL_KINDS}, got {self.kind!r}")
        rate = np.asarray(self.rate, dtype=np.float64)
        if not np.all(np.isfinite(rate)) or np.any(rate < 0):
            raise ParameterError("arrival rates must be finite and >= 0")
        if self.kind == "bernoulli" and np.any(rate > 1):
            raise ParameterError("bernoulli arrival rates must be <= 1")

    @classmethod
    def parse(cls, text, seed=0):
        """From ``"kind:rate"``, e.g. ``"bernoulli:0.3"``."""
        kind, sep, rate = text.partition(":")
        if not sep:
            raise ParameterError(f"arrival spec must look like kind:rate, got {text!r}")
        try:
            return cls(kind, float(rate), seed)
        except ValueError:
            raise ParameterError(f"arrival rate is not a number: {rate!r}") from None

    def sampler(self, n):
        rate = np.broadcast_to(np.asarray(self.rate, dtype=np.float64), (n,)).copy()
        rng = np.random.default_rng(self.seed)
        if self.kind == "bernoulli":
            return lambda: (rng.random(n) < rate).astype(np.float64)
        if self.kind == "poisson":
            return lambda: rng.poisson(rate).astype(np.float64)
        return lambda: rate.copy()


@dataclass
class SimReport:
    horizon: int
    mean_queue: np.ndarray   # time-averaged queue per node
    max_queue: float
    violations: int
    total_queue: np.ndarray = field(repr=False)  # per-slot total after the update
    max_per_slot: np.ndarray = field(repr=False)


def step(state, arrivals, schedule, g):
    """Apply one slot of queue dynamics. The schedule must be feasible for ``g``."""
    if not is_k_independent(g, schedule.members, schedule.k):
        raise ContractViolation(f"schedule is not {schedule.k}-independent at slot {state.t}")
    arrivals = np.asarray(arrivals, dtype=np.float64)
    served = schedule.members.astype(np.float64)
    q = np.maximum(0.0, state.q + arrivals - served)
    return QueueState(q, state.t + 1)


class GreedyScheduler:
    name = "greedy"

    def __init__(self, g, k):
        self.g, self.k = g, k

    def __call__(self, q):
        return greedy_k_independent_set(self.g, q, self.k)


class GcnGreedyScheduler:
    """Greedy on ``pi * w`` with ``w`` the queues scaled to [0, 1] by their maximum."""

    name = "gcn-greedy"

    def __init__(self, g, k, model):
        self.g, self.k, self.model = g, k, model
        self.lap = normalized_laplacian(g)

    def __call__(self, q):
        top = q.max()
        w = q / top if top > 0 else q
        pi, _ = forward(self.model, self.g, self.lap, weights=w)
        return greedy_k_independent_set(self.g, pi * w, self.k)


class ExactScheduler:
    """Max-Weight by enumeration; the feasible sets are listed once up front."""

    name = "exact"

    def __init__(self, g, k):
        self.g, self.k = g, k
        self.subsets = feasible_subsets(g, k)
        self._float = self.subsets.astype(np.float64)

    def __call__(self, q):
        i = int(np.argmax(self._float @ q))
        return ScheduleSet(self.subsets[i].copy(), self.k)


def make_scheduler(kind, g, k, model=None):
    if kind == "greedy":
        return GreedyScheduler(g, k)
    if kind == "gcn-greedy":
        if model is None:
            raise ParameterError("gcn-greedy scheduler needs a model")
        return GcnGreedyScheduler(g, k, model)
    if kind == "exact":
        return ExactScheduler(g, k)
    raise ParameterError(f"unknown scheduler {kind!r}")


def run(g, k, arrivals, scheduler="greedy", horizon=1000, model=None):
    """Simulate ``horizon`` slots from empty queues.

    ``scheduler`` is a name (``greedy``, ``gcn-greedy``, ``exact``) or a
    callable mapping the queue vector to a ScheduleSet.
    """
    if horizon < 1:
        raise ParameterError(f"horizon must be >= 1, got {horizon}")
    if isinstance(scheduler, str):
        scheduler = make_scheduler(scheduler, g, k, model)
    sample = arrivals.sampler(g.n)
    state = QueueState.empty(g.n)
    qsum = np.zeros(g.n)
    totals = np.empty(horizon)
    maxes = np.empty(horizon)
    for t in range(horizon):
        a = sample()
        sched = scheduler(state.q)
        state = step(state, a, sched, g)
        qsum += state.q
        totals[t] = state.q.sum()
        maxes[t] = state.q.max()
    return SimReport(horizon, qsum / horizon, float(maxes.max()), 0, totals, maxes)


def growth_slope(series, tail=0.5):
    """Least-squares slope per slot over the last ``tail`` fraction of ``series``."""
    series = np.asarray(series, dtype=np.float64)
    start = int(len(series) * (1.0 - tail))
    y = series[start:]
    if y.size < 2:
        return 0.0
    x = np.arange(y.size, dtype=np.float64)
    return float(np.polyfit(x, y, 1)[0])


def report_csv(report, window=1):
    """Per-slot (``window == 1``) or windowed queue totals as CSV text."""
    lines = ["slot,total_queue,max_queue"]
    for start in range(0, report.horizon, window):
        stop = min(report.horizon, start + window)
        total = report.total_queue[start:stop].mean()
        mx = report.max_per_slot[start:stop].max()
        lines.append(f"{start},{total!r},{mx!r}")
    return "\n".join(lines) + "\n"
