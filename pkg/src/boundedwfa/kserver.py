"""k-server problem: configurations, work functions over the set of interest,
the WFA step, and the exact offline optimum.

Configurations are sorted tuples of point indices (multisets: servers may share
a point). A work function is stored as a flat array over every size-k multiset
of the set of interest, in colex order of local indices (see ``configs``).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import kernels
from .configs import config_index, n_multisets
from .metric import MetricSpace
from .mts import TIE_TOL, InstanceError
from .trace import PhaseRecord, RunTrace, TraceRow

# Exact-DP guard for the offline optimum.
MAX_OPT_CONFIGS = 1_000_000
MAX_OPT_CELLS = 50_000_000

Configuration = tuple


class CapacityError(RuntimeError):
    """An exact oracle was asked for an instance beyond its documented guard."""


def canonical(points) -> Configuration:
    return tuple(sorted(int(p) for p in points))


@dataclass(frozen=True, eq=False)
class KServerInstance:
    space: MetricSpace
    k: int
    initial: Configuration
    requests: tuple

    def __post_init__(self):
        k = int(self.k)
        if k < 1:
            raise InstanceError("k must be at least 1")
        init = canonical(self.initial)
        if len(init) != k:
            raise InstanceError(f"initial configuration has {len(init)} servers, expected k={k}")
        reqs = tuple(int(r) for r in self.requests)
        n = self.space.n
        for p in init:
            if not 0 <= p < n:
                raise InstanceError(f"initial position {p} out of range [0, {n})")
        for i, r in enumerate(reqs):
            if not 0 <= r < n:
                raise InstanceError(f"request {i}: point {r} out of range [0, {n})")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "initial", init)
        object.__setattr__(self, "requests", reqs)

    def __len__(self) -> int:
        return len(self.requests)

    def sub(self, start: int, stop: int, initial) -> "KServerInstance":
        return KServerInstance(self.space, self.k, initial, self.requests[start:stop])


def config_distance(a, b, space: MetricSpace) -> float:
    """Minimum-cost perfect matching between two configurations."""
    if len(a) != len(b):
        raise InstanceError(f"configuration sizes differ: {len(a)} vs {len(b)}")
    if not a:
        return 0.0
    cost = space.dist[np.ix_(list(a), list(b))]
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum())


def distances_to(configs: np.ndarray, target, dist: np.ndarray) -> np.ndarray:
    """Matching distance from every row of ``configs`` to one ``target``.

    Rows and target are in the same index space as ``dist``.
    """
    k = configs.shape[1]
    target = np.asarray(target)
    if k > 6:
        return np.array([
            float(dist[np.ix_(row, target)][linear_sum_assignment(dist[np.ix_(row, target)])].sum())
            for row in configs
        ])
    best = np.full(len(configs), np.inf)
    for perm in itertools.permutations(range(k)):
        total = np.zeros(len(configs))
        for j, pj in enumerate(perm):
            total += dist[configs[:, j], target[pj]]
        np.minimum(best, total, out=best)
    return best


def _lowest_canonical(rows: np.ndarray) -> int:
    """Index of the lexicographically smallest row."""
    return int(np.lexsort(rows.T[::-1])[0])


@dataclass(frozen=True, eq=False)
class ConfigWorkFunction:
    k: int
    interest: tuple  # global point ids; position is the local index
    values: np.ndarray
    step: int = 0
    _local: dict = field(default=None, repr=False)
    _ids: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self._local is None:
            object.__setattr__(self, "_local", {p: i for i, p in enumerate(self.interest)})
        if self._ids is None:
            object.__setattr__(self, "_ids", np.asarray(self.interest, dtype=np.int64))

    @property
    def index(self):
        return config_index(self.k)

    def local_configs(self) -> np.ndarray:
        return self.index.configs(len(self.interest))

    def configurations(self) -> list[Configuration]:
        ids = np.asarray(self.interest)
        return [canonical(ids[row]) for row in self.local_configs()]

    @property
    def table(self) -> dict:
        return dict(zip(self.configurations(), self.values.tolist()))

    def rank(self, config) -> int:
        return self.index.rank(sorted(self._local[p] for p in config))

    def value(self, config) -> float:
        return float(self.values[self.rank(config)])

    def __contains__(self, point) -> bool:
        return point in self._local

    def minimum(self) -> float:
        return float(self.values.min())


def wf_init(space: MetricSpace, start, k: int | None = None) -> ConfigWorkFunction:
    """Work function of an empty history: distance from ``start``."""
    start = canonical(start)
    k = len(start) if k is None else k
    interest = tuple(sorted(set(start)))
    local = config_index(k).configs(len(interest))
    ids = np.asarray(interest)
    values = distances_to(ids[local], start, space.dist)
    return ConfigWorkFunction(k, interest, values, 0)


def extend_interest(wf: ConfigWorkFunction, r: int, space: MetricSpace) -> ConfigWorkFunction:
    """Add a point to the set of interest, filling the new rows by Lipschitz closure."""
    if r in wf:
        return wf
    m = len(wf.interest)
    idx = wf.index
    dr = space.dist[wf._ids, r]
    values = kernels.wf_extend(wf.values, idx.configs(m + 1), m, dr, idx.binom)
    local = dict(wf._local)
    local[r] = m
    return ConfigWorkFunction(
        wf.k, wf.interest + (r,), values, wf.step, local, np.append(wf._ids, r)
    )


def wf_absorb(wf: ConfigWorkFunction, r: int, space: MetricSpace) -> ConfigWorkFunction:
    """Work function after one more request at ``r``."""
    wf = extend_interest(wf, r, space)
    idx = wf.index
    dr = space.dist[wf._ids, r]
    values = kernels.wf_absorb(
        wf.values, idx.configs(len(wf.interest)), wf._local[r], dr, idx.binom
    )
    return ConfigWorkFunction(wf.k, wf.interest, values, wf.step + 1, wf._local, wf._ids)


def wfa_choose(wf: ConfigWorkFunction, current, r: int, space: MetricSpace):
    """WFA server choice against an already-updated work function.

    Returns ``(next_config, moved_distance, source_point)``; source is None when
    ``r`` is already covered.
    """
    current = canonical(current)
    if r in current:
        return current, 0.0, None
    best = None
    for x in sorted(set(current)):
        cand = list(current)
        cand.remove(x)
        cand = canonical(cand + [r])
        moved = float(space.dist[x, r])
        key = (wf.value(cand) + moved, moved, x)
        if best is None or _better(key, best[0]):
            best = (key, cand)
    (_, moved, x), nxt = best
    return nxt, moved, x


def _better(a, b) -> bool:
    if a[0] < b[0] - TIE_TOL:
        return True
    if a[0] > b[0] + TIE_TOL:
        return False
    if a[1] < b[1] - TIE_TOL:
        return True
    if a[1] > b[1] + TIE_TOL:
        return False
    return a[2] < b[2]


def wfa_kserver_step(wf: ConfigWorkFunction, current, r: int, space: MetricSpace):
    """``(next_config, new_work_function, moved_distance)`` for one request."""
    wf2 = wf_absorb(wf, r, space)
    nxt, moved, _ = wfa_choose(wf2, current, r, space)
    return nxt, wf2, moved


def wfa_run_kserver(instance: KServerInstance, algorithm: str = "wfa-full") -> RunTrace:
    """Full-history WFA. Requests already covered are not stored in the history."""
    kernels.warmup()
    space = instance.space
    trace = RunTrace("kserver", algorithm, meta={"initial_state": instance.initial})
    phase = PhaseRecord(0, 0, -1, instance.initial, instance.initial)
    current = instance.initial
    wf = wf_init(space, current)
    total = 0.0
    t0 = time.perf_counter_ns()
    for i, r in enumerate(instance.requests):
        covered = r in current
        cost = 0.0
        if not covered:
            current, wf, cost = wfa_kserver_step(wf, current, r, space)
            total += cost
            phase.cost += cost
            phase.history_len += 1
        phase.last_step = i
        trace.rows.append(
            TraceRow(i, r, 0, current, cost, total, covered, None, None, False,
                     time.perf_counter_ns() - t0)
        )
    phase.end_state = current
    trace.phases.append(phase)
    trace.meta["interest_size"] = len(wf.interest)
    return trace


def opt_offline_kserver(instance: KServerInstance) -> tuple[float, list[Configuration]]:
    """Exact offline optimum over all multisets of initial and requested points.

    Each step closes the previous table under single-server moves (k passes
    reach the matching distance), then keeps only configurations covering the
    request. The schedule is backtracked with the lexicographically lowest
    configuration on ties.
    """
    n, k = len(instance), instance.k
    if n == 0:
        return 0.0, []
    points = sorted(set(instance.initial) | set(instance.requests))
    m = len(points)
    nconf = n_multisets(m, k)
    if nconf > MAX_OPT_CONFIGS or nconf * (n + 1) > MAX_OPT_CELLS:
        raise CapacityError(
            f"offline optimum needs {nconf} configurations x {n + 1} steps; "
            f"guard is {MAX_OPT_CONFIGS} configurations and {MAX_OPT_CELLS} cells"
        )
    local = {p: i for i, p in enumerate(points)}
    idx = config_index(k)
    configs = idx.configs(m)
    dloc = np.ascontiguousarray(instance.space.dist[np.ix_(points, points)])
    table = np.empty((n + 1, nconf))
    table[0] = np.inf
    table[0, idx.rank([local[p] for p in instance.initial])] = 0.0
    for i, r in enumerate(instance.requests):
        cur = table[i]
        for _ in range(k):
            cur = kernels.relax(cur, configs, dloc, idx.binom)
        covers = (configs == local[r]).any(axis=1)
        table[i + 1] = np.where(covers, cur, np.inf)
    final = table[n]
    w = float(final.min())
    tied = np.flatnonzero(final <= w + TIE_TOL)
    c = int(tied[_lowest_canonical(configs[tied])])
    schedule = [None] * n
    ids = np.asarray(points)
    for i in range(n, 0, -1):
        schedule[i - 1] = canonical(ids[configs[c]])
        score = table[i - 1] + distances_to(configs, configs[c], dloc)
        tied = np.flatnonzero(score <= score.min() + TIE_TOL)
        c = int(tied[_lowest_canonical(configs[tied])])
    return w, schedule


def kserver_schedule_cost(instance: KServerInstance, schedule) -> float:
    if len(schedule) != len(instance):
        raise InstanceError(f"schedule has {len(schedule)} configurations for {len(instance)} requests")
    total, prev = 0.0, instance.initial
    for r, conf in zip(instance.requests, schedule):
        if r not in conf:
            raise InstanceError(f"configuration {conf} does not cover request {r}")
        total += config_distance(prev, conf, instance.space)
        prev = canonical(conf)
    return total


def interest_bound_D(interest, reference: int, space: MetricSpace) -> float:
    """Twice the largest distance from ``reference`` to a point of interest."""
    interest = list(interest)
    if reference not in interest:
        raise InstanceError(f"reference {reference} is not in the set of interest")
    return 2.0 * float(space.dist[reference, interest].max())


class InterestBound:
    """Online D for a growing set of interest; O(1) per added point."""

    def __init__(self, points, reference: int, space: MetricSpace):
        self.space = space
        self.reference = reference
        self.points = set(points)
        self.points.add(reference)
        self.D = interest_bound_D(self.points, reference, space)

    def add(self, p: int) -> float:
        if p not in self.points:
            self.points.add(p)
            self.D = max(self.D, 2.0 * float(self.space.dist[self.reference, p]))
        return self.D


def kserver_delta_cap(space: MetricSpace) -> float:
    """Global upper bound on D for any reference point: twice the diameter."""
    return 2.0 * space.diameter
