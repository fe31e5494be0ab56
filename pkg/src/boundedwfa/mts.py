"""Metrical task systems: cost evaluation, offline optimum, and the WFA."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .metric import MetricSpace
from .trace import PhaseRecord, RunTrace, TraceRow

TIE_TOL = 1e-9


class InstanceError(ValueError):
    pass


def infinite_cost_sentinel(space: MetricSpace, costs: np.ndarray) -> float:
    """A stand-in for an infinite task cost that exceeds every finite schedule cost."""
    finite = costs[np.isfinite(costs)]
    return float(space.diameter * len(costs) + finite.sum() + 1.0)


@dataclass(frozen=True, eq=False)
class MtsInstance:
    space: MetricSpace
    initial: int
    requests: np.ndarray  # requests[i, s] = cost of serving request i in state s

    def __post_init__(self):
        n_states = self.space.n
        costs = np.asarray(self.requests, dtype=np.float64)
        if costs.size == 0:
            costs = costs.reshape(0, n_states)
        if costs.ndim != 2 or costs.shape[1] != n_states:
            raise InstanceError(
                f"cost vectors must have length {n_states}, got shape {costs.shape}"
            )
        if np.any(np.isnan(costs)) or np.any(costs < 0):
            i, s = np.argwhere(np.isnan(costs) | (costs < 0))[0]
            raise InstanceError(f"request {i}: cost at state {s} must be >= 0")
        if not 0 <= int(self.initial) < n_states:
            raise InstanceError(f"initial state {self.initial} out of range [0, {n_states})")
        if np.any(np.isinf(costs)):
            costs = np.where(np.isinf(costs), infinite_cost_sentinel(self.space, costs), costs)
        costs.setflags(write=False)
        object.__setattr__(self, "requests", costs)
        object.__setattr__(self, "initial", int(self.initial))

    @property
    def n_states(self) -> int:
        return self.space.n

    def __len__(self) -> int:
        return len(self.requests)

    def sub(self, start: int, stop: int, initial: int) -> "MtsInstance":
        """The requests ``start..stop-1`` served from ``initial``."""
        return MtsInstance(self.space, initial, self.requests[start:stop])


@dataclass(frozen=True, eq=False)
class StateWorkFunction:
    values: np.ndarray
    step: int = 0

    @classmethod
    def start(cls, space: MetricSpace, state: int) -> "StateWorkFunction":
        return cls(np.array(space.dist[state], dtype=np.float64), 0)

    def __getitem__(self, s: int) -> float:
        return float(self.values[s])


def mts_sequence_cost(instance: MtsInstance, schedule) -> float:
    schedule = [int(s) for s in schedule]
    if len(schedule) != len(instance):
        raise InstanceError(
            f"schedule has {len(schedule)} states for {len(instance)} requests"
        )
    for s in schedule:
        if not 0 <= s < instance.n_states:
            raise InstanceError(f"state {s} out of range")
    dist = instance.space.dist
    total, prev = 0.0, instance.initial
    for i, s in enumerate(schedule):
        total += dist[prev, s] + instance.requests[i, s]
        prev = s
    return float(total)


def opt_offline_mts(instance: MtsInstance) -> tuple[float, list[int]]:
    """Exact offline optimum by forward DP and backtracking (lowest index on ties)."""
    n = len(instance)
    if n == 0:
        return 0.0, []
    dist = instance.space.dist
    table = np.empty((n + 1, instance.n_states))
    table[0] = np.inf
    table[0, instance.initial] = 0.0
    zeros = np.zeros(instance.n_states)
    for i in range(n):
        table[i + 1] = kernels.mts_absorb(table[i], zeros, dist) + instance.requests[i]
    schedule = [0] * n
    s = _first_min(table[n])
    total = float(table[n, s])
    for i in range(n, 0, -1):
        schedule[i - 1] = s
        s = _first_min(table[i - 1] + dist[:, s])
    return total, schedule


def _first_min(v: np.ndarray) -> int:
    return int(np.flatnonzero(v <= v.min() + TIE_TOL)[0])


def wfa_mts_step(wf: StateWorkFunction, current: int, cost_vector, space: MetricSpace):
    """One WFA move: update the work function, then pick the state minimizing
    ``w'(s) + d(current, s)``; ties go to the smaller ``w'(s)``, then the lower index.

    Returns ``(next_state, new_work_function, step_cost)``.
    """
    costs = np.asarray(cost_vector, dtype=np.float64)
    if costs.shape != (space.n,):
        raise InstanceError(f"cost vector must have length {space.n}, got {costs.shape}")
    new_values = kernels.mts_absorb(wf.values, costs, space.dist)
    score = new_values + space.dist[current]
    tied = np.flatnonzero(score <= score.min() + TIE_TOL)
    w = new_values[tied]
    nxt = int(tied[np.flatnonzero(w <= w.min() + TIE_TOL)[0]])
    step_cost = float(space.dist[current, nxt] + costs[nxt])
    return nxt, StateWorkFunction(new_values, wf.step + 1), step_cost


def wfa_run_mts(instance: MtsInstance, algorithm: str = "wfa-full") -> RunTrace:
    """Full-history WFA: one work function over the whole request sequence."""
    kernels.warmup()
    space = instance.space
    trace = RunTrace("mts", algorithm, meta={"initial_state": instance.initial})
    phase = PhaseRecord(0, 0, -1, instance.initial, instance.initial)
    wf = StateWorkFunction.start(space, instance.initial)
    state, total = instance.initial, 0.0
    t0 = time.perf_counter_ns()
    for i, costs in enumerate(instance.requests):
        state, wf, cost = wfa_mts_step(wf, state, costs, space)
        total += cost
        trace.rows.append(
            TraceRow(i, tuple(costs.tolist()), 0, state, cost, total, False, None, None,
                     False, time.perf_counter_ns() - t0)
        )
        phase.cost += cost
        phase.history_len += 1
        phase.last_step = i
    phase.end_state = state
    trace.phases.append(phase)
    return trace


def mts_delta(instance: MtsInstance) -> float:
    return instance.space.diameter
