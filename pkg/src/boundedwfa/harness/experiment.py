"""Experiment runners, trace summaries and cross-algorithm reports."""

from __future__ import annotations

import csv
import io
import time

import numpy as np

from ..kserver import (
    CapacityError,
    KServerInstance,
    config_distance,
    opt_offline_kserver,
    wfa_run_kserver,
)
from ..mts import opt_offline_mts, wfa_run_mts
from ..phases import PhaseParams, run_phased
from ..trace import PhaseRecord, RunTrace, TraceRow
from .tracefile import fmt_float, write_trace

ALGORITHMS = ("wfa-full", "wfa-bounded", "opt")


def opt_offline(instance):
    if isinstance(instance, KServerInstance):
        return opt_offline_kserver(instance)
    return opt_offline_mts(instance)


def opt_trace(instance) -> RunTrace:
    """The offline optimum laid out as a trace (elapsed columns are zero)."""
    kind = "kserver" if isinstance(instance, KServerInstance) else "mts"
    t0 = time.perf_counter_ns()
    _, schedule = opt_offline(instance)
    trace = RunTrace(kind, "opt", meta={"initial_state": instance.initial})
    trace.meta["oracle_ns"] = time.perf_counter_ns() - t0
    dist = instance.space.dist
    prev, total = instance.initial, 0.0
    phase = PhaseRecord(0, 0, -1, prev, prev)
    for i, state in enumerate(schedule):
        if kind == "kserver":
            r = instance.requests[i]
            covered = r in prev
            cost = config_distance(prev, state, instance.space)
            request = r
        else:
            costs = instance.requests[i]
            covered = False
            cost = float(dist[prev, state] + costs[state])
            request = tuple(costs.tolist())
        total += cost
        phase.cost += cost
        phase.history_len += 0 if covered else 1
        phase.last_step = i
        trace.rows.append(TraceRow(i, request, 0, state, cost, total, covered, None, None, False, 0))
        prev = state
    phase.end_state = prev
    trace.phases.append(phase)
    return trace


def run_experiment(instance, algorithm: str, params: PhaseParams | None = None, sink=None,
                   force_restart_at=(), with_opt: bool = True, meta: dict | None = None):
    """Run one algorithm; returns ``(trace, summary)`` and writes the CSV to ``sink``."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")
    params = params or PhaseParams()
    if algorithm == "wfa-full":
        runner = wfa_run_kserver if isinstance(instance, KServerInstance) else wfa_run_mts
        trace = runner(instance)
    elif algorithm == "wfa-bounded":
        trace = run_phased(instance, params, force_restart_at=force_restart_at)
    else:
        trace = opt_trace(instance)
    if meta:
        trace.meta.update(meta)
    opt_cost = None
    if algorithm == "opt":
        opt_cost = trace.total_cost
    elif with_opt:
        try:
            opt_cost = opt_offline(instance)[0]
        except CapacityError:
            opt_cost = None
    if opt_cost is not None:
        trace.meta["opt_cost"] = opt_cost
    if sink is not None:
        write_trace(trace, sink)
    return trace, summarize(trace, opt_cost)


def _pct(times, q) -> float | None:
    if len(times) == 0:
        return None
    return float(np.percentile(np.asarray(times, dtype=np.float64), q))


def quarter_times(trace: RunTrace) -> list[list[int]]:
    return [list(q) for q in np.array_split(np.asarray(trace.step_times_ns(), dtype=np.int64), 4)]


def summarize(trace: RunTrace, opt_cost: float | None = None) -> dict:
    """Summary statistics computed from the rows alone (so a re-parsed CSV agrees)."""
    if opt_cost is None:
        opt_cost = trace.meta.get("opt_cost")
    total = trace.total_cost
    history: dict[int, int] = {}
    phases = set()
    for row in trace.rows:
        phases.add(row.phase)
        history[row.phase] = history.get(row.phase, 0) + (0 if row.covered else 1)
    times = trace.step_times_ns()
    if opt_cost is None:
        ratio = None
    elif opt_cost > 0:
        ratio = total / opt_cost
    else:
        ratio = 1.0 if total == 0 else float("inf")
    out = {
        "algorithm": trace.algorithm,
        "steps": len(trace.rows),
        "total_cost": total,
        "opt_cost": opt_cost,
        "ratio": ratio,
        "phases": max(1, len(phases)),
        "restarts": sum(1 for r in trace.rows if r.restarted),
        "max_history": max(history.values(), default=0),
        "p50_ns": _pct(times, 50),
        "p99_ns": _pct(times, 99),
    }
    if trace.algorithm != "opt":
        for qi, q in enumerate(quarter_times(trace), start=1):
            out[f"q{qi}_p50_ns"] = _pct(q, 50)
            out[f"q{qi}_p99_ns"] = _pct(q, 99)
    return out


REPORT_COLUMNS = [
    "instance", "algorithm", "steps", "total_cost", "opt_cost", "ratio", "phases",
    "restarts", "max_history", "p50_ns", "p99_ns",
    "q1_p99_ns", "q2_p99_ns", "q3_p99_ns", "q4_p99_ns",
]


def compare_report(traces: list[RunTrace], opt_cost: float | None = None):
    """Align traces of one instance; returns ``(csv_text, rows)``.

    The optimum comes from ``opt_cost``, an ``opt`` trace in the list, or the
    traces' metadata, in that order.
    """
    if not traces:
        raise ValueError("no traces to compare")
    ref = traces[0]
    for t in traces[1:]:
        if t.kind != ref.kind or [r.request for r in t.rows] != [r.request for r in ref.rows]:
            raise ValueError(f"trace {t.algorithm!r} is for a different instance")
        if t.meta.get("instance") != ref.meta.get("instance"):
            raise ValueError(f"trace {t.algorithm!r} is for a different instance")
    if opt_cost is None:
        for t in traces:
            if t.algorithm == "opt":
                opt_cost = t.total_cost
                break
    if opt_cost is None:
        opt_cost = next((t.meta["opt_cost"] for t in traces if "opt_cost" in t.meta), None)
    rows = []
    for t in traces:
        s = summarize(t, opt_cost)
        s["instance"] = t.meta.get("instance", "")
        rows.append(s)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for s in rows:
        w.writerow([
            fmt_float(s.get(c)) if isinstance(s.get(c), float) else ("" if s.get(c) is None else s.get(c))
            for c in REPORT_COLUMNS
        ])
    return buf.getvalue(), rows
