"""CSV serialization of run traces.

The first line is ``# `` followed by a JSON metadata object, the second the
column header; floats use 9 significant digits, empty cells mean "not
applicable", configurations and MTS cost vectors are space separated.
"""

from __future__ import annotations

import csv
import io
import json

from ..trace import PhaseRecord, RunTrace, TraceRow

COLUMNS = [
    "step",
    "request",
    "phase",
    "state",
    "step_cost",
    "cumulative_cost",
    "covered",
    "D",
    "threshold",
    "restarted",
    "elapsed_ns",
]


def fmt_float(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".9g")


def _fmt_seq(v) -> str:
    if isinstance(v, tuple):
        return " ".join(fmt_float(x) if isinstance(x, float) else str(x) for x in v)
    return str(v)


def _json_default(o):
    if isinstance(o, tuple):
        return list(o)
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(type(o).__name__)


def write_trace(trace: RunTrace, sink) -> None:
    """Write ``trace`` to a path or a text stream."""
    if isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__"):
        with open(sink, "w", newline="", encoding="utf-8") as fh:
            write_trace(trace, fh)
        return
    meta = dict(trace.meta)
    meta.update(kind=trace.kind, algorithm=trace.algorithm)
    sink.write("# " + json.dumps(meta, default=_json_default, sort_keys=True) + "\n")
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in trace.rows:
        w.writerow([
            r.step,
            _fmt_seq(r.request),
            r.phase,
            _fmt_seq(r.state),
            fmt_float(r.step_cost),
            fmt_float(r.cumulative_cost),
            int(r.covered),
            fmt_float(r.D),
            fmt_float(r.threshold),
            int(r.restarted),
            r.elapsed_ns,
        ])


def trace_to_csv(trace: RunTrace) -> str:
    buf = io.StringIO()
    write_trace(trace, buf)
    return buf.getvalue()


def _opt_float(s: str):
    return float(s) if s != "" else None


def parse_trace(text: str) -> RunTrace:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError("trace is missing its metadata line")
    meta = json.loads(lines[0][2:])
    kind = meta.pop("kind")
    algorithm = meta.pop("algorithm")
    reader = csv.reader(lines[1:])
    header = next(reader)
    if header != COLUMNS:
        raise ValueError(f"unexpected trace columns {header}")
    if kind == "kserver" and meta.get("initial_state") is not None:
        meta["initial_state"] = tuple(meta["initial_state"])
    trace = RunTrace(kind, algorithm, meta=meta)
    for cells in reader:
        if kind == "kserver":
            request = int(cells[1])
            state = tuple(int(p) for p in cells[3].split())
        else:
            request = tuple(float(c) for c in cells[1].split())
            state = int(cells[3])
        trace.rows.append(TraceRow(
            int(cells[0]), request, int(cells[2]), state, float(cells[4]), float(cells[5]),
            cells[6] == "1", _opt_float(cells[7]), _opt_float(cells[8]), cells[9] == "1",
            int(cells[10]),
        ))
    trace.phases = rebuild_phases(trace)
    return trace


def read_trace(path) -> RunTrace:
    with open(path, encoding="utf-8") as fh:
        return parse_trace(fh.read())


def rebuild_phases(trace: RunTrace) -> list[PhaseRecord]:
    """Phase records implied by the per-step rows."""
    forced = set(trace.meta.get("forced") or ())
    state = trace.meta.get("initial_state")
    phases: list[PhaseRecord] = []
    for row in trace.rows:
        if not phases or row.phase != phases[-1].index:
            phases.append(PhaseRecord(row.phase, row.step, -1, state, state))
        ph = phases[-1]
        ph.last_step = row.step
        ph.end_state = row.state
        ph.cost += row.step_cost
        ph.history_len += 0 if row.covered else 1
        if row.restarted:
            ph.restarted = True
            ph.forced = row.step in forced and not (
                not row.covered and row.threshold is not None and ph.cost >= row.threshold
            )
        state = row.state
    if not phases:
        phases.append(PhaseRecord(0, 0, -1, state, state))
    return phases
