"""Run traces: per-step rows plus per-phase boundary records."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, NamedTuple


class TraceRow(NamedTuple):
    step: int
    request: Any  # point index (k-server) or cost tuple (MTS)
    phase: int
    state: Any  # state index (MTS) or sorted tuple of points (k-server)
    step_cost: float
    cumulative_cost: float
    covered: bool
    D: float | None
    threshold: float | None
    restarted: bool
    elapsed_ns: int

    def decision(self) -> tuple:
        """The columns that depend only on the algorithm's choices."""
        return (
            self.step,
            self.request,
            self.phase,
            self.state,
            self.step_cost,
            self.cumulative_cost,
            self.covered,
            self.restarted,
        )


@dataclass
class PhaseRecord:
    index: int
    first_step: int
    last_step: int  # j_i; -1 while the phase holds no request
    start_state: Any  # z_{i-1}
    end_state: Any  # z_i
    cost: float = 0.0  # C_i
    history_len: int = 0
    restarted: bool = False
    forced: bool = False


@dataclass
class RunTrace:
    kind: str  # "mts" or "kserver"
    algorithm: str
    rows: list[TraceRow] = field(default_factory=list)
    phases: list[PhaseRecord] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def total_cost(self) -> float:
        return self.rows[-1].cumulative_cost if self.rows else 0.0

    @property
    def final_state(self):
        if self.rows:
            return self.rows[-1].state
        return self.meta.get("initial_state")

    def step_times_ns(self) -> list[int]:
        out, prev = [], 0
        for row in self.rows:
            out.append(row.elapsed_ns - prev)
            prev = row.elapsed_ns
        return out

    def __len__(self) -> int:
        return len(self.rows)
