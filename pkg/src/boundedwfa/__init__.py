"""Work Function Algorithm for metrical task systems and k-server, with
history-discarding restarts that keep per-request work bounded."""

from .kernels import BACKEND
from .kserver import (
    CapacityError,
    ConfigWorkFunction,
    KServerInstance,
    config_distance,
    interest_bound_D,
    opt_offline_kserver,
    wf_absorb,
    wf_init,
    wfa_kserver_step,
    wfa_run_kserver,
)
from .metric import MetricError, MetricSpace, metric_from_graph, metric_from_points, validate_metric
from .mts import (
    InstanceError,
    MtsInstance,
    StateWorkFunction,
    mts_delta,
    mts_sequence_cost,
    opt_offline_mts,
    wfa_mts_step,
    wfa_run_mts,
)
from .phases import (
    PhaseAudit,
    PhaseParams,
    audit_condition1,
    kserver_threshold,
    mts_threshold,
    phase_length_bound,
    run_phased,
)
from .trace import PhaseRecord, RunTrace, TraceRow

__version__ = "0.1.0"
