import io
import json

import numpy as np
import pytest

from boundedwfa.harness import (
    GenSpec,
    SchemaError,
    compare_report,
    generate,
    instance_from_document,
    instance_to_document,
    load_instance,
    parse_trace,
    run_experiment,
    summarize,
    trace_to_csv,
)
from boundedwfa.harness.experiment import opt_trace
from boundedwfa.harness.tracefile import rebuild_phases
from boundedwfa.kserver import KServerInstance, wfa_run_kserver
from boundedwfa.metric import MetricError
from boundedwfa.mts import MtsInstance, opt_offline_mts
from boundedwfa.phases import PhaseParams

from conftest import random_kserver, random_mts


def test_load_kserver_points_document():
    doc = {"type": "kserver", "metric": {"points": [[0], [5]]}, "k": 1, "initial": [0],
           "requests": [1]}
    inst = load_instance(json.dumps(doc))
    assert isinstance(inst, KServerInstance)
    assert inst.space.dist[0, 1] == 5 and inst.requests == (1,)


def test_two_metric_forms_rejected():
    doc = {"type": "mts", "metric": {"matrix": [[0]], "points": [[0]]}, "initial": [0],
           "requests": []}
    with pytest.raises(SchemaError) as exc:
        instance_from_document(doc)
    assert exc.value.location == "metric"


def test_triangle_failure_names_indices():
    doc = {"type": "mts", "metric": {"matrix": [[0, 1, 3], [1, 0, 1], [3, 1, 0]]},
           "initial": [0], "requests": []}
    with pytest.raises(MetricError) as exc:
        load_instance(json.dumps(doc))
    assert exc.value.indices == (0, 2, 1)


@pytest.mark.parametrize(
    "patch, location",
    [
        ({"type": "lp"}, "type"),
        ({"k": 0}, "k"),
        ({"initial": [0, 9]}, "initial[1]"),
        ({"requests": [0, 7]}, "requests[1]"),
        ({"requests": [0, "a"]}, "requests[1]"),
        ({"extra": 1}, "$"),
    ],
)
def test_schema_errors_carry_location(patch, location):
    doc = {"type": "kserver", "metric": {"points": [[0], [5], [6]]}, "k": 2, "initial": [0, 1],
           "requests": [2]}
    doc.update(patch)
    with pytest.raises(SchemaError) as exc:
        instance_from_document(doc)
    assert exc.value.location == location


def test_mts_document_with_infinite_costs():
    text = '{"type": "mts", "metric": {"graph": [[0, 1, 2]]}, "initial": 0, "requests": [["inf", 0]]}'
    inst = load_instance(text)
    assert isinstance(inst, MtsInstance)
    assert np.isfinite(inst.requests).all() and inst.requests[0, 0] > 2
    assert opt_offline_mts(inst) == (2.0, [1])


def test_malformed_json():
    with pytest.raises(SchemaError) as exc:
        load_instance("{")
    assert exc.value.location.startswith("line 1")


def test_generate_is_deterministic_and_loads():
    for kind in ("mts-random", "kserver-grid", "kserver-clustered"):
        spec = GenSpec(kind, n=50, seed=11)
        a, b = generate(spec), generate(spec)
        assert a == b
        load_instance(json.dumps(a))
    assert generate(GenSpec("kserver-grid", n=50, seed=1)) != generate(
        GenSpec("kserver-grid", n=50, seed=2))


def test_filtered_requests_cost_one_server_something():
    # with k=1 the filter makes every request uncovered, so every algorithm pays
    doc = generate(GenSpec("kserver-grid", n=200, rows=4, cols=4, k=1, seed=3, avoid_covered=True))
    inst = load_instance(json.dumps(doc))
    t = wfa_run_kserver(inst)
    assert all(r.step_cost >= 1 for r in t.rows)
    sched = [r.state for r in opt_trace(inst).rows]
    prev = inst.initial
    for conf in sched:
        assert conf != prev
        prev = conf


def test_filter_never_repeats_previous_request():
    doc = generate(GenSpec("kserver-grid", n=300, rows=4, cols=4, k=3, seed=3, avoid_covered=True))
    reqs = doc["requests"]
    assert reqs[0] not in doc["initial"]
    assert all(a != b for a, b in zip(reqs, reqs[1:]))


def test_single_state_mts_opt_is_cost_sum():
    doc = generate(GenSpec("mts-random", n=30, states=1, seed=4))
    inst = load_instance(json.dumps(doc))
    assert opt_offline_mts(inst)[0] == inst.requests.sum()


def test_sweep_window_moves_right():
    doc = generate(GenSpec("kserver-grid", n=400, rows=5, cols=10, seed=0, sweep_width=2))
    cols = [r % 10 for r in doc["requests"]]
    assert max(cols[:40]) <= 2 and min(cols[-40:]) >= 7


def test_genspec_validation():
    with pytest.raises(ValueError):
        GenSpec("nope", n=1)
    with pytest.raises(ValueError):
        GenSpec("kserver-grid", n=1, rows=1, cols=1, k=2)


def test_document_roundtrip():
    inst = random_kserver(3)
    back = instance_from_document(instance_to_document(inst))
    assert back.requests == inst.requests and back.initial == inst.initial
    assert np.array_equal(back.space.dist, inst.space.dist)
    m = random_mts(3, min_n=2)
    back = instance_from_document(instance_to_document(m))
    assert np.array_equal(back.requests, m.requests)


def test_bounded_zero_requests():
    inst = KServerInstance(load_instance(json.dumps(generate(GenSpec("kserver-grid", n=0)))).space,
                           2, (0, 1), [])
    trace, s = run_experiment(inst, "wfa-bounded")
    assert s["total_cost"] == 0 and s["phases"] == 1 and s["p99_ns"] is None


def test_full_and_bounded_agree_below_threshold():
    inst = random_kserver(21, max_k=3, max_points=7, max_n=60)
    inst = KServerInstance(inst.space, 3, (0, 1, 2), inst.requests)
    _, full = run_experiment(inst, "wfa-full")
    _, bounded = run_experiment(inst, "wfa-bounded", PhaseParams(epsilon=1e-9))
    assert full["total_cost"] == bounded["total_cost"]


def test_run_experiment_rejects_unknown_algorithm():
    with pytest.raises(ValueError):
        run_experiment(random_mts(0), "greedy")


@pytest.mark.parametrize("alg", ["wfa-full", "wfa-bounded", "opt"])
@pytest.mark.parametrize("seed", range(4))
def test_csv_roundtrip_reproduces_summary(alg, seed):
    inst = random_kserver(seed, max_n=60) if seed % 2 else random_mts(seed, max_n=60, max_states=4)
    buf = io.StringIO()
    trace, summary = run_experiment(inst, alg, PhaseParams(epsilon=0.5), sink=buf)
    back = parse_trace(buf.getvalue())
    assert back.rows == trace.rows
    assert summarize(back) == summary
    got = rebuild_phases(trace)
    assert [(p.first_step, p.last_step, p.cost, p.restarted) for p in got] == [
        (p.first_step, p.last_step, p.cost, p.restarted) for p in trace.phases
    ]


def test_timing_rows_monotone():
    inst = random_kserver(5, max_n=100)
    trace, _ = run_experiment(inst, "wfa-bounded", with_opt=False)
    elapsed = [r.elapsed_ns for r in trace.rows]
    assert elapsed == sorted(elapsed) and all(t >= 0 for t in trace.step_times_ns())


def test_trace_parse_errors():
    with pytest.raises(ValueError):
        parse_trace("step,request\n")
    with pytest.raises(ValueError):
        parse_trace('# {"kind": "mts", "algorithm": "x"}\nstep,request\n')


def test_compare_report_ratios():
    inst = random_kserver(31, max_k=2, max_points=6, max_n=80, min_n=20)
    traces = [run_experiment(inst, a, PhaseParams(epsilon=0.5))[0]
              for a in ("opt", "wfa-full", "wfa-bounded")]
    csv_text, rows = compare_report(traces)
    assert csv_text.splitlines()[0].startswith("instance,algorithm")
    assert len(csv_text.splitlines()) == 4
    opt, full, bounded = rows
    assert opt["ratio"] == 1.0
    assert full["ratio"] <= 2 * inst.k - 1 + 1e-9
    assert bounded["ratio"] <= 2 * inst.k - 1 + 0.5 + 1e-9


def test_compare_report_single_and_mismatch():
    a = run_experiment(random_kserver(1, min_n=5), "wfa-full")[0]
    _, rows = compare_report([a])
    assert len(rows) == 1
    b = run_experiment(random_kserver(2, min_n=5), "wfa-full")[0]
    with pytest.raises(ValueError):
        compare_report([a, b])
    with pytest.raises(ValueError):
        compare_report([])
