import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boundedwfa.kserver import (
    CapacityError,
    InterestBound,
    KServerInstance,
    config_distance,
    distances_to,
    interest_bound_D,
    kserver_schedule_cost,
    opt_offline_kserver,
    wf_absorb,
    wf_init,
    wfa_kserver_step,
    wfa_run_kserver,
)
from boundedwfa.metric import MetricSpace, grid_metric, line_metric
from boundedwfa.mts import InstanceError

from conftest import random_kserver
from oracles import kserver_exhaustive_opt, matching_brute, random_metric, work_function_brute


def test_config_distance_examples():
    line = line_metric([0, 1, 2, 3])
    assert config_distance((0, 1), (0, 1), line) == 0
    assert config_distance((0, 2), (1, 3), line) == 2
    assert config_distance((2,), (0,), line) == 2
    with pytest.raises(InstanceError):
        config_distance((0,), (0, 1), line)


def test_distances_to_matches_hungarian_above_six():
    rng = np.random.default_rng(0)
    space = grid_metric(4, 4)
    rows = rng.integers(0, 16, size=(20, 7))
    rows.sort(axis=1)
    target = np.sort(rng.integers(0, 16, size=7))
    got = distances_to(rows, target, space.dist)
    want = [config_distance(tuple(r), tuple(target), space) for r in rows]
    assert np.allclose(got, want)


def test_wf_init_examples(line014):
    wf = wf_init(line014, (0, 2))
    assert wf.interest == (0, 2)
    assert wf.table == {(0, 0): 4, (0, 2): 0, (2, 2): 4}
    assert wf_init(line014, (1,)).table == {(1,): 0}
    assert wf_init(line014, (1, 1)).table == {(1, 1): 0}


def test_wf_absorb_k1_closed_form():
    space = line_metric([0, 5])
    wf = wf_absorb(wf_init(space, (0,)), 1, space)
    assert wf.table == {(0,): 10, (1,): 5}
    assert wf.step == 1


def test_wf_absorb_line_example(line014):
    # coordinates 0, 1, 4 are point indices 0, 1, 2
    wf = wf_absorb(wf_init(line014, (0, 2)), 1, line014)
    assert wf.value((1, 2)) == 1
    assert wf.value((0, 1)) == 3
    brute = work_function_brute(line014.dist, 2, (0, 2), [1], 3)
    assert wf.table == pytest.approx(brute)


def test_wf_absorb_leaves_covering_configs_unchanged(line014):
    wf = wf_absorb(wf_init(line014, (0, 2)), 1, line014)
    again = wf_absorb(wf, 1, line014)
    for conf, v in wf.table.items():
        if 1 in conf:
            assert again.value(conf) == v


def test_step_examples(line014):
    nxt, wf, moved = wfa_kserver_step(wf_init(line014, (0, 2)), (0, 2), 1, line014)
    assert nxt == (1, 2) and moved == 1
    nxt, _, moved = wfa_kserver_step(wf, (1, 2), 2, line014)
    assert nxt == (1, 2) and moved == 0
    one = wf_init(line014, (2,))
    nxt, _, moved = wfa_kserver_step(one, (2,), 0, line014)
    assert nxt == (0,) and moved == 4


def test_opt_examples():
    inst = KServerInstance(line_metric([0, 5]), 1, (0,), [1, 0])
    assert opt_offline_kserver(inst) == (10.0, [(1,), (0,)])
    inst = KServerInstance(line_metric([0, 1, 100]), 2, (0, 1), [2, 0, 1])
    w, sched = opt_offline_kserver(inst)
    assert w == 100
    assert kserver_schedule_cost(inst, sched) == 100
    inst = KServerInstance(line_metric([0, 1, 100]), 2, (0, 1), [0, 1, 1, 0])
    assert opt_offline_kserver(inst)[0] == 0


def test_opt_guard():
    inst = KServerInstance(grid_metric(10, 10), 5, (0, 1, 2, 3, 4), list(range(100)))
    with pytest.raises(CapacityError):
        opt_offline_kserver(inst)


def test_schedule_cost_rejects_uncovering_schedule():
    inst = KServerInstance(line_metric([0, 1, 2]), 1, (0,), [2])
    with pytest.raises(InstanceError):
        kserver_schedule_cost(inst, [(1,)])


def test_instance_validation():
    space = line_metric([0, 1])
    with pytest.raises(InstanceError):
        KServerInstance(space, 2, (0,), [])
    with pytest.raises(InstanceError):
        KServerInstance(space, 1, (0,), [2])
    with pytest.raises(InstanceError):
        KServerInstance(space, 0, (), [])


def test_interest_bound_examples():
    line = line_metric([0, 1, 2, 3, 4])
    assert interest_bound_D({0}, 0, line) == 0
    assert interest_bound_D({0, 3, 4}, 0, line) == 8
    b = InterestBound((0, 4), 0, line)
    assert b.D == 8
    assert b.add(2) == 8
    with pytest.raises(InstanceError):
        interest_bound_D({1, 2}, 0, line)


@pytest.mark.parametrize("seed", range(20))
def test_opt_matches_exhaustive(seed):
    inst = random_kserver(seed, max_k=2, max_points=5, max_n=6)
    w, sched = opt_offline_kserver(inst)
    assert w == kserver_exhaustive_opt(inst.space.dist, inst.k, inst.initial, inst.requests,
                                       inst.space.n)
    assert kserver_schedule_cost(inst, sched) == w


@pytest.mark.parametrize("seed", range(12))
def test_work_function_table_matches_brute_force(seed):
    inst = random_kserver(seed, max_k=2, max_points=5, max_n=4, min_n=1)
    wf = wf_init(inst.space, inst.initial)
    for i, r in enumerate(inst.requests):
        wf = wf_absorb(wf, r, inst.space)
        brute = work_function_brute(inst.space.dist, inst.k, inst.initial, inst.requests[: i + 1],
                                    inst.space.n)
        for conf, v in wf.table.items():
            assert v == pytest.approx(brute[conf], abs=1e-9)


@pytest.mark.parametrize("seed", range(30))
def test_work_function_invariants(seed):
    inst = random_kserver(seed, max_k=3, max_points=6, max_n=25)
    space = inst.space
    wf = wf_init(space, inst.initial)
    for i, r in enumerate(inst.requests):
        new = wf_absorb(wf, r, space)
        table = new.table
        for conf, v in wf.table.items():
            assert table[conf] >= v - 1e-9
            if r in conf:
                assert table[conf] == v
        lo = new.minimum()
        assert all(r in c for c, v in table.items() if v <= lo + 1e-9)
        for a, b in itertools.combinations(table, 2):
            assert abs(table[a] - table[b]) <= config_distance(a, b, space) + 1e-9
        assert lo == pytest.approx(opt_offline_kserver(inst.sub(0, i + 1, inst.initial))[0])
        wf = new


@pytest.mark.parametrize("seed", range(20))
def test_full_run_envelope_and_final_cross_check(seed):
    inst = random_kserver(500 + seed, max_k=3, max_points=7, max_n=100)
    t = wfa_run_kserver(inst)
    w, _ = opt_offline_kserver(inst)
    assert t.total_cost <= (2 * inst.k - 1) * w + 1e-9
    # the optimum equals the minimum of the full-history work function
    wf = wf_init(inst.space, inst.initial)
    for r in inst.requests:
        wf = wf_absorb(wf, r, inst.space)
    assert wf.minimum() == pytest.approx(w)


def test_k1_run_is_forced():
    space = line_metric([0, 2, 7])
    t = wfa_run_kserver(KServerInstance(space, 1, (0,), [2, 1, 1, 0]))
    assert [r.state for r in t.rows] == [(2,), (1,), (1,), (0,)]
    assert t.total_cost == 7 + 5 + 0 + 2
    assert [r.covered for r in t.rows] == [False, False, True, False]


config_pairs = st.integers(1, 5).flatmap(
    lambda k: st.tuples(
        st.lists(st.integers(0, 7), min_size=k, max_size=k),
        st.lists(st.integers(0, 7), min_size=k, max_size=k),
        st.lists(st.integers(0, 7), min_size=k, max_size=k),
        st.integers(0, 2**32 - 1),
    )
)


@settings(max_examples=80, deadline=None)
@given(config_pairs)
def test_config_distance_is_a_metric(case):
    a, b, c, seed = case
    space_d = random_metric(np.random.default_rng(seed), 8)
    space = MetricSpace(space_d)
    dab = config_distance(a, b, space)
    assert dab == matching_brute(a, b, space_d)
    assert dab == config_distance(b, a, space)
    assert (dab == 0) == (sorted(a) == sorted(b))
    assert config_distance(a, c, space) <= dab + config_distance(b, c, space) + 1e-9


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(0, 15), min_size=1, max_size=10), st.data())
def test_D_bounds_every_pair(points, data):
    space = grid_metric(4, 4)
    ref = data.draw(st.sampled_from(sorted(points)))
    D = interest_bound_D(points, ref, space)
    for p in points:
        for q in points:
            assert space.dist[p, q] <= D
