import numpy as np
import pytest

from boundedwfa.kserver import KServerInstance
from boundedwfa.metric import MetricSpace, line_metric
from boundedwfa.mts import MtsInstance

from oracles import random_metric

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_kserver(seed, max_k=3, max_points=7, max_n=100, min_n=0):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, max_k + 1))
    npts = int(rng.integers(max(k, 2), max_points + 1))
    space = MetricSpace(random_metric(rng, npts))
    init = tuple(int(p) for p in rng.choice(npts, size=k, replace=False))
    n = int(rng.integers(min_n, max_n + 1))
    reqs = tuple(int(r) for r in rng.integers(0, npts, size=n))
    return KServerInstance(space, k, init, reqs)


def random_mts(seed, max_states=3, max_n=8, cost_max=9, min_n=0, min_states=1):
    rng = np.random.default_rng(seed)
    ns = int(rng.integers(min_states, max_states + 1))
    space = MetricSpace(random_metric(rng, ns)) if ns > 1 else MetricSpace(np.zeros((1, 1)))
    n = int(rng.integers(min_n, max_n + 1))
    costs = rng.integers(0, cost_max + 1, size=(n, ns))
    return MtsInstance(space, int(rng.integers(0, ns)), costs)


@pytest.fixture
def line014():
    """Three points on a line at coordinates 0, 1, 4 (indices 0, 1, 2)."""
    return line_metric([0, 1, 4])


@pytest.fixture
def two_state():
    return line_metric([0, 1])
