"""Seeded workload generators producing JSON instance documents."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

KINDS = ("mts-random", "kserver-grid", "kserver-clustered")


@dataclass(frozen=True)
class GenSpec:
    kind: str
    n: int  # request count
    seed: int = 0
    states: int = 4  # mts-random: |S|
    rows: int = 4  # kserver grids
    cols: int = 4
    k: int = 2
    cost_min: int = 0  # mts-random task costs, inclusive
    cost_max: int = 10
    max_weight: int = 5  # mts-random edge weights 1..max_weight
    avoid_covered: bool = False
    sweep_width: int = 0  # kserver-grid: >0 draws from a column window sliding left to right
    clusters: int = 3  # kserver-clustered
    spread: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        for name in ("states", "rows", "cols", "k", "max_weight", "clusters"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if not 0 <= self.cost_min <= self.cost_max:
            raise ValueError("need 0 <= cost_min <= cost_max")
        if self.kind != "mts-random" and self.k > self.rows * self.cols:
            raise ValueError("more servers than grid points")
        if self.sweep_width > self.cols:
            raise ValueError("sweep window wider than the grid")


def grid_edges(rows: int, cols: int) -> list[list[int]]:
    edges = []
    for r in range(rows):
        for c in range(cols):
            p = r * cols + c
            if c + 1 < cols:
                edges.append([p, p + 1, 1])
            if r + 1 < rows:
                edges.append([p, p + cols, 1])
    return edges


def _random_graph(rng, n: int, max_weight: int) -> list[list[int]]:
    # random spanning tree plus a few chords keeps the graph connected
    edges = []
    order = rng.permutation(n)
    for i in range(1, n):
        j = int(rng.integers(0, i))
        edges.append([int(order[i]), int(order[j]), int(rng.integers(1, max_weight + 1))])
    for _ in range(n):
        p, q = (int(v) for v in rng.integers(0, n, size=2))
        if p != q:
            edges.append([p, q, int(rng.integers(1, max_weight + 1))])
    return edges


def _draw(rng, pool, avoid):
    while True:
        r = int(pool[rng.integers(0, len(pool))])
        if r not in avoid or len(set(pool) - avoid) == 0:
            return r


def generate(spec: GenSpec) -> dict:
    """Instance document for ``spec``; identical output for identical specs."""
    rng = np.random.default_rng(spec.seed)
    doc: dict = {"id": f"{spec.kind}-s{spec.seed}", "meta": {"gen": asdict(spec)}}
    if spec.kind == "mts-random":
        n = spec.states
        doc["type"] = "mts"
        if n == 1:
            doc["metric"] = {"matrix": [[0]]}
        else:
            doc["metric"] = {"graph": _random_graph(rng, n, spec.max_weight)}
        doc["initial"] = [int(rng.integers(0, n))]
        doc["requests"] = rng.integers(spec.cost_min, spec.cost_max + 1, size=(spec.n, n)).tolist()
        return doc

    rows, cols, k = spec.rows, spec.cols, spec.k
    npts = rows * cols
    doc["type"] = "kserver"
    doc["k"] = k
    doc["metric"] = {"graph": grid_edges(rows, cols)} if npts > 1 else {"matrix": [[0]]}
    initial = sorted(int(p) for p in rng.choice(npts, size=k, replace=False))
    doc["initial"] = initial
    allpts = np.arange(npts)
    grid_r, grid_c = np.divmod(allpts, cols)

    if spec.kind == "kserver-clustered":
        centers = rng.choice(npts, size=min(spec.clusters, npts), replace=False)
        pools = []
        for ctr in centers:
            cr, cc = divmod(int(ctr), cols)
            near = (np.abs(grid_r - cr) <= spec.spread) & (np.abs(grid_c - cc) <= spec.spread)
            pools.append(allpts[near])

    requests: list[int] = []
    prev = None
    for i in range(spec.n):
        if spec.kind == "kserver-clustered":
            pool = pools[int(rng.integers(0, len(pools)))]
        elif spec.sweep_width:
            left = (cols - spec.sweep_width) * i // max(1, spec.n - 1)
            pool = allpts[(grid_c >= left) & (grid_c < left + spec.sweep_width)]
        else:
            pool = allpts
        avoid = set()
        if spec.avoid_covered:
            avoid = set(initial) if prev is None else {prev}
        r = _draw(rng, pool, avoid)
        requests.append(r)
        prev = r
    doc["requests"] = requests
    return doc
