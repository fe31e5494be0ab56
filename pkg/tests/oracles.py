"""Brute-force reference computations, independent of the package's DP paths."""

import itertools
import math

import numpy as np


def matching_brute(a, b, dist):
    """Min over all k! server assignments."""
    best = math.inf
    for perm in itertools.permutations(range(len(b))):
        best = min(best, sum(dist[a[i]][b[p]] for i, p in enumerate(perm)))
    return best if a else 0.0


def mts_cost(dist, costs, initial, schedule):
    total, prev = 0.0, initial
    for c, s in zip(costs, schedule):
        total += dist[prev][s] + c[s]
        prev = s
    return total


def mts_exhaustive(dist, costs, initial):
    """Optimal cost over all |S|^n schedules (DFS with shared prefixes)."""
    n_states = len(dist)
    n = len(costs)
    best = [math.inf]

    def dfs(i, prev, acc):
        if acc >= best[0]:
            return
        if i == n:
            best[0] = acc
            return
        for s in range(n_states):
            dfs(i + 1, s, acc + dist[prev][s] + costs[i][s])

    dfs(0, initial, 0.0)
    return best[0] if n else 0.0


def all_multisets(points, k):
    return [tuple(c) for c in itertools.combinations_with_replacement(sorted(points), k)]


def kserver_exhaustive(dist, k, initial, requests, npoints):
    """Best cost of each final configuration, over every configuration schedule.

    Every step may move to any size-k multiset of the whole space that covers
    the request (no laziness assumed). Returns ``{final_config: cost}``; with no
    requests this is ``{initial: 0}``.
    """
    confs = all_multisets(range(npoints), k)
    dcache = {}

    def d(a, b):
        key = (a, b)
        if key not in dcache:
            dcache[key] = matching_brute(a, b, dist)
        return dcache[key]

    covering = {r: [c for c in confs if r in c] for r in set(requests)}
    best_final = {}
    n = len(requests)

    def dfs(i, prev, acc):
        if i == n:
            if acc < best_final.get(prev, math.inf):
                best_final[prev] = acc
            return
        for c in covering[requests[i]]:
            dfs(i + 1, c, acc + d(prev, c))

    dfs(0, tuple(sorted(initial)), 0.0)
    return best_final


def kserver_exhaustive_opt(dist, k, initial, requests, npoints):
    finals = kserver_exhaustive(dist, k, initial, requests, npoints)
    return min(finals.values())


def work_function_brute(dist, k, initial, requests, npoints):
    """w(A) = min over schedules of (cost + move to A), for every multiset A."""
    finals = kserver_exhaustive(dist, k, initial, requests, npoints)
    out = {}
    for a in all_multisets(range(npoints), k):
        out[a] = min(cost + matching_brute(b, a, dist) for b, cost in finals.items())
    return out


def random_metric(rng, npts, max_weight=5):
    """Integer shortest-path metric of a random connected graph (Floyd-Warshall)."""
    d = np.full((npts, npts), np.inf)
    np.fill_diagonal(d, 0)
    order = rng.permutation(npts)
    for i in range(1, npts):
        j = int(rng.integers(0, i))
        w = int(rng.integers(1, max_weight + 1))
        p, q = order[i], order[j]
        d[p, q] = d[q, p] = min(d[p, q], w)
    for _ in range(npts):
        p, q = rng.integers(0, npts, size=2)
        if p != q:
            w = int(rng.integers(1, max_weight + 1))
            d[p, q] = d[q, p] = min(d[p, q], w)
    for r in range(npts):
        d = np.minimum(d, d[:, [r]] + d[[r], :])
    return d
