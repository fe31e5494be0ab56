"""numba versions of the hot loops. Semantics match ``_numpy_kernels``.

Rows are read with scalar ``configs[c, i]`` indexing; slicing a row view per
configuration costs about 3x in these loops.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def mts_absorb(values, costs, dist):
    n = values.shape[0]
    out = np.empty(n)
    for s in range(n):
        best = np.inf
        for t in range(n):
            v = values[t] + costs[t] + dist[t, s]
            if v < best:
                best = v
        out[s] = best
    return out


@njit(cache=True, inline="always")
def _swap_rank(configs, c, slot, point, binom):
    # colex rank of sorted(configs[c] with slot replaced by point)
    k = configs.shape[1]
    rank = 0
    j = 0
    placed = False
    for i in range(k):
        if i == slot:
            continue
        a = configs[c, i]
        if not placed and point <= a:
            rank += binom[point + j, j + 1]
            j += 1
            placed = True
        rank += binom[a + j, j + 1]
        j += 1
    if not placed:
        rank += binom[point + j, j + 1]
    return rank


@njit(cache=True)
def wf_extend(values, configs, r, dr, binom):
    n_old = values.shape[0]
    n_new, k = configs.shape
    out = np.empty(n_new)
    out[:n_old] = values
    for j in range(1, k + 1):
        for c in range(n_old, n_new):
            copies = 0
            for i in range(k):
                if configs[c, i] == r:
                    copies += 1
            if copies != j:
                continue
            best = np.inf
            for y in range(r):
                v = out[_swap_rank(configs, c, k - 1, y, binom)] + dr[y]
                if v < best:
                    best = v
            out[c] = best
    return out


@njit(cache=True)
def wf_absorb(values, configs, r, dr, binom):
    n, k = configs.shape
    out = np.empty(n)
    for c in range(n):
        has = False
        for i in range(k):
            if configs[c, i] == r:
                has = True
        if has:
            out[c] = values[c]
            continue
        best = np.inf
        for s in range(k):
            x = configs[c, s]
            if s > 0 and x == configs[c, s - 1]:
                continue
            v = values[_swap_rank(configs, c, s, r, binom)] + dr[x]
            if v < best:
                best = v
        out[c] = best
    return out


@njit(cache=True)
def relax(values, configs, dloc, binom):
    n, k = configs.shape
    m = dloc.shape[0]
    out = values.copy()
    for c in range(n):
        best = out[c]
        for s in range(k):
            x = configs[c, s]
            if s > 0 and x == configs[c, s - 1]:
                continue
            for y in range(m):
                v = values[_swap_rank(configs, c, s, y, binom)] + dloc[x, y]
                if v < best:
                    best = v
        out[c] = best
    return out
