"""Pure-numpy versions of the hot loops. Semantics match ``_numba_kernels``."""

import numpy as np

from .configs import rank_rows


def mts_absorb(values, costs, dist):
    # w'(s) = min_t w(t) + c(t) + d(t, s)
    return np.min((values + costs)[:, None] + dist, axis=0)


def _swap_ranks(configs, slot, point, binom):
    rep = configs.copy()
    rep[:, slot] = point
    rep.sort(axis=1)
    return rank_rows(rep, binom)


def wf_extend(values, configs, r, dr, binom):
    """Fill rows of configurations containing the new local point ``r``.

    ``values`` covers the colex prefix without ``r``; ``configs`` covers the
    prefix with it. New rows are filled in order of how many copies of ``r``
    they hold, each from a row with one copy fewer.
    """
    n_old = len(values)
    k = configs.shape[1]
    out = np.empty(len(configs))
    out[:n_old] = values
    new = configs[n_old:]
    copies = (new == r).sum(axis=1)
    for j in range(1, k + 1):
        sel = np.flatnonzero(copies == j)
        if len(sel) == 0:
            continue
        rows = new[sel]
        best = np.full(len(sel), np.inf)
        for y in range(r):
            # r is the largest local index, so a copy of it sits in the last slot
            cand = out[_swap_ranks(rows, k - 1, y, binom)] + dr[y]
            np.minimum(best, cand, out=best)
        out[n_old + sel] = best
    return out


def wf_absorb(values, configs, r, dr, binom):
    # w'(A) = min_{x in A} w(A - x + r) + d(x, r)
    k = configs.shape[1]
    best = np.full(len(configs), np.inf)
    for s in range(k):
        cand = values[_swap_ranks(configs, s, r, binom)] + dr[configs[:, s]]
        np.minimum(best, cand, out=best)
    has = (configs == r).any(axis=1)
    return np.where(has, values, best)


def relax(values, configs, dloc, binom):
    """One Jacobi pass of single-server relaxation over the whole table."""
    m = dloc.shape[0]
    k = configs.shape[1]
    best = values.copy()
    for s in range(k):
        src = configs[:, s]
        for y in range(m):
            cand = values[_swap_ranks(configs, s, y, binom)] + dloc[src, y]
            np.minimum(best, cand, out=best)
    return best
