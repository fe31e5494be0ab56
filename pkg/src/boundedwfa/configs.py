"""Colex indexing of size-k multisets over local point indices 0..m-1.

A sorted multiset ``a_0 <= ... <= a_{k-1}`` maps to the strictly increasing
``b_j = a_j + j`` and gets rank ``sum_j C(b_j, j + 1)``. In this order every
multiset over ``{0..m-1}`` precedes any multiset containing ``m``, so adding
a point to the set of interest only appends rows to the table.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np


def n_multisets(m: int, k: int) -> int:
    """Number of size-k multisets over m points."""
    if m <= 0:
        return 1 if k == 0 else 0
    return comb(m + k - 1, k)


def binom_table(nmax: int, k: int) -> np.ndarray:
    """``table[n, j] = C(n, j)`` for ``n <= nmax``, ``j <= k``, as int64."""
    t = np.zeros((nmax + 1, k + 1), dtype=np.int64)
    t[:, 0] = 1
    for n in range(1, nmax + 1):
        t[n, 1:] = t[n - 1, 1:] + t[n - 1, :-1]
    return t


def _colex(k: int, m: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    prev = _colex(k - 1, m)
    blocks = []
    for t in range(m):
        sub = prev[: n_multisets(t + 1, k - 1)]
        blocks.append(np.column_stack([sub, np.full(len(sub), t, dtype=np.int64)]))
    return np.concatenate(blocks) if blocks else np.zeros((0, k), dtype=np.int64)


class ConfigIndex:
    """Growable colex enumeration for a fixed k.

    ``configs(m)`` returns a read-only view of the first ``n_multisets(m, k)``
    rows; capacity doubles on demand so long runs amortize regeneration.
    """

    def __init__(self, k: int, capacity: int = 8):
        if k < 1:
            raise ValueError("k must be at least 1")
        self.k = k
        self._cap = 0
        self._grow(max(1, capacity))

    def _grow(self, m: int):
        cap = max(m, 2 * self._cap)
        self._rows = _colex(self.k, cap)
        self._rows.setflags(write=False)
        self.binom = binom_table(cap + self.k + 1, self.k)
        self.binom.setflags(write=False)
        self._cap = cap

    def ensure(self, m: int):
        if m > self._cap:
            self._grow(m)

    def configs(self, m: int) -> np.ndarray:
        self.ensure(m)
        return self._rows[: n_multisets(m, self.k)]

    def rank(self, local_sorted) -> int:
        self.ensure(max(local_sorted) + 1)
        return int(sum(self.binom[a + j, j + 1] for j, a in enumerate(local_sorted)))


@lru_cache(maxsize=None)
def config_index(k: int) -> ConfigIndex:
    return ConfigIndex(k)


def rank_rows(rows: np.ndarray, binom: np.ndarray) -> np.ndarray:
    """Vectorized colex rank of sorted rows."""
    k = rows.shape[1]
    j = np.arange(k)
    return binom[rows + j, j + 1].sum(axis=1)
