"""Finite metric spaces over dense integer point indices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path

TRIANGLE_TOL = 1e-9


class MetricError(ValueError):
    """Raised when a distance matrix or its source data is not a finite metric."""

    def __init__(self, axiom: str, indices: tuple[int, ...] = (), detail: str = ""):
        self.axiom = axiom
        self.indices = indices
        msg = axiom
        if indices:
            msg += " at " + str(indices)
        if detail:
            msg += ": " + detail
        super().__init__(msg)


@dataclass(frozen=True)
class MetricViolation:
    axiom: str
    indices: tuple[int, ...]
    detail: str = ""

    def to_error(self) -> MetricError:
        return MetricError(self.axiom, self.indices, self.detail)


@dataclass(frozen=True, eq=False)
class MetricSpace:
    """Immutable finite metric; build through the constructors below."""

    dist: np.ndarray
    diameter: float = field(init=False)

    def __post_init__(self):
        d = np.array(self.dist, dtype=np.float64)
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)
        object.__setattr__(self, "diameter", float(d.max()) if d.size else 0.0)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def d(self, p: int, q: int) -> float:
        return float(self.dist[p, q])

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"MetricSpace(n={self.n}, diameter={self.diameter:g})"


def find_violation(matrix) -> MetricViolation | None:
    """Return the first violated metric axiom, or None if ``matrix`` is a metric.

    Axioms are checked in a fixed order (shape, sign, diagonal, positivity,
    symmetry, triangle inequality) and the witness is the lexicographically
    smallest index tuple for that axiom.
    """
    try:
        m = np.asarray(matrix, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        return MetricViolation("non-numeric matrix", (), str(exc))
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        return MetricViolation("non-square matrix", (), f"shape {m.shape}")
    if not np.all(np.isfinite(m)):
        p, q = np.argwhere(~np.isfinite(m))[0]
        return MetricViolation("non-finite distance", (int(p), int(q)))
    if np.any(m < 0):
        p, q = np.argwhere(m < 0)[0]
        return MetricViolation("negative distance", (int(p), int(q)), f"d={m[p, q]:g}")
    diag = np.diagonal(m)
    if np.any(diag != 0):
        p = int(np.flatnonzero(diag != 0)[0])
        return MetricViolation("nonzero self-distance", (p, p), f"d={m[p, p]:g}")
    n = m.shape[0]
    off = ~np.eye(n, dtype=bool)
    zero = (m == 0) & off
    if np.any(zero):
        p, q = np.argwhere(zero)[0]
        return MetricViolation("zero distance between distinct points", (int(p), int(q)))
    asym = m != m.T
    if np.any(asym):
        p, q = np.argwhere(asym)[0]
        return MetricViolation(
            "symmetry violation", (int(p), int(q)), f"d={m[p, q]:g} vs {m[q, p]:g}"
        )
    # d[p, q] <= d[p, r] + d[r, q]; loop over r keeps memory at O(n^2)
    worst = None
    for r in range(n):
        bad = m > m[:, r, None] + m[None, r, :] + TRIANGLE_TOL
        if np.any(bad):
            p, q = np.argwhere(bad)[0]
            cand = (int(p), int(q), r)
            if worst is None or cand < worst:
                worst = cand
    if worst is not None:
        p, q, r = worst
        return MetricViolation(
            "triangle violation",
            (p, q, r),
            f"d({p},{q})={m[p, q]:g} > d({p},{r})+d({r},{q})={m[p, r] + m[r, q]:g}",
        )
    return None


def validate_metric(matrix) -> MetricSpace:
    violation = find_violation(matrix)
    if violation is not None:
        raise violation.to_error()
    return MetricSpace(np.asarray(matrix, dtype=np.float64))


def metric_from_points(points: Sequence[Sequence[float]]) -> MetricSpace:
    """Euclidean metric on a list of coordinate vectors."""
    if len(points) == 0:
        raise MetricError("empty point list")
    dims = {len(p) for p in points}
    if len(dims) != 1:
        raise MetricError("mixed dimensions", (), f"dimensions {sorted(dims)}")
    if dims.pop() < 1:
        raise MetricError("zero-dimensional points")
    x = np.asarray(points, dtype=np.float64)
    diff = x[:, None, :] - x[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    off = ~np.eye(len(x), dtype=bool)
    if np.any((dist == 0) & off):
        p, q = np.argwhere((dist == 0) & off)[0]
        raise MetricError("duplicate points", (int(p), int(q)))
    return MetricSpace(dist)


def metric_from_graph(edges: Sequence[Sequence[float]], n: int | None = None) -> MetricSpace:
    """Shortest-path metric of a connected undirected graph.

    ``edges`` holds ``(p, q, weight)`` triples. The vertex count is ``n`` when
    given, otherwise one past the largest endpoint (a single vertex when there
    are no edges).
    """
    ends = [int(e[0]) for e in edges] + [int(e[1]) for e in edges]
    if n is None:
        n = max(ends) + 1 if ends else 1
    for i, e in enumerate(edges):
        p, q, w = int(e[0]), int(e[1]), float(e[2])
        if not (0 <= p < n and 0 <= q < n):
            raise MetricError("edge endpoint out of range", (i,), f"({p},{q})")
        if not w > 0 or not np.isfinite(w):
            raise MetricError("nonpositive edge weight", (p, q), f"w={w:g}")
        if p == q:
            raise MetricError("self-loop", (p, q))
    if edges:
        rows = np.array([int(e[0]) for e in edges])
        cols = np.array([int(e[1]) for e in edges])
        w = np.array([float(e[2]) for e in edges])
        # parallel edges: keep the lightest
        order = np.argsort(-w, kind="stable")
        dense = np.zeros((n, n))
        dense[rows[order], cols[order]] = w[order]
        dense[cols[order], rows[order]] = w[order]
        graph = coo_matrix(dense)
    else:
        graph = coo_matrix((n, n))
    dist = shortest_path(graph, method="D", directed=False)
    if not np.all(np.isfinite(dist)):
        p, q = np.argwhere(~np.isfinite(dist))[0]
        raise MetricError("disconnected graph", (int(p), int(q)))
    return MetricSpace(dist)


def line_metric(positions: Sequence[float]) -> MetricSpace:
    """Convenience: points on the real line at the given coordinates."""
    return metric_from_points([[float(x)] for x in positions])


def grid_metric(rows: int, cols: int) -> MetricSpace:
    """Unit-weight grid graph (Manhattan) metric; point index is ``r * cols + c``."""
    if rows < 1 or cols < 1:
        raise MetricError("empty grid", (rows, cols))
    r, c = np.divmod(np.arange(rows * cols), cols)
    dist = np.abs(r[:, None] - r[None, :]) + np.abs(c[:, None] - c[None, :])
    return MetricSpace(dist.astype(np.float64))
