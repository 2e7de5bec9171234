"""Pareto dominance, fast non-dominated sorting, and crowding distance.

All objectives are minimized throughout. Duplicated objective vectors are
incomparable under the strict order and share a rank.
"""

from __future__ import annotations

import numpy as np


def dominates(a, b) -> bool:
    """True iff a <= b componentwise with strict improvement somewhere."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def _dominance_matrix(points: np.ndarray) -> np.ndarray:
    le = np.all(points[:, None, :] <= points[None, :, :], axis=-1)
    lt = np.any(points[:, None, :] < points[None, :, :], axis=-1)
    return le & lt


def non_dominated_sort(points) -> list[np.ndarray]:
    """Rank the points into fronts; rank 0 is the Pareto set of the input,
    each later rank the Pareto set after removing earlier ranks."""
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ValueError("need a non-empty 2-d point set")
    dom = _dominance_matrix(points)
    n_dominators = dom.sum(axis=0)
    fronts = []
    assigned = np.zeros(points.shape[0], dtype=bool)
    while not assigned.all():
        current = np.flatnonzero((n_dominators == 0) & ~assigned)
        fronts.append(current)
        assigned[current] = True
        n_dominators = n_dominators - dom[current].sum(axis=0)
    return fronts


def ranks_of(points) -> np.ndarray:
    out = np.empty(np.asarray(points).shape[0], dtype=np.int64)
    for r, front in enumerate(non_dominated_sort(points)):
        out[front] = r
    return out


def pareto_front_indices(points) -> np.ndarray:
    """Indices of the non-dominated members (rank-0 front)."""
    return non_dominated_sort(points)[0]


def crowding_distance(front) -> np.ndarray:
    """Deb's crowding distance for one front: boundary points get +inf,
    interior points sum range-normalized neighbor gaps per objective.
    Zero-range objectives contribute nothing."""
    front = np.asarray(front, dtype=np.float64)
    n, d = front.shape
    dist = np.zeros(n)
    if n <= 2:
        return np.full(n, np.inf)
    for j in range(d):
        order = np.argsort(front[:, j], kind="stable")
        vals = front[order, j]
        span = vals[-1] - vals[0]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        if span == 0.0:
            continue
        gaps = (vals[2:] - vals[:-2]) / span
        interior = order[1:-1]
        finite = np.isfinite(dist[interior])
        dist[interior[finite]] += gaps[finite]
    return dist
