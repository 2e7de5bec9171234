"""Hypervolume indicators: exact recursive dimension-sweep, a Monte-Carlo
estimator kept as an independent oracle, and normalized hypervolume over
archive projections.

Points are normalized into [0,1]^d by the HvSpec bounds and measured against
a reference point (all-ones by default); results are scaled so the full unit
box yields 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from fairhpo.moo.pareto import pareto_front_indices

log = logging.getLogger(__name__)

BOUND_TOL = 1e-9


@dataclass(frozen=True)
class HvSpec:
    lower: np.ndarray
    upper: np.ndarray
    ref: np.ndarray = field(default=None)  # post-normalization; default all-ones

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64)
        upper = np.asarray(self.upper, dtype=np.float64)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ValueError("lower/upper must be 1-d arrays of equal length")
        if not np.all(lower < upper):
            raise ValueError("lower must be strictly below upper componentwise")
        ref = np.ones_like(lower) if self.ref is None else np.asarray(self.ref, np.float64)
        if ref.shape != lower.shape or np.any(ref <= 0.0):
            raise ValueError("reference point must be positive with matching dim")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "ref", ref)

    @property
    def dim(self) -> int:
        return self.lower.size


def _normalize(points: np.ndarray, spec: HvSpec, clip_low: bool) -> np.ndarray:
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != spec.dim:
        raise ValueError(f"points must be (n, {spec.dim})")
    scaled = (points - spec.lower) / (spec.upper - spec.lower)
    below = scaled < -BOUND_TOL
    if below.any():
        if not clip_low:
            bad = np.flatnonzero(below.any(axis=1))[:3].tolist()
            raise ValueError(f"points below lower bound (rows {bad})")
        log.warning("normalized_hypervolume: clipping %d below-bound entries",
                    int(below.sum()))
    scaled = np.maximum(scaled, 0.0)
    # points at/beyond the reference contribute no volume
    keep = np.all(scaled < spec.ref, axis=1)
    return scaled[keep]


def _staircase_area(points: np.ndarray, ref: np.ndarray) -> float:
    order = np.argsort(points[:, 0], kind="stable")
    xs = points[order, 0]
    ys = points[order, 1]
    area = 0.0
    for i in range(xs.size):
        next_x = xs[i + 1] if i + 1 < xs.size else ref[0]
        area += (next_x - xs[i]) * (ref[1] - ys[i])
    return area


def _hv_recursive(points: np.ndarray, ref: np.ndarray) -> float:
    if points.shape[0] == 0:
        return 0.0
    points = points[pareto_front_indices(points)]
    d = ref.size
    if d == 1:
        return float(ref[0] - points[:, 0].min())
    if d == 2:
        return _staircase_area(points, ref)
    order = np.argsort(points[:, -1], kind="stable")
    points = points[order]
    zs = points[:, -1]
    uniq = np.unique(zs)
    vol = 0.0
    for i, z in enumerate(uniq):
        z_next = uniq[i + 1] if i + 1 < uniq.size else ref[-1]
        active = points[zs <= z, :-1]
        vol += (z_next - z) * _hv_recursive(active, ref[:-1])
    return vol


def hypervolume_exact(front, spec: HvSpec) -> float:
    """Exact Lebesgue measure of the union of boxes [point, ref] after
    normalization, scaled so the unit box yields 1. Supports d <= 6."""
    if spec.dim > 6:
        raise ValueError("exact hypervolume supported for d <= 6")
    pts = _normalize(front, spec, clip_low=False)
    if pts.shape[0] == 0:
        return 0.0
    raw = _hv_recursive(pts, spec.ref)
    return raw / float(np.prod(spec.ref))


def hv_monte_carlo(front, spec: HvSpec, samples: int, seed: int) -> float:
    """Fraction of uniform samples in [0, ref] dominated by the front;
    independent estimator used to cross-check the exact sweep."""
    if samples < 10_000:
        raise ValueError("use at least 1e4 samples")
    pts = _normalize(front, spec, clip_low=False)
    if pts.shape[0] == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    hits = 0
    remaining = samples
    chunk = 65_536
    while remaining > 0:
        b = min(chunk, remaining)
        s = rng.random((b, spec.dim)) * spec.ref
        dominated = np.zeros(b, dtype=bool)
        for p in pts:
            dominated |= np.all(p <= s, axis=1)
        hits += int(dominated.sum())
        remaining -= b
    return hits / samples


def normalized_hypervolume(points, lower, upper, ref=None) -> float:
    """Normalized HV of the Pareto front of a point set: extract the front,
    min-max normalize by the given bounds, and measure against the reference
    (all-ones default). Out-of-bound points are clipped with a logged report,
    so adding dominated points never changes the result."""
    points = np.asarray(points, dtype=np.float64)
    spec = HvSpec(lower=lower, upper=upper, ref=ref)
    if points.shape[0] == 0:
        return 0.0
    front = points[pareto_front_indices(points)]
    pts = _normalize(front, spec, clip_low=True)
    if pts.shape[0] == 0:
        return 0.0
    return _hv_recursive(pts, spec.ref) / float(np.prod(spec.ref))
