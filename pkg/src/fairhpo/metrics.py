"""Unfairness metrics over binary predictions plus the 1 - F1 performance
objective. All metrics are costs in [0, 1]; lower is better.

Group metrics (ddsp, deod, deop) are absolute gaps in conditional positive
rates between the protected groups. The individual metrics (invd, invd_sim)
are pairwise: invd averages |y_i - y_j| * |yhat_i - yhat_j| over all ordered
pairs including the diagonal, and invd_sim swaps in (1 - |y_i - y_j|), i.e.
penalizes equally-labeled pairs that receive different predictions. For
binary labels both reduce exactly to contingency-count identities, which is
what we compute; the O(m^2) literal sum is kept as a test oracle.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

log = logging.getLogger(__name__)


class MetricUndefinedError(ValueError):
    """A conditioning group required by the metric is empty."""


class MetricId(str, Enum):
    DDSP = "ddsp"
    DEOD = "deod"
    DEOP = "deop"
    INVD = "invd"
    INVD_SIM = "invd_sim"
    F1_OBJ = "f1_obj"

    def __str__(self) -> str:  # serialize as the bare id
        return self.value


FAIRNESS_METRICS = (MetricId.DDSP, MetricId.DEOD, MetricId.DEOP, MetricId.INVD)
DEFAULT_METRICS = (MetricId.F1_OBJ,) + FAIRNESS_METRICS


def _as_binary(vec, label: str) -> np.ndarray:
    arr = np.asarray(vec, dtype=np.int8)
    if arr.ndim != 1:
        raise ValueError(f"{label} must be 1-dimensional")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise ValueError(f"{label} must be binary 0/1")
    return arr


@dataclass(frozen=True)
class PredictionSet:
    y_true: np.ndarray
    y_pred: np.ndarray
    protected: np.ndarray

    def __post_init__(self):
        y = _as_binary(self.y_true, "y_true")
        p = _as_binary(self.y_pred, "y_pred")
        a = _as_binary(self.protected, "protected")
        if not (y.shape == p.shape == a.shape):
            raise ValueError("y_true, y_pred, protected must share length")
        object.__setattr__(self, "y_true", y)
        object.__setattr__(self, "y_pred", p)
        object.__setattr__(self, "protected", a)

    @property
    def m(self) -> int:
        return self.y_true.size


@dataclass(frozen=True)
class ObjectiveVector:
    metric_ids: tuple[MetricId, ...]
    values: tuple[float, ...]
    undefined_flags: frozenset[MetricId] = frozenset()

    def __post_init__(self):
        for mid, v in zip(self.metric_ids, self.values):
            if not np.isfinite(v) or v < -1e-12 or v > 1 + 1e-12:
                raise ValueError(f"{mid.value}={v} outside [0, 1]")

    def as_dict(self) -> dict[str, float]:
        return {mid.value: v for mid, v in zip(self.metric_ids, self.values)}

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.float64)


def _rate(pred: np.ndarray, mask: np.ndarray) -> float | None:
    n = int(mask.sum())
    if n == 0:
        return None
    return float(pred[mask].sum()) / n


def ddsp(p: PredictionSet) -> float:
    """|P(yhat=1 | A=0) - P(yhat=1 | A=1)| from exact counts."""
    r0 = _rate(p.y_pred, p.protected == 0)
    r1 = _rate(p.y_pred, p.protected == 1)
    if r0 is None or r1 is None:
        raise MetricUndefinedError("undefined group rate: a protected group is empty")
    return abs(r0 - r1)


def deop(p: PredictionSet) -> tuple[float, bool]:
    """|P(yhat=1 | A=0, Y=1) - P(yhat=1 | A=1, Y=1)|.

    An empty conditioning cell contributes as if equal to the other group's
    rate (gap 0) and sets the undefined flag.
    """
    r0 = _rate(p.y_pred, (p.protected == 0) & (p.y_true == 1))
    r1 = _rate(p.y_pred, (p.protected == 1) & (p.y_true == 1))
    if r0 is None or r1 is None:
        return 0.0, True
    return abs(r0 - r1), False


def deod(p: PredictionSet) -> tuple[float, bool]:
    """Average of the per-outcome-class rate gaps, empty cells as in deop."""
    total = 0.0
    flagged = False
    for yv in (0, 1):
        r0 = _rate(p.y_pred, (p.protected == 0) & (p.y_true == yv))
        r1 = _rate(p.y_pred, (p.protected == 1) & (p.y_true == yv))
        if r0 is None or r1 is None:
            flagged = True
            continue
        total += abs(r0 - r1)
    return 0.5 * total, flagged


def _contingency(p: PredictionSet) -> tuple[int, int, int, int]:
    """(n00, n01, n10, n11) with n_ab = #{y=a, yhat=b}."""
    y = p.y_true.astype(np.int64)
    yh = p.y_pred.astype(np.int64)
    n11 = int(np.sum(y & yh))
    n10 = int(np.sum(y)) - n11
    n01 = int(np.sum(yh)) - n11
    n00 = p.m - n11 - n10 - n01
    return n00, n01, n10, n11


def invd(p: PredictionSet) -> float:
    """(1/m^2) sum_{i,j} |y_i - y_j| |yhat_i - yhat_j| over ordered pairs.

    Pairs contribute iff labels differ and predictions differ, which counts
    2 * (n00*n11 + n01*n10).
    """
    if p.m < 2:
        raise ValueError("invd needs at least 2 rows")
    n00, n01, n10, n11 = _contingency(p)
    return 2.0 * (n00 * n11 + n01 * n10) / (p.m * p.m)


def invd_sim(p: PredictionSet) -> float:
    """(1/m^2) sum_{i,j} (1 - |y_i - y_j|) |yhat_i - yhat_j|: similarly
    labeled pairs receiving different predictions."""
    if p.m < 2:
        raise ValueError("invd_sim needs at least 2 rows")
    n00, n01, n10, n11 = _contingency(p)
    return 2.0 * (n00 * n01 + n10 * n11) / (p.m * p.m)


def f1_objective(p: PredictionSet) -> float:
    """1 - F1 with F1 = 2TP / (2TP + FP + FN); vacuously F1 = 1 when no
    positives exist in either labels or predictions."""
    tp = int(np.sum((p.y_true == 1) & (p.y_pred == 1)))
    fp = int(np.sum((p.y_true == 0) & (p.y_pred == 1)))
    fn = int(np.sum((p.y_true == 1) & (p.y_pred == 0)))
    if tp + fp + fn == 0:
        log.debug("f1_objective: no positives anywhere; F1 defined as 1")
        return 0.0
    return 1.0 - 2.0 * tp / (2.0 * tp + fp + fn)


def evaluate_all(p: PredictionSet, metrics: list[MetricId] | tuple[MetricId, ...]) -> ObjectiveVector:
    """Evaluate the requested metrics in request order, propagating flags."""
    if not metrics:
        raise ValueError("metrics must be non-empty")
    ids = tuple(MetricId(m) for m in metrics)
    if len(set(ids)) != len(ids):
        raise ValueError(f"duplicate metric ids in request: {[m.value for m in ids]}")
    values = []
    flags = set()
    for mid in ids:
        if mid is MetricId.DDSP:
            values.append(ddsp(p))
        elif mid is MetricId.DEOP:
            v, flagged = deop(p)
            values.append(v)
            if flagged:
                flags.add(mid)
        elif mid is MetricId.DEOD:
            v, flagged = deod(p)
            values.append(v)
            if flagged:
                flags.add(mid)
        elif mid is MetricId.INVD:
            values.append(invd(p))
        elif mid is MetricId.INVD_SIM:
            values.append(invd_sim(p))
        elif mid is MetricId.F1_OBJ:
            values.append(f1_objective(p))
    return ObjectiveVector(metric_ids=ids, values=tuple(values),
                           undefined_flags=frozenset(flags))
