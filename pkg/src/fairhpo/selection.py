"""Weighted scalarized model selection over a Pareto front: the chosen model
minimizes sum_i w_i * f_i over raw objective values (all metrics already
share the [0,1] cost scale). Ties break on lower f1_obj, then the objective
vector lexicographically, then lower eval id, so interactive reruns are
stable."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fairhpo.metrics import MetricId

F0 = MetricId.F1_OBJ.value


class SelectionError(ValueError):
    """Empty front or weights referencing unknown metrics."""


@dataclass(frozen=True)
class WeightVector:
    metric_ids: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.metric_ids) != len(self.weights) or not self.metric_ids:
            raise SelectionError("weights and metric ids must align and be non-empty")
        if len(set(self.metric_ids)) != len(self.metric_ids):
            raise SelectionError("duplicate metric ids in weight vector")
        for mid in self.metric_ids:
            try:
                MetricId(mid)
            except ValueError:
                raise SelectionError(f"unknown metric id {mid!r}") from None
        w = np.array(self.weights, dtype=np.float64)
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise SelectionError("weights must be finite and >= 0")
        total = float(w.sum())
        if total <= 0:
            raise SelectionError("at least one weight must be > 0")
        object.__setattr__(self, "weights", tuple(float(x) / total for x in w))

    @classmethod
    def from_dict(cls, d: dict[str, float]) -> "WeightVector":
        if not isinstance(d, dict) or not d:
            raise SelectionError("weights must be a non-empty {metric: weight} object")
        items = list(d.items())
        return cls(metric_ids=tuple(k for k, _ in items),
                   weights=tuple(float(v) for _, v in items))

    def to_json(self) -> dict[str, float]:
        return dict(zip(self.metric_ids, self.weights))


@dataclass(frozen=True)
class FrontView:
    """A Pareto front ready for selection: ids plus objective columns."""
    eval_ids: tuple[int, ...]
    metric_ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (len(self.eval_ids), len(self.metric_ids)):
            raise SelectionError("front shape mismatch")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return len(self.eval_ids)


@dataclass(frozen=True)
class SelectionResult:
    eval_id: int
    score: float
    ranking: tuple[tuple[int, float], ...]  # (eval_id, score), best first

    def to_json(self) -> dict:
        return {"eval_id": self.eval_id, "score": self.score,
                "ranking": [{"eval_id": e, "score": s} for e, s in self.ranking]}


def _ordered(front: FrontView, w: WeightVector) -> list[tuple[int, float]]:
    if len(front) == 0:
        raise SelectionError("empty front")
    missing = [m for m in w.metric_ids if m not in front.metric_ids]
    if missing:
        raise SelectionError(f"weighted metrics absent from front: {missing}")
    # accumulate metric by metric in weight order: bit-reproducible by any
    # client that mirrors the scalarization with a sequential sum
    scores = np.zeros(len(front))
    for mid, weight in zip(w.metric_ids, w.weights):
        scores = scores + weight * front.values[:, front.metric_ids.index(mid)]
    f0 = (front.values[:, front.metric_ids.index(F0)]
          if F0 in front.metric_ids else np.zeros(len(front)))
    order = sorted(
        range(len(front)),
        key=lambda i: (scores[i], f0[i], tuple(front.values[i]), front.eval_ids[i]),
    )
    return [(front.eval_ids[i], float(scores[i])) for i in order]


def scalarized_select(front: FrontView, w: WeightVector) -> SelectionResult:
    ranking = _ordered(front, w)
    return SelectionResult(eval_id=ranking[0][0], score=ranking[0][1],
                           ranking=tuple(ranking))


def what_if(front: FrontView, w: WeightVector) -> list[tuple[int, float]]:
    """Full ordering for interactive weight sliders."""
    return _ordered(front, w)
