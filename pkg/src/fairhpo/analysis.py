"""Pareto-front interpretability: fairness-metric contrast matrices,
bi-objective vs many-objective hypervolume comparison, ternary projections,
and per-model group-behavior reports.

Hypervolumes are always normalized with bounds computed over the union of
every archive being compared, and those bounds travel with the reported
numbers so they can be reproduced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from fairhpo import metrics as fm
from fairhpo.metrics import MetricId, PredictionSet
from fairhpo.moo.hypervolume import normalized_hypervolume

F0 = MetricId.F1_OBJ.value

TERNARY_CORNERS = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])


class AnalysisError(ValueError):
    """Missing archives or inconsistent metric vocabularies."""


@dataclass(frozen=True)
class RunKey:
    dataset: str
    learner: str
    formulation: str  # "bio:<fairness metric>" or "mao"
    seed: int


@dataclass(frozen=True)
class ArchiveView:
    """Just enough of a stored run for analysis: ids + objective matrix."""
    eval_ids: np.ndarray
    metric_ids: tuple[str, ...]
    values: np.ndarray

    def column(self, metric: str) -> np.ndarray:
        try:
            j = self.metric_ids.index(metric)
        except ValueError:
            raise AnalysisError(f"archive lacks metric {metric!r}") from None
        return self.values[:, j]

    def project(self, metric_subset: tuple[str, ...]) -> np.ndarray:
        return np.column_stack([self.column(mid) for mid in metric_subset])


@dataclass
class RunCollection:
    runs: dict[RunKey, ArchiveView] = field(default_factory=dict)

    def add(self, key: RunKey, view: ArchiveView):
        self.runs[key] = view

    def groups(self) -> list[tuple[str, str]]:
        return sorted({(k.dataset, k.learner) for k in self.runs})

    def seeds(self, dataset: str, learner: str) -> list[int]:
        return sorted({k.seed for k in self.runs
                       if (k.dataset, k.learner) == (dataset, learner)})

    def fairness_metrics(self, dataset: str, learner: str) -> list[str]:
        out = {k.formulation.split(":", 1)[1] for k in self.runs
               if (k.dataset, k.learner) == (dataset, learner)
               and k.formulation.startswith("bio:")}
        return sorted(out)

    def get(self, dataset: str, learner: str, formulation: str, seed: int) -> ArchiveView:
        key = RunKey(dataset, learner, formulation, seed)
        if key not in self.runs:
            raise AnalysisError(f"missing archive for {key}")
        return self.runs[key]

    def bounds(self, dataset: str, learner: str, metric: str) -> tuple[float, float]:
        """Min/max of one objective over the union of the group's archives;
        zero-span bounds are widened so normalization stays well defined."""
        cols = [v.column(metric) for k, v in self.runs.items()
                if (k.dataset, k.learner) == (dataset, learner)
                and metric in v.metric_ids]
        if not cols:
            raise AnalysisError(f"no archives carry metric {metric!r} "
                                f"for ({dataset}, {learner})")
        allv = np.concatenate(cols)
        lo, hi = float(allv.min()), float(allv.max())
        if hi <= lo:
            hi = lo + 1.0
        return lo, hi

    def plane_hv(self, dataset: str, learner: str, formulation: str, seed: int,
                 fairness_metric: str) -> float:
        """Normalized HV of an archive projected onto (f1_obj, metric)."""
        view = self.get(dataset, learner, formulation, seed)
        pts = view.project((F0, fairness_metric))
        lo0, hi0 = self.bounds(dataset, learner, F0)
        lo1, hi1 = self.bounds(dataset, learner, fairness_metric)
        return normalized_hypervolume(pts, lower=[lo0, lo1], upper=[hi0, hi1])


@dataclass(frozen=True)
class ContrastMatrix:
    dataset: str
    learner: str
    metric_ids: tuple[str, ...]
    matrix: np.ndarray          # entry (j, i) = C(f_i, f_j), seed mean
    spread: np.ndarray          # (j, i, 2): min/max over seeds
    n_seeds: int
    bounds: dict[str, tuple[float, float]]

    def to_rows(self) -> list[dict[str, Any]]:
        rows = []
        for j, mj in enumerate(self.metric_ids):
            for i, mi in enumerate(self.metric_ids):
                rows.append({"row_metric": mj, "col_metric": mi,
                             "value": float(self.matrix[j, i]),
                             "spread_min": float(self.spread[j, i, 0]),
                             "spread_max": float(self.spread[j, i, 1])})
        return rows


def contrast_from_hv(hv_direct: float, hv_indirect: float) -> float:
    """Conflict strength: HV achieved optimizing the metric directly minus
    HV achieved by the archive optimized for the other metric."""
    return hv_direct - hv_indirect


def contrast(runs: RunCollection, f_i: str, f_j: str, dataset: str,
             learner: str) -> tuple[float, list[float]]:
    """Mean over matched seeds of C(f_i, f_j) for one (dataset, learner)."""
    f_i, f_j = str(MetricId(f_i)), str(MetricId(f_j))
    seeds = runs.seeds(dataset, learner)
    missing = []
    per_seed = []
    for seed in seeds:
        try:
            hv_direct = runs.plane_hv(dataset, learner, f"bio:{f_j}", seed, f_j)
            hv_indirect = runs.plane_hv(dataset, learner, f"bio:{f_i}", seed, f_j)
        except AnalysisError as e:
            missing.append(f"seed {seed}: {e}")
            continue
        per_seed.append(contrast_from_hv(hv_direct, hv_indirect))
    if missing:
        raise AnalysisError(f"incomplete BiO grid for C({f_i}, {f_j}) on "
                            f"({dataset}, {learner}): " + "; ".join(missing))
    return float(np.mean(per_seed)), per_seed


def contrast_matrix(runs: RunCollection, dataset: str, learner: str) -> ContrastMatrix:
    """All pairwise contrasts; diagonal exactly 0. Raises listing the
    missing (formulation, seed) cells when the BiO grid is incomplete."""
    mets = runs.fairness_metrics(dataset, learner)
    if len(mets) < 2:
        raise AnalysisError(f"need >= 2 BiO fairness metrics for ({dataset}, {learner})")
    seeds = runs.seeds(dataset, learner)
    missing = [f"(bio:{m}, seed {s})" for m in mets for s in seeds
               if RunKey(dataset, learner, f"bio:{m}", s) not in runs.runs]
    if missing:
        raise AnalysisError(
            f"incomplete BiO grid on ({dataset}, {learner}); missing cells: "
            + ", ".join(missing))
    k = len(mets)
    mat = np.zeros((k, k))
    spread = np.zeros((k, k, 2))
    for i, mi in enumerate(mets):
        for j, mj in enumerate(mets):
            if i == j:
                continue
            mean, per_seed = contrast(runs, mi, mj, dataset, learner)
            mat[j, i] = mean
            spread[j, i, 0] = min(per_seed)
            spread[j, i, 1] = max(per_seed)
    bounds = {m: runs.bounds(dataset, learner, m) for m in mets + [F0]}
    return ContrastMatrix(dataset=dataset, learner=learner, metric_ids=tuple(mets),
                          matrix=mat, spread=spread, n_seeds=len(seeds), bounds=bounds)


@dataclass(frozen=True)
class ComparisonPair:
    dataset: str
    learner: str
    fairness_metric: str
    seed: int
    hv_bi: float
    hv_many_projected: float
    f0_bounds: tuple[float, float] = (0.0, 1.0)
    metric_bounds: tuple[float, float] = (0.0, 1.0)

    @property
    def regret(self) -> float:
        return self.hv_bi - self.hv_many_projected


@dataclass(frozen=True)
class FormulationComparison:
    pairs: tuple[ComparisonPair, ...]
    pearson_r: float | None   # None when a side is constant (degenerate)

    @property
    def mean_regret(self) -> float:
        return float(np.mean([p.regret for p in self.pairs]))


def formulation_comparison(runs: RunCollection) -> FormulationComparison:
    """Per (dataset, learner, fairness metric, seed): BiO plane HV vs the
    MaO archive projected onto the same plane with the same bounds."""
    pairs = []
    for dataset, learner in runs.groups():
        f0_bounds = runs.bounds(dataset, learner, F0)
        for metric in runs.fairness_metrics(dataset, learner):
            m_bounds = runs.bounds(dataset, learner, metric)
            for seed in runs.seeds(dataset, learner):
                hv_bi = runs.plane_hv(dataset, learner, f"bio:{metric}", seed, metric)
                hv_many = runs.plane_hv(dataset, learner, "mao", seed, metric)
                pairs.append(ComparisonPair(dataset, learner, metric, seed,
                                            hv_bi, hv_many, f0_bounds, m_bounds))
    if not pairs:
        raise AnalysisError("no matched BiO/MaO archive pairs found")
    x = np.array([p.hv_bi for p in pairs])
    y = np.array([p.hv_many_projected for p in pairs])
    if x.size < 2 or x.std() == 0.0 or y.std() == 0.0:
        r = None
    else:
        r = float(np.corrcoef(x, y)[0, 1])
    return FormulationComparison(pairs=tuple(pairs), pearson_r=r)


def ternary_projection(values, eval_ids, lower, upper):
    """Barycentric simplex coordinates for exactly three objectives.

    Each objective is min-max normalized by the given bounds; weights are the
    normalized values divided by their sum, so a point sits at corner i when
    only objective i is bad. All-zero points map to the centroid and are
    flagged. Corners: obj1 (0,0), obj2 (1,0), obj3 (0.5, sqrt(3)/2).
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != 3:
        raise ValueError("ternary projection needs exactly 3 objectives")
    lower = np.asarray(lower, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    normed = np.clip((values - lower) / (upper - lower), 0.0, 1.0)
    sums = normed.sum(axis=1)
    degenerate = sums <= 0.0
    weights = np.full_like(normed, 1.0 / 3.0)
    ok = ~degenerate
    weights[ok] = normed[ok] / sums[ok, None]
    coords = weights @ TERNARY_CORNERS
    return [
        {"x": float(coords[i, 0]), "y": float(coords[i, 1]),
         "eval_id": int(eval_ids[i]), "degenerate": bool(degenerate[i]),
         "objectives": values[i].tolist()}
        for i in range(values.shape[0])
    ]


@dataclass(frozen=True)
class BehaviorReport:
    m: int
    group_counts: dict[str, int]            # per protected group
    cell_counts: dict[str, int]             # per (group, outcome-class)
    acceptance_rates: dict[str, float | None]        # P(yhat=1 | A=a)
    conditional_rates: dict[str, float | None]       # P(yhat=1 | A=a, Y=y)
    metric_values: dict[str, float | None]
    undefined: tuple[str, ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "group_counts": self.group_counts,
            "cell_counts": self.cell_counts,
            "acceptance_rates": self.acceptance_rates,
            "conditional_rates": self.conditional_rates,
            "metric_values": self.metric_values,
            "undefined": list(self.undefined),
        }


def behavior_report(p: PredictionSet) -> BehaviorReport:
    """Group acceptance and qualification-conditional rates with counts,
    plus the fairness metric values computed from the same predictions."""
    group_counts = {}
    cell_counts = {}
    acceptance = {}
    conditional = {}
    undefined = []
    for a in (0, 1):
        mask_a = p.protected == a
        n_a = int(mask_a.sum())
        group_counts[f"a={a}"] = n_a
        acceptance[f"a={a}"] = (float(p.y_pred[mask_a].mean()) if n_a else None)
        if n_a == 0:
            undefined.append(f"group a={a} empty")
        for y in (0, 1):
            mask = mask_a & (p.y_true == y)
            n = int(mask.sum())
            cell_counts[f"a={a},y={y}"] = n
            conditional[f"a={a},y={y}"] = (float(p.y_pred[mask].mean()) if n else None)
            if n == 0:
                undefined.append(f"cell a={a},y={y} empty")

    values: dict[str, float | None] = {}
    try:
        values[MetricId.DDSP.value] = fm.ddsp(p)
    except fm.MetricUndefinedError:
        values[MetricId.DDSP.value] = None
    deop_v, deop_flag = fm.deop(p)
    deod_v, deod_flag = fm.deod(p)
    values[MetricId.DEOP.value] = deop_v
    values[MetricId.DEOD.value] = deod_v
    if deop_flag:
        undefined.append("deop conditioning cell empty")
    if deod_flag:
        undefined.append("deod conditioning cell empty")
    values[MetricId.INVD.value] = fm.invd(p) if p.m >= 2 else None
    values[MetricId.INVD_SIM.value] = fm.invd_sim(p) if p.m >= 2 else None
    values[MetricId.F1_OBJ.value] = fm.f1_objective(p)
    return BehaviorReport(m=p.m, group_counts=group_counts, cell_counts=cell_counts,
                          acceptance_rates=acceptance, conditional_rates=conditional,
                          metric_values=values, undefined=tuple(undefined))
