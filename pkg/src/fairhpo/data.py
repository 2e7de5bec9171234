"""Tabular dataset loading, validation, stratified folds, and synthetic
generators with controlled base rates.

Datasets carry a numeric feature matrix, a binary target (1 = favorable
outcome), and a binary protected attribute (1 = privileged group). Rows with
missing cells are dropped at ingestion with a logged count; categorical
feature columns are one-hot expanded in deterministic (column, lexicographic
category) order.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

log = logging.getLogger(__name__)

MISSING_MARKERS = {"", "?", "NA", "N/A", "na", "nan", "NaN", "null", "None"}


class DataError(ValueError):
    """Malformed input data or an unusable column."""


@dataclass(frozen=True)
class Dataset:
    name: str
    features: np.ndarray
    feature_names: tuple[str, ...]
    target: np.ndarray
    protected: np.ndarray
    provenance: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        tgt = np.asarray(self.target, dtype=np.int8)
        prot = np.asarray(self.protected, dtype=np.int8)
        m = feats.shape[0]
        if feats.ndim != 2 or len(self.feature_names) != feats.shape[1]:
            raise DataError("feature matrix/name mismatch")
        if tgt.shape != (m,) or prot.shape != (m,):
            raise DataError("target/protected length mismatch")
        if m < 4:
            raise DataError(f"need at least 4 rows, got {m}")
        for label, vec in (("target", tgt), ("protected", prot)):
            vals = np.unique(vec)
            if not np.all(np.isin(vals, [0, 1])):
                raise DataError(f"{label} contains non-binary values {vals.tolist()}")
            if vals.size < 2:
                raise DataError(f"{label} has a single class; both must be present")
        if not np.all(np.isfinite(feats)):
            raise DataError("feature matrix contains non-finite values")
        for arr in (feats, tgt, prot):
            arr.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "target", tgt)
        object.__setattr__(self, "protected", prot)

    @property
    def m(self) -> int:
        return self.features.shape[0]

    @property
    def n(self) -> int:
        return self.features.shape[1]

    def cell_counts(self) -> dict[str, int]:
        """Joint (target, protected) counts keyed 'y=..,a=..'."""
        out = {}
        for yv in (0, 1):
            for av in (0, 1):
                out[f"y={yv},a={av}"] = int(
                    np.sum((self.target == yv) & (self.protected == av))
                )
        return out

    def manifest(self) -> dict[str, Any]:
        src = dict(self.provenance)
        return {
            "name": self.name,
            "m": self.m,
            "n": self.n,
            "target_col": src.get("target_col"),
            "protected_col": src.get("protected_col"),
            "positive_label": src.get("positive_label"),
            "privileged_label": src.get("privileged_label"),
            "cell_counts": self.cell_counts(),
            "provenance": src,
        }


@dataclass(frozen=True)
class FoldPlan:
    k: int
    folds: tuple[np.ndarray, ...]
    seed: int

    def train_indices(self, fold: int) -> np.ndarray:
        rest = [f for i, f in enumerate(self.folds) if i != fold]
        return np.sort(np.concatenate(rest))


@dataclass(frozen=True)
class DatasetSummary:
    m: int
    n: int
    cells: dict[str, float]
    base_rate_gap: float


def _is_missing(v: str) -> bool:
    return v.strip() in MISSING_MARKERS


def _binarize_column(values: list[str], col: str, one_label: str, role: str) -> np.ndarray:
    distinct = sorted(set(values))
    if len(distinct) > 2:
        raise DataError(
            f"non-binary {role} column {col!r}: "
            f"{len(distinct)} distinct values {distinct[:5]}"
        )
    if one_label not in distinct:
        raise DataError(f"label {one_label!r} not present in column {col!r} (saw {distinct})")
    return np.array([1 if v == one_label else 0 for v in values], dtype=np.int8)


def _encode_features(header: list[str], rows: list[list[str]],
                     skip: set[str]) -> tuple[np.ndarray, list[str]]:
    """Numeric columns pass through; categoricals one-hot in (column,
    lexicographic category) order."""
    cols: list[np.ndarray] = []
    names: list[str] = []
    for j, col in enumerate(header):
        if col in skip:
            continue
        raw = [r[j] for r in rows]
        try:
            vec = np.array([float(v) for v in raw], dtype=np.float64)
            cols.append(vec)
            names.append(col)
        except ValueError:
            for cat in sorted(set(raw)):
                cols.append(np.array([1.0 if v == cat else 0.0 for v in raw]))
                names.append(f"{col}={cat}")
    if not cols:
        raise DataError("no feature columns left after removing target/protected")
    return np.column_stack(cols), names


def load_csv(path, target_col: str, protected_col: str,
             positive_label: str, privileged_label: str,
             name: str | None = None) -> Dataset:
    """Load a UTF-8 CSV with a header row into a Dataset.

    Rows with missing cells (empty, '?', 'NA', ...) are dropped with a logged
    count. Raises DataError with row/column location for malformed input.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        for col in (target_col, protected_col):
            if col not in header:
                raise DataError(f"{path}: missing column {col!r}")
        rows = []
        dropped = 0
        for i, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataError(f"{path}: row {i}: expected {len(header)} cells, got {len(row)}")
            row = [c.strip() for c in row]
            if any(_is_missing(c) for c in row):
                dropped += 1
                continue
            rows.append(row)
    if dropped:
        log.info("load_csv(%s): dropped %d rows with missing cells", path, dropped)
    if not rows:
        raise DataError(f"{path}: no usable rows")

    tj = header.index(target_col)
    pj = header.index(protected_col)
    target = _binarize_column([r[tj] for r in rows], target_col, positive_label, "target")
    protected = _binarize_column([r[pj] for r in rows], protected_col,
                                 privileged_label, "protected attribute")
    feats, names = _encode_features(header, rows, {target_col, protected_col})
    return Dataset(
        name=name or str(path),
        features=feats,
        feature_names=tuple(names),
        target=target,
        protected=protected,
        provenance={
            "kind": "csv",
            "path": str(path),
            "target_col": target_col,
            "protected_col": protected_col,
            "positive_label": positive_label,
            "privileged_label": privileged_label,
            "rows_dropped_missing": dropped,
        },
    )


def stratified_kfold(d: Dataset, k: int, seed: int) -> FoldPlan:
    """Disjoint folds stratified jointly by (target, protected).

    Within each joint stratum, shuffled members are dealt round-robin, so
    per-fold stratum counts differ by at most one.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if k > d.m:
        raise ValueError(f"k={k} exceeds dataset size m={d.m}")
    rng = np.random.default_rng(seed)
    buckets: list[list[int]] = [[] for _ in range(k)]
    for yv in (0, 1):
        for av in (0, 1):
            idx = np.flatnonzero((d.target == yv) & (d.protected == av))
            idx = idx[rng.permutation(idx.size)]
            for pos, row in enumerate(idx):
                buckets[pos % k].append(int(row))
    folds = tuple(np.array(sorted(b), dtype=np.int64) for b in buckets)
    for f in folds:
        f.setflags(write=False)
    return FoldPlan(k=k, folds=folds, seed=seed)


def largest_remainder_counts(proportions: list[float], total: int) -> list[int]:
    """Integer counts summing to total, closest to the given proportions."""
    raw = [p * total for p in proportions]
    counts = [math.floor(r) for r in raw]
    rem = total - sum(counts)
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[:rem]:
        counts[i] += 1
    return counts


# (target, protected) cell layout used by the synthetic generators
_CELLS = ((1, 0), (0, 0), (1, 1), (0, 1))


def _synth_features(y: np.ndarray, a: np.ndarray, rng: np.random.Generator,
                    coeffs: list[tuple[float, float, float]]) -> np.ndarray:
    """Linear-Gaussian columns: c_y * y + c_a * a + noise_scale * N(0,1)."""
    cols = [cy * y + ca * a + ns * rng.standard_normal(y.size)
            for cy, ca, ns in coeffs]
    return np.column_stack(cols)


def synth_lawschool(m: int, seed: int) -> Dataset:
    """Law-school-like dataset: 92% privileged (White), 8% unprivileged
    (Black), with qualification concentrated in the privileged group.

    Joint cells (qualified,Black)=0.01, (unqualified,Black)=0.07,
    (qualified,White)=0.50, (unqualified,White)=0.42, realized exactly via
    largest-remainder rounding. Three feature columns follow a linear-Gaussian
    generator correlated with both target and group.
    """
    if m < 100:
        raise ValueError(f"m must be >= 100 to populate all four cells, got {m}")
    counts = largest_remainder_counts([0.01, 0.07, 0.50, 0.42], m)
    if min(counts) < 1:
        raise ValueError(f"m={m} leaves an empty (target, protected) cell")
    rng = np.random.default_rng(seed)
    y = np.concatenate([np.full(c, yv, dtype=np.int8)
                        for c, (yv, _) in zip(counts, _CELLS)])
    a = np.concatenate([np.full(c, av, dtype=np.int8)
                        for c, (_, av) in zip(counts, _CELLS)])
    perm = rng.permutation(m)
    y, a = y[perm], a[perm]
    feats = _synth_features(y, a, rng, [(1.0, 0.4, 0.8), (0.8, 0.2, 1.0), (0.3, 0.9, 0.7)])
    return Dataset(
        name="synth_lawschool",
        features=feats,
        feature_names=("lsat_z", "gpa_z", "resource_z"),
        target=y,
        protected=a,
        provenance={"kind": "synth_lawschool", "m": m, "seed": seed,
                    "cells": {f"y={yv},a={av}": c
                              for c, (yv, av) in zip(counts, _CELLS)}},
    )


# Raw-column recipe for the credit surrogate; shared by the Dataset builder
# and the CSV writer so load_csv(write_csv(...)) reproduces the Dataset.
_GERMAN_PURPOSES = ["business", "car", "education", "furniture"]
_GERMAN_HOUSING = ["free", "own", "rent"]


def _german_raw(m: int, seed: int):
    counts = largest_remainder_counts([0.203, 0.107, 0.497, 0.193], m)
    if min(counts) < 1:
        raise ValueError(f"m={m} leaves an empty (target, protected) cell")
    rng = np.random.default_rng(seed)
    y = np.concatenate([np.full(c, yv, dtype=np.int8)
                        for c, (yv, _) in zip(counts, _CELLS)])
    a = np.concatenate([np.full(c, av, dtype=np.int8)
                        for c, (_, av) in zip(counts, _CELLS)])
    perm = rng.permutation(m)
    y, a = y[perm], a[perm]
    duration = np.round(24 - 6.0 * y + 2.0 * a + 8.0 * rng.standard_normal(m), 0)
    amount = np.round(3000 - 900.0 * y + 250.0 * a + 1800.0 * rng.standard_normal(m), 0)
    age = np.round(35 + 3.0 * y + 4.0 * a + 10.0 * rng.standard_normal(m), 0)
    rate = np.round(np.clip(3 - 0.8 * y + 0.5 * rng.standard_normal(m), 1, 4), 0)
    score = np.round(0.9 * y + 0.2 * a + 0.6 * rng.standard_normal(m), 3)
    purpose = [_GERMAN_PURPOSES[int(i)] for i in
               (rng.random(m) * 2 + y + rng.random(m)).clip(0, 3).astype(int)]
    housing = [_GERMAN_HOUSING[int(i)] for i in
               (rng.random(m) + y * 0.8 + 0.4).clip(0, 2).astype(int)]
    return y, a, {
        "duration": duration, "amount": amount, "age": age,
        "installment_rate": rate, "score": score,
        "purpose": purpose, "housing": housing,
    }


def synth_german_credit(m: int = 1000, seed: int = 0) -> Dataset:
    """Credit-scoring surrogate matching the published marginals of the
    German Credit benchmark: 70/30 good/bad outcomes and 69/31
    privileged/unprivileged split (exact at m=1000), with mixed numeric and
    categorical features."""
    y, a, cols = _german_raw(m, seed)
    header = list(cols.keys())
    rows = [[_fmt_cell(cols[c][i]) for c in header] for i in range(m)]
    feats, names = _encode_features(header, rows, set())
    return Dataset(
        name="synth_german_credit",
        features=feats,
        feature_names=tuple(names),
        target=y,
        protected=a,
        provenance={"kind": "synth_german_credit", "m": m, "seed": seed,
                    "target_col": "credit", "protected_col": "sex",
                    "positive_label": "good", "privileged_label": "male"},
    )


def _fmt_cell(v) -> str:
    if isinstance(v, str):
        return v
    fv = float(v)
    if fv == int(fv):
        return str(int(fv))
    return repr(fv)


def write_german_credit_csv(path, m: int = 1000, seed: int = 0) -> None:
    """Write the credit surrogate as a raw CSV; loading it back through
    load_csv(target='credit', protected='sex', 'good', 'male') reproduces
    synth_german_credit(m, seed) exactly."""
    y, a, cols = _german_raw(m, seed)
    header = ["credit", "sex"] + list(cols.keys())
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(m):
            w.writerow(["good" if y[i] else "bad", "male" if a[i] else "female"]
                       + [_fmt_cell(cols[c][i]) for c in cols])


def summarize(d: Dataset) -> DatasetSummary:
    counts = d.cell_counts()
    cells = {key: c / d.m for key, c in counts.items()}
    n_priv = counts["y=1,a=1"] + counts["y=0,a=1"]
    n_unpriv = d.m - n_priv
    gap = counts["y=1,a=1"] / n_priv - counts["y=1,a=0"] / n_unpriv
    return DatasetSummary(m=d.m, n=d.n, cells=cells, base_rate_gap=gap)


def resolve_dataset(ref: dict[str, Any]) -> Dataset:
    """Build a Dataset from a descriptor dict (experiment configs, manifests)."""
    kind = ref.get("kind")
    if kind == "csv":
        return load_csv(ref["path"], ref["target_col"], ref["protected_col"],
                        ref["positive_label"], ref["privileged_label"],
                        name=ref.get("name"))
    if kind == "synth_lawschool":
        return synth_lawschool(int(ref.get("m", 10000)), int(ref.get("seed", 0)))
    if kind == "synth_german_credit":
        return synth_german_credit(int(ref.get("m", 1000)), int(ref.get("seed", 0)))
    raise DataError(f"unknown dataset kind {kind!r}")
