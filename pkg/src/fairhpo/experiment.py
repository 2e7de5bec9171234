"""Experiment orchestration: the nested stratified k-fold objective
function, experiment configs (TOML/JSON), and the seeded NSGA dispatch that
persists archives and manifests.

Objective evaluations within a generation may run on a thread pool; results
merge in individual order and every per-evaluation RNG stream derives from
(master seed, generation, index), so archives are identical across worker
counts.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

import fairhpo
from fairhpo import storage
from fairhpo.data import Dataset, FoldPlan, resolve_dataset, stratified_kfold
from fairhpo.learners import predict, train
from fairhpo.metrics import (FAIRNESS_METRICS, MetricId, MetricUndefinedError,
                             PredictionSet, evaluate_all)
from fairhpo.moo.nsga import (DEFAULT_ETA_C, DEFAULT_ETA_M, DEFAULT_P_CX,
                              das_dennis, default_partitions, derive_eval_seed,
                              run_nsga2, run_nsga3)
from fairhpo.space import LearnerId, builtin_space, decode

DEFAULT_POP_BIO = 20
DEFAULT_POP_MAO = 42
DEFAULT_MAX_EVALS = 1000
DEFAULT_K_FOLDS = 5


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class EvaluationError(RuntimeError):
    """An objective evaluation failed outright (beyond per-fold tolerance);
    carries the offending configuration."""


class WallClockExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    dataset: dict[str, Any]
    learner: str
    formulation: str                      # "bio:<metric>" or "mao"
    fairness_metrics: tuple[str, ...] = tuple(m.value for m in FAIRNESS_METRICS)
    k_folds: int = DEFAULT_K_FOLDS
    pop: int | None = None
    max_evals: int = DEFAULT_MAX_EVALS
    seeds: tuple[int, ...] = (0,)
    workers: int = 1
    max_wall_s: float | None = None

    def __post_init__(self):
        if self.k_folds < 2:
            raise ConfigError(f"k_folds must be >= 2, got {self.k_folds}")
        try:
            LearnerId(self.learner)
        except ValueError:
            raise ConfigError(f"unknown learner {self.learner!r}") from None
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        self.objective_ids()  # validates the formulation
        if self.max_evals < self.resolved_pop():
            raise ConfigError("max_evals must cover the initial population")
        if self.resolved_pop() % 2:
            raise ConfigError("population size must be even")

    def is_mao(self) -> bool:
        return self.formulation == "mao"

    def objective_ids(self) -> tuple[MetricId, ...]:
        """The objectives the optimizer actually minimizes: f1_obj plus the
        formulation's fairness metric(s)."""
        if self.formulation.startswith("bio:"):
            metric = self.formulation.split(":", 1)[1]
            try:
                mid = MetricId(metric)
            except ValueError:
                raise ConfigError(f"unknown fairness metric {metric!r}") from None
            if mid is MetricId.F1_OBJ:
                raise ConfigError("bi-objective formulation needs a fairness metric")
            return (MetricId.F1_OBJ, mid)
        if self.formulation == "mao":
            mets = tuple(MetricId(m) for m in self.fairness_metrics)
            if len(mets) < 2:
                raise ConfigError("many-objective formulation needs >= 2 fairness metrics")
            if len(set(mets)) != len(mets):
                raise ConfigError("duplicate fairness metrics")
            return (MetricId.F1_OBJ,) + mets
        raise ConfigError(f"formulation must be 'bio:<metric>' or 'mao', "
                          f"got {self.formulation!r}")

    def recorded_ids(self) -> tuple[MetricId, ...]:
        """Archives always record the full shared metric vocabulary (f1_obj
        plus every configured fairness metric) so BiO runs can later be
        scored in any other metric's plane; a BiO metric outside the list is
        appended."""
        mets = [MetricId.F1_OBJ] + [MetricId(m) for m in self.fairness_metrics]
        for mid in self.objective_ids():
            if mid not in mets:
                mets.append(mid)
        return tuple(mets)

    def resolved_pop(self) -> int:
        if self.pop is not None:
            return self.pop
        return DEFAULT_POP_MAO if self.is_mao() else DEFAULT_POP_BIO

    def run_id(self, seed: int) -> str:
        slug = self.formulation.replace(":", "-")
        return f"{self.name}--{slug}--seed{seed}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name, "dataset": dict(self.dataset),
            "learner": self.learner, "formulation": self.formulation,
            "fairness_metrics": list(self.fairness_metrics),
            "k_folds": self.k_folds, "pop": self.resolved_pop(),
            "max_evals": self.max_evals, "seeds": list(self.seeds),
            "workers": self.workers, "max_wall_s": self.max_wall_s,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentConfig":
        known = {"name", "dataset", "learner", "formulation", "fairness_metrics",
                 "k_folds", "pop", "max_evals", "seeds", "workers", "max_wall_s"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kw = dict(d)
        if "fairness_metrics" in kw:
            kw["fairness_metrics"] = tuple(kw["fairness_metrics"])
        if "seeds" in kw:
            kw["seeds"] = tuple(int(s) for s in kw["seeds"])
        return cls(**kw)

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        if path.suffix == ".toml":
            try:
                import tomllib  # py311+
            except ModuleNotFoundError:
                import tomli as tomllib
            return cls.from_dict(tomllib.loads(text))
        return cls.from_dict(json.loads(text))


def objective_function(values: dict[str, Any], d: Dataset, plan: FoldPlan,
                       learner: str, metric_ids: tuple[MetricId, ...],
                       seed: int):
    """Cross-validated objective: train on each fold complement, score the
    held-out fold, aggregate by mean. A failing fold is flagged; if every
    fold fails the evaluation scores worst-case (all ones) so the
    optimization continues.

    Returns (aggregated vector, per-fold vectors with None for failures,
    flags, all_failed).
    """
    fold_vectors: list[list[float] | None] = []
    flags: list[str] = []
    ok: list[np.ndarray] = []
    for fold in range(plan.k):
        fold_seed = derive_eval_seed(seed, fold, 0)
        try:
            tr = plan.train_indices(fold)
            va = plan.folds[fold]
            model = train(learner, values, d.features[tr], d.target[tr], fold_seed)
            if model.degenerate:
                flags.append(f"fold{fold}:degenerate_single_class")
            preds = predict(model, d.features[va])
            pset = PredictionSet(y_true=d.target[va], y_pred=preds,
                                 protected=d.protected[va])
            vec = evaluate_all(pset, metric_ids)
        except (ValueError, MetricUndefinedError) as e:
            flags.append(f"fold{fold}:failed:{e}")
            fold_vectors.append(None)
            continue
        for mid in vec.undefined_flags:
            flags.append(f"fold{fold}:undefined:{mid.value}")
        fold_vectors.append(list(vec.values))
        ok.append(vec.as_array())
    if not ok:
        flags.append("all_folds_failed")
        return np.ones(len(metric_ids)), fold_vectors, flags, True
    agg = np.mean(np.array(ok), axis=0)
    return agg, fold_vectors, flags, False


@dataclass
class RunResult:
    run_id: str
    seed: int
    path: Path
    n_evals: int
    truncated: bool = False


@dataclass
class _EvalLog:
    """Per-eval extras captured by the evaluator for archive records."""
    extras: dict[int, dict] = field(default_factory=dict)


def _make_evaluator(cfg: ExperimentConfig, dataset: Dataset, plan: FoldPlan,
                    space, log: _EvalLog):
    recorded = cfg.recorded_ids()
    optimized_cols = [recorded.index(m) for m in cfg.objective_ids()]

    def eval_one(args):
        genotype, ctx = args
        t0 = time.perf_counter()
        config = decode(space, genotype)
        try:
            agg, fold_vectors, flags, _failed = objective_function(
                config.values, dataset, plan, cfg.learner, recorded, ctx.seed)
        except Exception as e:
            raise EvaluationError(
                f"evaluation {ctx.eval_id} (gen {ctx.gen}) aborted for "
                f"configuration {config.values}: {e}") from e
        log.extras[ctx.eval_id] = {
            "params": config.values,
            "fold_objectives": fold_vectors,
            "objectives_full": agg.tolist(),
            "flags": flags,
            "wall_ms": (time.perf_counter() - t0) * 1000.0,
        }
        return agg[optimized_cols]

    def evaluator(genotypes, ctxs):
        jobs = list(zip(genotypes, ctxs))
        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                rows = list(pool.map(eval_one, jobs))
        else:
            rows = [eval_one(j) for j in jobs]
        return np.array(rows)

    return evaluator


def run_experiment(cfg: ExperimentConfig, root: Path | str | None = None) -> list[RunResult]:
    """Execute one experiment config across its seeds, persisting one run
    directory (manifest + JSONL archive + summary CSV) per seed."""
    root = storage.data_root(root)
    dataset = resolve_dataset(cfg.dataset)
    space = builtin_space(cfg.learner)
    recorded_names = [m.value for m in cfg.recorded_ids()]
    optimized_names = [m.value for m in cfg.objective_ids()]
    pop = cfg.resolved_pop()
    results = []

    for seed in cfg.seeds:
        plan = stratified_kfold(dataset, cfg.k_folds, seed)
        log = _EvalLog()
        evaluator = _make_evaluator(cfg, dataset, plan, space, log)
        run_id = cfg.run_id(seed)
        manifest = {
            "experiment": cfg.name,
            "run_id": run_id,
            "version": fairhpo.__version__,
            "config": cfg.to_dict(),
            "dataset": dataset.manifest(),
            "learner": cfg.learner,
            "formulation": cfg.formulation,
            "seed": seed,
            "fold_seed": seed,
            "k_folds": cfg.k_folds,
            "objective_ids": recorded_names,
            "optimized_ids": optimized_names,
            "search_space": space.to_json(),
            "engine": {
                "algorithm": "nsga3" if cfg.is_mao() else "nsga2",
                "pop": pop, "max_evals": cfg.max_evals,
                "eta_c": DEFAULT_ETA_C, "eta_m": DEFAULT_ETA_M,
                "p_cx": DEFAULT_P_CX, "p_m": 1.0 / space.dim,
                "seed_derivation": "sha256(master:gen:index)",
                "fold_aggregation": "mean",
            },
            "hv_bounds": None,  # filled by analysis exports, not by runs
            "backend": fairhpo.backend_name(),
        }
        writer = storage.RunWriter(root, run_id, manifest)
        t_start = time.monotonic()
        truncated = False

        def flush(gen: int, batch):
            writer.append(_assemble_records(batch, log))
            if cfg.max_wall_s is not None and time.monotonic() - t_start > cfg.max_wall_s:
                raise WallClockExceeded()

        try:
            if cfg.is_mao():
                n_obj = len(optimized_names)
                dirs = das_dennis(n_obj, default_partitions(n_obj, pop))
                manifest["engine"]["ref_dirs"] = len(dirs)
                archive = run_nsga3(evaluator, space.dim, pop, dirs,
                                    cfg.max_evals, seed, on_generation=flush)
            else:
                archive = run_nsga2(evaluator, space.dim, pop, cfg.max_evals,
                                    seed, on_generation=flush)
            n_evals = len(archive)
        except WallClockExceeded:
            truncated = True
            n_evals = len(storage.read_archive(writer.dir))
        manifest["n_evals"] = n_evals
        manifest["truncated"] = truncated
        storage.write_manifest(writer.dir, manifest)
        writer.finalize_summary()
        results.append(RunResult(run_id=run_id, seed=seed, path=writer.dir,
                                 n_evals=n_evals, truncated=truncated))
    return results


def _assemble_records(batch, log: _EvalLog):
    for rec in batch:
        extra = log.extras.pop(rec.eval_id)
        yield {
            "eval_id": rec.eval_id,
            "gen": rec.gen,
            "genotype": rec.genotype.tolist(),
            "params": extra["params"],
            "fold_objectives": extra["fold_objectives"],
            "objectives": extra["objectives_full"],
            "flags": extra["flags"],
            "wall_ms": extra["wall_ms"],
        }


def oof_predictions(values: dict[str, Any], d: Dataset, plan: FoldPlan,
                    learner: str, seed: int) -> np.ndarray:
    """Out-of-fold predictions over the whole dataset under the same fold
    protocol and seed derivation the objective function uses."""
    preds = np.zeros(d.m, dtype=np.int8)
    for fold in range(plan.k):
        fold_seed = derive_eval_seed(seed, fold, 0)
        tr = plan.train_indices(fold)
        va = plan.folds[fold]
        model = train(learner, values, d.features[tr], d.target[tr], fold_seed)
        preds[va] = predict(model, d.features[va])
    return preds


def behavior_for_record(run, record: dict) -> "PredictionSet":
    """Rebuild the dataset and fold plan from a stored run's manifest,
    retrain the recorded configuration, and return its out-of-fold
    PredictionSet for behavior reporting."""
    man = run.manifest
    dataset = resolve_dataset(man["dataset"]["provenance"])
    plan = stratified_kfold(dataset, int(man["k_folds"]), int(man["fold_seed"]))
    preds = oof_predictions(record["params"], dataset, plan, man["learner"],
                            run.eval_seed_of(record))
    return PredictionSet(y_true=dataset.target, y_pred=preds,
                         protected=dataset.protected)


def suite_configs(base: ExperimentConfig) -> list[ExperimentConfig]:
    """Expand a config into the full BiO grid plus the MaO run (shared
    experiment name), the layout the contrast and comparison analyses need."""
    out = []
    for metric in base.fairness_metrics:
        out.append(ExperimentConfig(**{**base.to_dict(), "pop": base.pop,
                                       "formulation": f"bio:{metric}"}))
    out.append(ExperimentConfig(**{**base.to_dict(), "pop": base.pop,
                                   "formulation": "mao"}))
    return out
