"""Run persistence: JSON-lines archives (one evaluation per line), run
manifests, and summary CSVs under a data root.

Layout: <root>/runs/<run_id>/{manifest.json, archive.jsonl, summary.csv}.
Archives are flushed per generation, so an interrupted run loses at most one
generation. wall_ms is the only non-deterministic field; canonical archive
bytes (used for rerun identity checks) strip it.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from fairhpo.analysis import ArchiveView, RunCollection, RunKey
from fairhpo.moo.nsga import derive_eval_seed
from fairhpo.moo.pareto import pareto_front_indices
from fairhpo.selection import FrontView

ENV_DATA_DIR = "FAIRHPO_DATA_DIR"


class StorageError(RuntimeError):
    """Missing runs or malformed stored artifacts."""


def data_root(explicit: str | os.PathLike | None = None) -> Path:
    if explicit:
        return Path(explicit)
    env = os.environ.get(ENV_DATA_DIR)
    return Path(env) if env else Path.cwd() / "fairhpo_data"


def run_dir(root: Path, run_id: str) -> Path:
    return Path(root) / "runs" / run_id


def dump_json_line(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def record_to_json(rec: dict) -> dict:
    out = dict(rec)
    out["genotype"] = [float(g) for g in rec["genotype"]]
    out["objectives"] = [float(v) for v in rec["objectives"]]
    return out


class RunWriter:
    """Append-per-generation archive writer for one run."""

    def __init__(self, root: Path, run_id: str, manifest: dict):
        self.dir = run_dir(root, run_id)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.archive_path = self.dir / "archive.jsonl"
        if self.archive_path.exists():
            self.archive_path.unlink()
        self.manifest = manifest
        write_manifest(self.dir, manifest)

    def append(self, records: Iterable[dict]):
        with open(self.archive_path, "a", encoding="utf-8") as fh:
            for rec in records:
                fh.write(dump_json_line(record_to_json(rec)) + "\n")

    def finalize_summary(self):
        records = read_archive(self.dir)
        objective_ids = self.manifest["objective_ids"]
        path = self.dir / "summary.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["eval_id", "gen", *objective_ids, "n_flags", "wall_ms"])
            for rec in records:
                w.writerow([rec["eval_id"], rec["gen"],
                            *[repr(v) for v in rec["objectives"]],
                            len(rec["flags"]), rec["wall_ms"]])


def write_manifest(rdir: Path, manifest: dict):
    with open(Path(rdir) / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")


def read_manifest(rdir: Path) -> dict:
    path = Path(rdir) / "manifest.json"
    if not path.exists():
        raise StorageError(f"no manifest at {path}")
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def read_archive(rdir: Path) -> list[dict]:
    path = Path(rdir) / "archive.jsonl"
    if not path.exists():
        raise StorageError(f"no archive at {path}")
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def canonical_archive_bytes(rdir: Path) -> bytes:
    """Archive bytes with the wall_ms timing field removed; two runs of the
    same manifest must agree on this exactly."""
    out = []
    for rec in read_archive(rdir):
        rec = dict(rec)
        rec.pop("wall_ms", None)
        out.append(dump_json_line(rec))
    return ("\n".join(out) + "\n").encode()


def list_runs(root: Path) -> list[dict]:
    base = Path(root) / "runs"
    if not base.is_dir():
        return []
    out = []
    for entry in sorted(base.iterdir()):
        if not entry.is_dir():
            continue
        try:
            man = read_manifest(entry)
        except (StorageError, json.JSONDecodeError):
            continue
        out.append({
            "run_id": entry.name,
            "experiment": man.get("experiment"),
            "dataset": man.get("dataset", {}).get("name"),
            "learner": man.get("learner"),
            "formulation": man.get("formulation"),
            "seed": man.get("seed"),
            "objective_ids": man.get("objective_ids"),
            "n_evals": man.get("n_evals"),
        })
    return out


@dataclass(frozen=True)
class StoredRun:
    run_id: str
    manifest: dict
    records: list[dict]

    @property
    def objective_ids(self) -> tuple[str, ...]:
        return tuple(self.manifest["objective_ids"])

    @property
    def optimized_ids(self) -> tuple[str, ...]:
        return tuple(self.manifest.get("optimized_ids",
                                       self.manifest["objective_ids"]))

    def objectives_matrix(self) -> np.ndarray:
        return np.array([r["objectives"] for r in self.records], dtype=np.float64)

    def eval_ids(self) -> np.ndarray:
        return np.array([r["eval_id"] for r in self.records], dtype=np.int64)

    def archive_view(self) -> ArchiveView:
        return ArchiveView(eval_ids=self.eval_ids(),
                           metric_ids=self.objective_ids,
                           values=self.objectives_matrix())

    def front_view(self) -> FrontView:
        """Pareto front in the optimized objective space, carrying every
        recorded metric column for scalarized selection."""
        objs = self.objectives_matrix()
        opt_cols = [self.objective_ids.index(m) for m in self.optimized_ids]
        idx = pareto_front_indices(objs[:, opt_cols])
        ids = self.eval_ids()
        return FrontView(eval_ids=tuple(int(ids[i]) for i in idx),
                         metric_ids=self.objective_ids,
                         values=objs[idx])

    def record_by_eval_id(self, eval_id: int) -> dict:
        for rec in self.records:
            if rec["eval_id"] == eval_id:
                return rec
        raise StorageError(f"run {self.run_id} has no eval_id {eval_id}")

    def eval_seed_of(self, rec: dict) -> int:
        """Reconstruct the per-evaluation seed from (master seed, gen, index);
        the index is the record's offset within its generation."""
        gen = rec["gen"]
        gen_start = min(r["eval_id"] for r in self.records if r["gen"] == gen)
        return derive_eval_seed(int(self.manifest["seed"]), gen,
                                rec["eval_id"] - gen_start)


def load_run(root: Path, run_id: str) -> StoredRun:
    rdir = run_dir(root, run_id)
    if not rdir.is_dir():
        raise StorageError(f"unknown run {run_id!r}")
    return StoredRun(run_id=run_id, manifest=read_manifest(rdir),
                     records=read_archive(rdir))


def collection_of(root: Path, experiment: str) -> RunCollection:
    """Gather every stored run of one experiment into a RunCollection."""
    found = RunCollection()
    for meta in list_runs(root):
        if meta["experiment"] != experiment:
            continue
        run = load_run(root, meta["run_id"])
        man = run.manifest
        found.add(RunKey(dataset=man["dataset"]["name"], learner=man["learner"],
                         formulation=man["formulation"], seed=int(man["seed"])),
                  run.archive_view())
    if not found.runs:
        raise StorageError(f"no stored runs for experiment {experiment!r}")
    return found
