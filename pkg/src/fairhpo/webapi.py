"""Read-only HTTP API over stored runs for the explorer UI.

GET  /runs                              run listing
GET  /runs/{id}/archive?offset=&limit=  paged archive records
GET  /runs/{id}/front?objectives=a,b    Pareto front on >= 2 objectives
GET  /runs/{id}/ternary?objectives=a,b,c
GET  /collections/{id}/contrast         contrast matrices of an experiment
GET  /runs/{id}/behavior/{eval_id}      behavior report (retrains the config)
POST /runs/{id}/select                  stateless weighted selection

404 unknown run/eval, 400 malformed request, 422 unknown metric id.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware

from fairhpo.analysis import (AnalysisError, behavior_report, contrast_matrix,
                              ternary_projection)
from fairhpo.experiment import behavior_for_record
from fairhpo.metrics import MetricId
from fairhpo.moo.pareto import pareto_front_indices
from fairhpo.selection import (SelectionError, WeightVector, scalarized_select,
                               what_if)
from fairhpo.storage import StorageError, collection_of, list_runs, load_run


def _load(root: Path, run_id: str):
    try:
        return load_run(root, run_id)
    except StorageError as e:
        raise HTTPException(status_code=404, detail=str(e)) from None


def _parse_objectives(run, objectives: str, expected: int | None = None):
    ids = [s for s in (objectives or "").split(",") if s]
    if expected is not None and len(ids) != expected:
        raise HTTPException(status_code=400,
                            detail=f"need exactly {expected} objectives")
    if len(ids) < 2:
        raise HTTPException(status_code=400, detail="need >= 2 objectives")
    for mid in ids:
        try:
            MetricId(mid)
        except ValueError:
            raise HTTPException(status_code=422,
                                detail=f"unknown metric id {mid!r}") from None
        if mid not in run.objective_ids:
            raise HTTPException(status_code=422,
                                detail=f"run does not carry metric {mid!r}")
    return ids


def create_app(root: Path) -> FastAPI:
    app = FastAPI(title="fairhpo explorer API", version="0.1.0")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["GET", "POST"], allow_headers=["*"])

    @app.get("/runs")
    def runs():
        return {"runs": list_runs(root)}

    @app.get("/runs/{run_id}/archive")
    def archive(run_id: str, offset: int = Query(0, ge=0),
                limit: int = Query(200, ge=1, le=2000)):
        run = _load(root, run_id)
        page = run.records[offset:offset + limit]
        return {"run_id": run_id, "total": len(run.records), "offset": offset,
                "objective_ids": list(run.objective_ids), "records": page}

    @app.get("/runs/{run_id}/front")
    def front(run_id: str, objectives: str = ""):
        """With ?objectives=..., the Pareto front of the archive projected
        onto those objectives. Without, the run's optimized-objective front
        carrying every recorded metric column: the same front POST /select
        scores, so clients mirroring the scalarization stay consistent."""
        run = _load(root, run_id)
        if objectives:
            ids = _parse_objectives(run, objectives)
            view = run.archive_view()
            pts = view.project(tuple(ids))
            idx = pareto_front_indices(pts)
            points = [{"eval_id": int(view.eval_ids[i]),
                       "objectives": pts[i].tolist()} for i in idx]
        else:
            fv = run.front_view()
            ids = list(fv.metric_ids)
            points = [{"eval_id": fv.eval_ids[i],
                       "objectives": fv.values[i].tolist()}
                      for i in range(len(fv))]
        return {"run_id": run_id, "objective_ids": ids, "points": points}

    @app.get("/runs/{run_id}/ternary")
    def ternary(run_id: str, objectives: str = ""):
        run = _load(root, run_id)
        ids = _parse_objectives(run, objectives, expected=3)
        view = run.archive_view()
        values = view.project(tuple(ids))
        lower = values.min(axis=0)
        upper = np.array([u if u > l else l + 1.0
                          for l, u in zip(lower, values.max(axis=0))])
        return {"run_id": run_id, "objective_ids": ids,
                "points": ternary_projection(values, view.eval_ids, lower, upper)}

    @app.get("/collections/{experiment}/contrast")
    def contrast(experiment: str):
        try:
            coll = collection_of(root, experiment)
        except StorageError as e:
            raise HTTPException(status_code=404, detail=str(e)) from None
        matrices = []
        for dataset, learner in coll.groups():
            try:
                cm = contrast_matrix(coll, dataset, learner)
            except AnalysisError as e:
                raise HTTPException(status_code=400, detail=str(e)) from None
            matrices.append({
                "dataset": dataset, "learner": learner,
                "metric_ids": list(cm.metric_ids),
                "matrix": cm.matrix.tolist(),
                "spread": cm.spread.tolist(),
                "n_seeds": cm.n_seeds,
                "bounds": {k: list(v) for k, v in cm.bounds.items()},
            })
        return {"experiment": experiment, "matrices": matrices}

    @app.get("/runs/{run_id}/behavior/{eval_id}")
    def behavior(run_id: str, eval_id: int):
        run = _load(root, run_id)
        try:
            rec = run.record_by_eval_id(eval_id)
        except StorageError as e:
            raise HTTPException(status_code=404, detail=str(e)) from None
        pset = behavior_for_record(run, rec)
        body = behavior_report(pset).to_json()
        body.update({"run_id": run_id, "eval_id": eval_id,
                     "objectives": rec["objectives"], "params": rec["params"]})
        return body

    @app.post("/runs/{run_id}/select")
    async def select(run_id: str, request: Request):
        run = _load(root, run_id)
        try:
            payload = await request.json()
        except Exception:
            raise HTTPException(status_code=400, detail="body must be JSON") from None
        weights = payload.get("weights", payload) if isinstance(payload, dict) else None
        if not isinstance(weights, dict) or not weights:
            raise HTTPException(status_code=400,
                                detail="expected {'weights': {metric: weight}}")
        for mid in weights:
            try:
                MetricId(mid)
            except ValueError:
                raise HTTPException(status_code=422,
                                    detail=f"unknown metric id {mid!r}") from None
        try:
            w = WeightVector.from_dict(weights)
            front_view = run.front_view()
            result = scalarized_select(front_view, w)
            ranking = what_if(front_view, w)
        except SelectionError as e:
            raise HTTPException(status_code=400, detail=str(e)) from None
        return {"run_id": run_id, "eval_id": result.eval_id,
                "score": result.score, "weights": w.to_json(),
                "ranking": [{"eval_id": e, "score": s} for e, s in ranking]}

    return app
