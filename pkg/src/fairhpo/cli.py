"""Command-line interface.

Subcommands: run, analyze {contrast,compare,ternary}, select, report,
export, serve. Exit codes: 0 success, 1 usage error, 2 runtime failure;
--json switches stderr errors to a machine-readable envelope.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from fairhpo import storage
from fairhpo.analysis import (AnalysisError, behavior_report, contrast_matrix,
                              formulation_comparison, ternary_projection)
from fairhpo.experiment import (ConfigError, ExperimentConfig,
                                behavior_for_record, run_experiment,
                                suite_configs)
from fairhpo.metrics import FAIRNESS_METRICS
from fairhpo.selection import SelectionError, WeightVector, scalarized_select
from fairhpo.storage import StorageError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        raise UsageError(message)


def _dataset_ref(args) -> dict:
    if args.dataset == "lawschool":
        return {"kind": "synth_lawschool", "m": args.dataset_m or 10000,
                "seed": args.dataset_seed}
    if args.dataset == "german":
        return {"kind": "synth_german_credit", "m": args.dataset_m or 1000,
                "seed": args.dataset_seed}
    if args.dataset == "csv":
        needed = [args.csv_path, args.target_col, args.protected_col,
                  args.positive_label, args.privileged_label]
        if any(v is None for v in needed):
            raise UsageError("csv dataset needs --csv-path, --target-col, "
                             "--protected-col, --positive-label, --privileged-label")
        return {"kind": "csv", "path": args.csv_path,
                "target_col": args.target_col, "protected_col": args.protected_col,
                "positive_label": args.positive_label,
                "privileged_label": args.privileged_label}
    raise UsageError(f"unknown dataset {args.dataset!r}")


def _cmd_run(args) -> int:
    if args.config:
        cfg = ExperimentConfig.from_file(args.config)
    else:
        if not args.dataset or not args.learner:
            raise UsageError("run needs --config or (--dataset and --learner)")
        name = args.name or f"{args.dataset}-{args.learner}"
        cfg = ExperimentConfig(
            name=name,
            dataset=_dataset_ref(args),
            learner=args.learner,
            formulation=args.formulation,
            fairness_metrics=tuple(args.metrics.split(",")) if args.metrics
            else tuple(m.value for m in FAIRNESS_METRICS),
            k_folds=args.k,
            pop=args.pop,
            max_evals=args.max_evals,
            seeds=tuple(int(s) for s in args.seeds.split(",")),
            workers=args.workers,
            max_wall_s=args.max_wall_s,
        )
    configs = suite_configs(cfg) if args.suite else [cfg]
    root = storage.data_root(args.data_dir)
    for c in configs:
        for res in run_experiment(c, root):
            print(f"{res.run_id}: {res.n_evals} evaluations -> {res.path}"
                  + (" [truncated]" if res.truncated else ""))
    return 0


def _write_csv(path: str, header: list[str], rows: list[list]):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _cmd_analyze_contrast(args) -> int:
    root = storage.data_root(args.data_dir)
    coll = storage.collection_of(root, args.experiment)
    for dataset, learner in coll.groups():
        cm = contrast_matrix(coll, dataset, learner)
        print(f"# contrast matrix: {dataset} / {learner} "
              f"(rows = evaluated metric f_j, cols = optimized metric f_i, "
              f"mean over {cm.n_seeds} seeds)")
        header = [""] + list(cm.metric_ids)
        print("\t".join(header))
        for j, mj in enumerate(cm.metric_ids):
            cells = [f"{cm.matrix[j, i]:+.4f}" for i in range(len(cm.metric_ids))]
            print("\t".join([mj] + cells))
        bounds_txt = ", ".join(f"{m}=[{lo:.6g}, {hi:.6g}]"
                               for m, (lo, hi) in sorted(cm.bounds.items()))
        print(f"# normalization bounds: {bounds_txt}")
        if args.out:
            rows = [[r["row_metric"], r["col_metric"], r["value"],
                     r["spread_min"], r["spread_max"]] for r in cm.to_rows()]
            _write_csv(args.out, ["row_metric", "col_metric", "value",
                                  "spread_min", "spread_max"], rows)
            bounds_path = f"{args.out}.bounds.json"
            with open(bounds_path, "w", encoding="utf-8") as fh:
                json.dump({m: list(b) for m, b in cm.bounds.items()}, fh, indent=2)
            print(f"wrote {args.out} and {bounds_path}")
    return 0


def _cmd_analyze_compare(args) -> int:
    root = storage.data_root(args.data_dir)
    coll = storage.collection_of(root, args.experiment)
    comp = formulation_comparison(coll)
    for p in comp.pairs:
        print(f"{p.dataset}/{p.learner} {p.fairness_metric} seed{p.seed}: "
              f"bio={p.hv_bi:.4f} mao={p.hv_many_projected:.4f} regret={p.regret:+.4f}")
    r_txt = "degenerate" if comp.pearson_r is None else f"{comp.pearson_r:.4f}"
    print(f"pearson_r={r_txt} mean_regret={comp.mean_regret:+.4f} n={len(comp.pairs)}")
    if args.out:
        rows = [[p.dataset, p.learner, p.fairness_metric, p.seed,
                 p.hv_bi, p.hv_many_projected, p.regret,
                 *p.f0_bounds, *p.metric_bounds] for p in comp.pairs]
        _write_csv(args.out, ["dataset", "learner", "fairness_metric", "seed",
                              "hv_bi", "hv_many_projected", "regret",
                              "f0_lo", "f0_hi", "metric_lo", "metric_hi"], rows)
        print(f"wrote {args.out}")
    return 0


def _ternary_rows(run, objectives: list[str]):
    view = run.archive_view()
    if len(objectives) != 3:
        raise UsageError("ternary needs exactly 3 objectives")
    values = view.project(tuple(objectives))
    lower = values.min(axis=0)
    upper = values.max(axis=0)
    upper = [u if u > l else l + 1.0 for l, u in zip(lower, upper)]
    return ternary_projection(values, view.eval_ids, lower, upper)


def _cmd_analyze_ternary(args) -> int:
    root = storage.data_root(args.data_dir)
    run = storage.load_run(root, args.run)
    objectives = args.objectives.split(",")
    pts = _ternary_rows(run, objectives)
    rows = [[p["x"], p["y"], p["eval_id"], *p["objectives"]] for p in pts]
    header = ["x", "y", "eval_id", *objectives]
    if args.out:
        _write_csv(args.out, header, rows)
        print(f"wrote {args.out} ({len(rows)} points)")
    else:
        print("\t".join(header))
        for row in rows:
            print("\t".join(str(v) for v in row))
    return 0


def _cmd_select(args) -> int:
    root = storage.data_root(args.data_dir)
    run = storage.load_run(root, args.run)
    try:
        weights = json.loads(args.weights)
    except json.JSONDecodeError as e:
        raise UsageError(f"--weights must be JSON: {e}") from None
    w = WeightVector.from_dict(weights)
    result = scalarized_select(run.front_view(), w)
    if args.json:
        print(json.dumps(result.to_json()))
    else:
        print(f"eval_id={result.eval_id} score={result.score:.6f}")
        rec = run.record_by_eval_id(result.eval_id)
        print(f"params={json.dumps(rec['params'])}")
    return 0


def _cmd_report(args) -> int:
    root = storage.data_root(args.data_dir)
    run = storage.load_run(root, args.run)
    rec = run.record_by_eval_id(args.eval_id)
    pset = behavior_for_record(run, rec)
    report = behavior_report(pset).to_json()
    report["eval_id"] = args.eval_id
    report["run_id"] = args.run
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def _cmd_export(args) -> int:
    root = storage.data_root(args.data_dir)
    run = storage.load_run(root, args.run)
    if args.what == "front":
        fv = run.front_view()
        header = ["eval_id", *fv.metric_ids]
        rows = [[fv.eval_ids[i], *fv.values[i].tolist()] for i in range(len(fv))]
    else:
        header = ["eval_id", "gen", *run.objective_ids, "flags", "wall_ms"]
        rows = [[r["eval_id"], r["gen"], *r["objectives"],
                 ";".join(r["flags"]), r["wall_ms"]] for r in run.records]
    out = args.out or f"{args.run}-{args.what}.csv"
    _write_csv(out, header, rows)
    print(f"wrote {out} ({len(rows)} rows)")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from fairhpo.webapi import create_app
    app = create_app(storage.data_root(args.data_dir))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="fairhpo", description=__doc__)
    parser.add_argument("--data-dir", default=None,
                        help="run storage root (default $FAIRHPO_DATA_DIR)")
    parser.add_argument("--json", action="store_true",
                        help="machine-readable errors/outputs where supported")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment")
    p_run.add_argument("--config", help="TOML/JSON experiment config file")
    p_run.add_argument("--name")
    p_run.add_argument("--dataset", choices=["lawschool", "german", "csv"])
    p_run.add_argument("--dataset-m", type=int, default=None)
    p_run.add_argument("--dataset-seed", type=int, default=0)
    p_run.add_argument("--csv-path")
    p_run.add_argument("--target-col")
    p_run.add_argument("--protected-col")
    p_run.add_argument("--positive-label")
    p_run.add_argument("--privileged-label")
    p_run.add_argument("--learner", choices=["rf", "gbt", "mlp"])
    p_run.add_argument("--formulation", default="mao",
                       help="'mao' or 'bio:<metric>' (default mao)")
    p_run.add_argument("--metrics", help="comma list of fairness metrics for mao")
    p_run.add_argument("--k", type=int, default=5)
    p_run.add_argument("--pop", type=int, default=None)
    p_run.add_argument("--max-evals", type=int, default=1000)
    p_run.add_argument("--seeds", default="0")
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--max-wall-s", type=float, default=None)
    p_run.add_argument("--suite", action="store_true",
                       help="run the full BiO grid plus MaO under one name")
    p_run.set_defaults(func=_cmd_run)

    p_an = sub.add_parser("analyze", help="post-hoc Pareto analysis")
    an_sub = p_an.add_subparsers(dest="analysis", required=True)
    p_c = an_sub.add_parser("contrast")
    p_c.add_argument("--experiment", required=True)
    p_c.add_argument("--out", help="CSV export path")
    p_c.set_defaults(func=_cmd_analyze_contrast)
    p_cmp = an_sub.add_parser("compare")
    p_cmp.add_argument("--experiment", required=True)
    p_cmp.add_argument("--out")
    p_cmp.set_defaults(func=_cmd_analyze_compare)
    p_t = an_sub.add_parser("ternary")
    p_t.add_argument("--run", required=True)
    p_t.add_argument("--objectives", required=True,
                     help="comma list of exactly 3 objective ids")
    p_t.add_argument("--out")
    p_t.set_defaults(func=_cmd_analyze_ternary)

    p_sel = sub.add_parser("select", help="weighted scalarized selection")
    p_sel.add_argument("--run", required=True)
    p_sel.add_argument("--weights", required=True, help='JSON {"metric": weight}')
    p_sel.set_defaults(func=_cmd_select)

    p_rep = sub.add_parser("report", help="behavior report (retrains the config)")
    p_rep.add_argument("--run", required=True)
    p_rep.add_argument("--eval-id", type=int, required=True)
    p_rep.add_argument("--out")
    p_rep.set_defaults(func=_cmd_report)

    p_exp = sub.add_parser("export", help="CSV export of a stored run")
    p_exp.add_argument("--run", required=True)
    p_exp.add_argument("--what", choices=["archive", "front"], default="front")
    p_exp.add_argument("--out")
    p_exp.set_defaults(func=_cmd_export)

    p_srv = sub.add_parser("serve", help="read-only HTTP API for the explorer UI")
    p_srv.add_argument("--port", type=int, default=8400)
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.set_defaults(func=_cmd_serve)
    return parser


def _emit_error(args_json: bool, kind: str, message: str):
    if args_json:
        sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    else:
        sys.stderr.write(f"fairhpo: {kind}: {message}\n")


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    json_mode = "--json" in argv
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        _emit_error(json_mode, "usage", str(e))
        return 1
    try:
        return args.func(args)
    except (UsageError, ConfigError, SelectionError) as e:
        _emit_error(args.json, "usage", str(e))
        return 1
    except (AnalysisError, StorageError, ValueError, OSError, RuntimeError) as e:
        _emit_error(args.json, "runtime", str(e))
        return 2


if __name__ == "__main__":
    sys.exit(main())
