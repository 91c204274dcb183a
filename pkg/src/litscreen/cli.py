"""Command-line entry points.

Subcommands cover the full experiment protocol:

* features: build and persist a feature model over a corpus (cached by
  corpus hash + parameters).
* simulate: run seeded screening simulations from persisted features,
  writing per-seed trace CSVs, metric reports, and an aggregate results
  table with an optional paired t-test against a named baseline run.
* select: run the novelty-weighted strategy under both bow and pv features
  through the first 10% of the pool and report which to continue with.
* serve: start the live screening HTTP service.

Flags mirror the run-manifest fields; --manifest loads the same fields from
a JSON file (explicit flags win). Strategy settings may also come from a
flat key=value config file via --config.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from litscreen.artifacts import (
    ArtifactError,
    cache_hit,
    load_feature_matrix,
    load_topic_matrix,
    save_feature_artifacts,
)
from litscreen.corpus import load_corpus
from litscreen.metrics import paired_t_test
from litscreen.pipelines import FEATURE_MODELS, build_features, resolve_params
from litscreen.screening import (
    StrategyConfig,
    run_simulation,
    select_method,
    write_trace_csv,
)

RESULTS_COLUMNS = (
    "label",
    "corpus_sha256",
    "model",
    "strategy",
    "seed",
    "wss95",
    "wss95_manual",
    "cut_iteration",
    "recall_at_10",
    "screened",
    "relevant_found",
)


def parse_flat_config(path: str | Path) -> dict[str, Any]:
    """Parse a flat `key = value` strategy config file (# comments allowed)."""
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def _strategy_config_from(args: argparse.Namespace, seed: int) -> StrategyConfig:
    file_cfg = parse_flat_config(args.config) if getattr(args, "config", None) else {}

    def pick(flag_name: str, file_key: str, default):
        flag = getattr(args, flag_name, None)
        if flag is not None:
            return flag
        if file_key in file_cfg:
            return file_cfg[file_key]
        return default

    low = pick("lc_low", "lc_low", 0.4)
    high = pick("lc_high", "lc_high", 0.6)
    return StrategyConfig(
        strategy=pick("strategy", "strategy", "ig"),
        batch_size=int(pick("batch_size", "batch_size", 25)),
        t=int(pick("t", "t", 3)),
        max_topics=int(pick("max_topics", "max_topics", 150)),
        lc_band=(float(low), float(high)),
        lc_fraction=float(pick("lc_fraction", "lc_fraction", 0.10)),
        seed=seed,
        seed_size=pick("seed_size", "seed_size", None),
    )


def _feature_params_from(args: argparse.Namespace) -> dict[str, Any]:
    overrides = {
        "min_df": getattr(args, "min_df", None),
        "max_df_fraction": getattr(args, "max_df", None),
        "sublinear_tf": getattr(args, "sublinear", None),
        "lda_topics": getattr(args, "topics", None),
        "lda_alpha": getattr(args, "alpha", None),
        "lda_beta": getattr(args, "beta", None),
        "lda_iterations": getattr(args, "iterations", None),
        "lda_seed": getattr(args, "feature_seed", None),
        "pv_dim": getattr(args, "dim", None),
        "pv_window": getattr(args, "window", None),
        "pv_negative": getattr(args, "negative", None),
        "pv_epochs": getattr(args, "epochs", None),
        "pv_seed": getattr(args, "feature_seed", None),
        "clusters": getattr(args, "clusters", None),
        "cluster_seed": getattr(args, "feature_seed", None),
        "cluster_distance": getattr(args, "cluster_distance", None),
    }
    return resolve_params({k: v for k, v in overrides.items() if v is not None})


def _parse_seeds(spec: str) -> list[int]:
    seeds: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part and not part.startswith("-"):
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise ValueError(f"no seeds in {spec!r}")
    return seeds


def feature_dir(outdir: str | Path, model: str) -> Path:
    return Path(outdir) / "features" / model


def cmd_features(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus)
    params = _feature_params_from(args)
    target = feature_dir(args.outdir, args.model)
    if not args.force and cache_hit(target, corpus, params):
        print(f"cache hit: {target} is current, skipping rebuild")
        return 0
    bundle = build_features(corpus, args.model, params)
    save_feature_artifacts(bundle, corpus, target)
    print(f"built {args.model} features for {corpus.n} documents -> {target}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus)
    if not corpus.fully_labelled:
        print("error: simulation requires a fully labelled corpus", file=sys.stderr)
        return 2
    outdir = Path(args.outdir)
    features = load_feature_matrix(feature_dir(outdir, args.model), corpus)
    seeds = _parse_seeds(args.seeds or "0")
    configs = {seed: _strategy_config_from(args, seed) for seed in seeds}
    strategy = configs[seeds[0]].strategy
    topics = None
    if strategy == "ig":
        topics = load_topic_matrix(feature_dir(outdir, "lda"), corpus)

    lam = 1.0 if args.classifier_lambda is None else float(args.classifier_lambda)
    label = args.label or f"{args.model}-{strategy}"
    runs_dir = outdir / "runs"
    runs_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for seed in seeds:
        config = configs[seed]
        state, report = run_simulation(
            corpus, features, topics, config, classifier_lam=lam
        )
        trace_path = runs_dir / f"trace_{label}_seed{seed}.csv"
        write_trace_csv(state, trace_path)
        report_path = runs_dir / f"report_{label}_seed{seed}.json"
        report_path.write_text(
            json.dumps(report.to_dict(), indent=2, sort_keys=True), encoding="utf-8"
        )
        rows.append(
            {
                "label": label,
                "corpus_sha256": corpus.sha256(),
                "model": args.model,
                "strategy": strategy,
                "seed": seed,
                "wss95": report.wss95,
                "wss95_manual": report.wss95_manual,
                "cut_iteration": report.cut_iteration,
                "recall_at_10": report.recall_at[0.10],
                "screened": state.screened_count,
                "relevant_found": state.relevant_found,
            }
        )
        print(
            f"seed {seed}: wss95={report.wss95:.4f} (manual {report.wss95_manual:.4f}) "
            f"recall@10%={report.recall_at[0.10]:.4f} -> {trace_path.name}"
        )

    results_path = outdir / "results.csv"
    _append_results(results_path, rows)
    summary = _summarize(rows, results_path, baseline=args.baseline)
    summary_path = runs_dir / f"summary_{label}.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True), encoding="utf-8")
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _append_results(path: Path, rows: list[dict]) -> None:
    import csv

    new_file = not path.exists()
    with path.open("a", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=RESULTS_COLUMNS, lineterminator="\n")
        if new_file:
            writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in RESULTS_COLUMNS})


def _read_results(path: Path) -> list[dict]:
    import csv

    if not path.exists():
        return []
    with path.open("r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _summarize(rows: list[dict], results_path: Path, baseline: str | None) -> dict:
    wss = [float(r["wss95"]) for r in rows]
    recalls = [float(r["recall_at_10"]) for r in rows]
    summary: dict[str, Any] = {
        "label": rows[0]["label"],
        "seeds": [int(r["seed"]) for r in rows],
        "wss95_mean": float(np.mean(wss)),
        "wss95_std": float(np.std(wss, ddof=1)) if len(wss) > 1 else 0.0,
        "recall_at_10_mean": float(np.mean(recalls)),
    }
    if baseline:
        base_rows = {
            int(r["seed"]): float(r["wss95"])
            for r in _read_results(results_path)
            if r["label"] == baseline
        }
        paired = [(float(r["wss95"]), base_rows[int(r["seed"])]) for r in rows if int(r["seed"]) in base_rows]
        if len(paired) >= 2:
            ours, theirs = zip(*paired)
            stat, pvalue = paired_t_test(ours, theirs)
            summary["baseline"] = baseline
            summary["baseline_wss95_mean"] = float(np.mean(theirs))
            summary["t_statistic"] = stat
            summary["p_value"] = pvalue
            summary["paired_seeds"] = len(paired)
        else:
            summary["baseline"] = baseline
            summary["baseline_warning"] = "fewer than 2 paired seeds found in results table"
    return summary


def cmd_select(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus)
    outdir = Path(args.outdir)
    features_bow = load_feature_matrix(feature_dir(outdir, "bow"), corpus)
    features_pv = load_feature_matrix(feature_dir(outdir, "pv"), corpus)
    topics = load_topic_matrix(feature_dir(outdir, "lda"), corpus)
    args.strategy = "ig"
    config = _strategy_config_from(args, args.seed)
    choice = select_method(
        corpus, features_bow, features_pv, topics, config, cutoff=args.cutoff
    )
    payload = {
        "chosen": choice.chosen,
        "recall_bow": choice.recall_bow,
        "recall_pv": choice.recall_pv,
        "tie": choice.tie,
        "cutoff": args.cutoff,
    }
    (outdir / "select.json").write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from litscreen.service import create_app

    data_dir = args.data_dir or os.environ.get("LITSCREEN_DATA_DIR", "./litscreen_data")
    port = args.port or int(os.environ.get("LITSCREEN_PORT", "8000"))
    app = create_app(data_dir)
    uvicorn.run(app, host=args.host, port=port, log_level="info")
    return 0


def _overlay_manifest(args: argparse.Namespace) -> None:
    """Fill unset flags from the JSON manifest (explicit flags win)."""
    manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    overlay: dict[str, Any] = {}
    for key in ("corpus", "model", "strategy", "outdir", "label", "baseline"):
        if key in manifest:
            overlay[key] = manifest[key]
    if "seeds" in manifest:
        overlay["seeds"] = ",".join(str(s) for s in manifest["seeds"])
    for key, value in manifest.get("config", {}).items():
        overlay["classifier_lambda" if key == "lambda" else key] = value
    for key, value in manifest.get("features", {}).items():
        overlay[key] = value
    for dest, value in overlay.items():
        if getattr(args, dest, None) is None:
            setattr(args, dest, value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="litscreen", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_feature_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--min-df", dest="min_df", type=int, default=None)
        p.add_argument("--max-df", dest="max_df", type=float, default=None)
        p.add_argument("--sublinear", dest="sublinear", action="store_true", default=None)
        p.add_argument("--topics", type=int, default=None, help="LDA topic count (default 300)")
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--beta", type=float, default=None)
        p.add_argument("--iterations", type=int, default=None, help="LDA Gibbs sweeps (default 500)")
        p.add_argument("--dim", type=int, default=None, help="embedding dimension (default 300)")
        p.add_argument("--window", type=int, default=None)
        p.add_argument("--negative", type=int, default=None)
        p.add_argument("--epochs", type=int, default=None)
        p.add_argument("--clusters", type=int, default=None, help="cluster count (default 300)")
        p.add_argument("--cluster-distance", dest="cluster_distance", default=None,
                       choices=("euclidean", "cosine"))
        p.add_argument("--feature-seed", dest="feature_seed", type=int, default=None)

    def add_strategy_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", default=None, help="flat key=value strategy config file")
        p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
        p.add_argument("--t", dest="t", type=int, default=None)
        p.add_argument("--max-topics", dest="max_topics", type=int, default=None)
        p.add_argument("--lc-low", dest="lc_low", type=float, default=None)
        p.add_argument("--lc-high", dest="lc_high", type=float, default=None)
        p.add_argument("--lc-fraction", dest="lc_fraction", type=float, default=None)
        p.add_argument("--seed-size", dest="seed_size", type=int, default=None)
        p.add_argument("--lambda", dest="classifier_lambda", type=float, default=None)

    p_feat = sub.add_parser("features", help="build and persist a feature model")
    p_feat.add_argument("--corpus", required=True)
    p_feat.add_argument("--model", required=True, choices=FEATURE_MODELS)
    p_feat.add_argument("--outdir", required=True)
    p_feat.add_argument("--force", action="store_true")
    add_feature_flags(p_feat)
    p_feat.set_defaults(func=cmd_features)

    p_sim = sub.add_parser("simulate", help="run seeded screening simulations")
    p_sim.add_argument("--manifest", default=None, help="JSON run manifest")
    p_sim.add_argument("--corpus", required=False)
    p_sim.add_argument("--model", required=False, choices=FEATURE_MODELS)
    p_sim.add_argument("--strategy", choices=("naive", "ig", "lc"), default=None)
    p_sim.add_argument("--outdir", required=False)
    p_sim.add_argument("--seeds", default=None)
    p_sim.add_argument("--label", default=None)
    p_sim.add_argument("--baseline", default=None, help="label of a prior run to t-test against")
    add_strategy_flags(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_sel = sub.add_parser("select", help="pick bow vs pv by recall at the cutoff")
    p_sel.add_argument("--corpus", required=True)
    p_sel.add_argument("--outdir", required=True)
    p_sel.add_argument("--cutoff", type=float, default=0.10)
    p_sel.add_argument("--seed", type=int, default=0)
    add_strategy_flags(p_sel)
    p_sel.set_defaults(func=cmd_select)

    p_srv = sub.add_parser("serve", help="start the live screening service")
    p_srv.add_argument("--data-dir", dest="data_dir", default=None)
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=None)
    p_srv.set_defaults(func=cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "manifest", None):
        _overlay_manifest(args)
    required_by_command = {"simulate": ("corpus", "model", "outdir")}
    for field in required_by_command.get(args.command, ()):
        if getattr(args, field, None) is None:
            parser.error(f"--{field} is required (flag or manifest)")
    try:
        return args.func(args)
    except ArtifactError as exc:
        print(f"artifact error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
