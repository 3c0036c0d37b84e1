"""Command-line entry point.

Subcommands: ``check``, ``eval``, ``metrics``, ``dataset`` (init / round /
review / cluster / stats), ``transform`` and ``bench``.  Exit codes: 0
success, 1 domain failure (parse, scoring, validation), 2 usage error,
3 backend or I/O failure.

Backend configuration resolves flags over environment variables
(``STLKIT_GENERATOR_*`` / ``STLKIT_REFINER_*``) over the INI config file;
credentials are only ever named (an environment variable per backend),
never written in files.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import os
import sys
from pathlib import Path

from stlkit.backends import Backend, BackendConfig, make_backend
from stlkit.bench import run_bench
from stlkit.datagen import (
    DatagenConfig,
    REVIEW_CHECKS,
    apply_review,
    run_round,
)
from stlkit.errors import (
    BackendError,
    DomainError,
    HorizonExceeded,
    LengthMismatch,
    StlkitError,
)
from stlkit.knowledge import KnowledgeStore
from stlkit.metrics import EvalReport, score_corpus
from stlkit.pairs import (
    NLSTLPair,
    ReviewDecision,
    atomic_write_text,
    load_bundled_seeds,
    read_decisions,
    read_pairs,
    write_pairs,
)
from stlkit.semantics import EvalOptions, evaluate, evaluate_all, load_trace_csv
from stlkit.stats import compute_stats, render_stats_table
from stlkit.stl.parser import check_syntax, iter_formula_lines, parse
from stlkit.translate import MODES, TransformRequest, transform


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except BackendError as e:
        print(f"backend error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 3
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except StlkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stlkit",
        description="Signal temporal logic toolkit: checking, monitoring, "
        "dataset construction and NL-to-STL transformation.",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("check", help="syntax-check formulas")
    p.add_argument("file", nargs="?", help="formula file, one per line, # comments")
    p.add_argument("-e", "--expr", help="check a single formula")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("eval", help="evaluate a formula on a trace")
    p.add_argument("-e", "--expr", required=True)
    p.add_argument("--trace", required=True, help="CSV trace file")
    p.add_argument("--at", type=float, default=None, help="evaluate at one sample time")
    p.add_argument("--strict", action="store_true", help="error on windows past the horizon")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("metrics", help="score predictions against references")
    p.add_argument("--refs", required=True, help="reference pairs (JSONL)")
    p.add_argument("--preds", required=True, help="predictions (text lines or JSONL)")
    p.add_argument("--report", help="write a JSON report (plus CSV sibling)")
    p.add_argument("--figures", help="directory for PNG figures")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_metrics)

    pd = sub.add_parser("dataset", help="dataset construction pipeline")
    dsub = pd.add_subparsers(dest="dataset_command")

    p = dsub.add_parser("init", help="create a knowledge store from seed pairs")
    p.add_argument("--seeds", required=True, help="seed JSONL file, or 'bundled'")
    p.add_argument("--store", required=True)
    p.add_argument("--embed-mode", choices=("pair", "nl"), default="pair")
    p.set_defaults(func=cmd_dataset_init)

    p = dsub.add_parser("round", help="run one generation round")
    p.add_argument("--store", required=True)
    p.add_argument("--queue", help="review queue file (default <store>.queue.jsonl)")
    p.add_argument("--backend", choices=("scripted", "http"), help="generator backend kind")
    p.add_argument("--script", help="fixture for --backend scripted")
    _add_backend_args(p, "generator")
    p.add_argument("--n", type=int, default=10, help="candidates to request")
    p.add_argument("-k", type=int, default=5, help="cluster exemplars")
    p.add_argument("--threshold", type=float, default=0.5, help="novelty threshold")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--report", help="write the round report as JSON")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_dataset_round)

    p = dsub.add_parser("review", help="review queued candidates")
    p.add_argument("--store", required=True)
    p.add_argument("--queue", help="review queue file (default <store>.queue.jsonl)")
    p.add_argument("--decisions", help="apply decisions from a JSONL file instead of a terminal session")
    p.add_argument("--reviewer", default="")
    p.set_defaults(func=cmd_dataset_review)

    p = dsub.add_parser("cluster", help="print cluster exemplars")
    p.add_argument("--store", required=True)
    p.add_argument("-k", type=int, default=5)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_dataset_cluster)

    p = dsub.add_parser("stats", help="corpus statistics")
    p.add_argument("--store", help="knowledge store JSONL")
    p.add_argument("--dataset", help="any pair JSONL")
    p.add_argument("--report", help="write a JSON report (plus CSV sibling)")
    p.add_argument("--figures", help="directory for PNG figures")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_dataset_stats)

    p = sub.add_parser("transform", help="translate sentences to formulas")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--nl", help="one sentence")
    group.add_argument("--batch", help="file of sentences (one per line) or JSONL with an 'nl' field")
    p.add_argument("--knowledge", help="knowledge store JSONL for retrieval")
    p.add_argument("--mode", choices=MODES, default="kgst")
    p.add_argument("-k", type=int, default=5)
    p.add_argument("--iterations", type=int, default=1)
    _add_backend_args(p, "generator")
    _add_backend_args(p, "refiner")
    p.add_argument("--prompts-dir", help="directory overriding the packaged prompt templates")
    p.add_argument("--out", help="write results as JSONL")
    p.add_argument("--verbose", action="store_true", help="dump backend transcripts")
    p.add_argument("--no-transcript", action="store_true", help="omit transcripts from JSONL output")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("bench", help="benchmark transformation on a dataset")
    p.add_argument("--dataset", required=True, help="ground-truth pairs (JSONL)")
    p.add_argument("--knowledge", help="knowledge store for retrieval (defaults to the dataset)")
    p.add_argument("--mode", choices=MODES, default="kgst")
    p.add_argument("-k", type=int, default=5)
    p.add_argument("--iterations", type=int, default=1)
    p.add_argument("--jobs", type=int, default=4)
    _add_backend_args(p, "generator")
    _add_backend_args(p, "refiner")
    p.add_argument("--prompts-dir")
    p.add_argument("--report", help="write a JSON report (plus CSV sibling)")
    p.add_argument("--figures", help="directory for PNG figures")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)

    return parser


def _add_backend_args(p: argparse.ArgumentParser, role: str) -> None:
    p.add_argument(f"--{role}-script", help=f"scripted {role} fixture (JSONL of tag/response)")
    if not any(a.dest == "config" for a in p._actions):
        p.add_argument("--config", help="INI file with [generator]/[refiner] sections")


# --- backend resolution -------------------------------------------------------


def _resolve_backend(role: str, args: argparse.Namespace) -> Backend | None:
    """flags > environment > config file; None when nothing is configured."""
    script_flag = getattr(args, f"{role}_script", None) or (
        getattr(args, "script", None) if role == "generator" else None
    )
    if getattr(args, "backend", None) == "scripted" and not script_flag:
        raise DomainError("--backend scripted requires --script")
    if script_flag:
        return make_backend(BackendConfig(kind="scripted", script_path=script_flag))
    settings: dict[str, str] = {}
    config_path = getattr(args, "config", None)
    if config_path:
        ini = configparser.ConfigParser()
        with open(config_path, encoding="utf-8") as fh:
            ini.read_file(fh)
        if ini.has_section(role):
            settings.update(ini[role])
    for key in ("kind", "endpoint", "model", "api_key_env", "timeout", "max_retries", "script"):
        env = os.environ.get(f"STLKIT_{role.upper()}_{key.upper()}")
        if env is not None:
            settings[key] = env
    if getattr(args, "backend", None):
        settings["kind"] = args.backend
    if not settings:
        return None
    kind = settings.get("kind", "scripted")
    config = BackendConfig(
        kind=kind,
        endpoint=settings.get("endpoint", ""),
        model=settings.get("model", ""),
        api_key_env=settings.get("api_key_env", ""),
        timeout=float(settings.get("timeout", 30.0)),
        max_retries=int(settings.get("max_retries", 3)),
        script_path=settings.get("script", ""),
    )
    return make_backend(config)


# --- report writing ---------------------------------------------------------------


def _write_json_report(path: str, payload: dict) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


def _write_scores_csv(path: Path, report: EvalReport, predictions: list[str] | None = None) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["id", "formula_accuracy", "template_accuracy"]
        if predictions is not None:
            header.append("prediction")
        writer.writerow(header)
        for i, (pid, score) in enumerate(zip(report.pair_ids, report.pair_scores)):
            row = [pid, f"{score.formula_accuracy:.6f}", f"{score.template_accuracy:.6f}"]
            if predictions is not None:
                row.append(predictions[i])
            writer.writerow(row)


# --- commands ----------------------------------------------------------------------


def cmd_check(args: argparse.Namespace) -> int:
    if bool(args.expr) == bool(args.file):
        print("usage error: provide exactly one of -e EXPR or FILE", file=sys.stderr)
        return 2
    inputs: list[tuple[str, str]] = []
    if args.expr is not None:
        inputs.append(("<expr>", args.expr))
    else:
        text = Path(args.file).read_text(encoding="utf-8")
        inputs.extend((f"{args.file}:{lineno}", line) for lineno, line in iter_formula_lines(text))
    all_ok = True
    records = []
    for label, formula_text in inputs:
        result = check_syntax(formula_text)
        records.append({
            "input": label,
            "ok": result.ok,
            "diagnostics": [d.render() for d in result.diagnostics],
        })
        if not args.json:
            for diag in result.diagnostics:
                print(f"{label}: {diag.render()}")
        if not result.ok:
            all_ok = False
    if args.json:
        print(json.dumps({"ok": all_ok, "inputs": records}, sort_keys=True))
    elif all_ok:
        print("Ok")
    return 0 if all_ok else 1


def cmd_eval(args: argparse.Namespace) -> int:
    formula = parse(args.expr)
    trace = load_trace_csv(args.trace)
    options = EvalOptions(horizon_policy="strict" if args.strict else "clip")
    if args.at is not None:
        try:
            verdict = evaluate(formula, trace, args.at, options)
        except HorizonExceeded as e:
            print(f"error: {e}", file=sys.stderr)
            return 1
        print(json.dumps({"t": args.at, "value": verdict}) if args.json else str(verdict).lower())
        return 0
    results = evaluate_all(formula, trace, options)
    if args.json:
        print(json.dumps(
            {"results": [{"t": t, "value": v} for t, v in zip(trace.timestamps, results)]}
        ))
    else:
        for t, value in zip(trace.timestamps, results):
            text = "horizon" if value is None else str(value).lower()
            print(f"{t:g}\t{text}")
    return 0


def _read_predictions(path: str) -> list[str]:
    preds: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("{"):
                record = json.loads(line)
                preds.append(str(record.get("stl", record.get("final", ""))))
            else:
                preds.append(line)
    return preds


def cmd_metrics(args: argparse.Namespace) -> int:
    refs = read_pairs(args.refs)
    preds = _read_predictions(args.preds)
    try:
        report = score_corpus(refs, preds)
    except LengthMismatch as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(report.to_dict(), sort_keys=True))
    else:
        print(f"{'pair':<12} {'A_F':>8} {'A_T':>8}")
        for pid, score in zip(report.pair_ids, report.pair_scores):
            print(f"{pid:<12} {score.formula_accuracy:8.4f} {score.template_accuracy:8.4f}")
        print("-" * 30)
        print(f"{'mean':<12} {report.formula_accuracy:8.4f} {report.template_accuracy:8.4f}")
        print(f"BLEU {report.bleu:.4f}")
    if args.report:
        _write_json_report(args.report, report.to_dict())
        _write_scores_csv(Path(args.report).with_suffix(".csv"), report)
    if args.figures:
        from stlkit.figures import render_score_figure

        render_score_figure(report, Path(args.figures) / "scores.png")
    return 0


def _queue_path(args: argparse.Namespace) -> Path:
    if args.queue:
        return Path(args.queue)
    store = Path(args.store)
    return store.with_name(store.stem + ".queue.jsonl")


def cmd_dataset_init(args: argparse.Namespace) -> int:
    if args.seeds == "bundled":
        seeds = load_bundled_seeds()
    else:
        seeds = read_pairs(args.seeds)
    canonical = []
    for pair in seeds:
        pair = pair.canonicalized()
        if pair.status not in ("seed", "accepted"):
            pair = pair.with_status("seed")
        canonical.append(pair)
    store = KnowledgeStore(canonical, embed_mode=args.embed_mode)
    store.save(args.store)
    print(f"initialized store with {len(store)} pairs at {args.store}")
    return 0


def _next_round(store: KnowledgeStore, queue: list[NLSTLPair]) -> int:
    rounds = [p.round for p in store.pairs] + [p.round for p in queue]
    return max(rounds, default=0) + 1


def cmd_dataset_round(args: argparse.Namespace) -> int:
    backend = _resolve_backend("generator", args)
    if backend is None:
        print("usage error: no generator backend configured", file=sys.stderr)
        return 2
    store = KnowledgeStore.load(args.store)
    queue_file = _queue_path(args)
    queue = read_pairs(queue_file) if queue_file.exists() else []
    config = DatagenConfig(
        n_candidates=args.n,
        k_exemplars=args.k,
        novelty_threshold=args.threshold,
        seed=args.seed,
    )
    round_no = _next_round(store, queue)
    report, fresh = run_round(store, backend, config, round_no)
    write_pairs(queue_file, queue + fresh)
    if args.report:
        _write_json_report(args.report, report.to_dict())
    if args.json:
        print(json.dumps(report.to_dict(), sort_keys=True))
    else:
        print(
            f"round {report.round}: generated {report.generated}, "
            f"syntax-rejected {report.syntax_rejected}, "
            f"novelty-rejected {report.novelty_rejected}, queued {report.queued} "
            f"(queue now {len(queue) + len(fresh)})"
        )
        print(f"exemplars: {', '.join(report.exemplar_ids)}")
    return 0


def _interactive_decisions(queue: list[NLSTLPair], reviewer: str) -> list[ReviewDecision]:
    decisions: list[ReviewDecision] = []
    print(f"{len(queue)} candidates queued. Checks for each pair:")
    for check in REVIEW_CHECKS:
        print(f"  - {check}")
    for pair in queue:
        print(f"\n[{pair.id}] (round {pair.round})")
        print(f"  NL:  {pair.nl}")
        print(f"  STL: {pair.stl}")
        while True:
            answer = input("  [a]ccept / [r]eject / [s]kip / [q]uit > ").strip().lower()
            if answer in ("a", "r", "s", "q"):
                break
            print("  please answer a, r, s or q")
        if answer == "q":
            return decisions
        if answer == "s":
            continue
        verdict = "accept" if answer == "a" else "reject"
        decisions.append(ReviewDecision(pair_id=pair.id, verdict=verdict, reviewer=reviewer))
    return decisions


def cmd_dataset_review(args: argparse.Namespace) -> int:
    store = KnowledgeStore.load(args.store)
    queue_file = _queue_path(args)
    queue = read_pairs(queue_file) if queue_file.exists() else []
    if not queue:
        print("queue is empty")
        return 0
    if args.decisions:
        decisions = read_decisions(args.decisions)
    else:
        decisions = _interactive_decisions(queue, args.reviewer)
    remaining, accepted, rejected = apply_review(store, queue, decisions)
    store.save(args.store)
    write_pairs(queue_file, remaining)
    if rejected:
        audit = queue_file.with_name(queue_file.stem.replace(".queue", "") + ".rejected.jsonl")
        existing = read_pairs(audit) if audit.exists() else []
        write_pairs(audit, existing + rejected)
    print(
        f"accepted {len(accepted)}, rejected {len(rejected)}, "
        f"remaining in queue {len(remaining)}; store now {len(store)} pairs"
    )
    return 0


def cmd_dataset_cluster(args: argparse.Namespace) -> int:
    store = KnowledgeStore.load(args.store)
    clustering = store.kmeans(args.k, args.seed)
    if args.json:
        print(json.dumps({
            "k": clustering.k,
            "exemplar_ids": list(clustering.exemplar_ids),
            "assignments": list(clustering.assignments),
            "inertia": clustering.inertia,
        }, sort_keys=True))
    else:
        for pid in clustering.exemplar_ids:
            pair = store.get(pid)
            print(f"{pid}\t{pair.nl}")
    return 0


def cmd_dataset_stats(args: argparse.Namespace) -> int:
    if bool(args.store) == bool(args.dataset):
        print("usage error: provide exactly one of --store or --dataset", file=sys.stderr)
        return 2
    pairs = read_pairs(args.store or args.dataset)
    stats = compute_stats(pairs)
    if args.json:
        print(json.dumps(stats.to_dict(), sort_keys=True))
    else:
        print(render_stats_table(stats))
    if args.report:
        _write_json_report(args.report, stats.to_dict())
        csv_path = Path(args.report).with_suffix(".csv")
        with csv_path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["group", "metric", "value"])
            payload = stats.to_dict()
            for group in ("formula", "text", "identifiers"):
                for metric, value in payload[group].items():
                    writer.writerow([group, metric, value])
    if args.figures:
        from stlkit.figures import render_stats_figures

        render_stats_figures(pairs, stats, args.figures)
    return 0


def _load_knowledge(path: str | None) -> KnowledgeStore | None:
    if not path:
        return None
    return KnowledgeStore.load(path)


def _read_batch(path: str) -> list[str]:
    sentences: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("{"):
                sentences.append(str(json.loads(line)["nl"]))
            else:
                sentences.append(line)
    return sentences


def cmd_transform(args: argparse.Namespace) -> int:
    generator = _resolve_backend("generator", args)
    refiner = _resolve_backend("refiner", args)
    store = _load_knowledge(args.knowledge)
    sentences = [args.nl] if args.nl else _read_batch(args.batch)
    results = []
    for nl in sentences:
        request = TransformRequest(nl=nl, k=args.k, iterations=args.iterations, mode=args.mode)
        results.append(transform(request, generator, refiner, store, args.prompts_dir))
    include_transcript = not args.no_transcript
    if args.out:
        lines = [
            json.dumps(r.to_dict(include_transcript), sort_keys=True, ensure_ascii=False)
            for r in results
        ]
        atomic_write_text(args.out, "\n".join(lines) + "\n")
    if args.nl and not args.json:
        result = results[0]
        print(result.final_stl)
        if args.verbose:
            for exchange in result.transcript:
                print(f"--- [{exchange.tag}] {exchange.backend_id}", file=sys.stderr)
                print(exchange.response, file=sys.stderr)
    else:
        for result in results:
            print(json.dumps(result.to_dict(include_transcript), sort_keys=True, ensure_ascii=False))
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    dataset = read_pairs(args.dataset)
    if not dataset:
        print("usage error: benchmark dataset is empty", file=sys.stderr)
        return 2
    store = _load_knowledge(args.knowledge or args.dataset)
    generator = _resolve_backend("generator", args)
    refiner = _resolve_backend("refiner", args)
    result = run_bench(
        dataset,
        args.mode,
        generator,
        refiner,
        store,
        k=args.k,
        iterations=args.iterations,
        jobs=args.jobs,
        prompts_dir=args.prompts_dir,
    )
    if args.json:
        print(json.dumps(result.to_dict(include_pairs=False), sort_keys=True))
    else:
        print(f"mode {result.mode} over {len(result.predictions)} pairs")
        print(f"  formula accuracy   {result.report.formula_accuracy:.4f}")
        print(f"  template accuracy  {result.report.template_accuracy:.4f}")
        print(f"  BLEU               {result.report.bleu:.4f}")
        buckets = ", ".join(f"{k}={v}" for k, v in result.buckets.items())
        print(f"  error buckets      {buckets}")
        if result.failures:
            print(f"  failures           {len(result.failures)}")
    if args.report:
        _write_json_report(args.report, result.to_dict())
        _write_scores_csv(Path(args.report).with_suffix(".csv"), result.report, result.predictions)
    if args.figures:
        from stlkit.figures import render_error_buckets_figure, render_score_figure

        figures_dir = Path(args.figures)
        render_score_figure(result.report, figures_dir / "scores.png")
        render_error_buckets_figure(result.buckets, figures_dir / "error_buckets.png")
    return 0


if __name__ == "__main__":
    sys.exit(main())
