"""Command line interface.

Every command takes ``--config`` plus optional ``--seed``, ``--k``, and
``--strategy`` overrides.  Reports print as JSON on stdout (wall clock
included) and are also written, without the wall clock so reruns are
byte-identical, into a run directory named after the config hash along
with TSV tables and rendered figures.  Log output goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .pipeline import (
    Config,
    essential_masks,
    evaluate_accuracy,
    evaluate_grid,
    evaluate_selector,
    load_corpus_and_index,
    load_dataset,
    materialize_evidence,
    prepare_question,
    run_directory,
    run_pipeline,
    selector_from_checkpoint,
    selector_predictions,
    train_reader,
    train_selector,
    write_grid,
    write_report,
)
from .pipeline.data import DatasetError, load_annotated
from .retrieval import STRATEGIES, Corpus, InvertedIndex, RetrievalCache

log = logging.getLogger("termreader")


def _add_common(parser):
    parser.add_argument("--config", required=True, help="key = value file")
    parser.add_argument("--seed", type=int, default=None,
                        help="override config seed")
    parser.add_argument("--k", type=int, default=None,
                        help="override retrieval depth")
    parser.add_argument("--strategy", choices=STRATEGIES, default=None,
                        help="override query strategy")
    parser.add_argument("--verbose", action="store_true",
                        help="INFO logging on stderr")


def _config(args):
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    return Config.load(args.config).with_overrides(
        seed=args.seed, k=args.k, strategy=args.strategy)


def _print(payload):
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _emit(report, name, config, history=None):
    run_dir = run_directory(config, name)
    write_report(report, run_dir, history=history)
    log.info("report written to %s", run_dir)
    _print(json.loads(report.to_json()))
    return run_dir


# -- index -------------------------------------------------------------------


def cmd_index_build(args):
    config = _config(args)
    corpus = Corpus.load(config.corpus)
    index = InvertedIndex.build(corpus)
    target = args.output or config.index_path
    if not target:
        raise SystemExit("index build: set index_path in the config "
                         "or pass --output")
    out = Path(target)
    out.parent.mkdir(parents=True, exist_ok=True)
    index.save(out)
    _print({"sentences": index.n_docs, "terms": len(index.postings),
            "avg_sentence_len": round(index.avg_doc_len, 4),
            "path": str(out)})


def cmd_index_inspect(args):
    config = _config(args)
    index = InvertedIndex.load(args.index or config.index_path)
    info = {"sentences": index.n_docs, "terms": len(index.postings),
            "avg_sentence_len": round(index.avg_doc_len, 4)}
    if args.term:
        info["term"] = {}
        for term in args.term:
            postings = index.postings.get(term, [])
            info["term"][term] = {
                "df": len(postings),
                "idf": round(index.idf(term), 6),
                "postings": [[sid, tf] for sid, tf in postings[:args.limit]]}
    _print(info)


# -- cache -------------------------------------------------------------------


def cmd_cache_build(args):
    config = _config(args)
    corpus, index = load_corpus_and_index(config)
    try:
        examples = load_annotated(config.dataset)
    except DatasetError:
        examples = load_dataset(config.dataset)
    selector = encoder = None
    if args.selector_checkpoint:
        selector, sel_assets, _ = selector_from_checkpoint(
            args.selector_checkpoint, config)
        encoder = sel_assets.encoder
    from .pipeline.assets import build_assets
    assets = build_assets(config, examples, corpus=corpus)
    prepared = [prepare_question(ex, assets.encoder) for ex in examples]
    masks = essential_masks(prepared, config.strategy, config,
                            selector=selector, encoder=encoder, index=index)
    target = args.output or config.cache_path
    if not target:
        raise SystemExit("cache build: set cache_path in the config "
                         "or pass --output")
    cache_path = Path(target)
    cache = (RetrievalCache.load(cache_path) if cache_path.exists()
             else RetrievalCache())
    for p in prepared:
        materialize_evidence(p, masks[p.example.id], config.strategy,
                             config.k, index, corpus, cache=cache)
    cache_path.parent.mkdir(parents=True, exist_ok=True)
    cache.save(cache_path)
    _print({"entries": len(cache), "questions": len(prepared),
            "strategy": config.strategy, "k": config.k,
            "path": str(cache_path)})


# -- selector ----------------------------------------------------------------


def cmd_selector_train(args):
    config = _config(args)
    result = train_selector(config)
    run_dir = _emit(result.report, "selector-train", config,
                    history=result.history)
    log.info("checkpoint at %s", result.checkpoint_path)
    return run_dir


def cmd_selector_predict(args):
    config = _config(args)
    rows = selector_predictions(config, args.checkpoint, args.input)
    out = open(args.output, "w", encoding="utf-8") if args.output else sys.stdout
    try:
        for row in rows:
            out.write(json.dumps(row, sort_keys=True) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_selector_eval(args):
    config = _config(args)
    report = evaluate_selector(config, args.checkpoint, split=args.split)
    _emit(report, f"selector-eval-{args.split}", config)


# -- reader ------------------------------------------------------------------


def cmd_reader_train(args):
    config = _config(args)
    result = train_reader(config, selector_checkpoint=args.selector_checkpoint)
    run_dir = _emit(result.report, "reader-train", config,
                    history=result.history)
    log.info("checkpoint at %s", result.checkpoint_path)
    return run_dir


def cmd_reader_eval(args):
    config = _config(args)
    if args.grid:
        rows, reports = evaluate_grid(config, args.checkpoint,
                                      selector_checkpoint=args.selector_checkpoint,
                                      split=args.split)
        run_dir = run_directory(config, f"reader-grid-{args.split}")
        write_grid(rows, run_dir)
        for row, report in zip(rows, reports):
            cell = run_dir / f"metrics-{row['strategy']}-{row['k']}.json"
            cell.write_text(report.to_json(include_wall_clock=False) + "\n",
                            encoding="utf-8")
        best = max(rows, key=lambda r: r["accuracy"])
        _print({"kind": "reader-grid", "split": args.split,
                "rows": rows, "best": best, "run_dir": str(run_dir)})
        return
    report = evaluate_accuracy(config, args.checkpoint,
                               selector_checkpoint=args.selector_checkpoint,
                               split=args.split)
    _emit(report, f"reader-eval-{args.split}", config)


# -- pipeline ----------------------------------------------------------------


def cmd_pipeline_run(args):
    config = _config(args)
    report, traces = run_pipeline(config, args.checkpoint,
                                  selector_checkpoint=args.selector_checkpoint,
                                  split=args.split, trace_limit=args.trace_limit)
    run_dir = _emit(report, f"pipeline-{args.split}", config)
    with open(run_dir / "trace.jsonl", "w", encoding="utf-8") as fh:
        for trace in traces:
            fh.write(json.dumps(trace, sort_keys=True) + "\n")


def cmd_pipeline_trace(args):
    config = _config(args)
    from .pipeline import load_reader_context, trace_question
    ctx = load_reader_context(config, args.checkpoint,
                              selector_checkpoint=args.selector_checkpoint)
    examples = load_dataset(args.input or config.dataset)
    if args.question:
        matches = [ex for ex in examples if ex.id == args.question]
        if not matches:
            raise SystemExit(f"pipeline trace: no question with id "
                             f"'{args.question}'")
        examples = matches
    else:
        examples = examples[:1]
    for ex in examples:
        _print(trace_question(ctx, config, ex))


# -- wiring ------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="termreader",
        description="essential-term retrieval and reading for multiple "
                    "choice questions")
    sub = parser.add_subparsers(dest="command", required=True)

    index = sub.add_parser("index", help="sentence index management")
    index_sub = index.add_subparsers(dest="subcommand", required=True)
    p = index_sub.add_parser("build", help="index the corpus and save it")
    _add_common(p)
    p.add_argument("--output", default=None, help="index file to write")
    p.set_defaults(func=cmd_index_build)
    p = index_sub.add_parser("inspect", help="summarize a saved index")
    _add_common(p)
    p.add_argument("--index", default=None, help="index file to read")
    p.add_argument("--term", action="append", default=None,
                   help="also show df/idf/postings for this term (repeatable)")
    p.add_argument("--limit", type=int, default=10,
                   help="postings shown per term")
    p.set_defaults(func=cmd_index_inspect)

    cache = sub.add_parser("cache", help="retrieval cache management")
    cache_sub = cache.add_subparsers(dest="subcommand", required=True)
    p = cache_sub.add_parser("build", help="precompute retrieval results")
    _add_common(p)
    p.add_argument("--selector-checkpoint", default=None)
    p.add_argument("--output", default=None, help="cache file to write")
    p.set_defaults(func=cmd_cache_build)

    selector = sub.add_parser("selector", help="essential term selector")
    selector_sub = selector.add_subparsers(dest="subcommand", required=True)
    p = selector_sub.add_parser("train", help="train on annotated questions")
    _add_common(p)
    p.set_defaults(func=cmd_selector_train)
    p = selector_sub.add_parser("predict", help="emit term masks as JSONL")
    _add_common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--input", default=None, help="question file to score")
    p.add_argument("--output", default=None, help="JSONL path (default stdout)")
    p.set_defaults(func=cmd_selector_predict)
    p = selector_sub.add_parser("eval", help="precision/recall/F1 on a split")
    _add_common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--split", default="test",
                   choices=("train", "dev", "test", "all"))
    p.set_defaults(func=cmd_selector_eval)

    reader = sub.add_parser("reader", help="attention reader")
    reader_sub = reader.add_subparsers(dest="subcommand", required=True)
    p = reader_sub.add_parser("train", help="train on a labelled dataset")
    _add_common(p)
    p.add_argument("--selector-checkpoint", default=None,
                   help="selector for ESSENTIAL masks (else gold annotations)")
    p.set_defaults(func=cmd_reader_train)
    p = reader_sub.add_parser("eval", help="accuracy on a split")
    _add_common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--selector-checkpoint", default=None)
    p.add_argument("--split", default="test",
                   choices=("train", "dev", "test", "all"))
    p.add_argument("--grid", action="store_true",
                   help="strategy x depth accuracy grid instead of one cell")
    p.set_defaults(func=cmd_reader_eval)

    pipeline = sub.add_parser("pipeline", help="end to end runs")
    pipeline_sub = pipeline.add_subparsers(dest="subcommand", required=True)
    p = pipeline_sub.add_parser("run", help="answer a split with audit traces")
    _add_common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--selector-checkpoint", default=None)
    p.add_argument("--split", default="test",
                   choices=("train", "dev", "test", "all"))
    p.add_argument("--trace-limit", type=int, default=None,
                   help="cap traces kept in trace.jsonl")
    p.set_defaults(func=cmd_pipeline_run)
    p = pipeline_sub.add_parser("trace", help="audit one question end to end")
    _add_common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--selector-checkpoint", default=None)
    p.add_argument("--question", default=None, help="question id to trace")
    p.add_argument("--input", default=None, help="question file")
    p.set_defaults(func=cmd_pipeline_trace)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
