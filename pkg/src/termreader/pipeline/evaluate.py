"""Evaluation entry points: accuracy on a split, the strategy-by-depth
grid, selector scoring, and the per-question audit trace."""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

from ..retrieval.cache import RetrievalCache
from ..retrieval.queries import STRATEGIES
from ..reader import predict
from ..selector import select_terms
from .assets import load_corpus_and_index, prepare_question
from .config import Config
from .data import DatasetError, load_annotated, load_dataset, split_dataset
from .reports import MetricsReport
from .retrieve import encode_reader_example, essential_masks, materialize_evidence
from .train import (
    _encode_selector_example,
    _reader_split_accuracy,
    _require_labels,
    _selector_split_prf,
    build_reader_bundles,
    reader_from_checkpoint,
    selector_from_checkpoint,
)

GRID_DEPTHS = (5, 10, 20)


def pick_split(examples, config, split):
    """Slice out one split by the config's seeded partition."""
    if split == "all":
        return list(examples)
    parts = dict(zip(("train", "dev", "test"),
                     split_dataset(examples, config.split_ratios, config.seed)))
    if split not in parts:
        raise DatasetError(f"unknown split {split!r}; "
                           "expected train, dev, test, or all")
    return parts[split]


@dataclass
class ReaderContext:
    """Everything needed to answer questions, loaded once."""
    model: object
    assets: object
    snapshot: Config
    corpus: object
    index: object
    selector: object = None
    selector_encoder: object = None


def load_reader_context(config, reader_checkpoint, selector_checkpoint=None):
    model, assets, snap = reader_from_checkpoint(reader_checkpoint, config)
    corpus, index = load_corpus_and_index(config)
    ctx = ReaderContext(model=model, assets=assets, snapshot=snap,
                        corpus=corpus, index=index)
    if selector_checkpoint:
        ctx.selector, sel_assets, _ = selector_from_checkpoint(
            selector_checkpoint, config)
        ctx.selector_encoder = sel_assets.encoder
    return ctx


def _bundles_for(ctx, config, examples, strategy, k, cache=None):
    prepared = [prepare_question(ex, ctx.assets.encoder) for ex in examples]
    masks = essential_masks(prepared, strategy, config,
                            selector=ctx.selector,
                            encoder=ctx.selector_encoder, index=ctx.index)
    return build_reader_bundles(examples, ctx.assets.encoder, ctx.corpus,
                                ctx.index, cache, masks, strategy, k)


def evaluate_accuracy(config, reader_checkpoint, selector_checkpoint=None,
                      split="test"):
    """Accuracy of a trained reader on one split of the config dataset."""
    started = time.time()
    ctx = load_reader_context(config, reader_checkpoint, selector_checkpoint)
    examples = pick_split(load_dataset(config.dataset), config, split)
    _require_labels(examples, f"evaluate the {split} split")
    cache = (RetrievalCache.load(config.cache_path)
             if config.cache_path and Path(config.cache_path).exists()
             else None)
    bundles = _bundles_for(ctx, config, examples, config.strategy, config.k,
                           cache=cache)
    accuracy, rows = _reader_split_accuracy(ctx.model, bundles)
    return MetricsReport(
        kind="reader-eval", split=split, metrics={"accuracy": accuracy},
        config_hash=config.hash(), wall_clock=time.time() - started,
        predictions=rows,
        extra={"strategy": config.strategy, "k": config.k,
               "n_examples": len(examples)})


def evaluate_grid(config, reader_checkpoint, selector_checkpoint=None,
                  split="test", strategies=STRATEGIES, depths=GRID_DEPTHS):
    """Accuracy for every (strategy, k) cell on one split.

    Returns (rows, reports): flat rows for the grid table and figure,
    plus one full report per cell.
    """
    ctx = load_reader_context(config, reader_checkpoint, selector_checkpoint)
    examples = pick_split(load_dataset(config.dataset), config, split)
    _require_labels(examples, f"evaluate the {split} split")
    rows, reports = [], []
    for strategy in strategies:
        for k in depths:
            started = time.time()
            bundles = _bundles_for(ctx, config, examples, strategy, k)
            accuracy, preds = _reader_split_accuracy(ctx.model, bundles)
            rows.append({"strategy": strategy, "k": k, "split": split,
                         "accuracy": accuracy})
            reports.append(MetricsReport(
                kind="reader-grid", split=split,
                metrics={"accuracy": accuracy},
                config_hash=config.hash(), wall_clock=time.time() - started,
                predictions=preds,
                extra={"strategy": strategy, "k": k,
                       "n_examples": len(examples)}))
    return rows, reports


def evaluate_selector(config, selector_checkpoint, split="test"):
    """Precision/recall/F1 of a trained selector against annotator masks."""
    started = time.time()
    model, assets, _ = selector_from_checkpoint(selector_checkpoint, config)
    examples = pick_split(load_annotated(config.annotations or config.dataset),
                          config, split)
    encoded = [_encode_selector_example(assets.encoder, ex,
                                        config.annotation_threshold)
               for ex in examples]
    precision, recall, f1 = _selector_split_prf(model, encoded)
    return MetricsReport(
        kind="selector-eval", split=split,
        metrics={"precision": precision, "recall": recall, "f1": f1},
        config_hash=config.hash(), wall_clock=time.time() - started,
        extra={"n_examples": len(examples)})


def selector_predictions(config, selector_checkpoint, input_path=None):
    """Probability and mask rows for every question in a dataset.

    Gold annotations are not required here; any question file works.
    """
    model, assets, _ = selector_from_checkpoint(selector_checkpoint, config)
    path = input_path or config.annotations or config.dataset
    try:
        examples = load_annotated(path)
    except DatasetError:
        examples = load_dataset(path)
    rows = []
    for ex in examples:
        prepared = prepare_question(ex, assets.encoder)
        all_ct = [t for ct in prepared.choice_tokens for t in ct]
        q_enc = assets.encoder.encode_question(ex.id, prepared.tokens,
                                               prepared.choice_tokens)
        c_enc = assets.encoder.encode_choice(ex.id, "all", all_ct,
                                             question=prepared.tokens)
        probs = model.forward(q_enc, c_enc, training=False)
        mask = select_terms(probs.data, prepared.tokens)
        rows.append({"question_id": ex.id,
                     "tokens": [t.surface for t in prepared.tokens],
                     "probabilities": [round(float(p), 6)
                                       for p in probs.data],
                     "mask": [int(m) for m in mask]})
    return rows


def trace_question(ctx, config, example):
    """Audit one question end to end.

    The trace records what each stage produced: the essential-term mask,
    the per-choice queries (with the fallback flag when an empty mask
    reverted to full-question terms), the retrieved sentences with their
    scores and source line numbers, and the final score vector.
    """
    prepared = prepare_question(example, ctx.assets.encoder)
    mask = essential_masks([prepared], config.strategy, config,
                           selector=ctx.selector,
                           encoder=ctx.selector_encoder,
                           index=ctx.index)[example.id]
    evidence = materialize_evidence(prepared, mask, config.strategy, config.k,
                                    ctx.index, ctx.corpus)
    encoded = encode_reader_example(ctx.assets.encoder, ctx.corpus, prepared,
                                    mask, evidence)
    out = ctx.model.forward(*encoded, training=False)
    choice = predict(out.scores)
    tokens = [t.surface for t in prepared.tokens]
    choices = []
    for idx, ev in enumerate(evidence):
        sentences = [{"sentence_id": sid,
                      "line": ctx.corpus.line_numbers[sid],
                      "score": round(float(score), 6),
                      "text": ctx.corpus.raw[sid]}
                     for sid, score in zip(ev.sentence_ids, ev.scores)]
        choices.append({"index": idx, "text": example.choices[idx],
                        "query_terms": ev.query_terms,
                        "fallback": ev.fallback,
                        "sentences": sentences})
    return {"question_id": example.id,
            "question": example.question,
            "tokens": tokens,
            "strategy": config.strategy,
            "k": config.k,
            "essential_mask": [int(m) for m in mask],
            "essential_terms": [t for t, m in zip(tokens, mask) if m],
            "choices": choices,
            "scores": [round(float(s), 6) for s in out.scores],
            "predicted": choice,
            "label": example.label,
            "empty_passages": out.empty_passage_count}


def run_pipeline(config, reader_checkpoint, selector_checkpoint=None,
                 split="test", trace_limit=None):
    """Answer a whole split and keep the per-question audit traces.

    Returns (report, traces).  ``trace_limit`` bounds how many traces
    are kept; None keeps all of them.
    """
    started = time.time()
    ctx = load_reader_context(config, reader_checkpoint, selector_checkpoint)
    examples = pick_split(load_dataset(config.dataset), config, split)
    traces = []
    correct = labelled = 0
    rows = []
    for ex in examples:
        trace = trace_question(ctx, config, ex)
        if trace_limit is None or len(traces) < trace_limit:
            traces.append(trace)
        if ex.label is not None:
            labelled += 1
            correct += int(trace["predicted"] == ex.label)
        rows.append({"id": ex.id, "label": ex.label,
                     "predicted": trace["predicted"],
                     "correct": int(trace["predicted"] == ex.label)
                     if ex.label is not None else "",
                     "scores": ";".join(f"{s:.6f}" for s in trace["scores"])})
    metrics = {"n_questions": len(examples)}
    if labelled:
        metrics["accuracy"] = correct / labelled
    report = MetricsReport(
        kind="pipeline-run", split=split, metrics=metrics,
        config_hash=config.hash(), wall_clock=time.time() - started,
        predictions=rows,
        extra={"strategy": config.strategy, "k": config.k,
               "n_labelled": labelled})
    return report, traces
