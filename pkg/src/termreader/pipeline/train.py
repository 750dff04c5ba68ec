"""Training loops for the selector and the reader.

Both share the same regime: seeded shuffle each epoch, mini-batches as
gradient accumulation over single examples (each loss scaled by 1/batch
size), one Adamax step per batch, and checkpoint selection by the best
dev-split metric.  Everything downstream of the seed is deterministic,
so rerunning a config reproduces the loss curve bit for bit.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..nn import Adamax, ParamStore
from ..reader import Reader, ReaderFlags, build_reader_params, predict, reader_loss
from ..selector import (
    TermSelector,
    bce_loss,
    build_selector_params,
    evaluate_prf,
    select_terms,
)
from ..text.tagger import NER_TAGS, POS_TAGS
from .assets import (
    assets_from_checkpoint,
    build_assets,
    load_corpus_and_index,
    prepare_question,
)
from ..retrieval.cache import RetrievalCache
from .checkpoint import Checkpoint, CheckpointError, load_checkpoint, save_checkpoint
from .config import Config
from .data import DatasetError, gold_mask, load_annotated, load_dataset, split_dataset
from .reports import MetricsReport
from .retrieve import encode_reader_example, essential_masks, materialize_evidence

log = logging.getLogger(__name__)


@dataclass
class TrainResult:
    checkpoint_path: str
    report: MetricsReport
    history: list = field(default_factory=list)


def _rngs(seed):
    shuffle = np.random.default_rng([int(seed) & 0xFFFFFFFF, 11])
    drop = np.random.default_rng([int(seed) & 0xFFFFFFFF, 13])
    return shuffle, drop


def _batches(order, batch_size):
    for start in range(0, len(order), batch_size):
        yield order[start:start + batch_size]


def _rng_state(rng):
    return rng.bit_generator.state


def reader_flags(config):
    return ReaderFlags(
        passage_question_attention=config.use_passage_question_attention,
        question_choice_attention=config.use_question_choice_attention,
        passage_choice_attention=config.use_passage_choice_attention,
        choice_interaction=config.use_choice_interaction,
    )


def _checkpoint_extra(kind, assets):
    return {
        "kind": kind,
        "vocab": assets.vocab.tokens()[2:],
        "relations": list(assets.relation_table.relations),
    }


# -- selector ---------------------------------------------------------------


def _encode_selector_example(encoder, example, threshold):
    prepared = prepare_question(example, encoder)
    all_choice_tokens = [t for ct in prepared.choice_tokens for t in ct]
    q_enc = encoder.encode_question(example.id, prepared.tokens,
                                    prepared.choice_tokens)
    c_enc = encoder.encode_choice(example.id, "all", all_choice_tokens,
                                  question=prepared.tokens)
    gold = gold_mask(example.annotations, threshold)[:len(prepared.tokens)]
    return prepared, q_enc, c_enc, gold


def _selector_split_prf(model, encoded):
    preds, golds = [], []
    for prepared, q_enc, c_enc, gold in encoded:
        probs = model.forward(q_enc, c_enc, training=False)
        preds.append(select_terms(probs.data, prepared.tokens))
        golds.append(gold)
    return evaluate_prf(preds, golds)


def train_selector(config):
    started = time.time()
    examples = load_annotated(config.annotations or config.dataset)
    train, dev, test = split_dataset(examples, config.split_ratios, config.seed)
    assets = build_assets(config, examples)
    store = ParamStore(config.seed, dtype=np.float32)
    build_selector_params(store, assets.word_vectors,
                          pos_count=len(POS_TAGS), ner_count=len(NER_TAGS),
                          rel_count=len(assets.relation_table),
                          pos_dim=config.pos_dim, ner_dim=config.ner_dim,
                          rel_dim=config.rel_dim, hidden=config.hidden,
                          train_word_embeddings=config.train_word_embeddings)
    model = TermSelector(store, dropout_rate=config.dropout)
    optimizer = Adamax(store, lr=config.lr)
    shuffle_rng, drop_rng = _rngs(config.seed)

    encode = lambda exs: [_encode_selector_example(assets.encoder, ex,
                                                   config.annotation_threshold)
                          for ex in exs]
    enc_train, enc_dev, enc_test = encode(train), encode(dev), encode(test)

    ckpt_path = Path(config.checkpoint_dir) / "selector.ckpt"
    ckpt_path.parent.mkdir(parents=True, exist_ok=True)
    extra = _checkpoint_extra("selector", assets)
    best_f1 = float("-inf")
    history = []
    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(len(enc_train))
        total = 0.0
        for batch in _batches(order, config.batch_size):
            scale = 1.0 / len(batch)
            for i in batch:
                prepared, q_enc, c_enc, gold = enc_train[i]
                probs = model.forward(q_enc, c_enc, training=True, rng=drop_rng)
                loss = bce_loss(probs, gold) * scale
                loss.backward()
                total += float(loss.data) * len(batch)
            optimizer.step()
        train_loss = total / max(len(enc_train), 1)
        row = {"epoch": epoch, "train_loss": train_loss}
        if enc_dev:
            _, _, dev_f1 = _selector_split_prf(model, enc_dev)
            row["dev_f1"] = dev_f1
            if dev_f1 > best_f1:
                best_f1 = dev_f1
                save_checkpoint(ckpt_path, store.items(), config.to_dict(),
                                rng_state={"shuffle": _rng_state(shuffle_rng),
                                           "dropout": _rng_state(drop_rng)},
                                extra=extra)
        history.append(row)
        log.info("selector epoch %d: loss %.4f dev_f1 %s", epoch, train_loss,
                 row.get("dev_f1"))
    if not enc_dev or best_f1 == float("-inf"):
        save_checkpoint(ckpt_path, store.items(), config.to_dict(),
                        rng_state={"shuffle": _rng_state(shuffle_rng),
                                   "dropout": _rng_state(drop_rng)},
                        extra=extra)

    load_checkpoint(ckpt_path).apply_to(store)
    eval_set = enc_test or enc_dev or enc_train
    eval_name = "test" if enc_test else ("dev" if enc_dev else "train")
    precision, recall, f1 = _selector_split_prf(model, eval_set)
    report = MetricsReport(
        kind="selector-train", split=eval_name,
        metrics={"precision": precision, "recall": recall, "f1": f1},
        config_hash=config.hash(), wall_clock=time.time() - started,
        extra={"epochs": config.epochs, "best_dev_f1": None if best_f1 == float("-inf") else best_f1,
               "n_train": len(train), "n_dev": len(dev), "n_test": len(test)})
    return TrainResult(checkpoint_path=str(ckpt_path), report=report,
                       history=history)


def selector_from_checkpoint(path, config):
    ckpt = load_checkpoint(path)
    if ckpt.extra.get("kind") != "selector":
        raise CheckpointError(f"{path}: not a selector checkpoint")
    snap = Config(**ckpt.config_snapshot)
    assets = assets_from_checkpoint(ckpt, config)
    store = ParamStore(snap.seed, dtype=np.float32)
    build_selector_params(store, assets.word_vectors,
                          pos_count=len(POS_TAGS), ner_count=len(NER_TAGS),
                          rel_count=len(assets.relation_table),
                          pos_dim=snap.pos_dim, ner_dim=snap.ner_dim,
                          rel_dim=snap.rel_dim, hidden=snap.hidden,
                          train_word_embeddings=snap.train_word_embeddings)
    ckpt.apply_to(store)
    return TermSelector(store, dropout_rate=snap.dropout), assets, snap


# -- reader -----------------------------------------------------------------


def _require_labels(examples, what):
    for ex in examples:
        if ex.label is None:
            raise DatasetError(
                f"example {ex.id}: no gold label; cannot {what}")


@dataclass
class ReaderBundle:
    """Everything train/eval needs for one question, encoded once."""
    prepared: object
    encoded: tuple
    evidence: list
    label: int | None


def build_reader_bundles(examples, encoder, corpus, index, cache, masks,
                         strategy, k):
    bundles = []
    for ex in examples:
        prepared = prepare_question(ex, encoder)
        evidence = materialize_evidence(prepared, masks[ex.id], strategy, k,
                                        index, corpus, cache=cache)
        encoded = encode_reader_example(encoder, corpus, prepared,
                                        masks[ex.id], evidence)
        bundles.append(ReaderBundle(prepared=prepared, encoded=encoded,
                                    evidence=evidence, label=ex.label))
    return bundles


def _reader_split_accuracy(model, bundles):
    correct = 0
    rows = []
    for b in bundles:
        q_enc, c_encs, p_encs = b.encoded
        out = model.forward(q_enc, c_encs, p_encs, training=False)
        choice = predict(out.scores)
        ok = int(choice == b.label)
        correct += ok
        rows.append({"id": b.prepared.example.id, "label": b.label,
                     "predicted": choice, "correct": ok,
                     "scores": ";".join(f"{s:.6f}" for s in out.scores)})
    accuracy = correct / len(bundles) if bundles else 0.0
    return accuracy, rows


def train_reader(config, selector_checkpoint=None):
    started = time.time()
    examples = load_dataset(config.dataset)
    train, dev, test = split_dataset(examples, config.split_ratios, config.seed)
    _require_labels(train + dev, "train the reader")
    corpus, index = load_corpus_and_index(config)
    assets = build_assets(config, examples, corpus=corpus)

    selector = sel_encoder = None
    if selector_checkpoint:
        selector, sel_assets, _ = selector_from_checkpoint(selector_checkpoint,
                                                           config)
        sel_encoder = sel_assets.encoder
    prepared_all = [prepare_question(ex, assets.encoder) for ex in examples]
    masks = essential_masks(prepared_all, config.strategy, config,
                            selector=selector, encoder=sel_encoder,
                            index=index)

    cache = (RetrievalCache.load(config.cache_path)
             if config.cache_path and Path(config.cache_path).exists()
             else RetrievalCache())
    split_bundles = [
        build_reader_bundles(part, assets.encoder, corpus, index, cache,
                             masks, config.strategy, config.k)
        for part in (train, dev, test)
    ]
    b_train, b_dev, b_test = split_bundles
    if config.cache_path:
        cache.save(config.cache_path)

    store = ParamStore(config.seed, dtype=np.float32)
    flags = reader_flags(config)
    build_reader_params(store, assets.word_vectors,
                        pos_count=len(POS_TAGS), ner_count=len(NER_TAGS),
                        rel_count=len(assets.relation_table),
                        pos_dim=config.pos_dim, ner_dim=config.ner_dim,
                        rel_dim=config.rel_dim, hidden=config.hidden,
                        flags=flags,
                        train_word_embeddings=config.train_word_embeddings)
    model = Reader(store, flags=flags, dropout_rate=config.dropout)
    optimizer = Adamax(store, lr=config.lr)
    shuffle_rng, drop_rng = _rngs(config.seed)

    ckpt_path = Path(config.checkpoint_dir) / "reader.ckpt"
    ckpt_path.parent.mkdir(parents=True, exist_ok=True)
    extra = _checkpoint_extra("reader", assets)
    best_acc = float("-inf")
    history = []
    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(len(b_train))
        total = 0.0
        for batch in _batches(order, config.batch_size):
            scale = 1.0 / len(batch)
            for i in batch:
                bundle = b_train[i]
                q_enc, c_encs, p_encs = bundle.encoded
                out = model.forward(q_enc, c_encs, p_encs, training=True,
                                    rng=drop_rng)
                loss = reader_loss(out.s_pc, out.s_qc, bundle.label) * scale
                loss.backward()
                total += float(loss.data) * len(batch)
            optimizer.step()
        train_loss = total / max(len(b_train), 1)
        train_acc, _ = _reader_split_accuracy(model, b_train)
        row = {"epoch": epoch, "train_loss": train_loss,
               "train_accuracy": train_acc}
        if b_dev:
            dev_acc, _ = _reader_split_accuracy(model, b_dev)
            row["dev_accuracy"] = dev_acc
            if dev_acc > best_acc:
                best_acc = dev_acc
                save_checkpoint(ckpt_path, store.items(), config.to_dict(),
                                rng_state={"shuffle": _rng_state(shuffle_rng),
                                           "dropout": _rng_state(drop_rng)},
                                extra=extra)
        history.append(row)
        log.info("reader epoch %d: loss %.4f train_acc %.3f dev_acc %s",
                 epoch, train_loss, train_acc, row.get("dev_accuracy"))
    if not b_dev or best_acc == float("-inf"):
        save_checkpoint(ckpt_path, store.items(), config.to_dict(),
                        rng_state={"shuffle": _rng_state(shuffle_rng),
                                   "dropout": _rng_state(drop_rng)},
                        extra=extra)

    load_checkpoint(ckpt_path).apply_to(store)
    if b_test:
        _require_labels(test, "evaluate the test split")
        eval_bundles, eval_name = b_test, "test"
    elif b_dev:
        eval_bundles, eval_name = b_dev, "dev"
    else:
        eval_bundles, eval_name = b_train, "train"
    accuracy, rows = _reader_split_accuracy(model, eval_bundles)
    report = MetricsReport(
        kind="reader-train", split=eval_name,
        metrics={"accuracy": accuracy},
        config_hash=config.hash(), wall_clock=time.time() - started,
        predictions=rows,
        extra={"strategy": config.strategy, "k": config.k,
               "epochs": config.epochs,
               "best_dev_accuracy": None if best_acc == float("-inf") else best_acc,
               "n_train": len(train), "n_dev": len(dev), "n_test": len(test)})
    return TrainResult(checkpoint_path=str(ckpt_path), report=report,
                       history=history)


def reader_from_checkpoint(path, config):
    ckpt = load_checkpoint(path)
    if ckpt.extra.get("kind") != "reader":
        raise CheckpointError(f"{path}: not a reader checkpoint")
    snap = Config(**ckpt.config_snapshot)
    assets = assets_from_checkpoint(ckpt, config)
    store = ParamStore(snap.seed, dtype=np.float32)
    flags = reader_flags(snap)
    build_reader_params(store, assets.word_vectors,
                        pos_count=len(POS_TAGS), ner_count=len(NER_TAGS),
                        rel_count=len(assets.relation_table),
                        pos_dim=snap.pos_dim, ner_dim=snap.ner_dim,
                        rel_dim=snap.rel_dim, hidden=snap.hidden,
                        flags=flags,
                        train_word_embeddings=snap.train_word_embeddings)
    ckpt.apply_to(store)
    return Reader(store, flags=flags, dropout_rate=snap.dropout), assets, snap
