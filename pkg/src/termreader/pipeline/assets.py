"""Shared resource assembly for training, evaluation, and tracing.

The vocabulary is built from whatever text a command will touch (dataset
tokens, plus corpus tokens when evidence passages are involved) and is
stored inside checkpoints, so a trained model never depends on being
re-run against the exact same files to line its embeddings up.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..retrieval.corpus import Corpus
from ..retrieval.index import InvertedIndex
from ..text.embeddings import load_embeddings
from ..text.encode import TextEncoder
from ..text.relations import RelationTable
from ..text.tokenize import tokenize, tokens_from_surfaces
from ..text.vocab import Vocab
from .checkpoint import CheckpointError

log = logging.getLogger(__name__)


@dataclass
class PreparedQuestion:
    example: object
    tokens: list          # question Tokens, truncated to the configured max
    choice_tokens: list   # list of Token lists, one per choice


def prepare_question(example, encoder):
    if example.annotations is not None:
        tokens = tokens_from_surfaces(example.annotations.tokens)
    else:
        tokens = tokenize(example.question)
    if not tokens:
        raise ValueError(f"example {example.id}: question has no tokens")
    tokens = encoder.truncate_question(tokens)
    choice_tokens = [tokenize(c) for c in example.choices]
    for i, ct in enumerate(choice_tokens):
        if not ct:
            raise ValueError(f"example {example.id}: choice {i} has no tokens")
    return PreparedQuestion(example=example, tokens=tokens,
                            choice_tokens=choice_tokens)


@dataclass
class Assets:
    vocab: Vocab
    word_vectors: np.ndarray     # (V, emb_dim) float64
    relation_table: RelationTable
    encoder: TextEncoder


def _vocab_counts(examples):
    counts = Counter()
    for ex in examples:
        if ex.annotations is not None:
            counts.update(t.lower for t in
                          tokens_from_surfaces(ex.annotations.tokens))
        else:
            counts.update(t.lower for t in tokenize(ex.question))
        for choice in ex.choices:
            counts.update(t.lower for t in tokenize(choice))
    return counts


def build_assets(config, examples, corpus=None):
    counts = _vocab_counts(examples)
    if corpus is not None:
        for sentence in corpus.tokens:
            counts.update(sentence)
    counts.pop(Vocab.PAD_TOKEN, None)
    counts.pop(Vocab.UNK_TOKEN, None)
    vocab = Vocab.from_counts(counts)
    table = load_embeddings(config.embeddings, vocab, config.emb_dim)
    log.info("vocab %d tokens, embedding coverage %.1f%%",
             len(vocab), 100 * table.coverage)
    relation_table = (RelationTable.load(config.relations)
                      if config.relations else RelationTable.empty())
    encoder = TextEncoder(vocab, relation_table,
                          max_question_len=config.max_question_len,
                          max_passage_len=config.max_passage_len,
                          seed=config.seed)
    return Assets(vocab=vocab, word_vectors=table.vectors,
                  relation_table=relation_table, encoder=encoder)


def assets_from_checkpoint(ckpt, config):
    """Rebuild the exact encoding environment of a trained model."""
    extra = ckpt.extra
    if "vocab" not in extra or "relations" not in extra:
        raise CheckpointError("checkpoint lacks vocab/relation metadata")
    vocab = Vocab([Vocab.PAD_TOKEN, Vocab.UNK_TOKEN] + list(extra["vocab"]))
    relation_names = tuple(extra["relations"])
    if config.relations:
        relation_table = RelationTable.load(config.relations,
                                            relation_names=relation_names)
    else:
        relation_table = RelationTable(relation_names, {})
        if len(relation_names) > 1:
            log.warning("no relations file configured; relation lookups are off")
    word = ckpt.params.get("emb.word")
    if word is None or word.shape[0] != len(vocab):
        raise CheckpointError("word embedding table does not match stored vocab")
    snap = ckpt.config_snapshot
    encoder = TextEncoder(vocab, relation_table,
                          max_question_len=snap["max_question_len"],
                          max_passage_len=snap["max_passage_len"],
                          seed=snap["seed"])
    return Assets(vocab=vocab, word_vectors=word.astype(np.float64),
                  relation_table=relation_table, encoder=encoder)


def load_corpus_and_index(config, need_index=True):
    corpus = Corpus.load(config.corpus)
    if not need_index:
        return corpus, None
    if config.index_path:
        try:
            index = InvertedIndex.load(config.index_path)
        except FileNotFoundError:
            raise FileNotFoundError(
                f"index file '{config.index_path}' not found; "
                "run `termreader index build` first") from None
        if index.n_docs != len(corpus):
            raise ValueError(
                f"index covers {index.n_docs} sentences but the corpus has "
                f"{len(corpus)}; rebuild with `termreader index build`")
    else:
        index = InvertedIndex.build(corpus)
    return corpus, index
