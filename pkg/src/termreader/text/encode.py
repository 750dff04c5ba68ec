"""Per-token channel assembly for questions, choices, and passages.

Every sequence gets the same channel layout; channels that do not apply
to a role are zero (choices carry no relation ids, only questions carry
an essential mask).  Relation lookups that hit several candidate
relations pick one with a generator derived from (seed, example id,
role), so re-encoding any sequence in any order is reproducible.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .embeddings import stable_hash
from .features import log_freq_feature, match_feature
from .relations import relation_ids
from .tagger import NER_TAGS, POS_TAGS, RuleTagger, TagVocab
from .tokenize import Token
from .vocab import Vocab

log = logging.getLogger(__name__)


@dataclass
class EncodedSequence:
    tokens: list
    token_ids: np.ndarray
    pos_ids: np.ndarray
    ner_ids: np.ndarray
    rel_ids: np.ndarray
    match: np.ndarray
    log_freq: np.ndarray
    essential: np.ndarray
    length: int

    def __post_init__(self):
        n = self.length
        for name in ("token_ids", "pos_ids", "ner_ids", "rel_ids",
                     "match", "log_freq", "essential"):
            if len(getattr(self, name)) < n:
                raise ValueError(f"channel {name} shorter than length {n}")


class TextEncoder:
    def __init__(self, vocab, relation_table, max_question_len=128,
                 max_passage_len=400, seed=0):
        self.vocab = vocab
        self.relation_table = relation_table
        self.pos_vocab = TagVocab(POS_TAGS)
        self.ner_vocab = TagVocab(NER_TAGS)
        self.tagger = RuleTagger()
        self.max_question_len = max_question_len
        self.max_passage_len = max_passage_len
        self.seed = seed
        self.truncation_count = 0

    def _rng(self, example_id, role):
        return np.random.default_rng(
            [self.seed & 0xFFFFFFFF, stable_hash(example_id), stable_hash(role)])

    def _tags(self, tokens, pos_labels, ner_labels):
        if pos_labels is None or ner_labels is None:
            rule_pos, rule_ner = self.tagger.tag(tokens)
            pos_labels = pos_labels or rule_pos
            ner_labels = ner_labels or rule_ner
        if len(pos_labels) != len(tokens) or len(ner_labels) != len(tokens):
            raise ValueError("tag annotation length does not match tokens")
        pos = np.array([self.pos_vocab.id(l) for l in pos_labels], dtype=np.int64)
        ner = np.array([self.ner_vocab.id(l) for l in ner_labels], dtype=np.int64)
        return pos, ner

    def _base(self, tokens, against, rel_against, rng, pos_labels, ner_labels):
        token_ids = np.array([self.vocab.id(t.lower) for t in tokens],
                             dtype=np.int64)
        pos, ner = self._tags(tokens, pos_labels, ner_labels)
        if rel_against is None:
            rel = np.zeros(len(tokens), dtype=np.int64)
        else:
            rel = relation_ids(tokens, rel_against, self.relation_table, rng)
        return EncodedSequence(
            tokens=list(tokens),
            token_ids=token_ids,
            pos_ids=pos,
            ner_ids=ner,
            rel_ids=rel,
            match=match_feature(tokens, against),
            log_freq=log_freq_feature(tokens),
            essential=np.zeros(len(tokens), dtype=np.float64),
            length=len(tokens),
        )

    def truncate_question(self, tokens):
        if len(tokens) > self.max_question_len:
            self.truncation_count += 1
            log.warning("question truncated from %d to %d tokens",
                        len(tokens), self.max_question_len)
            return tokens[:self.max_question_len]
        return tokens

    def encode_question(self, example_id, tokens, choices, passages=(),
                        essential=None, pos_labels=None, ner_labels=None):
        """Question channels: relations are looked up against all choice
        tokens; the match feature sees every passage and choice."""
        tokens = self.truncate_question(tokens)
        if pos_labels is not None:
            pos_labels = pos_labels[:len(tokens)]
        if ner_labels is not None:
            ner_labels = ner_labels[:len(tokens)]
        all_choice_tokens = [t for c in choices for t in c]
        enc = self._base(tokens, list(passages) + list(choices),
                         all_choice_tokens, self._rng(example_id, "q"),
                         pos_labels, ner_labels)
        if essential is not None:
            ess = np.asarray(essential, dtype=np.float64)[:len(tokens)]
            if len(ess) != len(tokens):
                raise ValueError("essential mask shorter than question")
            enc.essential = ess
        return enc

    def encode_choice(self, example_id, choice_index, tokens, question,
                      passage=None):
        """Choice channels: no relation lookups; match sees the question
        and, when present, the paired evidence passage."""
        against = [question] if passage is None else [passage, question]
        return self._base(tokens, against, None,
                          self._rng(example_id, f"c{choice_index}"),
                          None, None)

    def encode_passage(self, example_id, choice_index, tokens, question,
                       choice):
        """Passage channels: relations and matches both run against the
        question plus the paired choice."""
        if len(tokens) > self.max_passage_len:
            self.truncation_count += 1
            log.warning("passage truncated from %d to %d tokens",
                        len(tokens), self.max_passage_len)
            tokens = tokens[:self.max_passage_len]
        other = list(question) + list(choice)
        return self._base(tokens, [question, choice], other,
                          self._rng(example_id, f"p{choice_index}"),
                          None, None)

    def pad_sequence(self):
        return pad_sequence()


def pad_sequence():
    """A one-token stand-in used when retrieval produced nothing."""
    pad = Token(Vocab.PAD_TOKEN, Vocab.PAD_TOKEN, Vocab.PAD_TOKEN)
    zeros_i = np.zeros(1, dtype=np.int64)
    zeros_f = np.zeros(1, dtype=np.float64)
    return EncodedSequence(
        tokens=[pad], token_ids=zeros_i.copy(), pos_ids=zeros_i.copy(),
        ner_ids=zeros_i.copy(), rel_ids=zeros_i.copy(),
        match=zeros_f.copy(), log_freq=zeros_f.copy(),
        essential=zeros_f.copy(), length=1)
