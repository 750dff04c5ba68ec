"""Essential-term selector.

Tags each question token with the probability that it is essential for
retrieval.  The question attends over the concatenation of all answer
choices at the word level, a BiLSTM reads the question together with
that attended view, and a linear probe over the hidden states plus the
token's own feature embeddings produces a per-token sigmoid score.
"""

from __future__ import annotations

import numpy as np

from .attention import word_attention
from .inputs import (
    add_embedding_params,
    embed_sequence,
    feature_block,
    feature_dim,
    input_dim,
)
from .nn import Tensor, bilstm_forward, concat, dropout

ATT_U = "att.qc.u"
ATT_V = "att.qc.v"
LSTM = "lstm.q"
PROBE = "probe.w"


def build_selector_params(store, word_vectors, pos_count, ner_count,
                          rel_count, pos_dim, ner_dim, rel_dim, hidden,
                          train_word_embeddings=False):
    add_embedding_params(store, word_vectors, pos_count, ner_count, rel_count,
                         pos_dim, ner_dim, rel_dim, train_word_embeddings)
    d = input_dim(store)
    emb_dim = word_vectors.shape[1]
    store.add(ATT_U, (d, emb_dim))
    store.add(ATT_V, (d, emb_dim))
    store.add_bilstm(LSTM, d + emb_dim, hidden)
    store.add(PROBE, (2 * hidden + feature_dim(store),))
    return store


class TermSelector:
    def __init__(self, store, dropout_rate=0.4):
        self.store = store
        self.dropout_rate = dropout_rate

    def forward(self, question_enc, choices_enc, training=False, rng=None):
        """Per-token essential probabilities, shape (question length,).

        ``choices_enc`` is the concatenation of all choices encoded as a
        single sequence.
        """
        store = self.store
        w_q = embed_sequence(store, question_enc)
        w_c = embed_sequence(store, choices_enc)
        if training:
            w_q = dropout(w_q, self.dropout_rate, training, rng)
            w_c = dropout(w_c, self.dropout_rate, training, rng)
        attended, _ = word_attention(w_q, w_c, store[ATT_U], store[ATT_V])
        hidden = bilstm_forward(concat([w_q, attended], axis=1),
                                store.bilstm(LSTM))
        if training:
            hidden = dropout(hidden, self.dropout_rate, training, rng)
        features = feature_block(store, question_enc)
        return (concat([hidden, features], axis=1) @ store[PROBE]).sigmoid()


def bce_loss(probs, gold):
    """Mean binary cross-entropy over tokens; probabilities are clamped
    to [1e-7, 1 - 1e-7] so a saturated output cannot produce inf."""
    target = Tensor(np.asarray(gold, dtype=probs.data.dtype))
    if target.shape != probs.shape:
        raise ValueError("gold mask length does not match predictions")
    clamped = probs.clip(1e-7, 1.0 - 1e-7)
    losses = -(target * clamped.log() + (1.0 - target) * (1.0 - clamped).log())
    return losses.mean()


def select_terms(probs, tokens):
    """Binarize at a strict 0.5 threshold; punctuation is never essential."""
    probs = np.asarray(probs)
    if len(probs) != len(tokens):
        raise ValueError("probability vector length does not match tokens")
    mask = (probs > 0.5).astype(np.float64)
    for i, tok in enumerate(tokens):
        if tok.is_punct:
            mask[i] = 0.0
    return mask


def evaluate_prf(predicted_masks, gold_masks):
    """Micro-averaged precision / recall / F1 over all tokens.  Empty
    denominators score zero rather than raising."""
    tp = fp = fn = 0
    for pred, gold in zip(predicted_masks, gold_masks):
        pred = np.asarray(pred) > 0
        gold = np.asarray(gold) > 0
        if pred.shape != gold.shape:
            raise ValueError("mask length mismatch")
        tp += int((pred & gold).sum())
        fp += int((pred & ~gold).sum())
        fn += int((~pred & gold).sum())
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall else 0.0)
    return precision, recall, f1
