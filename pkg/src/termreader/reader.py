"""Multiple-choice reader over retrieved evidence.

Each choice is scored from a (question, choice, passage) triple.  Word
attention enriches the passage with a question view and the choice with
passage and question views; three BiLSTMs then produce contextual
states.  Self-attentive pooling (with the essential-term flags joined to
the question states) yields one vector per sequence, the passage is
additionally pooled under a bilinear match against the question vector,
and a choice-interaction vector contrasts each choice with the mean of
the others.  Two bilinear scores per choice, softmaxed separately and
summed, give the final score vector; its entries add up to 2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .attention import word_attention
from .inputs import add_embedding_params, embed_sequence, input_dim
from .nn import (
    Tensor,
    bilstm_forward,
    concat,
    cross_entropy_logits,
    dropout,
    max_rows,
    pad_rows,
    scale_rows,
    softmax_rows,
    stack_scalars,
)
from .text.encode import pad_sequence

log = logging.getLogger(__name__)

ATT_PQ_U, ATT_PQ_V = "att.pq.u", "att.pq.v"
ATT_CQ_U, ATT_CQ_V = "att.cq.u", "att.cq.v"
ATT_CP_U, ATT_CP_V = "att.cp.u", "att.cp.v"
LSTM_Q, LSTM_C, LSTM_P = "lstm.q", "lstm.c", "lstm.p"
FUSE_Q, FUSE_C = "fuse.q", "fuse.c"
BILINEAR_PC, BILINEAR_QC = "bilinear.pc", "bilinear.qc"


@dataclass
class ReaderFlags:
    """Structural switches; disabling one removes that signal path."""
    passage_question_attention: bool = True
    question_choice_attention: bool = True
    passage_choice_attention: bool = True
    choice_interaction: bool = True


def build_reader_params(store, word_vectors, pos_count, ner_count, rel_count,
                        pos_dim, ner_dim, rel_dim, hidden,
                        flags=None, train_word_embeddings=False):
    flags = flags or ReaderFlags()
    add_embedding_params(store, word_vectors, pos_count, ner_count, rel_count,
                         pos_dim, ner_dim, rel_dim, train_word_embeddings)
    d = input_dim(store)
    emb_dim = word_vectors.shape[1]
    if flags.passage_question_attention:
        store.add(ATT_PQ_U, (d, emb_dim))
        store.add(ATT_PQ_V, (d, emb_dim))
    if flags.question_choice_attention:
        store.add(ATT_CQ_U, (d, emb_dim))
        store.add(ATT_CQ_V, (d, emb_dim))
    if flags.passage_choice_attention:
        store.add(ATT_CP_U, (d, emb_dim))
        store.add(ATT_CP_V, (d, emb_dim))
    c_extra = emb_dim * (int(flags.passage_choice_attention)
                         + int(flags.question_choice_attention))
    p_extra = emb_dim * int(flags.passage_question_attention)
    store.add_bilstm(LSTM_Q, d, hidden)
    store.add_bilstm(LSTM_C, d + c_extra, hidden)
    store.add_bilstm(LSTM_P, d + p_extra, hidden)
    width = 2 * hidden
    store.add(FUSE_Q, (width + 1,))
    store.add(FUSE_C, (width,))
    store.add(BILINEAR_PC, (width, 2 * width))
    store.add(BILINEAR_QC, (width, 2 * width))
    return store


@dataclass
class ReaderOutput:
    scores: np.ndarray          # combined score vector, sums to 2
    s_pc: Tensor                # passage-choice logits
    s_qc: Tensor                # question-choice logits
    score_tensor: Tensor
    empty_passage_count: int = 0
    trace: dict | None = field(default=None, repr=False)


def choice_interaction(hidden_states):
    """Contrast each choice's states with the mean over the others.

    Sequences are aligned by timestep after zero-padding to the longest
    choice; at each step the mean runs over the other choices that still
    have a real token there, and the final maxpool only sees the rows of
    the choice itself.
    """
    n = len(hidden_states)
    if n < 2:
        raise ValueError("choice interaction needs at least two choices")
    lengths = [h.shape[0] for h in hidden_states]
    t_max = max(lengths)
    padded = [pad_rows(h, t_max) for h in hidden_states]
    steps = np.arange(t_max)
    valid = np.stack([steps < m for m in lengths])  # (n, t_max)
    out = []
    for own in range(n):
        total = None
        for i in range(n):
            if i == own:
                continue
            total = padded[i] if total is None else total + padded[i]
        counts = valid[[i for i in range(n) if i != own]].sum(axis=0)
        inv = np.divide(1.0, counts, out=np.zeros(t_max), where=counts > 0)
        diff = padded[own] - scale_rows(total, inv)
        out.append(max_rows(diff, valid_rows=lengths[own]))
    return out


class Reader:
    def __init__(self, store, flags=None, dropout_rate=0.4):
        self.store = store
        self.flags = flags or ReaderFlags()
        self.dropout_rate = dropout_rate

    def _drop(self, t, training, rng):
        return dropout(t, self.dropout_rate, training, rng) if training else t

    def forward(self, question_enc, choice_encs, passage_encs,
                training=False, rng=None, collect_trace=False):
        if len(choice_encs) < 2:
            raise ValueError("reader needs at least two choices")
        if len(passage_encs) != len(choice_encs):
            raise ValueError("one passage per choice required")
        store, flags = self.store, self.flags
        trace = {} if collect_trace else None
        empty = 0
        fixed = []
        for p in passage_encs:
            if p is None or p.length == 0:
                fixed.append(pad_sequence())
                empty += 1
                log.warning("empty evidence passage; scoring against padding")
            else:
                fixed.append(p)
        passage_encs = fixed

        w_q = self._drop(embed_sequence(store, question_enc), training, rng)
        h_q = self._drop(bilstm_forward(w_q, store.bilstm(LSTM_Q)),
                         training, rng)

        h_cs, h_ps = [], []
        for idx, (c_enc, p_enc) in enumerate(zip(choice_encs, passage_encs)):
            w_c = self._drop(embed_sequence(store, c_enc), training, rng)
            w_p = self._drop(embed_sequence(store, p_enc), training, rng)
            c_parts = [w_c]
            if flags.passage_choice_attention:
                att, weights = word_attention(w_c, w_p, store[ATT_CP_U],
                                              store[ATT_CP_V])
                c_parts.append(att)
                if collect_trace:
                    trace.setdefault("attn_cp", []).append(weights.data.copy())
            if flags.question_choice_attention:
                att, weights = word_attention(w_c, w_q, store[ATT_CQ_U],
                                              store[ATT_CQ_V])
                c_parts.append(att)
                if collect_trace:
                    trace.setdefault("attn_cq", []).append(weights.data.copy())
            p_parts = [w_p]
            if flags.passage_question_attention:
                att, weights = word_attention(w_p, w_q, store[ATT_PQ_U],
                                              store[ATT_PQ_V])
                p_parts.append(att)
                if collect_trace:
                    trace.setdefault("attn_pq", []).append(weights.data.copy())
            h_c = bilstm_forward(
                c_parts[0] if len(c_parts) == 1 else concat(c_parts, axis=1),
                store.bilstm(LSTM_C))
            h_p = bilstm_forward(
                p_parts[0] if len(p_parts) == 1 else concat(p_parts, axis=1),
                store.bilstm(LSTM_P))
            h_cs.append(self._drop(h_c, training, rng))
            h_ps.append(self._drop(h_p, training, rng))

        # Self-attentive pooling; the question gets its essential flags
        # as an extra input column.
        n_q = question_enc.length
        essential_col = Tensor(
            question_enc.essential[:n_q].reshape(-1, 1).astype(store.dtype))
        alpha_q = softmax_rows(concat([h_q, essential_col], axis=1)
                               @ store[FUSE_Q])
        q_vec = h_q.T @ alpha_q
        if collect_trace:
            trace["alpha_q"] = alpha_q.data.copy()

        c_vecs, p_vecs = [], []
        for h_c, h_p in zip(h_cs, h_ps):
            alpha_c = softmax_rows(h_c @ store[FUSE_C])
            c_vecs.append(h_c.T @ alpha_c)
            alpha_p = softmax_rows(h_p @ q_vec)
            p_vecs.append(h_p.T @ alpha_p)
            if collect_trace:
                trace.setdefault("alpha_c", []).append(alpha_c.data.copy())
                trace.setdefault("alpha_p", []).append(alpha_p.data.copy())

        if flags.choice_interaction:
            inters = choice_interaction(h_cs)
        else:
            width = h_q.shape[1]
            inters = [Tensor(np.zeros(width, dtype=store.dtype))
                      for _ in h_cs]

        pc_scores, qc_scores = [], []
        for c_vec, p_vec, inter in zip(c_vecs, p_vecs, inters):
            c_final = concat([c_vec, inter], axis=0)
            pc_scores.append((p_vec @ store[BILINEAR_PC]) @ c_final)
            qc_scores.append((q_vec @ store[BILINEAR_QC]) @ c_final)
        s_pc = stack_scalars(pc_scores)
        s_qc = stack_scalars(qc_scores)
        score_tensor = softmax_rows(s_pc) + softmax_rows(s_qc)
        if collect_trace:
            trace["softmax_pc"] = softmax_rows(s_pc).data.copy()
            trace["softmax_qc"] = softmax_rows(s_qc).data.copy()
        return ReaderOutput(scores=score_tensor.data.copy(), s_pc=s_pc,
                            s_qc=s_qc, score_tensor=score_tensor,
                            empty_passage_count=empty, trace=trace)


def reader_loss(s_pc, s_qc, gold):
    """Mean of the two cross-entropies, one per score head."""
    return (cross_entropy_logits(s_pc, gold)
            + cross_entropy_logits(s_qc, gold)) * 0.5


def predict(scores):
    """Argmax with ties resolved to the lowest index."""
    return int(np.argmax(scores))
