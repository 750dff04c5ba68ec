"""Mapping encoded sequences onto model inputs.

Both models consume the same per-token representation: word, POS, NER,
and relation embeddings plus the three scalar features (cross-sequence
match, log local frequency, essential flag), concatenated featurewise.
The embedding tables live in each model's parameter store under fixed
names so checkpoints stay self-describing.
"""

from __future__ import annotations

import numpy as np

from .nn import Tensor, concat, gather_rows

WORD_EMB = "emb.word"
POS_EMB = "emb.pos"
NER_EMB = "emb.ner"
REL_EMB = "emb.rel"

N_SCALAR_FEATURES = 3


def add_embedding_params(store, word_vectors, pos_count, ner_count, rel_count,
                         pos_dim, ner_dim, rel_dim, train_word_embeddings=False):
    store.add_preset(WORD_EMB, word_vectors,
                     requires_grad=train_word_embeddings)
    store.add(POS_EMB, (pos_count, pos_dim), fan_in=pos_dim)
    store.add(NER_EMB, (ner_count, ner_dim), fan_in=ner_dim)
    store.add(REL_EMB, (rel_count, rel_dim), fan_in=rel_dim)


def input_dim(store):
    return (store[WORD_EMB].shape[1] + store[POS_EMB].shape[1]
            + store[NER_EMB].shape[1] + store[REL_EMB].shape[1]
            + N_SCALAR_FEATURES)


def feature_dim(store):
    return input_dim(store) - store[WORD_EMB].shape[1]


def _scalar_columns(enc, n, dtype):
    cols = np.stack([enc.match[:n], enc.log_freq[:n], enc.essential[:n]],
                    axis=1)
    return Tensor(cols.astype(dtype))


def embed_sequence(store, enc):
    """(length, d) input matrix for one encoded sequence."""
    n = enc.length
    word = gather_rows(store[WORD_EMB], enc.token_ids[:n])
    return concat([word, _feature_part(store, enc, n)], axis=1)


def feature_block(store, enc):
    """The non-word part alone: POS, NER, relation embeddings and the
    scalar features of each token."""
    return _feature_part(store, enc, enc.length)


def _feature_part(store, enc, n):
    return concat([
        gather_rows(store[POS_EMB], enc.pos_ids[:n]),
        gather_rows(store[NER_EMB], enc.ner_ids[:n]),
        gather_rows(store[REL_EMB], enc.rel_ids[:n]),
        _scalar_columns(enc, n, store.dtype),
    ], axis=1)
