"""Pretrained word vectors in the plain text format: token then floats.

Vectors are kept at float64 so a lookup reproduces the file's decimal
values exactly; models cast to their working precision when they copy
the table into a parameter store.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .vocab import Vocab


def stable_hash(token):
    """Process-independent 64-bit hash (the builtin hash() is salted)."""
    return int.from_bytes(hashlib.sha256(token.encode("utf-8")).digest()[:8],
                          "little")


def oov_vector(token, dim):
    rng = np.random.default_rng(stable_hash(token))
    return rng.uniform(-0.1, 0.1, dim)


@dataclass
class EmbeddingTable:
    vectors: np.ndarray  # (V, dim) float64, row i belongs to vocab id i
    dim: int
    coverage: float      # fraction of non-reserved vocab found in the file

    def lookup(self, vocab_id):
        return self.vectors[vocab_id]


def load_embeddings(path, vocab, dim):
    """Fill a table for ``vocab`` from a vector file.

    The pad row stays zero; tokens missing from the file get a
    deterministic pseudo-random vector derived from the token itself, so
    repeated loads agree without any shared state.
    """
    vectors = np.zeros((len(vocab), dim), dtype=np.float64)
    found = np.zeros(len(vocab), dtype=bool)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split(" ")
            if len(parts) < 2 and not line.strip():
                continue
            token, values = parts[0], parts[1:]
            if len(values) != dim:
                raise ValueError(
                    f"{path}: line {lineno}: expected {dim} values, got {len(values)}")
            if token in vocab:
                idx = vocab.id(token)
                if not found[idx]:
                    vectors[idx] = [float(v) for v in values]
                    found[idx] = True
    for idx in range(len(vocab)):
        if not found[idx] and idx != Vocab.PAD:
            vectors[idx] = oov_vector(vocab.token(idx), dim)
    n_real = len(vocab) - 2
    coverage = float(found[2:].sum()) / n_real if n_real else 0.0
    return EmbeddingTable(vectors=vectors, dim=dim, coverage=coverage)
