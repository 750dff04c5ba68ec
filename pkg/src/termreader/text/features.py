"""Scalar per-token features: cross-sequence match and local frequency."""

from __future__ import annotations

import math
from collections import Counter

import numpy as np


def match_feature(tokens, against_sequences):
    """1.0 where a token's lowercased surface or lemma occurs in any of
    the other sequences (by surface or lemma), else 0.0.  Stopwords and
    punctuation are not special-cased."""
    pool = set()
    for seq in against_sequences:
        for t in seq:
            pool.add(t.lower)
            pool.add(t.lemma)
    out = np.zeros(len(tokens), dtype=np.float64)
    for i, t in enumerate(tokens):
        if t.lower in pool or t.lemma in pool:
            out[i] = 1.0
    return out


def log_freq_feature(tokens):
    """ln(1 + occurrences of the token's lowercased form) within its own
    sequence."""
    counts = Counter(t.lower for t in tokens)
    return np.array([math.log(1.0 + counts[t.lower]) for t in tokens],
                    dtype=np.float64)
