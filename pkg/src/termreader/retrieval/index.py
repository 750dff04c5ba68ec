"""Inverted index with Okapi BM25 scoring.

Scoring uses k1 = 1.2, b = 0.75 and the smoothed non-negative idf
ln(1 + (N - df + 0.5) / (df + 0.5)).  Duplicate query terms count once.
Ranking is by descending score with ties broken by lower sentence id;
when fewer sentences score above zero than requested, the remaining
slots are filled by unmatched sentences in id order, which is exactly
what exhaustively scoring the whole corpus and sorting would return.
"""

from __future__ import annotations

import math
import struct
from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

K1 = 1.2
B = 0.75

_MAGIC = b"TRIDX001"


class InvertedIndex:
    def __init__(self, postings, doc_len):
        self.postings = postings            # term -> [(sid, tf)] sorted by sid
        self.doc_len = np.asarray(doc_len, dtype=np.int64)
        self.n_docs = len(self.doc_len)
        self.avg_doc_len = float(self.doc_len.mean()) if self.n_docs else 0.0

    @classmethod
    def build(cls, corpus):
        if len(corpus) == 0:
            raise ValueError("cannot index an empty corpus")
        postings: dict[str, list] = {}
        doc_len = []
        for sid, sentence in enumerate(corpus.tokens):
            doc_len.append(len(sentence))
            counts: dict[str, int] = {}
            for term in sentence:
                counts[term] = counts.get(term, 0) + 1
            for term in counts:
                postings.setdefault(term, []).append((sid, counts[term]))
        return cls(postings, doc_len)

    def doc_freq(self, term):
        plist = self.postings.get(term)
        return len(plist) if plist else 0

    def term_freq(self, term, sid):
        plist = self.postings.get(term)
        if not plist:
            return 0
        pos = bisect_left(plist, (sid, 0))
        if pos < len(plist) and plist[pos][0] == sid:
            return plist[pos][1]
        return 0

    def idf(self, term):
        df = self.doc_freq(term)
        return math.log(1.0 + (self.n_docs - df + 0.5) / (df + 0.5))

    def __eq__(self, other):
        if not isinstance(other, InvertedIndex):
            return NotImplemented
        return (self.postings == other.postings
                and np.array_equal(self.doc_len, other.doc_len))

    # -- persistence ------------------------------------------------------
    #
    # Byte layout (all integers little-endian):
    #   magic "TRIDX001"
    #   u32 n_docs, then n_docs x u32 sentence lengths
    #   u32 n_terms, then per term in lexicographic (unicode) order:
    #     u16 byte length of the UTF-8 term, the term bytes,
    #     u32 df, then df x (u32 sid, u32 tf)

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<I", self.n_docs))
            fh.write(self.doc_len.astype("<u4").tobytes())
            terms = sorted(self.postings)
            fh.write(struct.pack("<I", len(terms)))
            for term in terms:
                raw = term.encode("utf-8")
                plist = self.postings[term]
                fh.write(struct.pack("<HI", len(raw), len(plist)))
                fh.write(raw)
                flat = np.asarray(plist, dtype="<u4")
                fh.write(flat.tobytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            blob = fh.read()
        if blob[:8] != _MAGIC:
            raise ValueError(f"{path}: not an index file (bad magic)")
        off = 8
        (n_docs,) = struct.unpack_from("<I", blob, off)
        off += 4
        doc_len = np.frombuffer(blob, dtype="<u4", count=n_docs, offset=off)
        off += 4 * n_docs
        (n_terms,) = struct.unpack_from("<I", blob, off)
        off += 4
        postings = {}
        for _ in range(n_terms):
            term_len, df = struct.unpack_from("<HI", blob, off)
            off += 6
            term = blob[off:off + term_len].decode("utf-8")
            off += term_len
            flat = np.frombuffer(blob, dtype="<u4", count=2 * df, offset=off)
            off += 8 * df
            postings[term] = [(int(flat[2 * i]), int(flat[2 * i + 1]))
                              for i in range(df)]
        return cls(postings, doc_len.astype(np.int64))


def bm25_score(index, query_terms, sid):
    """Score one sentence against the unique terms of a query."""
    if not 0 <= sid < index.n_docs:
        raise ValueError(f"sentence id {sid} out of range")
    norm = K1 * (1.0 - B + B * index.doc_len[sid] / index.avg_doc_len)
    score = 0.0
    for term in dict.fromkeys(query_terms):
        tf = index.term_freq(term, sid)
        if tf == 0:
            continue
        score += index.idf(term) * tf * (K1 + 1.0) / (tf + norm)
    return score


@dataclass
class RetrievalResult:
    sentence_ids: list
    scores: list


def retrieve_topk(index, query_terms, k):
    """Top-k sentences for a query; see the module docstring for the
    exact ranking contract."""
    if k < 1:
        raise ValueError("k must be positive")
    if not query_terms:
        raise ValueError("empty query")
    candidates = set()
    for term in dict.fromkeys(query_terms):
        for sid, _ in index.postings.get(term, ()):
            candidates.add(sid)
    scored = sorted(((bm25_score(index, query_terms, sid), sid)
                     for sid in candidates),
                    key=lambda pair: (-pair[0], pair[1]))
    limit = min(k, index.n_docs)
    top = scored[:limit]
    if len(top) < limit:
        present = {sid for _, sid in top}
        sid = 0
        while len(top) < limit:
            if sid not in present:
                top.append((0.0, sid))
            sid += 1
    return RetrievalResult(sentence_ids=[sid for _, sid in top],
                           scores=[score for score, _ in top])
