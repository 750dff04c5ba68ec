"""Query formulation: which question terms reach the retriever.

All strategies produce lowercased terms with punctuation dropped and the
choice tokens appended.  Duplicates are kept; BM25 deduplicates on its
side.  ESSENTIAL keeps the masked question tokens and falls back to the
full concatenation when the mask selects nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

STRATEGY_ESSENTIAL = "ESSENTIAL"
STRATEGY_CONCAT = "CONCAT"
STRATEGY_TFIDF = "TFIDF30"
STRATEGIES = (STRATEGY_ESSENTIAL, STRATEGY_CONCAT, STRATEGY_TFIDF)

TFIDF_FRACTION = 0.3


@dataclass
class Query:
    terms: list
    choice_index: int
    strategy: str
    fallback: bool = field(default=False)


def _content_terms(tokens, keep=None):
    terms = []
    for i, tok in enumerate(tokens):
        if tok.is_punct:
            continue
        if keep is not None and not keep[i]:
            continue
        terms.append(tok.lower)
    return terms


def formulate_query_concat(question_tokens, choice_tokens, choice_index):
    terms = _content_terms(question_tokens) + _content_terms(choice_tokens)
    return Query(terms=terms, choice_index=choice_index,
                 strategy=STRATEGY_CONCAT)


def formulate_query_essential(question_tokens, essential_mask, choice_tokens,
                              choice_index):
    mask = np.asarray(essential_mask)
    if len(mask) != len(question_tokens):
        raise ValueError("essential mask length does not match question")
    kept = _content_terms(question_tokens, keep=mask > 0)
    if not kept:
        q = formulate_query_concat(question_tokens, choice_tokens, choice_index)
        q.strategy = STRATEGY_ESSENTIAL
        q.fallback = True
        return q
    return Query(terms=kept + _content_terms(choice_tokens),
                 choice_index=choice_index, strategy=STRATEGY_ESSENTIAL)


def tfidf_select(question_tokens, index):
    """Mask the ceil(30%) of distinct non-punctuation tokens with the
    highest tf * ln(N / (1 + df)) score; ties go to earlier first
    occurrence.  tf counts occurrences inside the question itself."""
    n_tokens = len(question_tokens)
    if n_tokens == 0:
        return np.zeros(0, dtype=np.float64)
    budget = math.ceil(TFIDF_FRACTION * n_tokens)
    first_pos: dict[str, int] = {}
    counts: dict[str, int] = {}
    for i, tok in enumerate(question_tokens):
        if tok.is_punct:
            continue
        term = tok.lower
        counts[term] = counts.get(term, 0) + 1
        first_pos.setdefault(term, i)
    ranked = sorted(
        counts,
        key=lambda term: (-counts[term] * math.log(index.n_docs /
                                                   (1.0 + index.doc_freq(term))),
                          first_pos[term]))
    chosen = set(ranked[:budget])
    mask = np.zeros(n_tokens, dtype=np.float64)
    for i, tok in enumerate(question_tokens):
        if not tok.is_punct and tok.lower in chosen:
            mask[i] = 1.0
    return mask


def strategy_mask(strategy, question_tokens, selector_mask=None, index=None):
    """The essential-term mask a strategy implies for one question.

    ESSENTIAL consumes the selector's mask, TFIDF30 scores the question
    against the corpus statistics, and CONCAT treats every term as a
    query term.
    """
    n = len(question_tokens)
    if strategy == STRATEGY_CONCAT:
        return np.ones(n, dtype=np.float64)
    if strategy == STRATEGY_TFIDF:
        if index is None:
            raise ValueError("TFIDF30 needs an index for document frequencies")
        return tfidf_select(question_tokens, index)
    if strategy == STRATEGY_ESSENTIAL:
        if selector_mask is None:
            raise ValueError("ESSENTIAL needs a selector mask")
        return np.asarray(selector_mask, dtype=np.float64)
    raise ValueError(f"unknown strategy '{strategy}'")


def formulate(strategy, question_tokens, mask, choice_tokens, choice_index):
    if strategy == STRATEGY_CONCAT:
        return formulate_query_concat(question_tokens, choice_tokens,
                                      choice_index)
    if strategy in (STRATEGY_ESSENTIAL, STRATEGY_TFIDF):
        q = formulate_query_essential(question_tokens, mask, choice_tokens,
                                      choice_index)
        q.strategy = strategy
        return q
    raise ValueError(f"unknown strategy '{strategy}'")
