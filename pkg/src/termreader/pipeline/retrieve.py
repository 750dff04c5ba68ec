"""Glue between questions, the selector, the index, and the reader:
mask computation, passage materialization, and triple encoding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..retrieval.index import retrieve_topk
from ..retrieval.queries import (
    STRATEGY_CONCAT,
    STRATEGY_ESSENTIAL,
    formulate,
    strategy_mask,
)
from ..selector import select_terms
from ..text.tokenize import tokenize
from .data import gold_mask


def selector_mask_for(model, encoder, prepared):
    """Run the trained selector on one question, eval mode.

    The selector may have been trained with a shorter question limit
    than the active config; tokens past its limit come back unselected
    rather than tripping a length check.
    """
    ex = prepared.example
    tokens = prepared.tokens[:encoder.max_question_len]
    all_choice_tokens = [t for ct in prepared.choice_tokens for t in ct]
    q_enc = encoder.encode_question(ex.id, tokens, prepared.choice_tokens)
    c_enc = encoder.encode_choice(ex.id, "all", all_choice_tokens,
                                  question=tokens)
    probs = model.forward(q_enc, c_enc, training=False)
    mask = np.zeros(len(prepared.tokens), dtype=np.float64)
    mask[:len(tokens)] = select_terms(probs.data, tokens)
    return mask


def essential_masks(prepared_list, strategy, config, selector=None,
                    encoder=None, index=None):
    """One mask per question id for a retrieval strategy.

    ESSENTIAL prefers a trained selector; without one it falls back to
    the dataset's annotator masks, which keeps gold-mask experiments and
    synthetic runs possible before any selector exists.
    """
    masks = {}
    for prepared in prepared_list:
        ex = prepared.example
        if strategy == STRATEGY_ESSENTIAL:
            if selector is not None:
                mask = selector_mask_for(selector, encoder, prepared)
            elif ex.annotations is not None:
                mask = gold_mask(ex.annotations,
                                 config.annotation_threshold)[:len(prepared.tokens)]
            else:
                raise ValueError(
                    f"example {ex.id}: ESSENTIAL strategy needs a selector "
                    "checkpoint or annotated questions")
        else:
            mask = strategy_mask(strategy, prepared.tokens, index=index)
        masks[ex.id] = np.asarray(mask, dtype=np.float64)
    return masks


@dataclass
class ChoiceEvidence:
    query_terms: list
    fallback: bool
    sentence_ids: list
    scores: list


def materialize_evidence(prepared, mask, strategy, k, index, corpus,
                         cache=None, store_in_cache=True):
    """Evidence for every choice of one question, via the cache when the
    entry exists.  A cache hit reconstructs exactly what fresh retrieval
    would return because only sentence ids and scores are stored."""
    out = []
    for idx, choice in enumerate(prepared.choice_tokens):
        query = formulate(strategy, prepared.tokens, mask, choice, idx)
        hit = cache.get(prepared.example.id, idx, strategy, k) if cache else None
        if hit is not None:
            ids, scores = hit
        else:
            result = retrieve_topk(index, query.terms, k)
            ids, scores = result.sentence_ids, result.scores
            if cache is not None and store_in_cache:
                cache.put(prepared.example.id, idx, strategy, k, ids, scores)
        out.append(ChoiceEvidence(query_terms=list(query.terms),
                                  fallback=query.fallback,
                                  sentence_ids=list(ids),
                                  scores=list(scores)))
    return out


def encode_reader_example(encoder, corpus, prepared, mask, evidence):
    """Encode one (question, choices, passages) bundle for the reader.

    Passages re-tokenize from the raw corpus lines so the tagger still
    sees the original casing."""
    ex = prepared.example
    passage_tokens = [tokenize(corpus.passage_text(ev.sentence_ids))
                      for ev in evidence]
    q_enc = encoder.encode_question(ex.id, prepared.tokens,
                                    prepared.choice_tokens,
                                    passages=passage_tokens,
                                    essential=mask)
    c_encs = [encoder.encode_choice(ex.id, n, ct, question=prepared.tokens,
                                    passage=passage_tokens[n])
              for n, ct in enumerate(prepared.choice_tokens)]
    p_encs = [encoder.encode_passage(ex.id, n, pt, question=prepared.tokens,
                                     choice=prepared.choice_tokens[n])
              for n, pt in enumerate(passage_tokens)]
    return q_enc, c_encs, p_encs
