from .corpus import Corpus
from .index import B, K1, InvertedIndex, RetrievalResult, bm25_score, retrieve_topk
from .queries import (
    STRATEGIES,
    STRATEGY_CONCAT,
    STRATEGY_ESSENTIAL,
    STRATEGY_TFIDF,
    Query,
    formulate,
    formulate_query_concat,
    formulate_query_essential,
    strategy_mask,
    tfidf_select,
)
from .cache import RetrievalCache

__all__ = [
    "B",
    "Corpus",
    "InvertedIndex",
    "K1",
    "Query",
    "RetrievalCache",
    "RetrievalResult",
    "STRATEGIES",
    "STRATEGY_CONCAT",
    "STRATEGY_ESSENTIAL",
    "STRATEGY_TFIDF",
    "bm25_score",
    "formulate",
    "formulate_query_concat",
    "formulate_query_essential",
    "retrieve_topk",
    "strategy_mask",
    "tfidf_select",
]
