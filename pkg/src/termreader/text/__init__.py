from .tokenize import (
    Token,
    lemma_of,
    lowers,
    surfaces,
    tokenize,
    tokens_from_surfaces,
)
from .vocab import Vocab
from .embeddings import EmbeddingTable, load_embeddings, oov_vector, stable_hash
from .tagger import NER_TAGS, POS_TAGS, RuleTagger, TagVocab
from .relations import NO_RELATION, RelationTable, relation_ids
from .features import log_freq_feature, match_feature
from .encode import EncodedSequence, TextEncoder, pad_sequence

__all__ = [
    "EncodedSequence",
    "EmbeddingTable",
    "NER_TAGS",
    "NO_RELATION",
    "POS_TAGS",
    "RelationTable",
    "RuleTagger",
    "TagVocab",
    "TextEncoder",
    "Token",
    "Vocab",
    "lemma_of",
    "load_embeddings",
    "log_freq_feature",
    "lowers",
    "match_feature",
    "oov_vector",
    "pad_sequence",
    "relation_ids",
    "stable_hash",
    "surfaces",
    "tokenize",
    "tokens_from_surfaces",
]
