"""termreader: retrieve-and-read multiple choice QA built around
essential question terms.

A term selector scores each question word for how much the question
hinges on it; the selected terms drive sentence retrieval from a text
corpus; an attention reader scores each answer choice against the
retrieved evidence.  Everything runs on numpy with a small reverse-mode
autodiff core, so the full pipeline is reproducible from one seed.
"""

from .nn import (
    Adamax,
    BiLSTMWeights,
    ParamStore,
    Tensor,
    bilstm_forward,
    cross_entropy_logits,
    dropout,
    gradient_check,
    softmax_rows,
)
from .text import (
    EmbeddingTable,
    EncodedSequence,
    RelationTable,
    RuleTagger,
    Token,
    Vocab,
    load_embeddings,
    tokenize,
)
from .retrieval import (
    Corpus,
    InvertedIndex,
    RetrievalCache,
    bm25_score,
    formulate,
    retrieve_topk,
    tfidf_select,
)
from .selector import TermSelector, bce_loss, build_selector_params, select_terms
from .reader import Reader, ReaderFlags, build_reader_params, predict, reader_loss

__version__ = "0.1.0"
