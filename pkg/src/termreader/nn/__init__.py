from .tensor import (
    Tensor,
    concat,
    cross_entropy_logits,
    dropout,
    gather_rows,
    max_rows,
    pad_rows,
    scale_rows,
    softmax_rows,
    stack_scalars,
)
from .lstm import BiLSTMWeights, bilstm_forward
from .params import ParamStore
from .optim import Adamax
from .gradcheck import gradient_check

__all__ = [
    "Adamax",
    "BiLSTMWeights",
    "ParamStore",
    "Tensor",
    "bilstm_forward",
    "concat",
    "cross_entropy_logits",
    "dropout",
    "gather_rows",
    "gradient_check",
    "max_rows",
    "pad_rows",
    "scale_rows",
    "softmax_rows",
    "stack_scalars",
]
