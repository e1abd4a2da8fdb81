from .layers import (
    dense_backward,
    dense_forward,
    embedding_backward,
    embedding_forward,
    init_uniform,
    lstm_cell_backward,
    lstm_cell_forward,
    masked_softmax,
    softmax,
)
from .sequence import (
    bilstm_backward,
    bilstm_forward,
    lstm_sequence_backward,
    lstm_sequence_forward,
)
from .optim import AdamState, adam_init, adam_step
from .gradcheck import grad_check
from .checkpoint import load_params, save_params

__all__ = [
    "dense_forward", "dense_backward", "softmax", "masked_softmax",
    "embedding_forward", "embedding_backward", "init_uniform",
    "lstm_cell_forward", "lstm_cell_backward",
    "lstm_sequence_forward", "lstm_sequence_backward",
    "bilstm_forward", "bilstm_backward",
    "AdamState", "adam_init", "adam_step",
    "grad_check", "save_params", "load_params",
]
