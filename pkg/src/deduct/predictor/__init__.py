from .model import (
    BalancePredictor,
    attention_weights,
    build_label_rows,
    build_sequence,
    embed_event,
    encode_sequence,
    mape,
    predict_balance,
    train_predictor,
)
from .correction import (
    CorrectedDay,
    CorrectedReplayEnv,
    build_corrected_env,
    correct_day,
)

__all__ = [
    "BalancePredictor",
    "attention_weights",
    "build_label_rows",
    "build_sequence",
    "embed_event",
    "encode_sequence",
    "mape",
    "predict_balance",
    "train_predictor",
    "CorrectedDay",
    "CorrectedReplayEnv",
    "build_corrected_env",
    "correct_day",
]
