from .types import (
    MAX_STEPS_PER_DAY,
    AccountProfile,
    AccountRecord,
    ConsumptionEvent,
    DeductionAttempt,
    EpisodeLog,
    Observation,
)
from .generator import generate_accounts, population_stats
from .environment import (
    DeductionEnvironment,
    attempt_deduction,
    observe,
    privileged_balance,
)
from .dataset_io import export_dataset, load_dataset

__all__ = [
    "MAX_STEPS_PER_DAY",
    "AccountProfile",
    "AccountRecord",
    "ConsumptionEvent",
    "DeductionAttempt",
    "EpisodeLog",
    "Observation",
    "generate_accounts",
    "population_stats",
    "DeductionEnvironment",
    "attempt_deduction",
    "observe",
    "privileged_balance",
    "export_dataset",
    "load_dataset",
]
