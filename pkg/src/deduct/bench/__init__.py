from .metrics import succ_rate
from .rollout import run_episodes, run_policy_on_records
from .runner import (
    BenchReport,
    alpha_sweep,
    build_seed_context,
    corrected_training_envs,
    read_episode_logs,
    run_experiment,
    train_policy,
    write_episode_logs,
)

__all__ = [
    "succ_rate",
    "run_episodes",
    "run_policy_on_records",
    "BenchReport",
    "alpha_sweep",
    "build_seed_context",
    "corrected_training_envs",
    "read_episode_logs",
    "run_experiment",
    "train_policy",
    "write_episode_logs",
]
