"""Deduction-path workbench.

A partially observable account simulator, an attention-based balance
corrector, hierarchical and flat Q-learning agents, the classic
comparison policies, and a seeded benchmark harness tying them together.
"""

__version__ = "0.1.0"

from .config import ExperimentConfig, load_config
from .sim import generate_accounts, load_dataset, export_dataset
from .predictor import BalancePredictor, correct_day, build_corrected_env
from .agents import FlatQAgent, HierarchicalQAgent
from .bench import run_experiment, alpha_sweep, succ_rate

__all__ = [
    "__version__",
    "ExperimentConfig",
    "load_config",
    "generate_accounts",
    "load_dataset",
    "export_dataset",
    "BalancePredictor",
    "correct_day",
    "build_corrected_env",
    "FlatQAgent",
    "HierarchicalQAgent",
    "run_experiment",
    "alpha_sweep",
    "succ_rate",
]
