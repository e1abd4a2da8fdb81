from .core import QLearner, epsilon_at, epsilon_greedy, td_target
from .features import (
    N_AMOUNT_ACTIONS,
    N_SUBGOALS,
    flat_features,
    lower_features,
    upper_features,
)
from .flat import N_FLAT_ACTIONS, SKIP_ACTION, FlatQAgent
from .hierarchical import (
    HierarchicalQAgent,
    lower_reward,
    select_action,
    select_subgoal,
)
from .qnet import QNetwork, QTable
from .replay import ReplayBuffer, Transition
from .tabular import train_flat_tabular, train_hier_tabular

__all__ = [
    "QLearner", "epsilon_at", "epsilon_greedy", "td_target",
    "N_AMOUNT_ACTIONS", "N_SUBGOALS", "N_FLAT_ACTIONS", "SKIP_ACTION",
    "flat_features", "lower_features", "upper_features",
    "FlatQAgent", "HierarchicalQAgent",
    "lower_reward", "select_action", "select_subgoal",
    "QNetwork", "QTable", "ReplayBuffer", "Transition",
    "train_flat_tabular", "train_hier_tabular",
]
