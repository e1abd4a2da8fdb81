from .base import ObservableAccount, Policy, observable_view
from .baselines import FullDeductionPolicy, HeuristicHalvingPolicy
from .predictive import BalanceDnnRegressor, PredictiveDnnPolicy, dnn_features
from .rl import FlatAgentPolicy, HierAgentPolicy

__all__ = [
    "ObservableAccount",
    "Policy",
    "observable_view",
    "FullDeductionPolicy",
    "HeuristicHalvingPolicy",
    "BalanceDnnRegressor",
    "PredictiveDnnPolicy",
    "dnn_features",
    "FlatAgentPolicy",
    "HierAgentPolicy",
]
