"""Greedy rollout adapters for the trained Q agents."""

from __future__ import annotations

from ..currency import fraction_amount
from ..agents.features import flat_features, lower_features, upper_features
from ..agents.flat import SKIP_ACTION
from ..validation import check_is_fitted
from .base import Policy


class HierAgentPolicy(Policy):
    """Greedy two-level control: subgoal at day start, amounts per step."""

    def __init__(self, agent):
        check_is_fitted(agent, "q1_")
        self.agent = agent

    def begin_day_batch(self, obs_list, episode_ctxs):
        agent = self.agent
        states = [
            upper_features(o, agent.history_window, agent.horizon_) for o in obs_list
        ]
        goals = agent.q1_.greedy_batch(states)
        return [{"g": g} for g in goals]

    def next_amounts(self, obs_list, day_ctxs, episode_ctxs):
        agent = self.agent
        out = [None] * len(obs_list)
        idx = [
            i for i, (o, c) in enumerate(zip(obs_list, day_ctxs))
            if o.remaining_debt > 0 and len(o.attempts_today) < c["g"]
        ]
        if not idx:
            return out
        states = [
            lower_features(obs_list[i], day_ctxs[i]["g"], agent.history_window,
                           agent.horizon_)
            for i in idx
        ]
        actions = agent.q2_.greedy_batch(states)
        for i, a in zip(idx, actions):
            out[i] = fraction_amount(a + 1, obs_list[i].remaining_debt)
        return out


class FlatAgentPolicy(Policy):
    """Greedy 51-action control; the skip action ends the day."""

    def __init__(self, agent):
        check_is_fitted(agent, "q_")
        self.agent = agent

    def next_amounts(self, obs_list, day_ctxs, episode_ctxs):
        agent = self.agent
        out = [None] * len(obs_list)
        idx = [i for i, o in enumerate(obs_list) if o.remaining_debt > 0]
        if not idx:
            return out
        states = [
            flat_features(obs_list[i], agent.history_window, agent.horizon_)
            for i in idx
        ]
        actions = agent.q_.greedy_batch(states)
        for i, a in zip(idx, actions):
            if a != SKIP_ACTION:
                out[i] = fraction_amount(a, obs_list[i].remaining_debt)
        return out
