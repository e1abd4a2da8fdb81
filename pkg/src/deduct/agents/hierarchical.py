"""Two-level Q-learning agent.

The upper learner picks a daily subgoal g in {0..5}: how many deduction
steps to run that day. Given g, the lower learner picks amount fractions
(a/50 of the remaining debt) step by step. Upper transitions carry the
day's net reward and bootstrap on the next day's state; lower transitions
live within a day and terminate at its end. Training interacts with
replayable environments (usually corrected replays); evaluation curves
come from greedy rollouts against true simulators.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ..currency import fraction_amount
from ..errors import ConfigurationError
from ..nn.checkpoint import load_params, save_params
from ..seeding import derive_rng
from ..sim.types import MAX_STEPS_PER_DAY, Observation
from ..validation import check_is_fitted
from .core import QLearner, epsilon_at
from .features import (
    LOWER_STATIC_DIM,
    N_AMOUNT_ACTIONS,
    N_SUBGOALS,
    UPPER_STATIC_DIM,
    lower_features,
    upper_features,
)
from .qnet import QNetwork
from .rolling import RollState


class HierarchicalQAgent(BaseEstimator):
    """Upper subgoal learner over 6 actions, lower amount learner over 50."""

    def __init__(self, eta=0.99, gamma=0.95, eps_start=1.0, eps_end=0.05,
                 eps_decay_frac=0.5, buffer_d1=50000, buffer_d2=200000, batch=64,
                 sync_every=500, hidden_dims=(64, 32), lstm_hidden=16,
                 history_window=30, lr=1e-3, epochs=10, rollout_batch=128,
                 updates_per_batch=24, envs_per_epoch=0, double_dqn=False, seed=0):
        self.eta = eta
        self.gamma = gamma
        self.eps_start = eps_start
        self.eps_end = eps_end
        self.eps_decay_frac = eps_decay_frac
        self.buffer_d1 = buffer_d1
        self.buffer_d2 = buffer_d2
        self.batch = batch
        self.sync_every = sync_every
        self.hidden_dims = hidden_dims
        self.lstm_hidden = lstm_hidden
        self.history_window = history_window
        self.lr = lr
        self.epochs = epochs
        self.rollout_batch = rollout_batch
        self.updates_per_batch = updates_per_batch
        self.envs_per_epoch = envs_per_epoch
        self.double_dqn = double_dqn
        self.seed = seed

    @classmethod
    def from_config(cls, cfg, seed=None):
        return cls(
            eta=cfg.eta, gamma=cfg.gamma, eps_start=cfg.eps_start, eps_end=cfg.eps_end,
            eps_decay_frac=cfg.eps_decay_frac, buffer_d1=cfg.buffer_d1,
            buffer_d2=cfg.buffer_d2, batch=cfg.batch, sync_every=cfg.sync_every,
            hidden_dims=tuple(cfg.hidden_dims), lstm_hidden=cfg.lstm_hidden,
            history_window=cfg.history_window, lr=cfg.lr, epochs=cfg.epochs,
            rollout_batch=cfg.rollout_batch, updates_per_batch=cfg.updates_per_batch,
            envs_per_epoch=cfg.envs_per_epoch, double_dqn=cfg.double_dqn,
            seed=cfg.seed if seed is None else seed,
        )

    # -- learners ------------------------------------------------------------

    def _build_learners(self, rng):
        net_rng1 = derive_rng(self.seed, "hier-q1-init")
        net_rng2 = derive_rng(self.seed, "hier-q2-init")
        q1 = QLearner(
            QNetwork(UPPER_STATIC_DIM, N_SUBGOALS, self.hidden_dims, self.lstm_hidden,
                     lr=self.lr, rng=net_rng1),
            self.buffer_d1, self.batch, self.sync_every, self.eta, double=self.double_dqn,
        )
        q2 = QLearner(
            QNetwork(LOWER_STATIC_DIM, N_AMOUNT_ACTIONS, self.hidden_dims, self.lstm_hidden,
                     lr=self.lr, rng=net_rng2),
            self.buffer_d2, self.batch, self.sync_every, self.gamma, double=self.double_dqn,
        )
        return q1, q2

    # -- value surface ---------------------------------------------------------

    def q1_values(self, obs: Observation) -> np.ndarray:
        """Six subgoal values for an upper (day-start) state."""
        check_is_fitted(self, "q1_")
        state = upper_features(obs, self.history_window, self.horizon_)
        return self.q1_.backend.values([state])[0]

    def q2_values(self, obs: Observation, subgoal: int) -> np.ndarray:
        """Fifty amount-fraction values for a lower state under ``subgoal``."""
        check_is_fitted(self, "q2_")
        if subgoal < 1:
            raise ConfigurationError("lower agent is never invoked for subgoal 0")
        state = lower_features(obs, subgoal, self.history_window, self.horizon_)
        return self.q2_.backend.values([state])[0]

    # -- training ---------------------------------------------------------------

    def fit(self, envs, eval_episodes_fn=None):
        """Train on replayable environments.

        ``eval_episodes_fn``, when given, is called once per epoch and must
        return the evaluation SuccRate (greedy rollout against the true
        simulator); it lands in ``curves_``.
        """
        if not envs:
            raise ConfigurationError("no training environments")
        self.horizon_ = max(env.record.horizon for env in envs)
        rng = derive_rng(self.seed, "hier-train")
        q1, q2 = self._build_learners(rng)
        self.q1_, self.q2_ = q1, q2

        states = [RollState(env, self.history_window, self.horizon_) for env in envs]
        per_epoch = len(states)
        if self.envs_per_epoch:
            per_epoch = min(per_epoch, self.envs_per_epoch)
        order = np.arange(len(states))
        n_chunks = max(1, int(np.ceil(per_epoch / self.rollout_batch)))
        total_batches = self.epochs * n_chunks
        batches_done = 0
        curves = []
        for epoch in range(self.epochs):
            rng.shuffle(order)
            epoch_order = order[:per_epoch]
            loss1 = loss2 = 0.0
            n_updates = 0
            for c in range(n_chunks):
                chunk = [states[i] for i in
                         epoch_order[c * self.rollout_batch:(c + 1) * self.rollout_batch]]
                eps = epsilon_at(batches_done / total_batches, self.eps_start,
                                 self.eps_end, self.eps_decay_frac)
                self._collect(chunk, q1, q2, eps, rng)
                for _ in range(self.updates_per_batch):
                    loss1 += q1.update(rng)
                    loss2 += q2.update(rng)
                    n_updates += 1
                batches_done += 1
            eval_sr = float("nan") if eval_episodes_fn is None else eval_episodes_fn(self)
            curves.append({
                "epoch": epoch,
                "td_loss_upper": loss1 / max(n_updates, 1),
                "td_loss_lower": loss2 / max(n_updates, 1),
                "eval_succ_rate": eval_sr,
                "epsilon": epsilon_at(batches_done / total_batches, self.eps_start,
                                      self.eps_end, self.eps_decay_frac),
            })
        self.curves_ = curves
        return self

    def _collect(self, rolls, q1, q2, eps, rng):
        for roll in rolls:
            roll.env.reset()
            roll.begin_episode()
        horizon = self.horizon_
        for day in range(horizon):
            active = [r for r in rolls if not r.env.done]
            if not active:
                break
            upper_states = [r.upper_state() for r in active]
            goals = q1.select_batch(upper_states, eps, rng)
            day_rewards = [0] * len(active)
            # pending lower transition per env: (state, action, reward)
            pending = [None] * len(active)
            for step in range(1, MAX_STEPS_PER_DAY + 1):
                idx = [i for i, (r, g) in enumerate(zip(active, goals))
                       if g >= step and r.env.remaining_debt > 0]
                if not idx:
                    break
                states = [active[i].lower_state(goals[i]) for i in idx]
                actions = q2.select_batch(states, eps, rng)
                for j, i in enumerate(idx):
                    roll = active[i]
                    env = roll.env
                    if pending[i] is not None:
                        ps, pa, pr = pending[i]
                        q2.push(ps, pa, pr, states[j], False, scale=float(roll.bill))
                    amount = fraction_amount(actions[j] + 1, env.remaining_debt)
                    outcome, realized = env.attempt(amount)
                    reward = realized - env.cost_minor if outcome == "success" else -env.cost_minor
                    roll.note_attempt(amount, realized, outcome == "success", env.steps_today)
                    day_rewards[i] += reward
                    pending[i] = (states[j], actions[j], reward)
            for i, roll in enumerate(active):
                if pending[i] is not None:
                    ps, pa, pr = pending[i]
                    q2.push(ps, pa, pr, ps, True, scale=float(roll.bill))
                roll.advance_day()
            for i, roll in enumerate(active):
                terminal = roll.env.done
                next_state = upper_states[i] if terminal else roll.upper_state()
                q1.push(upper_states[i], goals[i], day_rewards[i], next_state,
                        terminal, scale=float(roll.bill))

    # -- planning -----------------------------------------------------------------

    def plan_path(self, profile, bill, horizon, cost_minor=10):
        """Offline per-day amount plan assuming every attempt succeeds.

        Greedy subgoals and amounts; remaining debt decreases by each
        planned amount. Days with subgoal 0 plan no attempts.
        """
        check_is_fitted(self, "q1_")
        from ..sim.types import DeductionAttempt  # local to avoid cycle at import time

        win = self.history_window
        history = []
        debt = bill
        plan = []
        for day in range(horizon):
            day_amounts = []
            if debt > 0:
                obs = Observation(profile=profile, bill=bill, day=day, step=1,
                                  history=tuple(history), remaining_debt=debt)
                state = upper_features(obs, win, self.horizon_)
                g = int(np.argmax(self.q1_.backend.values([state])[0]))
                for step in range(1, g + 1):
                    if debt <= 0:
                        break
                    obs = Observation(profile=profile, bill=bill, day=day,
                                      step=step, history=tuple(history),
                                      remaining_debt=debt)
                    ls = lower_features(obs, g, win, self.horizon_)
                    a = int(np.argmax(self.q2_.backend.values([ls])[0]))
                    amount = fraction_amount(a + 1, debt)
                    day_amounts.append(amount)
                    history.append(DeductionAttempt(day=day, step=step, requested=amount,
                                                    outcome="success", realized=amount,
                                                    cost=cost_minor))
                    debt -= amount
            plan.append(day_amounts)
        return plan

    # -- persistence -----------------------------------------------------------------

    def save(self, path):
        check_is_fitted(self, "q1_")
        params = {}
        for k, v in self.q1_.backend.export_params().items():
            params[f"q1.{k}"] = v
        for k, v in self.q2_.backend.export_params().items():
            params[f"q2.{k}"] = v
        meta = {"kind": "hierarchical", "horizon": self.horizon_,
                "params": {k: (list(v) if isinstance(v, tuple) else v)
                           for k, v in self.get_params().items()}}
        save_params(path, params, meta)

    @classmethod
    def load(cls, path):
        params, meta = load_params(path)
        if meta.get("kind") != "hierarchical":
            raise ConfigurationError(f"checkpoint at {path} is not a hierarchical agent")
        init = dict(meta["params"])
        init["hidden_dims"] = tuple(init["hidden_dims"])
        agent = cls(**init)
        agent.horizon_ = int(meta["horizon"])
        q1, q2 = agent._build_learners(derive_rng(agent.seed, "hier-train"))
        q1.backend.load_exported({k[3:]: v for k, v in params.items() if k.startswith("q1.")})
        q2.backend.load_exported({k[3:]: v for k, v in params.items() if k.startswith("q2.")})
        agent.q1_, agent.q2_ = q1, q2
        agent.curves_ = []
        return agent


def select_subgoal(agent, obs, eps, rng):
    """Epsilon-greedy subgoal; greedy ties break to the lowest index."""
    from .core import epsilon_greedy

    return epsilon_greedy(agent.q1_values(obs), eps, rng)


def select_action(agent, obs, subgoal, eps, rng):
    from .core import epsilon_greedy

    return epsilon_greedy(agent.q2_values(obs, subgoal), eps, rng) + 1


def lower_reward(action_index, remaining_debt, remaining_capacity, cost_minor):
    """(reward, realized, success) for a fractional attempt against a capacity."""
    if remaining_debt <= 0:
        return 0, 0, False
    amount = fraction_amount(action_index, remaining_debt)
    if amount <= remaining_capacity:
        return amount - cost_minor, amount, True
    return -cost_minor, 0, False
