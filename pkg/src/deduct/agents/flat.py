"""Single-level Q-learning baseline.

One learner over 51 actions: index 0 skips the rest of the day, indices
1..50 request that fraction of the remaining debt. Transitions span
consecutive decisions, crossing day boundaries, with a single discount.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ..currency import fraction_amount
from ..errors import ConfigurationError
from ..nn.checkpoint import load_params, save_params
from ..seeding import derive_rng
from ..sim.types import MAX_STEPS_PER_DAY
from ..validation import check_is_fitted
from .core import QLearner, epsilon_at
from .features import FLAT_STATIC_DIM, N_AMOUNT_ACTIONS
from .qnet import QNetwork
from .rolling import RollState

N_FLAT_ACTIONS = N_AMOUNT_ACTIONS + 1  # +1 for the skip-day action
SKIP_ACTION = 0


class FlatQAgent(BaseEstimator):
    """51-action flat learner sharing the hierarchical agent's machinery."""

    def __init__(self, gamma=0.95, eps_start=1.0, eps_end=0.05, eps_decay_frac=0.5,
                 buffer=200000, batch=64, sync_every=500, hidden_dims=(64, 32),
                 lstm_hidden=16, history_window=30, lr=1e-3, epochs=10,
                 rollout_batch=128, updates_per_batch=24, envs_per_epoch=0,
                 double_dqn=False, seed=0):
        self.gamma = gamma
        self.eps_start = eps_start
        self.eps_end = eps_end
        self.eps_decay_frac = eps_decay_frac
        self.buffer = buffer
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
            gamma=cfg.gamma, eps_start=cfg.eps_start, eps_end=cfg.eps_end,
            eps_decay_frac=cfg.eps_decay_frac, buffer=cfg.buffer_d2, batch=cfg.batch,
            sync_every=cfg.sync_every, hidden_dims=tuple(cfg.hidden_dims),
            lstm_hidden=cfg.lstm_hidden, history_window=cfg.history_window,
            lr=cfg.lr, epochs=cfg.epochs, rollout_batch=cfg.rollout_batch,
            updates_per_batch=cfg.updates_per_batch, envs_per_epoch=cfg.envs_per_epoch,
            double_dqn=cfg.double_dqn, seed=cfg.seed if seed is None else seed,
        )

    def q_values(self, obs):
        check_is_fitted(self, "q_")
        state = flat_features(obs, self.history_window, self.horizon_)
        return self.q_.backend.values([state])[0]

    def fit(self, envs, eval_episodes_fn=None):
        if not envs:
            raise ConfigurationError("no training environments")
        self.horizon_ = max(env.record.horizon for env in envs)
        rng = derive_rng(self.seed, "flat-train")
        learner = QLearner(
            QNetwork(FLAT_STATIC_DIM, N_FLAT_ACTIONS, self.hidden_dims, self.lstm_hidden,
                     lr=self.lr, rng=derive_rng(self.seed, "flat-q-init")),
            self.buffer, self.batch, self.sync_every, self.gamma, double=self.double_dqn,
        )
        self.q_ = learner

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
            loss = 0.0
            n_updates = 0
            for c in range(n_chunks):
                chunk = [states[i] for i in
                         epoch_order[c * self.rollout_batch:(c + 1) * self.rollout_batch]]
                eps = epsilon_at(batches_done / total_batches, self.eps_start,
                                 self.eps_end, self.eps_decay_frac)
                self._collect(chunk, learner, eps, rng)
                for _ in range(self.updates_per_batch):
                    loss += learner.update(rng)
                    n_updates += 1
                batches_done += 1
            eval_sr = float("nan") if eval_episodes_fn is None else eval_episodes_fn(self)
            curves.append({
                "epoch": epoch,
                "td_loss_upper": float("nan"),
                "td_loss_lower": loss / max(n_updates, 1),
                "eval_succ_rate": eval_sr,
                "epsilon": epsilon_at(batches_done / total_batches, self.eps_start,
                                      self.eps_end, self.eps_decay_frac),
            })
        self.curves_ = curves
        return self

    def _collect(self, rolls, learner, eps, rng):
        for roll in rolls:
            roll.env.reset()
            roll.begin_episode()
        horizon = self.horizon_
        pending = {id(r): None for r in rolls}
        for day in range(horizon):
            live = [r for r in rolls if not r.env.done]
            if not live:
                break
            skipped = {id(r): False for r in live}
            for step in range(1, MAX_STEPS_PER_DAY + 1):
                acting = [r for r in live
                          if not skipped[id(r)] and r.env.remaining_debt > 0 and not r.env.done]
                if not acting:
                    break
                states = [r.flat_state() for r in acting]
                actions = learner.select_batch(states, eps, rng)
                for roll, s, a in zip(acting, states, actions):
                    env = roll.env
                    if pending[id(roll)] is not None:
                        ps, pa, pr = pending[id(roll)]
                        learner.push(ps, pa, pr, s, False, scale=float(roll.bill))
                    if a == SKIP_ACTION:
                        skipped[id(roll)] = True
                        pending[id(roll)] = (s, a, 0)
                    else:
                        amount = fraction_amount(a, env.remaining_debt)
                        outcome, realized = env.attempt(amount)
                        reward = realized - env.cost_minor if outcome == "success" else -env.cost_minor
                        roll.note_attempt(amount, realized, outcome == "success", env.steps_today)
                        pending[id(roll)] = (s, a, reward)
            for roll in live:
                roll.advance_day()
                if roll.env.done and pending[id(roll)] is not None:
                    ps, pa, pr = pending[id(roll)]
                    learner.push(ps, pa, pr, ps, True, scale=float(roll.bill))
                    pending[id(roll)] = None

    def save(self, path):
        check_is_fitted(self, "q_")
        params = {f"q.{k}": v for k, v in self.q_.backend.export_params().items()}
        meta = {"kind": "flat", "horizon": self.horizon_,
                "params": {k: (list(v) if isinstance(v, tuple) else v)
                           for k, v in self.get_params().items()}}
        save_params(path, params, meta)

    @classmethod
    def load(cls, path):
        params, meta = load_params(path)
        if meta.get("kind") != "flat":
            raise ConfigurationError(f"checkpoint at {path} is not a flat agent")
        init = dict(meta["params"])
        init["hidden_dims"] = tuple(init["hidden_dims"])
        agent = cls(**init)
        agent.horizon_ = int(meta["horizon"])
        learner = QLearner(
            QNetwork(FLAT_STATIC_DIM, N_FLAT_ACTIONS, agent.hidden_dims, agent.lstm_hidden,
                     lr=agent.lr, rng=derive_rng(agent.seed, "flat-q-init")),
            agent.buffer, agent.batch, agent.sync_every, agent.gamma,
            double=agent.double_dqn,
        )
        learner.backend.load_exported({k[2:]: v for k, v in params.items() if k.startswith("q.")})
        agent.q_ = learner
        agent.curves_ = []
        return agent
