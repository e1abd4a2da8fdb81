"""Level-agnostic Q-learning machinery.

One ``QLearner`` owns a value backend (network or table), its target
copy, a FIFO replay buffer and the update/sync cadence. The flat agent
uses one learner; the hierarchical agent uses one per level. Toy tabular
runs use the identical class, which is what the value-iteration sanity
check exercises.
"""

from __future__ import annotations

import numpy as np

from .replay import ReplayBuffer, Transition


def epsilon_greedy(values, eps, rng):
    """Random action with probability eps, else argmax (lowest index wins ties)."""
    if eps > 0.0 and rng.random() < eps:
        return int(rng.integers(len(values)))
    return int(np.argmax(values))


def epsilon_at(progress, eps_start, eps_end, decay_frac):
    """Linear decay over the first ``decay_frac`` of training, then flat."""
    if decay_frac <= 0.0:
        return eps_end
    frac = min(max(progress, 0.0), 1.0) / decay_frac
    if frac >= 1.0:
        return eps_end
    return eps_start + (eps_end - eps_start) * frac


def td_target(reward, next_max, terminal, discount):
    """Bellman backup; terminal transitions omit the bootstrap term."""
    if terminal:
        return reward
    return reward + discount * next_max


class QLearner:
    """Replay buffer + value backend + target sync for one decision level."""

    def __init__(self, backend, capacity, batch, sync_every, discount, double=False):
        self.backend = backend
        self.buffer = ReplayBuffer(capacity)
        self.batch = batch
        self.sync_every = sync_every
        self.discount = discount
        self.double = double
        self.updates = 0

    def push(self, state, action, reward, next_state, terminal, scale=1.0):
        self.buffer.push(Transition(state, action, reward, next_state, terminal, scale))

    def select(self, state, eps, rng):
        return epsilon_greedy(self.backend.values([state])[0], eps, rng)

    def select_batch(self, states, eps, rng):
        if not states:
            return []
        q = self.backend.values(states)
        return [epsilon_greedy(q[i], eps, rng) for i in range(len(states))]

    def greedy_batch(self, states):
        if not states:
            return []
        q = self.backend.values(states)
        return [int(np.argmax(q[i])) for i in range(len(states))]

    def batch_targets(self, transitions):
        """Normalized TD targets for a sampled batch."""
        rewards = np.array([t.reward / t.scale for t in transitions])
        terminal = np.array([t.terminal for t in transitions])
        next_max = np.zeros(len(transitions))
        live = [i for i, t in enumerate(transitions) if not t.terminal]
        if live:
            next_states = [transitions[i].next_state for i in live]
            tq = self.backend.target_values(next_states)
            if self.double:
                oq = self.backend.values(next_states)
                picks = np.argmax(oq, axis=1)
                boot = tq[np.arange(len(live)), picks]
            else:
                boot = tq.max(axis=1)
            next_max[live] = boot
        return np.where(terminal, rewards, rewards + self.discount * next_max)

    def update(self, rng):
        """One sampled gradient/table step; returns the TD loss."""
        if len(self.buffer) == 0:
            return 0.0
        transitions = self.buffer.sample(self.batch, rng)
        targets = self.batch_targets(transitions)
        states = [t.state for t in transitions]
        actions = [t.action for t in transitions]
        loss = self.backend.train_step(states, actions, targets)
        self.updates += 1
        if self.updates % self.sync_every == 0:
            self.backend.sync_target()
        return loss
