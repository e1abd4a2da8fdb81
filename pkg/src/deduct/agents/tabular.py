"""Tabular-mode training loops.

Same orchestration as the network trainers (FIFO replay, epsilon-greedy
selection, sampled TD updates, periodic target sync) with the value
networks replaced by lookup tables. Used for the value-iteration sanity
checks on the toy worlds.
"""

from __future__ import annotations

from ..seeding import derive_rng
from .core import QLearner, epsilon_at
from .qnet import QTable


def train_flat_tabular(env, episodes=3000, discount=0.95, lr=0.5, batch=32,
                       sync_every=100, capacity=20000, eps_start=1.0, eps_end=0.2,
                       eps_decay_frac=0.5, updates_per_episode=6, seed=0):
    """Flat loop over an integer-state world; returns the fitted learner."""
    rng = derive_rng(seed, "tabular-flat")
    learner = QLearner(QTable(env.n_states, env.n_actions, lr=lr),
                       capacity, batch, sync_every, discount)
    for ep in range(episodes):
        eps = epsilon_at(ep / episodes, eps_start, eps_end, eps_decay_frac)
        s = env.reset()
        while not env.done:
            a = learner.select(s, eps, rng)
            s2, r, done = env.step(a)
            learner.push(s, a, r, s2, done)
            s = s2
        for _ in range(updates_per_episode):
            learner.update(rng)
    return learner


def train_hier_tabular(world, episodes=9000, eta=0.9, gamma=0.9, lr=0.5, batch=32,
                       sync_every=100, capacity=1200, eps_start=1.0, eps_end=0.0,
                       eps_decay_frac=0.6, updates_per_episode=8, seed=0):
    """Two-level loop over a toy day world; returns (upper, lower) learners.

    Structure mirrors the deduction trainer: the upper transition carries
    the day's summed reward and bootstraps on the next day; lower
    transitions chain within the day and terminate at its end.

    Upper rewards depend on the lower policy that produced them, so
    exploration is annealed to zero and the buffer kept small: the tail
    of training then refills it with greedy-quality day rewards and the
    greedy-path values settle on the joint fixed point.
    """
    rng = derive_rng(seed, "tabular-hier")
    q1 = QLearner(QTable(world.n_upper_states, world.n_subgoals, lr=lr),
                  capacity, batch, sync_every, eta)
    q2 = QLearner(QTable(world.n_lower_states, world.n_lower_actions, lr=lr),
                  capacity, batch, sync_every, gamma)
    for ep in range(episodes):
        eps = epsilon_at(ep / episodes, eps_start, eps_end, eps_decay_frac)
        world.reset()
        while not world.done:
            s_up = world.upper_state()
            g = q1.select(s_up, eps, rng)
            day_reward = 0.0
            pending = None
            for _ in range(g):
                s_lo = world.lower_state(g)
                a = q2.select(s_lo, eps, rng)
                if pending is not None:
                    ps, pa, pr = pending
                    q2.push(ps, pa, pr, s_lo, False)
                r = world.lower_step(a)
                day_reward += r
                pending = (s_lo, a, r)
            if pending is not None:
                ps, pa, pr = pending
                q2.push(ps, pa, pr, ps, True)
            world.advance_day()
            q1.push(s_up, g, day_reward, world.upper_state(), world.done)
        for _ in range(updates_per_episode):
            q1.update(rng)
            q2.update(rng)
    return q1, q2
