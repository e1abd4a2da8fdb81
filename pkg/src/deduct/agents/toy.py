"""Tiny deterministic decision problems for tabular sanity checks.

``ChainWorld`` is a 5-state, 2-action episodic MDP for the flat loop.
``MiniDayWorld`` is its hierarchical counterpart: five day-states, a
subgoal choosing how many collection steps to run, and a 2-action lower
level collecting against a per-day capacity, mirroring the structure of
the deduction task at enumerable scale.
"""

from __future__ import annotations

import numpy as np


class ChainWorld:
    """States 0..4 on a line. Action 1 advances (small cost), action 0 cashes
    out the current state's stash and ends the episode. State 4 pays its
    stash and terminates on arrival. Everything is deterministic."""

    n_states = 5
    n_actions = 2
    stash = (0.0, 1.0, 0.2, 3.0, 10.0)
    step_cost = 0.1

    def __init__(self):
        self.reset()

    def reset(self):
        self.state = 0
        self.done = False
        return self.state

    def step(self, action):
        if self.done:
            raise RuntimeError("episode finished")
        if action == 0:
            reward = self.stash[self.state]
            self.done = True
            return self.state, reward, True
        nxt = self.state + 1
        self.state = nxt
        if nxt == self.n_states - 1:
            self.done = True
            return nxt, self.stash[nxt] - self.step_cost, True
        return nxt, -self.step_cost, False


def chain_value_iteration(discount):
    """Backward induction over ``ChainWorld``; independent oracle."""
    w = ChainWorld
    q = np.zeros((w.n_states, w.n_actions))
    # Non-terminal states are 0..3; advancing from 3 terminates at 4.
    v = np.zeros(w.n_states)
    for s in range(w.n_states - 2, -1, -1):
        q[s, 0] = w.stash[s]
        if s + 1 == w.n_states - 1:
            q[s, 1] = w.stash[s + 1] - w.step_cost
        else:
            q[s, 1] = -w.step_cost + discount * v[s + 1]
        v[s] = q[s].max()
    # State 4 is only ever terminal; leave its row at the cash-out value.
    q[w.n_states - 1, 0] = w.stash[w.n_states - 1]
    q[w.n_states - 1, 1] = w.stash[w.n_states - 1]
    return q


class MiniDayWorld:
    """Five days with fixed capacities. Subgoal g in {0,1,2} runs g
    collection steps; lower action a in {0,1} requests a+1 units and
    succeeds iff it fits the remaining capacity (reward amount - cost on
    success, -cost otherwise). Deterministic throughout."""

    n_days = 5
    n_subgoals = 3
    n_lower_actions = 2
    capacity = (3, 0, 2, 0, 1)
    step_cost = 0.5

    def __init__(self):
        self.reset()

    def reset(self):
        self.day = 0
        self.step_index = 0
        self.remaining = self.capacity[0]
        return self.upper_state()

    @property
    def done(self):
        return self.day >= self.n_days

    @property
    def n_upper_states(self):
        return self.n_days + 1

    @property
    def n_lower_states(self):
        # (day, subgoal-1 in {0,1}, step_index in {0,1}, remaining in 0..3)
        return self.n_days * 2 * 2 * 4

    def upper_state(self):
        return min(self.day, self.n_days)

    def lower_state(self, subgoal):
        g_idx = min(max(subgoal, 1), 2) - 1
        return ((self.day * 2 + g_idx) * 2 + self.step_index) * 4 + min(self.remaining, 3)

    def lower_step(self, action):
        amount = action + 1
        if amount <= self.remaining:
            self.remaining -= amount
            reward = amount - self.step_cost
        else:
            reward = -self.step_cost
        self.step_index = min(self.step_index + 1, 1)
        return reward

    def advance_day(self):
        self.day += 1
        self.step_index = 0
        if self.day < self.n_days:
            self.remaining = self.capacity[self.day]


def _lower_state_index(day, subgoal, step_index, remaining):
    g_idx = min(max(subgoal, 1), 2) - 1
    return ((day * 2 + g_idx) * 2 + min(step_index, 1)) * 4 + min(remaining, 3)


def mini_day_value_iteration(eta, gamma):
    """Joint backward induction over ``MiniDayWorld``; independent oracle.

    Returns (q_upper, q_lower, reachable_lower): optimal upper values per
    (day, subgoal), optimal lower values per encoded lower state, and the
    set of lower states reachable under any subgoal choice.
    """
    w = MiniDayWorld
    q_upper = np.zeros((w.n_days + 1, w.n_subgoals))
    q_lower = np.zeros((w.n_days * 2 * 2 * 4, w.n_lower_actions))
    reachable = set()
    v_day = np.zeros(w.n_days + 2)
    for day in range(w.n_days - 1, -1, -1):
        for g in (1, 2):
            for step_index in (1, 0):
                if step_index >= g:
                    continue
                for rem in range(4):
                    state = _lower_state_index(day, g, step_index, rem)
                    for a in range(w.n_lower_actions):
                        amount = a + 1
                        if amount <= rem:
                            r = amount - w.step_cost
                            rem2 = rem - amount
                        else:
                            r = -w.step_cost
                            rem2 = rem
                        if step_index + 1 >= g:
                            q_lower[state, a] = r
                        else:
                            nxt = _lower_state_index(day, g, step_index + 1, rem2)
                            q_lower[state, a] = r + gamma * q_lower[nxt].max()
        # All lower states reachable under any action sequence.
        for g in (1, 2):
            frontier = {w.capacity[day]}
            for step_index in range(g):
                nxt = set()
                for rem in frontier:
                    reachable.add(_lower_state_index(day, g, step_index, rem))
                    for a in range(w.n_lower_actions):
                        amount = a + 1
                        nxt.add(rem - amount if amount <= rem else rem)
                frontier = nxt
        for g in range(w.n_subgoals):
            rem = w.capacity[day]
            total = 0.0
            for step_index in range(g):
                state = _lower_state_index(day, g, step_index, rem)
                a = int(np.argmax(q_lower[state]))
                amount = a + 1
                if amount <= rem:
                    total += amount - w.step_cost
                    rem -= amount
                else:
                    total += -w.step_cost
            q_upper[day, g] = total + eta * v_day[day + 1]
        v_day[day] = q_upper[day].max()
    return q_upper, q_lower, reachable
