"""Fast per-environment feature bookkeeping for the training rollouts.

Produces exactly the same vectors as ``features.py`` builds from an
``Observation`` (a test pins this equality), but caches the per-account
constants and maintains history rows incrementally instead of rescanning
the attempt list at every decision.
"""

from __future__ import annotations

import math

import numpy as np

from ..sim.types import MAX_STEPS_PER_DAY
from .features import HIST_DIM, N_SUBGOALS


class RollState:
    """Feature bookkeeping for one environment during collection."""

    __slots__ = ("env", "horizon", "window", "prefix", "bill_log", "bill",
                 "rows", "today_collected", "today_fails", "today_attempts",
                 "last_requested")

    def __init__(self, env, window, horizon):
        self.env = env
        self.horizon = horizon
        self.window = window
        p = env.record.profile
        if p.pay_period > 0:
            per_norm = p.pay_period / 31.0
            has_income = 1.0
        else:
            per_norm = 0.0
            has_income = 0.0
        self.prefix = np.array(
            [p.age_bucket / 5.0, p.city_tier / 3.0, p.income_band / 4.0,
             float(p.gender), p.payments_per_day, p.transfers_per_day,
             has_income, per_norm],
            dtype=np.float32,
        )
        self.bill = env.record.bill
        self.bill_log = math.log1p(self.bill / 100.0) / 10.0
        self.rows = []
        self.today_collected = 0
        self.today_fails = 0
        self.today_attempts = 0
        self.last_requested = 0

    def begin_episode(self):
        self.rows = []
        self._reset_day()

    def _reset_day(self):
        self.today_collected = 0
        self.today_fails = 0
        self.today_attempts = 0
        self.last_requested = 0

    def note_attempt(self, requested, realized, success, step):
        self.rows.append(np.array(
            [requested / self.bill,
             1.0 if success else -1.0,
             self.env.day / self.horizon,  # attempt day; gap added at read time
             step / MAX_STEPS_PER_DAY],
            dtype=np.float32,
        ))
        self.today_attempts += 1
        self.today_collected += realized
        if not success:
            self.today_fails += 1
        self.last_requested = requested

    def advance_day(self):
        self.env.advance_day()
        self._reset_day()

    # -- feature assembly -----------------------------------------------------

    def _static(self):
        env = self.env
        p = env.record.profile
        day = env.day
        if p.pay_period > 0:
            phase_gap = (day - p.pay_phase) % p.pay_period
            dsp = phase_gap / p.pay_period
            dtp = (p.pay_period - phase_gap) % p.pay_period / p.pay_period
        else:
            dsp = dtp = 0.0
        tail = np.array(
            [dsp, dtp, day / self.horizon, self.bill_log,
             env.remaining_debt / self.bill],
            dtype=np.float32,
        )
        return np.concatenate([self.prefix, tail])

    def _history(self):
        rows = self.rows[-self.window:]
        if not rows:
            return np.zeros((0, HIST_DIM), dtype=np.float32)
        arr = np.stack(rows)
        out = arr.copy()
        out[:, 2] = self.env.day / self.horizon - arr[:, 2]
        return out

    def _day_context(self):
        env = self.env
        return np.array(
            [(env.steps_today + 1) / MAX_STEPS_PER_DAY,
             self.today_collected / self.bill,
             self.today_fails / MAX_STEPS_PER_DAY,
             math.log1p(env.remaining_debt / 100.0) / 10.0,
             (self.last_requested if self.today_attempts else 0) / self.bill],
            dtype=np.float32,
        )

    def upper_state(self):
        return self._static(), self._history()

    def lower_state(self, subgoal):
        onehot = np.zeros(N_SUBGOALS, dtype=np.float32)
        onehot[subgoal] = 1.0
        return np.concatenate([self._static(), self._day_context(), onehot]), self._history()

    def flat_state(self):
        return np.concatenate([self._static(), self._day_context()]), self._history()
