"""State featurization for the value networks.

Upper (daily) states follow (profile, activity, day, attempt history);
lower (per-step) states add the step index, the chosen subgoal and the
remaining-debt context. The attempt history enters as a sequence of
(amount fraction, outcome flag, day gap, step) rows consumed by each
agent's own recurrent embedder.
"""

from __future__ import annotations

import math

import numpy as np

from ..sim.types import MAX_STEPS_PER_DAY, Observation

N_SUBGOALS = 6
N_AMOUNT_ACTIONS = 50
STATIC_DIM = 13
DAY_CONTEXT_DIM = 5
HIST_DIM = 4

UPPER_STATIC_DIM = STATIC_DIM
LOWER_STATIC_DIM = STATIC_DIM + DAY_CONTEXT_DIM + N_SUBGOALS
FLAT_STATIC_DIM = STATIC_DIM + DAY_CONTEXT_DIM


def static_features(obs: Observation, horizon: int) -> np.ndarray:
    p = obs.profile
    if p.pay_period > 0:
        phase_gap = (obs.day - p.pay_phase) % p.pay_period
        dsp = phase_gap / p.pay_period
        dtp = (p.pay_period - phase_gap) % p.pay_period / p.pay_period
        per_norm = p.pay_period / 31.0
        has_income = 1.0
    else:
        dsp = dtp = per_norm = 0.0
        has_income = 0.0
    bill_log = math.log1p(obs.bill / 100.0) / 10.0
    debt_frac = obs.remaining_debt / obs.bill
    return np.array(
        [
            p.age_bucket / 5.0,
            p.city_tier / 3.0,
            p.income_band / 4.0,
            float(p.gender),
            p.payments_per_day,
            p.transfers_per_day,
            has_income,
            per_norm,
            dsp,
            dtp,
            obs.day / horizon,
            bill_log,
            debt_frac,
        ],
        dtype=np.float32,
    )


def day_context(obs: Observation) -> np.ndarray:
    today = obs.attempts_today
    collected = sum(a.realized for a in today)
    fails = sum(1 for a in today if not a.success)
    return np.array(
        [
            obs.step / MAX_STEPS_PER_DAY,
            collected / obs.bill,
            fails / MAX_STEPS_PER_DAY,
            math.log1p(obs.remaining_debt / 100.0) / 10.0,
            min((a.requested for a in today[-1:]), default=0) / obs.bill,
        ],
        dtype=np.float32,
    )


def history_sequence(obs: Observation, window: int, horizon: int) -> np.ndarray:
    """Last ``window`` attempts as (fraction, outcome, day gap, step) rows."""
    hist = obs.history[-window:]
    if not hist:
        return np.zeros((0, HIST_DIM), dtype=np.float32)
    rows = np.empty((len(hist), HIST_DIM), dtype=np.float32)
    for r, a in enumerate(hist):
        rows[r, 0] = a.requested / obs.bill
        rows[r, 1] = 1.0 if a.success else -1.0
        rows[r, 2] = (obs.day - a.day) / horizon
        rows[r, 3] = a.step / MAX_STEPS_PER_DAY
    return rows


def upper_features(obs: Observation, window: int, horizon: int):
    return static_features(obs, horizon), history_sequence(obs, window, horizon)


def lower_features(obs: Observation, subgoal: int, window: int, horizon: int):
    onehot = np.zeros(N_SUBGOALS, dtype=np.float32)
    onehot[subgoal] = 1.0
    static = np.concatenate([static_features(obs, horizon), day_context(obs), onehot])
    return static, history_sequence(obs, window, horizon)


def flat_features(obs: Observation, window: int, horizon: int):
    static = np.concatenate([static_features(obs, horizon), day_context(obs)])
    return static, history_sequence(obs, window, horizon)
