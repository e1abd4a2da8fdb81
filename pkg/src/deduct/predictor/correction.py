"""Corrected replay environment.

Logged deductions are only lower bounds of what an account held, so
training on raw logs teaches agents to under-collect. The correction
treats each logged day as having capacity

    y_corrected = y_deducted + alpha * y_pred

where ``y_deducted`` is that day's logged successful total and ``y_pred``
the model's balance estimate. Within a replayed day an attempt succeeds
iff it fits in the remaining corrected capacity. With alpha = 0 the
replay reproduces the logged success/fail pattern exactly.

Replay environments are for training only; reported evaluation always
runs against the true simulator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..currency import parse_ratio, scale_minor
from ..errors import DomainError
from ..sim.types import MAX_STEPS_PER_DAY, DeductionAttempt, Observation
from .model import build_sequence


def _as_exact_alpha(alpha) -> Fraction:
    # Decimal-string parsing keeps e.g. 1.6 exactly 8/5 rather than the
    # nearest binary float, so fixed-point results are reproducible.
    value = alpha if isinstance(alpha, Fraction) else parse_ratio(alpha)
    if value < 0:
        raise DomainError("alpha must be >= 0")
    return value


def correct_day(y_deducted: int, y_pred: int, alpha) -> int:
    """Corrected day capacity in minor units (exact fixed-point arithmetic)."""
    if y_deducted < 0 or y_pred < 0:
        raise DomainError("correction inputs must be >= 0")
    return int(y_deducted) + scale_minor(int(y_pred), _as_exact_alpha(alpha))


@dataclass(frozen=True)
class CorrectedDay:
    day: int
    y_deducted: int
    y_pred: int
    alpha: Fraction

    @property
    def y_corrected(self) -> int:
        return correct_day(self.y_deducted, self.y_pred, self.alpha)


class CorrectedReplayEnv:
    """Replayable per-day capacity environment over one logged account.

    API mirrors ``DeductionEnvironment`` so policies and featurizers are
    interchangeable between the true simulator and the replay.
    """

    def __init__(self, record, day_capacity, cost_minor: int = 10):
        self.record = record
        self.day_capacity = list(day_capacity)
        if len(self.day_capacity) != record.horizon:
            raise DomainError("capacity schedule must cover the horizon")
        self.cost_minor = cost_minor
        self.reset()

    def reset(self):
        self.day = 0
        self.steps_today = 0
        self.remaining_today = self.day_capacity[0] if self.day_capacity else 0
        self.remaining_debt = self.record.bill
        self.history = []
        return self

    @property
    def done(self) -> bool:
        return self.day >= self.record.horizon or self.remaining_debt == 0

    @property
    def steps_left(self) -> int:
        return MAX_STEPS_PER_DAY - self.steps_today

    def attempt(self, amount: int):
        if amount < 0:
            raise ValueError("requested amount must be >= 0")
        if self.steps_today >= MAX_STEPS_PER_DAY:
            raise RuntimeError(f"day {self.day} already has {MAX_STEPS_PER_DAY} attempts")
        if amount == 0:
            return "success", 0
        self.steps_today += 1
        if amount <= self.remaining_today:
            outcome, realized = "success", amount
            self.remaining_today -= amount
            self.remaining_debt -= min(amount, self.remaining_debt)
        else:
            outcome, realized = "fail", 0
        self.history.append(
            DeductionAttempt(
                day=self.day, step=self.steps_today, requested=amount,
                outcome=outcome, realized=realized, cost=self.cost_minor,
            )
        )
        return outcome, realized

    def advance_day(self):
        self.day += 1
        self.steps_today = 0
        if self.day < self.record.horizon:
            self.remaining_today = self.day_capacity[self.day]

    def observation(self) -> Observation:
        return Observation(
            profile=self.record.profile,
            bill=self.record.bill,
            day=self.day,
            step=self.steps_today + 1,
            history=tuple(self.history),
            remaining_debt=self.remaining_debt,
        )


def predicted_by_day(record, predictor, y_pred_by_day=None):
    """Per-day minor-unit balance estimates for one account."""
    if y_pred_by_day is not None:
        return np.asarray(y_pred_by_day, dtype=np.int64)
    seqs = [
        build_sequence(record.events, day, predictor.lookback_days, predictor.max_events)
        for day in range(record.horizon)
    ]
    return predictor.predict_minor(seqs)


def build_corrected_env(record, episode_log, predictor, alpha,
                        cost_minor: int = 10, y_pred_by_day=None) -> CorrectedReplayEnv:
    """Corrected replay environment for one logged account.

    ``y_pred_by_day`` short-circuits the predictor when estimates were
    precomputed in bulk. Days with no usable history fall back to the
    predictor's fitted population median.
    """
    alpha = _as_exact_alpha(alpha)
    preds = predicted_by_day(record, predictor, y_pred_by_day)
    ded = episode_log.deducted_by_day() if episode_log is not None else {}
    capacity = [
        correct_day(ded.get(day, 0), int(preds[day]), alpha)
        for day in range(record.horizon)
    ]
    return CorrectedReplayEnv(record, capacity, cost_minor=cost_minor)
