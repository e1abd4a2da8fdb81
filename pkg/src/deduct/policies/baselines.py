"""Non-learned comparison policies."""

from __future__ import annotations

from ..currency import round_half_up
from .base import Policy


class FullDeductionPolicy(Policy):
    """Request the full remaining bill in a single daily attempt.

    With ``retry_daily`` off the attempt happens on day 0 only, matching
    the strictest one-shot practice.
    """

    def __init__(self, retry_daily=True):
        self.retry_daily = retry_daily

    def next_amount(self, obs, day_ctx, episode_ctx):
        if obs.remaining_debt <= 0:
            return None
        if obs.attempts_today:
            return None
        if not self.retry_daily and obs.day > 0:
            return None
        return obs.remaining_debt


class HeuristicHalvingPolicy(Policy):
    """Binary-halving search against the hidden balance.

    First attempt each day asks for half the remaining bill. A failure
    halves the previous request; a success asks for half of what is still
    owed. Amounts use half-up rounding at minor-unit precision, so the
    request can shrink to a single minor unit but never to zero.
    """

    def next_amount(self, obs, day_ctx, episode_ctx):
        if obs.remaining_debt <= 0:
            return None
        today = obs.attempts_today
        if not today:
            return round_half_up(obs.remaining_debt, 2)
        last = today[-1]
        if last.success:
            if obs.remaining_debt <= 0:
                return None
            return round_half_up(obs.remaining_debt, 2)
        return round_half_up(last.requested, 2)
