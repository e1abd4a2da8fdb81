"""Policy protocol for episode rollouts.

Policies see only observable account data: the ``Observation`` stream and
an ``ObservableAccount`` view (profile, bill, transaction events) — never
daily balances. The batch hooks exist so network-backed policies can
score many accounts per call; the defaults delegate to per-observation
methods.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ObservableAccount:
    """The part of an account a policy is allowed to see."""

    account_id: int
    profile: object
    bill: int
    horizon: int
    events: tuple


def observable_view(record) -> ObservableAccount:
    return ObservableAccount(
        account_id=record.account_id,
        profile=record.profile,
        bill=record.bill,
        horizon=record.horizon,
        events=record.events,
    )


class Policy:
    """Sequential decider: one optional amount per step, day by day."""

    def begin_episode_batch(self, accounts):
        return [self.begin_episode(a) for a in accounts]

    def begin_episode(self, account):
        return None

    def begin_day_batch(self, obs_list, episode_ctxs):
        return [self.begin_day(o, c) for o, c in zip(obs_list, episode_ctxs)]

    def begin_day(self, obs, episode_ctx):
        return None

    def next_amounts(self, obs_list, day_ctxs, episode_ctxs):
        return [
            self.next_amount(o, d, e)
            for o, d, e in zip(obs_list, day_ctxs, episode_ctxs)
        ]

    def next_amount(self, obs, day_ctx, episode_ctx):
        """Minor-unit amount for the next attempt, or None to end the day."""
        raise NotImplementedError
