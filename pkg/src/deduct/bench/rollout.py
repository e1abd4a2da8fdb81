"""Lockstep episode runner.

Rolls one policy over many environments day by day so network-backed
policies get batched value evaluations. Works against both the true
simulator and corrected replay environments (same surface). Enforces the
per-day step cap and never lets a policy request more than the remaining
debt.
"""

from __future__ import annotations

from ..sim.environment import DeductionEnvironment
from ..sim.types import MAX_STEPS_PER_DAY, EpisodeLog
from ..policies.base import observable_view


def run_episodes(envs, policy, collect_balances=False):
    """Roll ``policy`` over environments; returns (logs, label_rows).

    ``label_rows`` is populated only when ``collect_balances`` is set:
    (account_id, day, privileged pre-attempt balance) triples gathered
    through the privileged channel for corrector training.
    """
    for env in envs:
        env.reset()
    horizon = max(env.record.horizon for env in envs) if envs else 0
    episode_ctxs = policy.begin_episode_batch([observable_view(e.record) for e in envs])
    label_rows = []
    for day in range(horizon):
        live = [i for i, e in enumerate(envs) if not e.done]
        if not live:
            break
        if collect_balances:
            for i in live:
                label_rows.append(
                    (envs[i].record.account_id, day, envs[i].privileged_balance())
                )
        obs = [envs[i].observation() for i in live]
        day_ctxs = policy.begin_day_batch(obs, [episode_ctxs[i] for i in live])
        stopped = [False] * len(live)
        for _ in range(MAX_STEPS_PER_DAY):
            acting = [
                j for j, i in enumerate(live)
                if not stopped[j] and not envs[i].done and envs[i].steps_left > 0
            ]
            if not acting:
                break
            sub_obs = [envs[live[j]].observation() for j in acting]
            amounts = policy.next_amounts(
                sub_obs,
                [day_ctxs[j] for j in acting],
                [episode_ctxs[live[j]] for j in acting],
            )
            for j, amount in zip(acting, amounts):
                env = envs[live[j]]
                if amount is None or amount <= 0:
                    stopped[j] = True
                    continue
                env.attempt(min(int(amount), env.remaining_debt))
        for i in live:
            envs[i].advance_day()
    logs = [
        EpisodeLog(
            account_id=env.record.account_id,
            bill=env.record.bill,
            horizon=env.record.horizon,
            attempts=tuple(env.history),
        )
        for env in envs
    ]
    return logs, label_rows


def run_policy_on_records(records, policy, cost_minor, collect_balances=False):
    """Convenience wrapper: fresh true environments for each record."""
    envs = [DeductionEnvironment(r, cost_minor) for r in records]
    return run_episodes(envs, policy, collect_balances=collect_balances)
