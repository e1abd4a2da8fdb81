"""Benchmark metric: net success rate of a batch of episodes."""

from __future__ import annotations

from ..errors import DomainError


def succ_rate(episode_logs):
    """(total deducted - total step cost) / total bill over the population.

    Costs accrue per issued attempt, so the metric can go negative when
    nothing is collected. Raises ``DomainError`` on an empty population
    or a zero total bill.
    """
    logs = list(episode_logs)
    if not logs:
        raise DomainError("succ_rate of an empty set of episodes")
    total_bill = sum(log.bill for log in logs)
    if total_bill <= 0:
        raise DomainError("total bill must be positive")
    total_deducted = sum(log.total_deducted for log in logs)
    total_cost = sum(log.total_cost for log in logs)
    return (total_deducted - total_cost) / total_bill
