"""Domain records for the account simulator.

All currency fields are integer minor units. ``AccountRecord`` bundles the
privileged truth (daily balances, bill, raw event stream) with the public
profile; agents only ever see ``Observation``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

MAX_STEPS_PER_DAY = 5

PROFILE_CARDINALITIES = {
    "age_bucket": 6,
    "city_tier": 4,
    "income_band": 5,
    "gender": 2,
    "pay_period": 32,
    "pay_phase": 32,
}

EVENT_KINDS = ("consumption", "payment")


@dataclass(frozen=True)
class AccountProfile:
    """Static customer features.

    The code fields are categorical/ordinal; ``payments_per_day`` and
    ``transfers_per_day`` are observed activity rates. ``pay_period`` and
    ``pay_phase`` describe the account's income cadence (period 0 means no
    regular income was detected).
    """

    age_bucket: int
    city_tier: int
    income_band: int
    gender: int
    pay_period: int
    pay_phase: int
    payments_per_day: float
    transfers_per_day: float

    def __post_init__(self):
        for name in ("age_bucket", "city_tier", "income_band", "gender", "pay_period", "pay_phase"):
            value = getattr(self, name)
            if not 0 <= value < PROFILE_CARDINALITIES[name]:
                raise ValueError(f"{name}={value} outside cardinality {PROFILE_CARDINALITIES[name]}")
        if self.payments_per_day < 0 or self.transfers_per_day < 0:
            raise ValueError("activity rates must be >= 0")

    def codes(self) -> dict:
        return {
            "age_bucket": self.age_bucket,
            "city_tier": self.city_tier,
            "income_band": self.income_band,
            "gender": self.gender,
            "pay_period": self.pay_period,
            "pay_phase": self.pay_phase,
        }

    def rates(self) -> dict:
        return {
            "payments_per_day": self.payments_per_day,
            "transfers_per_day": self.transfers_per_day,
        }


@dataclass(frozen=True)
class ConsumptionEvent:
    """One transaction on the account: a spend or an incoming payment."""

    day: int
    kind: str
    amount: int  # minor units, > 0

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.amount <= 0:
            raise ValueError("event amount must be > 0")
        if self.day < 0:
            raise ValueError("event day must be >= 0")


@dataclass(frozen=True)
class AccountRecord:
    """One synthetic account: public profile plus privileged ground truth.

    ``daily_balance[t]`` is the end-of-day balance (after that day's income
    and spending, before any deduction) in the deduction-free world; the
    interactive environment reproduces it exactly when no deductions run.
    """

    account_id: int
    profile: AccountProfile
    bill: int  # minor units, > 0
    events: tuple  # ConsumptionEvent, ordered by (day, insertion)
    daily_balance: tuple  # minor units per day, >= 0

    def __post_init__(self):
        if self.bill <= 0:
            raise ValueError("bill must be > 0")
        if any(b < 0 for b in self.daily_balance):
            raise ValueError("daily balances must be >= 0")
        horizon = len(self.daily_balance)
        if any(e.day >= horizon for e in self.events):
            raise ValueError("event day outside horizon")

    @property
    def horizon(self) -> int:
        return len(self.daily_balance)


@dataclass(frozen=True)
class DeductionAttempt:
    """The observable outcome of one deduction request."""

    day: int
    step: int  # 1-based within the day, <= MAX_STEPS_PER_DAY
    requested: int  # minor units, >= 0
    outcome: str  # "success" | "fail"
    realized: int  # == requested on success, 0 on fail
    cost: int  # minor units charged for issuing the request

    def __post_init__(self):
        if self.outcome not in ("success", "fail"):
            raise ValueError(f"unknown outcome {self.outcome!r}")
        if not 1 <= self.step <= MAX_STEPS_PER_DAY:
            raise ValueError(f"step {self.step} outside [1, {MAX_STEPS_PER_DAY}]")
        if self.requested < 0:
            raise ValueError("requested amount must be >= 0")
        if self.outcome == "success" and self.realized != self.requested:
            raise ValueError("successful attempt must realize the requested amount")
        if self.outcome == "fail" and self.realized != 0:
            raise ValueError("failed attempt must realize 0")
        if self.cost < 0:
            raise ValueError("cost must be >= 0")

    @property
    def success(self) -> bool:
        return self.outcome == "success"


@dataclass(frozen=True)
class Observation:
    """Everything a policy may condition on. Never exposes the true balance."""

    profile: AccountProfile
    bill: int
    day: int
    step: int  # next step index within the day (1-based)
    history: tuple  # executed DeductionAttempt records, oldest first
    remaining_debt: int

    def __post_init__(self):
        if self.remaining_debt < 0:
            raise ValueError("remaining debt must be >= 0")

    @property
    def attempts_today(self) -> tuple:
        return tuple(a for a in self.history if a.day == self.day)


@dataclass(frozen=True)
class EpisodeLog:
    """Observable record of one account's episode under some policy."""

    account_id: int
    bill: int
    horizon: int
    attempts: tuple

    def __post_init__(self):
        key = [(a.day, a.step) for a in self.attempts]
        if key != sorted(key):
            raise ValueError("attempts must be sorted by (day, step)")

    @property
    def total_deducted(self) -> int:
        return sum(a.realized for a in self.attempts)

    @property
    def total_cost(self) -> int:
        return sum(a.cost for a in self.attempts)

    def deducted_by_day(self) -> dict:
        """Per-day successful totals, the daily lower bounds used for replay."""
        totals: dict = {}
        for a in self.attempts:
            totals[a.day] = totals.get(a.day, 0) + a.realized
        return totals
