"""Interactive deduction environment over one account.

The daily cycle is: income is credited in the morning, the customer's own
spending executes at midday (capped by whatever is actually available),
and deduction attempts run in the evening. A request succeeds iff the
requested amount is less than or equal to the current true balance
(equality succeeds); success removes the amount from the balance.

Deductions persist: money taken on day t is gone on day t+1, which in turn
caps the customer's later spending. With no deductions the trajectory
reproduces ``record.daily_balance`` exactly.
"""

from __future__ import annotations

from .types import MAX_STEPS_PER_DAY, AccountRecord, DeductionAttempt, Observation


def _income_schedule(record: AccountRecord):
    """Reconstruct hidden daily income credits from the truth record.

    In the deduction-free world balance[t] = balance[t-1] + income[t]
    + payments[t] - consumption[t], so income is derivable from the
    exported fields.
    """
    horizon = record.horizon
    payments = [0] * horizon
    consumption = [0] * horizon
    for e in record.events:
        if e.kind == "payment":
            payments[e.day] += e.amount
        else:
            consumption[e.day] += e.amount
    income = [0] * horizon
    prev = 0
    for t in range(horizon):
        income[t] = record.daily_balance[t] - prev - payments[t] + consumption[t]
        if income[t] < 0:
            raise ValueError(f"inconsistent truth record for account {record.account_id}: "
                             f"negative implied income on day {t}")
        prev = record.daily_balance[t]
    return income, payments, consumption


class DeductionEnvironment:
    """Stateful rollout over one account. Confine each instance to one rollout."""

    def __init__(self, record: AccountRecord, cost_minor: int = 10):
        self.record = record
        self.cost_minor = cost_minor
        self._income, _, _ = _income_schedule(record)
        self._events_by_day = [[] for _ in range(record.horizon)]
        for e in record.events:
            if e.kind == "consumption":
                self._events_by_day[e.day].append(e.amount)
        self._payments_by_day = [0] * record.horizon
        for e in record.events:
            if e.kind == "payment":
                self._payments_by_day[e.day] += e.amount
        self.reset()

    def reset(self):
        self.day = 0
        self.steps_today = 0
        self.balance = 0
        self.remaining_debt = self.record.bill
        self.history = []
        self.total_income_credited = 0
        self._apply_day(0)
        return self

    def _apply_day(self, day):
        credit = self._income[day] + self._payments_by_day[day]
        self.balance += credit
        self.total_income_credited += credit
        for amount in self._events_by_day[day]:
            spend = min(amount, self.balance)
            self.balance -= spend

    @property
    def done(self) -> bool:
        return self.day >= self.record.horizon or self.remaining_debt == 0

    @property
    def steps_left(self) -> int:
        return MAX_STEPS_PER_DAY - self.steps_today

    def attempt(self, amount: int):
        """Execute one deduction request. Returns (outcome, realized).

        Amount 0 is a defined no-op success with zero cost; planners skip
        emitting it, but the branch is still well defined.
        """
        if amount < 0:
            raise ValueError("requested amount must be >= 0")
        if self.steps_today >= MAX_STEPS_PER_DAY:
            raise RuntimeError(f"day {self.day} already has {MAX_STEPS_PER_DAY} attempts")
        if amount == 0:
            return "success", 0
        self.steps_today += 1
        if amount <= self.balance:
            outcome, realized = "success", amount
            self.balance -= amount
            self.remaining_debt -= min(amount, self.remaining_debt)
        else:
            outcome, realized = "fail", 0
        self.history.append(
            DeductionAttempt(
                day=self.day,
                step=self.steps_today,
                requested=amount,
                outcome=outcome,
                realized=realized,
                cost=self.cost_minor,
            )
        )
        return outcome, realized

    def advance_day(self):
        self.day += 1
        self.steps_today = 0
        if self.day < self.record.horizon:
            self._apply_day(self.day)

    def observation(self) -> Observation:
        return Observation(
            profile=self.record.profile,
            bill=self.record.bill,
            day=self.day,
            step=self.steps_today + 1,
            history=tuple(self.history),
            remaining_debt=self.remaining_debt,
        )

    def privileged_balance(self) -> int:
        """True current balance. Evaluation/labeling only, never policy input."""
        return self.balance


def attempt_deduction(env: DeductionEnvironment, amount: int):
    """Functional wrapper over ``env.attempt``; returns (outcome, realized, env)."""
    outcome, realized = env.attempt(amount)
    return outcome, realized, env


def observe(env: DeductionEnvironment) -> Observation:
    return env.observation()


def privileged_balance(source, day=None) -> int:
    """True balance for labeling and oracle checks.

    On an ``AccountRecord`` with a day index this is the deduction-free
    end-of-day balance; on a live environment it is the current balance.
    """
    if isinstance(source, DeductionEnvironment):
        return source.privileged_balance()
    if day is None:
        raise ValueError("day index required when reading from a truth record")
    return source.daily_balance[day]
