"""Dataset persistence: line-delimited JSON, one account per line.

Record fields: ``id``, ``profile`` (named codes), ``activity`` (named
rates), ``bill`` (minor units), ``events`` (array of {day, kind, amount}),
``daily_balance`` (array, minor units). Keys are emitted sorted so a
given dataset always serializes to identical bytes.
"""

from __future__ import annotations

import json

from ..errors import DatasetIOError
from .types import AccountProfile, AccountRecord, ConsumptionEvent


def _record_to_obj(record: AccountRecord) -> dict:
    return {
        "id": record.account_id,
        "profile": record.profile.codes(),
        "activity": record.profile.rates(),
        "bill": record.bill,
        "events": [{"day": e.day, "kind": e.kind, "amount": e.amount} for e in record.events],
        "daily_balance": list(record.daily_balance),
    }


def _record_from_obj(obj: dict) -> AccountRecord:
    profile = AccountProfile(
        age_bucket=obj["profile"]["age_bucket"],
        city_tier=obj["profile"]["city_tier"],
        income_band=obj["profile"]["income_band"],
        gender=obj["profile"]["gender"],
        pay_period=obj["profile"]["pay_period"],
        pay_phase=obj["profile"]["pay_phase"],
        payments_per_day=obj["activity"]["payments_per_day"],
        transfers_per_day=obj["activity"]["transfers_per_day"],
    )
    events = tuple(
        ConsumptionEvent(day=e["day"], kind=e["kind"], amount=e["amount"])
        for e in obj["events"]
    )
    return AccountRecord(
        account_id=obj["id"],
        profile=profile,
        bill=obj["bill"],
        events=events,
        daily_balance=tuple(obj["daily_balance"]),
    )


def export_dataset(records, path):
    """Write the population to ``path`` as JSON lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(_record_to_obj(record), sort_keys=True, separators=(",", ":")))
            fh.write("\n")


def load_dataset(path):
    """Read a population back; raises ``DatasetIOError`` with the line number on bad input."""
    records = []
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise DatasetIOError(f"cannot open dataset: {exc}")
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                records.append(_record_from_obj(obj))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DatasetIOError(f"malformed account record ({exc})", line=lineno)
    return records
