"""Fixed-point currency arithmetic.

All balances, bills and deduction amounts are stored as integer minor
units (cents). Success/failure comparisons are exact integer comparisons,
so there is no floating-point ambiguity at the boundary where a requested
amount equals the available balance.
"""

from __future__ import annotations

from fractions import Fraction

MINOR_PER_UNIT = 100


def to_minor(value) -> int:
    """Convert a decimal amount in currency units to integer minor units.

    Accepts ints, floats and decimal strings. Strings and ints convert
    exactly; floats go through ``Fraction`` of their shortest repr so that
    e.g. ``0.1`` becomes exactly 10 minor units.
    """
    if isinstance(value, int):
        return value * MINOR_PER_UNIT
    frac = Fraction(str(value)) * MINOR_PER_UNIT
    if frac.denominator != 1:
        raise ValueError(f"{value!r} is not representable in minor units")
    return int(frac)


def to_units(minor: int) -> float:
    """Minor units to currency units as a float (reporting only)."""
    return minor / MINOR_PER_UNIT


def round_half_up(numerator: int, denominator: int) -> int:
    """Round ``numerator / denominator`` to the nearest integer, halves up.

    Exact integer arithmetic; ``denominator`` must be positive.
    """
    if denominator <= 0:
        raise ValueError("denominator must be positive")
    if numerator >= 0:
        return (2 * numerator + denominator) // (2 * denominator)
    return -((-2 * numerator + denominator) // (2 * denominator))


def scale_minor(minor: int, factor: Fraction) -> int:
    """Multiply a minor-unit amount by an exact rational factor, rounding half up."""
    frac = Fraction(minor) * factor
    return round_half_up(frac.numerator, frac.denominator)


def parse_ratio(text) -> Fraction:
    """Parse a decimal string (or number) into an exact ``Fraction``.

    Used for the correction weight and the per-step cost so that repeated
    runs produce bit-identical fixed-point results.
    """
    return Fraction(str(text))


def fraction_amount(action_index: int, base_minor: int, n_actions: int = 50) -> int:
    """Amount induced by a fractional action: ``(index / n_actions) * base``.

    Rounded half-up to minor units and clamped to ``[1, base]`` so a
    positive base always admits a positive attempt.
    """
    if not 1 <= action_index <= n_actions:
        raise ValueError(f"action index {action_index} outside [1, {n_actions}]")
    if base_minor <= 0:
        return 0
    amount = round_half_up(action_index * base_minor, n_actions)
    return min(max(amount, 1), base_minor)
