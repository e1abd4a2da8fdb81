"""Bounded FIFO experience buffer with uniform sampling."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Transition:
    """One stored experience. ``reward`` is in minor units for deduction
    tasks (keeps reward bookkeeping exact); ``scale`` normalizes it for
    the value network (the account's bill, or 1 for toy tasks)."""

    state: object
    action: int
    reward: float
    next_state: object
    terminal: bool
    scale: float = 1.0


class ReplayBuffer:
    """Ring buffer: overwrites the oldest item once capacity is reached."""

    def __init__(self, capacity: int):
        if capacity <= 0:
            raise ValueError("capacity must be > 0")
        self.capacity = capacity
        self._items = []
        self._next = 0

    def __len__(self):
        return len(self._items)

    def push(self, item):
        if len(self._items) < self.capacity:
            self._items.append(item)
        else:
            self._items[self._next] = item
            self._next = (self._next + 1) % self.capacity

    def sample(self, n, rng):
        """Uniform sample with replacement over current contents."""
        if not self._items:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, len(self._items), size=n)
        return [self._items[i] for i in idx]

    def __iter__(self):
        return iter(self._items)
