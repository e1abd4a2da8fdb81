"""Deterministic random-stream derivation.

One master seed fans out to independent per-stage and per-account streams.
The scheme is: every consumer asks for ``derive_rng(master, *tags)`` where
tags are strings or integers naming the stage and index, e.g.
``derive_rng(7, "gen", 1423)`` for account 1423 of the generator. Tags are
mapped to integers via a stable byte hash, so identical (seed, tags) pairs
always yield identical streams and distinct tags yield independent ones.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _tag_to_int(tag) -> int:
    if isinstance(tag, (int, np.integer)):
        return int(tag) & 0xFFFFFFFF
    digest = hashlib.sha256(str(tag).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little")


def seed_sequence(master_seed: int, *tags) -> np.random.SeedSequence:
    entropy = [int(master_seed) & 0xFFFFFFFFFFFFFFFF] + [_tag_to_int(t) for t in tags]
    return np.random.SeedSequence(entropy)


def derive_rng(master_seed: int, *tags) -> np.random.Generator:
    """Independent generator for (master_seed, tags)."""
    return np.random.default_rng(seed_sequence(master_seed, *tags))
