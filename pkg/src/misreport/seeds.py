"""Deterministic, stateless seed derivation.

``SeedSequence.spawn`` mutates the parent, so calling it twice on the same
object yields different children. All internal seed splits instead build
children from explicit spawn keys, which makes every derived stream a pure
function of (master seed, key path).
"""
from __future__ import annotations

import numpy as np

SeedLike = "int | np.random.SeedSequence"


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def child_seed(seed, *key: int) -> np.random.SeedSequence:
    """Child SeedSequence at the given key path; never mutates the parent."""
    ss = as_seed_sequence(seed)
    return np.random.SeedSequence(
        entropy=ss.entropy, spawn_key=tuple(ss.spawn_key) + tuple(key)
    )
