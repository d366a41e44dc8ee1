"""Seed derivation for independent substreams.

A seed is an int or a list of ints; appending salt integers yields a
distinct, reproducible numpy SeedSequence entropy pool for each substream.
"""

from __future__ import annotations

import numpy as np


def derive(seed, *salts):
    """Child seed (entropy list) for a named substream."""
    if isinstance(seed, (list, tuple)):
        return list(seed) + list(salts)
    return [int(seed), *salts]


def seed_to_int(seed) -> int:
    """Stable 64-bit integer form of a (possibly composite) seed."""
    ss = np.random.SeedSequence(derive(seed))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
