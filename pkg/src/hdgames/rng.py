"""Seed handling.

Draws use :class:`random.Random` (Mersenne Twister), whose seeded output is
platform independent and supports exact big-integer ``randrange``.  Child
seeds for independent runs come from :class:`numpy.random.SeedSequence`
with the run's coordinates as spawn key, so a run's stream depends only on
``(master_seed, *keys)`` and not on scheduling.
"""

from __future__ import annotations

import random

import numpy as np


def derive_seed(master: int, *keys: int) -> int:
    seq = np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in keys))
    lo, hi = seq.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)


def make_rng(seed: "int | random.Random | None") -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(seed)
