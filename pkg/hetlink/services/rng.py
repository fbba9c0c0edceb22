"""
services/rng.py – Seeded, counter-based random generators.

All randomness flows from one master seed. Shards (bootstrap resamples,
per-setting sampling) get child generators keyed by (master_seed, index)
so results do not depend on evaluation order or worker count.
"""

from __future__ import annotations

import numpy as np

RngLike = np.random.Generator | int


def make_rng(seed: int) -> np.random.Generator:
    """Philox-backed generator for a 64-bit master seed."""
    if seed < 0:
        raise ValueError(f"Seed must be nonnegative, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def child_rng(master_seed: int, *index: int) -> np.random.Generator:
    """Generator for shard `index` of a run; independent of sibling shards."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(index))
    return np.random.Generator(np.random.Philox(seq))


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return make_rng(int(rng))
