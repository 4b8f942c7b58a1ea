"""Seeding helpers built on the Philox counter-based bit generator.

Every random draw in the toolkit flows through these helpers, so one integer
seed reproduces every output bit for bit regardless of platform or worker
count. Per-sample streams come from SeedSequence spawning, which is stable
and independent of the order in which children are consumed.
"""
from __future__ import annotations

import numpy as np

SeedLike = "int | np.random.SeedSequence | np.random.Generator"


def make_rng(seed) -> np.random.Generator:
    """Philox-backed generator. An existing Generator is passed through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def split_seeds(seed, n: int) -> list[np.random.SeedSequence]:
    """n independent child seed sequences derived from a master seed."""
    if isinstance(seed, np.random.SeedSequence):
        return seed.spawn(n)
    return np.random.SeedSequence(seed).spawn(n)
