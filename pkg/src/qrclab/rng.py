"""Deterministic seed derivation for index-addressed work items.

Every stochastic quantity in an experiment is drawn from a generator whose
seed is a pure function of (master seed, index path).  Results therefore do
not depend on evaluation order, worker count, or scheduling.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(master_seed: int, *key: int) -> int:
    """Collapse ``(master_seed, *key)`` into a stable 64-bit seed.

    Uses :class:`numpy.random.SeedSequence` as the mixing function, so equal
    inputs give equal seeds on every platform and the derived streams for
    different keys are statistically independent.
    """
    entropy = [int(master_seed) & _MASK64] + [int(k) & _MASK64 for k in key]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def rng_for(master_seed: int, *key: int) -> np.random.Generator:
    """Generator seeded by :func:`derive_seed` of the same arguments."""
    return np.random.default_rng(derive_seed(master_seed, *key))
