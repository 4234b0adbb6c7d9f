"""Seeded random streams.

All randomness goes through numpy's Philox counter-based generator keyed by
a :class:`numpy.random.SeedSequence`.  Normal variates come from numpy's
ziggurat sampler.  Sub-streams (per repeat, per deflation level, ...) are
derived by mixing integer keys into the spawn key, so results never depend
on execution order.
"""

import numpy as np

MASK64 = (1 << 64) - 1


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def stream(seed, *key):
    """Return a Philox generator for ``seed`` and an optional integer key path."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed, *key):
    """Deterministically derive a fresh 64-bit seed from ``seed`` and ``key``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
