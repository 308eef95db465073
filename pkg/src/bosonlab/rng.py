"""Seeded, stream-addressable random number generation.

Every stochastic operation in the package draws from a Generator built by
``stream(seed, stream_id)``. Identical (seed, stream_id) pairs reproduce
bit-identical draws on any platform; distinct stream_ids give statistically
independent streams, so experiments can key independent work items
(trials, units) by stream without coordinating.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream", "uniform_bigint", "TRIAL_BLOCK"]

# Experiments partition trials into fixed-size blocks, one stream per block,
# so the reduction is deterministic given the trial count alone.
TRIAL_BLOCK = 4096


def stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Return a counter-based Generator for the given (seed, stream_id)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream_id])))


def uniform_bigint(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in [0, bound) for arbitrary-precision ``bound``.

    Draws 32-bit words to cover bound.bit_length() bits and rejects values
    >= bound, so the result is exactly uniform even when bound exceeds 2**63.
    """
    if bound <= 0:
        raise ValueError("bound must be positive")
    if bound == 1:
        return 0
    bits = bound.bit_length()
    words = (bits + 31) // 32
    mask = (1 << bits) - 1
    while True:
        value = 0
        for w in rng.integers(0, 1 << 32, size=words, dtype=np.uint64):
            value = (value << 32) | int(w)
        value &= mask
        if value < bound:
            return value
