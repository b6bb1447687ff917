"""Counter-based random streams.

All randomness in the package flows from a single 64-bit seed.  Independent
streams are produced by placing stream indices in the high words of a Philox
counter, so parallel or reordered trials reproduce bit-identically.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Generator for the given seed and stream path (up to 3 indices)."""
    if len(stream) > 3:
        raise ValueError("at most 3 stream indices supported")
    counter = [0, 0, 0, 0]
    for i, s in enumerate(stream):
        counter[i + 1] = int(s) & _MASK64
    bitgen = np.random.Philox(key=int(seed) & _MASK64, counter=counter)
    return np.random.Generator(bitgen)
