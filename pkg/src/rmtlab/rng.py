"""Counter-based random streams.

One master seed expands into arbitrarily many disjoint substreams keyed by
a stream id.  Philox is counter-based, so stream (seed, id) is the same
bit sequence no matter how many other streams exist or which worker draws
it; that is what makes parallel Monte Carlo reproducible here.
"""
import os

import numpy as np

_MASK = (1 << 64) - 1


def stream(master_seed: int, stream_id: int) -> np.random.Generator:
    """Independent generator for (master_seed, stream_id)."""
    key = np.array([master_seed & _MASK, stream_id & _MASK], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def default_seed() -> int:
    """Master seed fallback: RMT_SEED environment variable, else 0."""
    return int(os.environ.get("RMT_SEED", "0"))
