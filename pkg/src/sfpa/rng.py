"""Deterministic random streams.

Every random quantity in the package derives from one 64-bit master seed.
Streams are split by a counter-based scheme: the master seed keys a Philox
generator through a SeedSequence whose spawn key encodes the stream path,
so any (seed, path) pair names the same stream on every run and platform.
"""

from __future__ import annotations

import zlib

import numpy as np


def _as_word(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    return zlib.crc32(str(part).encode())


def rng_for(seed: int, *path) -> np.random.Generator:
    """Generator for the stream named by `path` under the master `seed`."""
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF,
                                spawn_key=tuple(_as_word(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))
