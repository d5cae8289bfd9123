"""Seed-derived random streams.

Every sampling call path in the package draws from a generator derived from
(master seed, *path), where path components name the color index, round or
iteration index, and retry attempt.  Two runs with the same master seed and
the same call structure therefore consume identical randomness.
"""

from __future__ import annotations

import zlib

import numpy as np


def _component(c: int | str) -> int:
    if isinstance(c, str):
        return zlib.crc32(c.encode("utf-8"))
    if c < 0:
        raise ValueError(f"stream path components must be non-negative, got {c}")
    return int(c)


def stream(master_seed: int, *path: int | str) -> np.random.Generator:
    """Return a PCG64 generator for the (master_seed, *path) stream."""
    key = tuple(_component(c) for c in path)
    seq = np.random.SeedSequence(int(master_seed), spawn_key=key)
    return np.random.Generator(np.random.PCG64(seq))
