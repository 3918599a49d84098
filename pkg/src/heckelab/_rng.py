"""Deterministic counter-based random streams.

Every stochastic routine in the package derives its randomness from
``stream(seed, *path)``: a Philox generator keyed by hashing the seed
together with a structured path (strings and integers naming the consumer
and the attempt/index).  Streams are therefore independent of scheduling
and thread counts, and identical across platforms.
"""

from __future__ import annotations

import hashlib

import numpy as np


def stream(seed: int, *path) -> np.random.Generator:
    """A Generator whose state depends only on (seed, path)."""
    material = repr((int(seed),) + tuple(path)).encode()
    digest = hashlib.sha256(material).digest()
    key = int.from_bytes(digest[:16], "little")
    return np.random.Generator(np.random.Philox(key=key))
