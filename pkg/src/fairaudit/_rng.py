"""Deterministic random-stream derivation for bootstrap replicates.

Every replicate gets its own counter-based Philox stream whose 128-bit key
is a hash of ``(seed, tag, replicate)``. Replicate r of a run is therefore a
pure function of the seed and its coordinates: streams never depend on
evaluation order, so replicates can run in any order (or in parallel) and
still reproduce bit-identically.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .validation import check_seed


def derive_key(seed: int, tag: str, replicate: int) -> np.ndarray:
    digest = hashlib.blake2b(
        f"{seed}|{tag}|{replicate}".encode("utf-8"), digest_size=16
    ).digest()
    return np.frombuffer(digest, dtype=np.uint64)


def replicate_generator(seed: int, tag: str, replicate: int) -> np.random.Generator:
    """Independent generator for one bootstrap replicate."""
    seed = check_seed(seed)
    return np.random.Generator(np.random.Philox(key=derive_key(seed, tag, replicate)))


def data_generator(seed: int, tag: str = "data") -> np.random.Generator:
    """Generator for synthetic-data simulation runs."""
    seed = check_seed(seed)
    return np.random.Generator(np.random.Philox(key=derive_key(seed, tag, 0)))
