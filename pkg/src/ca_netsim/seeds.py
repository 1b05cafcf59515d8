"""Labeled sub-seed derivation for independent, order-free RNG streams.

Every random quantity in a run is drawn from a stream keyed by
(master seed, purpose label, entity indices). Streams never depend on
evaluation order, so adding carriers or reordering work cannot perturb
UE placement, shadowing, or fading of unrelated entities.
"""
from __future__ import annotations

import zlib

import numpy as np


def sub_seed(master_seed: int, purpose: str, *indices: int) -> np.random.SeedSequence:
    """Derive a SeedSequence from (master seed, purpose label, indices)."""
    master = int(master_seed)
    if master < 0:
        raise ValueError("master seed must be a non-negative integer")
    entropy = [master, zlib.crc32(purpose.encode("utf-8"))]
    for idx in indices:
        i = int(idx)
        if i < 0:
            raise ValueError("seed indices must be non-negative")
        entropy.append(i)
    return np.random.SeedSequence(entropy)


def rng_for(master_seed: int, purpose: str, *indices: int) -> np.random.Generator:
    """Generator bound to the (master seed, purpose, indices) stream."""
    return np.random.default_rng(sub_seed(master_seed, purpose, *indices))
