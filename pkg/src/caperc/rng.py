"""Seed derivation and counter-based generators.

Every random stream in the package is a Philox4x64 generator keyed by a
64-bit seed.  Seeds for individual streams are derived from a master seed
with :func:`derive_seed`::

    derive_seed(master, trial_index, tag)
        = first 8 bytes (little endian) of
          BLAKE2b(le_u64(master) || le_u64(trial_index) || utf8(tag), digest_size=8,
                  person=b"caperc-v1")

Layer ``i`` of trial ``t`` uses tag ``"layer-<i>"``; black marks use
``"black"``.  Streams with different ``(trial_index, tag)`` are unrelated,
so resampling one layer never disturbs another.
"""
from __future__ import annotations

import hashlib
import struct

import numpy as np

MASK64 = (1 << 64) - 1


def derive_seed(master: int, trial_index: int, stream_tag: str) -> int:
    """Mix ``(master, trial_index, stream_tag)`` into a 64-bit seed."""
    if not 0 <= master <= MASK64:
        raise ValueError(f"master seed must be an unsigned 64-bit integer, got {master}")
    if not 0 <= trial_index <= MASK64:
        raise ValueError(f"trial index must be an unsigned 64-bit integer, got {trial_index}")
    h = hashlib.blake2b(digest_size=8, person=b"caperc-v1")
    h.update(struct.pack("<QQ", master, trial_index))
    h.update(stream_tag.encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


def generator(seed: int) -> np.random.Generator:
    """Philox generator keyed by a 64-bit seed (counter starts at zero)."""
    return np.random.Generator(np.random.Philox(key=seed & MASK64))


def layer_tag(color: int) -> str:
    return f"layer-{color}"


BLACK_TAG = "black"
