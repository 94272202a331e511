"""Counter-based seed derivation: one experiment seed fans out to every consumer."""

from __future__ import annotations

import zlib

import numpy as np

SeedKey = int | str


def _key_to_int(key: SeedKey) -> int:
    if isinstance(key, bool):
        raise TypeError("seed keys must be int or str")
    if isinstance(key, int):
        if key < 0:
            raise ValueError(f"seed keys must be non-negative: {key}")
        return key
    return zlib.crc32(key.encode("utf-8"))


def derive_seed(base: int, *keys: SeedKey) -> int:
    sequence = np.random.SeedSequence(entropy=int(base), spawn_key=tuple(_key_to_int(key) for key in keys))
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def make_rng(base: int, *keys: SeedKey) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=int(base), spawn_key=tuple(_key_to_int(key) for key in keys)))


__all__ = ["derive_seed", "make_rng", "SeedKey"]
