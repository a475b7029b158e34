"""Seeded 64-bit hashing shared by every sketch.

Bucket placement everywhere in this package flows through one primitive: a
splitmix-style avalanche finalizer applied to ``item ^ seed``. The constants
are normative for the export format — a collector that receives only the
master seed must recompute byte-identical bucket choices — so there is no
pluggable hash interface.

Array ``i`` of a d-array sketch hashes with ``per_array_seeds[i]``. Slot
hashes (the within-bucket position used by the bucketed fat layouts) and the
flat fat arrays draw from the same derivation at stream indices ``d..2d-1``,
which keeps them decorrelated from the bucket hashes without introducing a
second mechanism. Everything is 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
SIGN_SALT = 0xA5A5A5A5A5A5A5A5
_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def finalize64(x: int) -> int:
    """Avalanche a 64-bit value (splitmix64 finalizer).

    Bijective on the 64-bit domain, so distinct inputs never collide before
    the modulus is applied.
    """
    x &= MASK64
    x ^= x >> 30
    x = (x * _C1) & MASK64
    x ^= x >> 27
    x = (x * _C2) & MASK64
    x ^= x >> 31
    return x


def finalize64_array(values) -> np.ndarray:
    """Vectorized :func:`finalize64` over a uint64 array."""
    x = np.asarray(values).astype(np.uint64, copy=True)
    x ^= x >> np.uint64(30)
    x *= np.uint64(_C1)
    x ^= x >> np.uint64(27)
    x *= np.uint64(_C2)
    x ^= x >> np.uint64(31)
    return x


def seed_for_index(master_seed: int, index: int) -> int:
    """Seed at position ``index`` (0-based) of the derivation stream."""
    return finalize64((master_seed + (index + 1) * GOLDEN) & MASK64)


@dataclass(frozen=True)
class HashFamily:
    """Per-array seeds derived deterministically from one master seed."""

    master_seed: int
    per_array_seeds: tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.per_array_seeds)


def derive_seeds(master_seed: int, d: int) -> HashFamily:
    """Build the hash family for a d-array sketch.

    ``per_array_seeds[i] = finalize64(master_seed + (i+1) * GOLDEN)``; the
    family is a pure function of ``(master_seed, d)``.
    """
    if d < 1:
        raise ConfigurationError(f"array count must be >= 1, got {d}")
    seeds = tuple(seed_for_index(master_seed, i) for i in range(d))
    return HashFamily(master_seed & MASK64, seeds)


def bucket_hash(family: HashFamily, i: int, item: int, range_: int) -> int:
    """Bucket of ``item`` in array ``i``: ``finalize64(item ^ seed_i) % range``."""
    if range_ < 1:
        raise ConfigurationError(f"hash range must be >= 1, got {range_}")
    return finalize64((item & MASK64) ^ family.per_array_seeds[i]) % range_


def slot_hash(family: HashFamily, i: int, item: int, z: int) -> int:
    """Within-bucket slot of ``item`` in array ``i``.

    Uses seed index ``d + i`` of the extended derivation stream so that slot
    choices are independent of bucket choices.
    """
    if z < 1:
        raise ConfigurationError(f"slot count must be >= 1, got {z}")
    seed = seed_for_index(family.master_seed, family.d + i)
    return finalize64((item & MASK64) ^ seed) % z


def sign_hash(family: HashFamily, i: int, item: int) -> int:
    """+1 or -1 with (near) equal probability, per array."""
    h = finalize64((item & MASK64) ^ family.per_array_seeds[i] ^ SIGN_SALT)
    return 1 if h & 1 == 0 else -1


def fold_to_slim(g: int, w: int) -> int:
    """Collapse a wide fat index onto the slim width: ``g % w``.

    The classical 1-based statement of this map, ``((g - 1) % w) + 1``, is
    the same function shifted by one.
    """
    if w < 1:
        raise ConfigurationError(f"slim width must be >= 1, got {w}")
    return g % w


def key_from_string(s: str) -> int:
    """Map a string key into the 64-bit key domain (FNV-1a, then finalize64)."""
    h = _FNV_OFFSET
    for b in s.encode("utf-8"):
        h = ((h ^ b) * _FNV_PRIME) & MASK64
    return finalize64(h)


def seed_array(master_seed: int, start: int, count: int) -> np.ndarray:
    """A contiguous block of derived seeds as uint64, for kernel consumption."""
    return np.array(
        [seed_for_index(master_seed, start + i) for i in range(count)],
        dtype=np.uint64,
    )
