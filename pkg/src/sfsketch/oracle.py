"""Exact ground-truth frequency accounting.

Every accuracy metric and property test in the package compares sketches
against one of the two implementations here: a map that replays ops one by
one (and polices phantom deletions exactly like the sketches do), and a
sort-based tally that computes final counts in one vectorized pass. The two
agreeing on fuzz traces is itself a test.
"""

from __future__ import annotations

import numpy as np

from ._ops import OP_DELETE, OP_INSERT, normalize_stream
from .errors import PhantomDeletionError
from .hashing import MASK64


class ExactOracle:
    """Signed map-based multiset counter; the definitional ground truth."""

    def __init__(self):
        self.counts: dict[int, int] = {}
        self.total_ops = 0

    def insert(self, key: int) -> None:
        key = int(key) & MASK64
        self.counts[key] = self.counts.get(key, 0) + 1
        self.total_ops += 1

    def delete(self, key: int) -> None:
        key = int(key) & MASK64
        current = self.counts.get(key, 0)
        if current <= 0:
            raise PhantomDeletionError(f"key {key} has no remaining count")
        self.counts[key] = current - 1
        self.total_ops += 1

    def query(self, key: int) -> int:
        return self.counts.get(int(key) & MASK64, 0)

    def apply_ops(self, ops, keys) -> None:
        ops, keys = normalize_stream(ops, keys)
        for op, key in zip(ops, keys):
            if op == OP_INSERT:
                self.insert(int(key))
            else:
                self.delete(int(key))

    def distinct_items(self) -> list[tuple[int, int]]:
        """(key, frequency) for every positive-count key, ascending by key."""
        return sorted((k, c) for k, c in self.counts.items() if c > 0)


def tally_counts(ops, keys) -> dict[int, int]:
    """One-pass sort-based tally of final counts.

    Independent of :class:`ExactOracle`; assumes the stream is valid (it does
    not police deletion order, only net counts).
    """
    ops, keys = normalize_stream(ops, keys)
    if keys.shape[0] == 0:
        return {}
    ukeys, inv = np.unique(keys, return_inverse=True)
    deltas = np.where(ops == OP_DELETE, -1, 1)
    sums = np.bincount(inv, weights=deltas, minlength=ukeys.shape[0]).astype(np.int64)
    return {int(k): int(c) for k, c in zip(ukeys, sums)}
