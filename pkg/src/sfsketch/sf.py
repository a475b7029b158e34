"""The slim-fat sketch family.

A slim-fat sketch runs two counter structures side by side. The fat side is a
plain counter sketch — flat d x w' arrays, or d x w buckets of z counters —
that absorbs every insert. The slim side is a small d x w matrix that answers
every query. A slim counter only grows when two conditions hold at once: it
is a minimum among the item's d slim counters, and it sits below the fat
side's fresh estimate of the item (the minimum over the d fat counters just
incremented). That gate keeps slim counters tracking the largest item mapped
onto them instead of accumulating every collision, which is where the
accuracy win over a same-size count-min sketch comes from.

Variant map::

  SF1   flat fat of width w'; no deletion support
  SF2   flat fat plus a deletion subsketch (a count-min twin of the slim)
        bounding slim counters from above, enabling deletion
  SF3   flat fat of width z*w whose index folds onto the slim width (mod w);
        deletion compares the slim counter to the sum of its z associated
        fat counters
  SF4   bucketed fat (z counters per slim bucket); deletion decrements the
        slim counter when it exceeds the bucket sum
  SFF   bucketed fat; deletion clamps the slim counter to the bucket max

Queries read only the slim side, which is also the only part the export
format ships. Updates need exclusive access; queries on a quiesced sketch are
safe from any number of threads.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from . import _kernels
from ._ops import (
    OP_DELETE,
    OP_INSERT,
    normalize_keys,
    normalize_stream,
    raise_for_status,
    single_op,
)
from .errors import ConfigurationError, UnsupportedOperationError
from .hashing import MASK64, seed_array
from .params import SketchParams


class Variant(str, Enum):
    SF1 = "sf1"
    SF2 = "sf2"
    SF3 = "sf3"
    SF4 = "sf4"
    SFF = "sff"


_FLAT_VARIANT_CODE = {Variant.SF1: 1, Variant.SF2: 2, Variant.SF3: 3}

# never written to; placeholder so the kernel signature stays uniform
_NO_DSUB = np.zeros((1, 1), dtype=np.uint32)


class SlimSubsketch:
    """The query-facing d x w counter matrix, plus the per-array increment
    tallies that make the per-insert update rate measurable."""

    __slots__ = ("counters", "increment_counts", "insertions_seen")

    def __init__(self, d: int, w: int):
        self.counters = np.zeros((d, w), dtype=np.uint32)
        self.increment_counts = np.zeros(d, dtype=np.int64)
        self.insertions_seen = 0


class FatSubsketchFlat:
    """d x w' unsigned counters; structurally a count-min sketch."""

    __slots__ = ("counters",)

    def __init__(self, counters: np.ndarray):
        self.counters = counters


class FatSubsketchBucketed:
    """d x w x z unsigned counters; summing each bucket collapses it to a
    count-min state for the same stream."""

    __slots__ = ("counters",)

    def __init__(self, counters: np.ndarray):
        self.counters = counters


class DeletionSubsketch:
    """d x w unsigned counters sharing the slim's bucket hashes; every insert
    raises them, so they bound the slim counters from above."""

    __slots__ = ("counters",)

    def __init__(self, counters: np.ndarray):
        self.counters = counters


class SfSketch:
    """One of the five slim-fat variants over a shared interface."""

    supports_deletion = True  # except SF1, which raises

    def __init__(self, params: SketchParams, variant):
        self.variant = Variant(variant)
        self.params = params
        d, w, z = params.d, params.w, params.z
        self.slim = SlimSubsketch(d, w)
        self._slim_seeds = seed_array(params.master_seed, 0, d)
        self._ext_seeds = seed_array(params.master_seed, d, d)
        self.deletion_sub = None
        if self.variant in (Variant.SF1, Variant.SF2):
            self.fat = FatSubsketchFlat(np.zeros((d, params.w_prime), dtype=np.uint32))
            self._fat_seeds = self._ext_seeds
            if self.variant is Variant.SF2:
                self.deletion_sub = DeletionSubsketch(np.zeros((d, w), dtype=np.uint32))
        elif self.variant is Variant.SF3:
            if params.w_prime != z * w:
                raise ConfigurationError(
                    f"the fold variant needs w_prime == z*w, got w_prime={params.w_prime}, z*w={z * w}"
                )
            # the fold shares the slim's seeds: slim index = fat index mod w
            self.fat = FatSubsketchFlat(np.zeros((d, z * w), dtype=np.uint32))
            self._fat_seeds = self._slim_seeds
        else:
            self.fat = FatSubsketchBucketed(np.zeros((d, w, z), dtype=np.uint32))
            self._fat_seeds = self._ext_seeds
        self._used_normal = False
        self._used_oracle = False

    @property
    def kind(self) -> str:
        return self.variant.value

    def insert(self, key: int) -> None:
        self.apply_ops(*single_op(OP_INSERT, key))

    def delete(self, key: int) -> None:
        if self.variant is Variant.SF1:
            raise UnsupportedOperationError("this variant has no deletion path")
        self.apply_ops(*single_op(OP_DELETE, key))

    def apply_ops(self, ops, keys) -> None:
        if self._used_oracle:
            raise UnsupportedOperationError(
                "sketch already ran in oracle-assisted mode; regular updates would break it"
            )
        ops, keys = normalize_stream(ops, keys)
        if ops.shape[0]:
            self._used_normal = True
        slim = self.slim
        if self.variant in _FLAT_VARIANT_CODE:
            dsub = self.deletion_sub.counters if self.deletion_sub is not None else _NO_DSUB
            status, bad, n_ins = _kernels.sf_flat_apply(
                slim.counters,
                self.fat.counters,
                dsub,
                self._slim_seeds,
                self._fat_seeds,
                _FLAT_VARIANT_CODE[self.variant],
                ops,
                keys,
                slim.increment_counts,
            )
        else:
            mode = 0 if self.variant is Variant.SF4 else 1
            status, bad, n_ins = _kernels.sf_bucket_apply(
                slim.counters,
                self.fat.counters,
                self._slim_seeds,
                self._fat_seeds,
                mode,
                ops,
                keys,
                slim.increment_counts,
            )
        slim.insertions_seen += n_ins
        raise_for_status(status, bad, keys)

    def query(self, key: int) -> int:
        return int(self.query_many([int(key) & MASK64])[0])

    def query_many(self, keys) -> np.ndarray:
        keys = normalize_keys(keys)
        out = np.empty(keys.shape[0], dtype=np.int64)
        _kernels.min_query(self.slim.counters, self._slim_seeds, keys, out)
        return out

    def oracle_assisted_insert(self, key: int, true_freq: int) -> None:
        """Single-op form of :meth:`oracle_assisted_apply`."""
        self.oracle_assisted_apply(
            np.array([int(key) & MASK64], dtype=np.uint64),
            np.array([true_freq], dtype=np.int64),
        )

    def oracle_assisted_apply(self, keys, true_counts) -> None:
        """Insert-only slim updates with the fat observation replaced by the
        exact post-insert count of each key.

        Test instrumentation: this isolates how the slim side behaves under a
        perfect fat (every slim counter then tracks the max frequency of the
        items mapped onto it exactly). It bypasses the fat side entirely, so
        a sketch that has seen normal updates refuses it, and vice versa.
        """
        if self._used_normal:
            raise UnsupportedOperationError(
                "sketch already saw normal updates; oracle-assisted inserts would break it"
            )
        keys = normalize_keys(keys)
        true_counts = np.ascontiguousarray(true_counts, dtype=np.int64)
        if true_counts.shape != keys.shape:
            raise ConfigurationError("true_counts must match keys in length")
        if keys.shape[0]:
            self._used_oracle = True
        status, bad, n_ins = _kernels.oracle_slim_apply(
            self.slim.counters,
            self._slim_seeds,
            keys,
            true_counts,
            self.slim.increment_counts,
        )
        self.slim.insertions_seen += n_ins
        raise_for_status(status, bad, keys)

    def export_slim(self) -> bytes:
        """Serialize the slim side in the collector wire format."""
        from .serialize import export_slim

        return export_slim(self)

    def check_invariants(self) -> None:
        """Assert the variant's structural invariants over the whole state.

        Diagnostic helper for tests; raises AssertionError on violation.
        """
        a = self.slim.counters
        if self.variant is Variant.SFF:
            bucket_max = self.fat.counters.max(axis=2)
            assert (a <= bucket_max).all(), "slim counter exceeds its fat bucket max"
        elif self.variant is Variant.SF4:
            bucket_sum = self.fat.counters.sum(axis=2, dtype=np.uint64)
            assert (a <= bucket_sum).all(), "slim counter exceeds its fat bucket sum"
        elif self.variant is Variant.SF3:
            d, w, z = self.params.d, self.params.w, self.params.z
            assoc_sum = self.fat.counters.reshape(d, z, w).sum(axis=1, dtype=np.uint64)
            assert (a <= assoc_sum).all(), "slim counter exceeds its associated fat sum"
        elif self.variant is Variant.SF2:
            assert (a <= self.deletion_sub.counters).all(), (
                "slim counter exceeds its deletion-subsketch bound"
            )
        # SF1 has no whole-matrix dominance invariant; its guarantees are
        # stream-relative (no under-estimation, count-min dominance).
