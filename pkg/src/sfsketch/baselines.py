"""The linear- and log-counter baseline sketches.

Four classics with one calling convention. ``apply_ops(ops, keys)`` replays a
batch of operations (op code 0 = insert, 1 = delete) through a compiled
kernel; the single-item ``insert``/``delete``/``query`` methods are one-op
batches of the same thing, so each update rule has exactly one
implementation. A batch aborts at the first failing op: earlier ops stay
applied, the failing op is validated before any of its counters move.

Updates need exclusive access. Once updates quiesce, ``query_many`` is
read-only and safe from any number of threads (the kernels release the GIL).

Estimator summary:

=========  =======================  ==============================
sketch     update                   query
=========  =======================  ==============================
CmSketch   +1 to one counter/array  min over the d counters
CuSketch   +1 to the minimal ones   min (never under-estimates;
                                    tighter than CM, no deletion)
CountSketch signed +-1 per array    median of signed reads, >= 0
CmlSketch  log-counter coin flip    decoded min exponent
=========  =======================  ==============================
"""

from __future__ import annotations

import math

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


class CmSketch:
    """Count-min: d arrays of w unsigned counters.

    Insert bumps one hashed counter per array; query returns the minimum
    across arrays. On matched insert/delete streams the estimate never falls
    below the true frequency — collisions only ever inflate it. Expected
    over-estimate is about N*(v-1)/w per colliding item, which is why the
    slim-fat variants exist.
    """

    kind = "cm"
    supports_deletion = True

    def __init__(self, params: SketchParams):
        self.params = params
        self.counters = np.zeros((params.d, params.w), dtype=np.uint32)
        self._seeds = seed_array(params.master_seed, 0, params.d)
        self.increment_counts = np.zeros(params.d, dtype=np.int64)
        self.insertions_seen = 0

    def insert(self, key: int) -> None:
        self.apply_ops(*single_op(OP_INSERT, key))

    def delete(self, key: int) -> None:
        self.apply_ops(*single_op(OP_DELETE, key))

    def apply_ops(self, ops, keys) -> None:
        ops, keys = normalize_stream(ops, keys)
        status, bad, n_ins = _kernels.cm_apply(
            self.counters, self._seeds, ops, keys, self.increment_counts
        )
        self.insertions_seen += n_ins
        raise_for_status(status, bad, keys)

    def query(self, key: int) -> int:
        return int(self.query_many([int(key) & MASK64])[0])

    def query_many(self, keys) -> np.ndarray:
        keys = normalize_keys(keys)
        out = np.empty(keys.shape[0], dtype=np.int64)
        _kernels.min_query(self.counters, self._seeds, keys, out)
        return out


class CountSketch:
    """Signed-median sketch: d arrays of w signed counters.

    Each array adds a per-array random sign on insert and subtracts it on
    delete, so collisions cancel in expectation and the error is two-sided.
    Query takes the median of the sign-corrected reads, clamped at zero; for
    even d the median is the mean of the two central values, rounded half
    away from zero.
    """

    kind = "c"
    supports_deletion = True

    def __init__(self, params: SketchParams):
        self.params = params
        self.counters = np.zeros((params.d, params.w), dtype=np.int32)
        self._seeds = seed_array(params.master_seed, 0, params.d)
        self.insertions_seen = 0

    def insert(self, key: int) -> None:
        self.apply_ops(*single_op(OP_INSERT, key))

    def delete(self, key: int) -> None:
        self.apply_ops(*single_op(OP_DELETE, key))

    def apply_ops(self, ops, keys) -> None:
        ops, keys = normalize_stream(ops, keys)
        status, bad, n_ins = _kernels.count_apply(self.counters, self._seeds, ops, keys)
        self.insertions_seen += n_ins
        raise_for_status(status, bad, keys)

    def query(self, key: int) -> int:
        return int(self.query_many([int(key) & MASK64])[0])

    def query_many(self, keys) -> np.ndarray:
        keys = normalize_keys(keys)
        out = np.empty(keys.shape[0], dtype=np.int64)
        _kernels.count_query(self.counters, self._seeds, keys, out)
        return out


class CuSketch:
    """Conservative update: like count-min, but an insert increments only the
    hashed counters that equal the current minimum. Estimates stay pointwise
    at or below count-min's while never under-estimating. The update is not
    reversible, so deletion is unsupported.
    """

    kind = "cu"
    supports_deletion = False

    def __init__(self, params: SketchParams):
        self.params = params
        self.counters = np.zeros((params.d, params.w), dtype=np.uint32)
        self._seeds = seed_array(params.master_seed, 0, params.d)
        self.increment_counts = np.zeros(params.d, dtype=np.int64)
        self.insertions_seen = 0

    def insert(self, key: int) -> None:
        self.apply_ops(*single_op(OP_INSERT, key))

    def delete(self, key: int) -> None:
        raise UnsupportedOperationError(
            "conservative update cannot be reversed; deletion is unsupported"
        )

    def apply_ops(self, ops, keys) -> None:
        ops, keys = normalize_stream(ops, keys)
        status, bad, n_ins = _kernels.cu_apply(
            self.counters, self._seeds, ops, keys, self.increment_counts
        )
        self.insertions_seen += n_ins
        raise_for_status(status, bad, keys)

    def query(self, key: int) -> int:
        return int(self.query_many([int(key) & MASK64])[0])

    def query_many(self, keys) -> np.ndarray:
        keys = normalize_keys(keys)
        out = np.empty(keys.shape[0], dtype=np.int64)
        _kernels.min_query(self.counters, self._seeds, keys, out)
        return out


def cml_value(exponent, base: float):
    """Point value of a log counter: (base**c - 1) / (base - 1), rounded to
    the nearest integer (ties away from zero). value(0) = 0, value(1) = 1."""
    c = np.asarray(exponent, dtype=np.float64)
    vals = np.expm1(c * math.log(base)) / (base - 1.0)
    return np.floor(vals + 0.5).astype(np.int64)


class CmlSketch:
    """Log-counter sketch: d arrays of w small exponents.

    An insert reads the minimum exponent c among its hashed cells and, with
    probability base**-c, increments every hashed cell still at c. The decoded
    value (base**c - 1)/(base - 1) is an unbiased estimate of the insert
    count, trading per-item accuracy for counter width. No deletion path
    exists; exponents never decrease.

    The coin flips are deterministic: insert number n (0-based, across the
    sketch's lifetime) draws u = finalize64(rng_seed + (n+1) * GOLDEN),
    scaled to [0, 1) from its top 53 bits. ``rng_seed`` defaults to the
    hash family's master seed.
    """

    kind = "cml"
    supports_deletion = False
    DEFAULT_BASE = 1.08

    def __init__(self, params: SketchParams, base: float = DEFAULT_BASE, rng_seed=None):
        if not base > 1.0:
            raise ConfigurationError(f"base must be > 1, got {base}")
        self.params = params
        self.base = float(base)
        self.rng_seed = params.master_seed if rng_seed is None else int(rng_seed) & MASK64
        self.exponents = np.zeros((params.d, params.w), dtype=np.uint16)
        self._seeds = seed_array(params.master_seed, 0, params.d)
        self.insertions_seen = 0

    def insert(self, key: int) -> None:
        self.apply_ops(*single_op(OP_INSERT, key))

    def delete(self, key: int) -> None:
        raise UnsupportedOperationError(
            "log counters cannot be decremented; deletion is unsupported"
        )

    def apply_ops(self, ops, keys) -> None:
        ops, keys = normalize_stream(ops, keys)
        status, bad, n_ins = _kernels.cml_apply(
            self.exponents,
            self._seeds,
            ops,
            keys,
            np.float64(self.base),
            np.uint64(self.rng_seed),
            self.insertions_seen,
        )
        self.insertions_seen += n_ins
        raise_for_status(status, bad, keys)

    def query(self, key: int) -> int:
        return int(self.query_many([int(key) & MASK64])[0])

    def query_many(self, keys) -> np.ndarray:
        keys = normalize_keys(keys)
        exps = np.empty(keys.shape[0], dtype=np.int64)
        _kernels.cml_min_exp(self.exponents, self._seeds, keys, exps)
        return cml_value(exps, self.base)
