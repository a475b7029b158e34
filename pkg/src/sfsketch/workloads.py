"""Deterministic operation-stream generation and trace-file ingestion.

Synthetic streams draw item ranks from a uniform or Zipf distribution over a
fixed universe of ``distinct_items`` keys, then map rank r to the 64-bit key
finalize64(r) so hashing sees spread-out keys exactly as it would arbitrary
ones. All randomness comes from the spec's seed; the same spec always yields
the same stream.

Deletion modes:

  none           insert-only; the stream is ``total_ops`` inserts
  reverse_order  all inserts, then the same items deleted in exact reverse
                 order (stream length doubles to 2 * total_ops)
  interleaved    ``total_ops`` steps; each step deletes a uniformly chosen
                 currently-positive distinct item with probability
                 ``delete_prob``, otherwise inserts the next draw. Deletions
                 are valid by construction.

Trace files are UTF-8 text: one op per line, ``I,<key>`` or ``D,<key>`` with
the key a decimal unsigned 64-bit integer; blank lines and lines starting
with '#' are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._ops import OP_DELETE, OP_INSERT
from .errors import ConfigurationError, TraceFormatError
from .hashing import finalize64_array

KINDS = ("uniform", "zipf", "trace")
DELETION_MODES = ("none", "reverse_order", "interleaved")


@dataclass(frozen=True)
class Operation:
    op: str  # "insert" or "delete"
    key: int


@dataclass(frozen=True)
class WorkloadSpec:
    kind: str
    distinct_items: int = 0
    total_ops: int = 0
    zipf_skew: float = 0.99
    seed: int = 0
    deletion_mode: str = "none"
    delete_prob: float = 0.0
    trace_path: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown workload kind {self.kind!r}")
        if self.kind == "trace":
            if not self.trace_path:
                raise ConfigurationError("trace workloads need trace_path")
            return
        if self.distinct_items < 1:
            raise ConfigurationError("distinct_items must be >= 1")
        if self.total_ops < 0:
            raise ConfigurationError("total_ops must be >= 0")
        if self.kind == "zipf" and not self.zipf_skew > 0:
            raise ConfigurationError("zipf_skew must be > 0")
        if self.deletion_mode not in DELETION_MODES:
            raise ConfigurationError(f"unknown deletion mode {self.deletion_mode!r}")
        if self.deletion_mode == "interleaved" and not 0.0 <= self.delete_prob < 1.0:
            raise ConfigurationError("interleaved delete_prob must lie in [0, 1)")


class Workload:
    """A fully materialized op stream: parallel op-code and key arrays."""

    def __init__(self, spec, ops, keys, ranks=None):
        self.spec = spec
        self.ops = ops
        self.keys = keys
        self.ranks = ranks  # rank per op for synthetic streams, else None

    def __len__(self):
        return int(self.ops.shape[0])

    def operations(self):
        for op, key in zip(self.ops, self.keys):
            yield Operation("insert" if op == OP_INSERT else "delete", int(key))


def zipf_probabilities(v: int, skew: float) -> np.ndarray:
    """P(rank r), r = 0..v-1, proportional to 1/(r+1)**skew."""
    weights = 1.0 / np.power(np.arange(1, v + 1, dtype=np.float64), skew)
    return weights / weights.sum()


def _draw_ranks(spec: WorkloadSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    if spec.kind == "uniform":
        return rng.integers(0, spec.distinct_items, size=n, dtype=np.int64)
    cdf = np.cumsum(zipf_probabilities(spec.distinct_items, spec.zipf_skew))
    cdf[-1] = 1.0  # guard the float tail so searchsorted stays in range
    return np.searchsorted(cdf, rng.random(n), side="right").astype(np.int64)


def generate(spec: WorkloadSpec) -> Workload:
    """Materialize the stream a spec describes. Deterministic in spec.seed."""
    if spec.kind == "trace":
        ops, keys = load_trace(spec.trace_path)
        return Workload(spec, ops, keys)
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    candidates = _draw_ranks(spec, rng, spec.total_ops)
    if spec.deletion_mode == "none":
        ops = np.zeros(spec.total_ops, dtype=np.uint8)
        ranks = candidates
    elif spec.deletion_mode == "reverse_order":
        ops = np.concatenate(
            [
                np.zeros(spec.total_ops, dtype=np.uint8),
                np.ones(spec.total_ops, dtype=np.uint8),
            ]
        )
        ranks = np.concatenate([candidates, candidates[::-1]])
    else:
        decide = rng.random(spec.total_ops)
        pick = rng.random(spec.total_ops)
        ops, ranks = _kernels.interleave_deletions(
            candidates, decide, pick, spec.delete_prob, spec.distinct_items
        )
    keys = finalize64_array(ranks.astype(np.uint64))
    return Workload(spec, ops, keys, ranks)


def read_trace(path):
    """Stream Operations out of a trace file (constant memory)."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split(",")
            if len(parts) != 2:
                raise TraceFormatError(lineno, f"expected 'OP,key', got {stripped!r}")
            token, key_text = parts[0].strip(), parts[1].strip()
            if token == "I":
                op = "insert"
            elif token == "D":
                op = "delete"
            else:
                raise TraceFormatError(lineno, f"unknown op token {token!r}")
            try:
                key = int(key_text, 10)
            except ValueError:
                raise TraceFormatError(lineno, f"bad key {key_text!r}") from None
            if not 0 <= key <= 0xFFFFFFFFFFFFFFFF:
                raise TraceFormatError(lineno, f"key {key} out of 64-bit range")
            yield Operation(op, key)


def load_trace(path):
    """Read a whole trace into (ops, keys) arrays."""
    ops: list[int] = []
    keys: list[int] = []
    for operation in read_trace(path):
        ops.append(OP_INSERT if operation.op == "insert" else OP_DELETE)
        keys.append(operation.key)
    return np.array(ops, dtype=np.uint8), np.array(keys, dtype=np.uint64)


def stream_length(spec: WorkloadSpec) -> int:
    """Length of the stream generate(spec) will produce.

    reverse_order doubles the configured op count (every insert gets a
    mirror delete); trace workloads are as long as the file says.
    """
    if spec.kind == "trace":
        ops, _ = load_trace(spec.trace_path)
        return int(ops.shape[0])
    if spec.deletion_mode == "reverse_order":
        return 2 * spec.total_ops
    return spec.total_ops


def write_trace(path, operations) -> None:
    """Write Operations in the trace format (LF endings)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for operation in operations:
            token = "I" if operation.op == "insert" else "D"
            fh.write(f"{token},{operation.key}\n")
