"""Benchmark harness: accuracy snapshots against exact counts, and update /
query throughput measurement.

Accuracy runs feed every configured sketch the identical operation stream
(one generation, shared by all), maintain exact per-item counts alongside,
and snapshot ARE and the exactly-correct fraction at each checkpoint. The
per-item relative-error CDF is taken at the last checkpoint where any item
still has a positive count (for a full reverse-order deletion run that is the
insertion peak; otherwise it is the end of the stream).

Speed runs measure a single-writer update pass and read-only query passes at
each configured thread count over the quiesced sketch. Those numbers are
hardware facts, not deterministic outputs; everything else the harness emits
is byte-reproducible for a given seed.
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._ops import OP_DELETE
from .baselines import CmlSketch, CmSketch, CountSketch, CuSketch
from .errors import ConfigurationError
from .metrics import cdf_points
from .params import SketchParams
from .sf import SfSketch, Variant
from .workloads import WorkloadSpec, generate

ACCURACY_HEADER = ("sketch", "phase", "ops_done", "are", "correct_fraction")
CDF_HEADER = ("sketch", "re_threshold", "cdf_fraction")
SPEED_HEADER = ("sketch", "mode", "threads", "ops_per_sec")

SKETCH_KINDS = ("cm", "c", "cu", "cml", "sf1", "sf2", "sf3", "sf4", "sff")


def make_sketch(kind: str, params: SketchParams):
    """Instantiate a sketch by its CLI name."""
    if kind == "cm":
        return CmSketch(params)
    if kind == "c":
        return CountSketch(params)
    if kind == "cu":
        return CuSketch(params)
    if kind == "cml":
        return CmlSketch(params)
    if kind in set(v.value for v in Variant):
        return SfSketch(params, kind)
    raise ConfigurationError(f"unknown sketch kind {kind!r}")


@dataclass(frozen=True)
class BenchConfig:
    sketches: tuple
    params: SketchParams
    workload: WorkloadSpec
    checkpoints: tuple = ()
    threads: tuple = (1,)
    query_ops: int = 1_000_000

    def __post_init__(self):
        if not self.sketches:
            raise ConfigurationError("at least one sketch kind required")
        for kind in self.sketches:
            if kind not in SKETCH_KINDS and kind != "oracle":
                raise ConfigurationError(f"unknown sketch kind {kind!r}")
        cps = tuple(int(c) for c in self.checkpoints)
        if any(c < 1 for c in cps):
            raise ConfigurationError("checkpoints must be positive op counts")
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise ConfigurationError("checkpoints must be strictly increasing")
        object.__setattr__(self, "checkpoints", cps)
        thr = tuple(int(t) for t in self.threads)
        if not thr or any(t < 1 for t in thr):
            raise ConfigurationError("thread counts must be >= 1")
        object.__setattr__(self, "threads", thr)
        if self.query_ops < 1:
            raise ConfigurationError("query_ops must be >= 1")


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return f"{x:.10g}"
    return str(x)


def write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def run_accuracy(config: BenchConfig):
    """Returns (accuracy_rows, cdf_rows) matching the CSV schemas."""
    workload = generate(config.workload)
    ops, keys = workload.ops, workload.keys
    n = len(workload)
    if n == 0:
        raise ConfigurationError("empty workload; nothing to measure")
    checkpoints = config.checkpoints or (n,)
    if checkpoints[-1] > n:
        raise ConfigurationError(
            f"checkpoint {checkpoints[-1]} beyond stream length {n}"
        )
    ukeys, inverse = np.unique(keys, return_inverse=True)
    delete_positions = np.flatnonzero(ops == OP_DELETE)
    first_delete = int(delete_positions[0]) if delete_positions.size else n

    rows = []
    cdf_rows = []
    for kind in config.sketches:
        sketch = None if kind == "oracle" else make_sketch(kind, config.params)
        counts = np.zeros(ukeys.shape[0], dtype=np.int64)
        last_positive = None
        prev = 0
        for cp in checkpoints:
            seg = slice(prev, cp)
            if sketch is not None:
                sketch.apply_ops(ops[seg], keys[seg])
            seg_inv = inverse[seg]
            seg_del = ops[seg] == OP_DELETE
            counts += np.bincount(seg_inv[~seg_del], minlength=counts.shape[0])
            counts -= np.bincount(seg_inv[seg_del], minlength=counts.shape[0])
            positive = counts > 0
            if positive.any():
                true = counts[positive]
                est = true if sketch is None else sketch.query_many(ukeys[positive])
                rel = np.abs(est - true) / true
                are = float(rel.mean())
                correct = float((rel == 0).mean())
                last_positive = rel
            else:
                are = math.nan
                correct = math.nan
            phase = "insert" if cp <= first_delete else "delete"
            rows.append((kind, phase, cp, are, correct))
            prev = cp
        if last_positive is not None:
            for thr, frac in cdf_points(last_positive):
                cdf_rows.append((kind, thr, frac))
    return rows, cdf_rows


def _timed_queries(sketch, query_keys, n_threads: int) -> float:
    chunks = np.array_split(query_keys, n_threads)
    sketch.query_many(query_keys[:16])  # warm the compiled path
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        start = time.perf_counter()
        futures = [pool.submit(sketch.query_many, chunk) for chunk in chunks]
        for fut in futures:
            fut.result()
        elapsed = time.perf_counter() - start
    return query_keys.shape[0] / elapsed


def run_speed(config: BenchConfig):
    """Returns speed rows matching the CSV schema."""
    for kind in config.sketches:
        if kind == "oracle":
            raise ConfigurationError("the exact oracle is not a speed-bench subject")
    workload = generate(config.workload)
    ops, keys = workload.ops, workload.keys
    n = len(workload)
    if n == 0:
        raise ConfigurationError("zero-op run; nothing to measure")
    ukeys = np.unique(keys)
    rng = np.random.Generator(np.random.PCG64(config.workload.seed))
    query_keys = ukeys[rng.integers(0, ukeys.shape[0], size=config.query_ops)]
    rows = []
    for kind in config.sketches:
        sketch = make_sketch(kind, config.params)
        sketch.apply_ops(ops[:1], keys[:1])  # warm the compiled path
        start = time.perf_counter()
        sketch.apply_ops(ops[1:], keys[1:])
        elapsed = time.perf_counter() - start
        rows.append((kind, "update", 1, (n - 1) / elapsed))
        for n_threads in config.threads:
            rows.append(
                (kind, "query", n_threads, _timed_queries(sketch, query_keys, n_threads))
            )
    return rows
