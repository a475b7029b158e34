"""Built-in property checks runnable from the CLI.

Each check rebuilds small sketches from scratch, drives them with generated
streams, and verifies an invariant that should hold on any machine. A failure
here means the installation is miscompiled or the code is broken, not that a
workload was unlucky: the checks use fixed seeds and properties that hold
deterministically (or with margins far beyond seed noise).

The ``corrupt_clamp`` flag exists so the harness itself can be validated: it
disables the slim clamp on deletion inside the dominance fuzz, which must make
that check fail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._ops import OP_INSERT
from .baselines import CmSketch
from .hashing import seed_array
from .metrics import correct_rate_bound
from .oracle import tally_counts
from .params import SketchParams
from .serialize import export_slim, import_slim
from .sf import SfSketch, Variant
from .workloads import WorkloadSpec, generate


@dataclass(frozen=True)
class Result:
    name: str
    passed: bool
    detail: str


def _check_slim_dominance(seed: int, corrupt_clamp: bool) -> Result:
    """Every slim counter stays <= the max of its fat bucket, after every op."""
    d, w, z = 3, 8, 4
    spec = WorkloadSpec(
        kind="uniform",
        distinct_items=50,
        total_ops=5_000,
        seed=seed,
        deletion_mode="interleaved",
        delete_prob=0.3,
    )
    wl = generate(spec)
    slim = np.zeros((d, w), dtype=np.uint32)
    fat = np.zeros((d, w, z), dtype=np.uint32)
    bucket_seeds = seed_array(seed, 0, d)
    slot_seeds = seed_array(seed, d, d)
    status, op_index = _kernels.sff_fuzz_invariant(
        slim, fat, bucket_seeds, slot_seeds, wl.ops, wl.keys, corrupt_clamp
    )
    if status == _kernels.OK:
        return Result("slim-dominance", True, f"{len(wl)} ops, invariant held")
    return Result(
        "slim-dominance", False, f"violated after op {op_index} of {len(wl)}"
    )


def _check_no_underestimate(seed: int) -> Result:
    """Min-style estimates never fall below the exact count."""
    params = SketchParams(d=3, w=64, z=3, master_seed=seed)
    spec = WorkloadSpec(
        kind="zipf",
        distinct_items=500,
        total_ops=20_000,
        seed=seed,
        deletion_mode="interleaved",
        delete_prob=0.25,
    )
    wl = generate(spec)
    counts = tally_counts(wl.ops, wl.keys)
    items = np.array(sorted(k for k, v in counts.items() if v > 0), dtype=np.uint64)
    true = np.array([counts[int(k)] for k in items], dtype=np.int64)
    worst = None
    for kind in ("cm", "sf2", "sf3", "sf4", "sff"):
        sketch = CmSketch(params) if kind == "cm" else SfSketch(params, kind)
        sketch.apply_ops(wl.ops, wl.keys)
        est = sketch.query_many(items)
        under = int((est < true).sum())
        if under:
            worst = (kind, under)
            break
    if worst is None:
        return Result(
            "no-underestimate", True, f"{items.shape[0]} items, 5 sketches"
        )
    return Result(
        "no-underestimate", False, f"{worst[0]} under-estimated {worst[1]} items"
    )


def _check_correct_rate(seed: int) -> Result:
    """Exactly-correct fraction under a perfect fat side is no worse than the
    analytic bound minus 2% (the slack absorbs the independence assumption)."""
    v, d, w = 2_000, 4, 1_024
    params = SketchParams(d=d, w=w, master_seed=seed)
    spec = WorkloadSpec(kind="uniform", distinct_items=v, total_ops=40_000, seed=seed)
    wl = generate(spec)
    counts = tally_counts(wl.ops, wl.keys)
    items = np.array(sorted(counts), dtype=np.uint64)
    true = np.array([counts[int(k)] for k in items], dtype=np.int64)
    sketch = SfSketch(params, "sff")
    sketch.oracle_assisted_apply(wl.keys, _kernels.running_occurrences(wl.ranks, v))
    est = sketch.query_many(items)
    observed = float((est == true).mean())
    bound = correct_rate_bound(items.shape[0], w, d)
    if observed >= bound - 0.02:
        return Result(
            "correct-rate-bound", True, f"observed {observed:.4f} vs bound {bound:.4f}"
        )
    return Result(
        "correct-rate-bound", False, f"observed {observed:.4f} < bound {bound:.4f} - 0.02"
    )


def _check_export_roundtrip(seed: int) -> Result:
    """Slim export parses back byte-identical and answers queries identically."""
    params = SketchParams(d=3, w=16, z=2, master_seed=seed)
    spec = WorkloadSpec(kind="uniform", distinct_items=100, total_ops=2_000, seed=seed)
    wl = generate(spec)
    probe = np.unique(wl.keys)
    for variant in Variant:
        sketch = SfSketch(params, variant)
        insert_only = wl.ops.copy()
        insert_only[:] = OP_INSERT
        sketch.apply_ops(insert_only, wl.keys)
        blob = export_slim(sketch)
        collector = import_slim(blob)
        if collector.export() != blob:
            return Result("export-roundtrip", False, f"{variant.value}: bytes differ")
        if not np.array_equal(collector.query_many(probe), sketch.query_many(probe)):
            return Result("export-roundtrip", False, f"{variant.value}: answers differ")
    return Result("export-roundtrip", True, "5 variants, bytes and answers match")


def _check_clamp_trigger(seed: int) -> Result:
    """Clamp-on-delete and changed-max-trigger deletion stay in lockstep."""
    d, w, z = 3, 8, 4
    spec = WorkloadSpec(
        kind="uniform",
        distinct_items=50,
        total_ops=5_000,
        seed=seed,
        deletion_mode="interleaved",
        delete_prob=0.3,
    )
    wl = generate(spec)
    slim_a = np.zeros((d, w), dtype=np.uint32)
    fat_a = np.zeros((d, w, z), dtype=np.uint32)
    slim_b = np.zeros((d, w), dtype=np.uint32)
    fat_b = np.zeros((d, w, z), dtype=np.uint32)
    bucket_seeds = seed_array(seed, 0, d)
    slot_seeds = seed_array(seed, d, d)
    status, op_index = _kernels.sff_clamp_trigger_lockstep(
        slim_a, fat_a, slim_b, fat_b, bucket_seeds, slot_seeds, wl.ops, wl.keys
    )
    if status == _kernels.OK:
        return Result("clamp-trigger-equivalence", True, f"{len(wl)} ops in lockstep")
    return Result(
        "clamp-trigger-equivalence", False, f"diverged after op {op_index}"
    )


def run_selftest(seed: int = 0, corrupt_clamp: bool = False):
    """Run every check; returns the list of Results."""
    return [
        _check_slim_dominance(seed, corrupt_clamp),
        _check_no_underestimate(seed),
        _check_correct_rate(seed),
        _check_export_roundtrip(seed),
        _check_clamp_trigger(seed),
    ]
