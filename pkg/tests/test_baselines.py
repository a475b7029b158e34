"""Baseline sketch tests: frozen micro-cases, paired invariants, and
differential runs against the dict-based models in reference.py."""

import numpy as np
import pytest

from sfsketch import (
    CmlSketch,
    CmSketch,
    CountSketch,
    CuSketch,
    PhantomDeletionError,
    SaturationError,
    SketchParams,
    UnsupportedOperationError,
    tally_counts,
)
from sfsketch.baselines import cml_value
from sfsketch.hashing import bucket_hash, derive_seeds
from sfsketch.workloads import WorkloadSpec, generate

from reference import RefCm, RefCml, RefCount, RefCu


def colliding_pair(master_seed, d, w, row, same=True):
    """Brute-force two keys that (dis)agree in `row` and differ elsewhere."""
    fam = derive_seeds(master_seed, d)
    base = 1
    b_idx = [bucket_hash(fam, i, base, w) for i in range(d)]
    for cand in range(2, 10_000):
        c_idx = [bucket_hash(fam, i, cand, w) for i in range(d)]
        hit = c_idx[row] == b_idx[row]
        others = all(c_idx[i] != b_idx[i] for i in range(d) if i != row)
        if hit == same and others:
            return base, cand
    raise AssertionError("no suitable key pair found")


def test_cm_triple_insert():
    s = CmSketch(SketchParams(d=3, w=8))
    for _ in range(3):
        s.insert(42)
    assert s.query(42) == 3
    assert s.query(7) == 0
    assert s.insertions_seen == 3


def test_cm_collision_counter():
    e1, e2 = colliding_pair(0, 2, 2, row=0)
    s = CmSketch(SketchParams(d=2, w=2))
    s.insert(e1)
    s.insert(e2)
    fam = derive_seeds(0, 2)
    shared = bucket_hash(fam, 0, e1, 2)
    assert s.counters[0, shared] == 2


def test_cm_insert_delete_restores():
    s = CmSketch(SketchParams(d=3, w=16, master_seed=5))
    s.insert(10)
    before = s.counters.copy()
    s.insert(99)
    s.delete(99)
    assert np.array_equal(s.counters, before)


def test_cm_phantom_delete():
    s = CmSketch(SketchParams(d=2, w=4))
    with pytest.raises(PhantomDeletionError):
        s.delete(5)


def test_cm_oracle_replay_and_column_sums():
    spec = WorkloadSpec(
        kind="uniform",
        distinct_items=50,
        total_ops=10_000,
        seed=3,
        deletion_mode="interleaved",
        delete_prob=0.4,
    )
    wl = generate(spec)
    s = CmSketch(SketchParams(d=3, w=32, master_seed=1))
    s.apply_ops(wl.ops, wl.keys)
    counts = tally_counts(wl.ops, wl.keys)
    replay = CmSketch(SketchParams(d=3, w=32, master_seed=1))
    for key, c in counts.items():
        for _ in range(c):
            replay.insert(key)
    assert np.array_equal(s.counters, replay.counters)
    net = int(sum(counts.values()))
    assert all(int(row.sum()) == net for row in s.counters)
    items = np.fromiter(counts, dtype=np.uint64)
    true = np.array([counts[int(k)] for k in items])
    assert np.all(s.query_many(items) >= true)


def test_cm_monotone_on_inserts():
    spec = WorkloadSpec(kind="zipf", distinct_items=30, total_ops=2_000, seed=9)
    wl = generate(spec)
    s = CmSketch(SketchParams(d=3, w=16))
    probe = wl.keys[0]
    prev = 0
    for i in range(0, 2_000, 100):
        s.apply_ops(wl.ops[i : i + 100], wl.keys[i : i + 100])
        cur = s.query(probe)
        assert cur >= prev
        prev = cur


def test_cm_saturation_reported():
    s = CmSketch(SketchParams(d=2, w=4))
    s.counters[:] = 0xFFFFFFFF
    with pytest.raises(SaturationError):
        s.insert(1)


def test_cm_differential():
    spec = WorkloadSpec(
        kind="uniform",
        distinct_items=40,
        total_ops=2_000,
        seed=11,
        deletion_mode="interleaved",
        delete_prob=0.3,
    )
    wl = generate(spec)
    s = CmSketch(SketchParams(d=3, w=8, master_seed=2))
    s.apply_ops(wl.ops, wl.keys)
    ref = RefCm(3, 8, master_seed=2)
    for op, key in zip(wl.ops, wl.keys):
        (ref.insert if op == 0 else ref.delete)(int(key))
    for key in np.unique(wl.keys):
        assert s.query(int(key)) == ref.query(int(key))


def test_count_single_item_any_d():
    for d in (1, 2, 3, 4, 5):
        s = CountSketch(SketchParams(d=d, w=8))
        for _ in range(7):
            s.insert(3)
        assert s.query(3) == 7
    assert CountSketch(SketchParams(d=3, w=8)).query(1) == 0


def test_count_even_d_median_rule():
    spec = WorkloadSpec(kind="zipf", distinct_items=60, total_ops=4_000, seed=21)
    wl = generate(spec)
    s = CountSketch(SketchParams(d=4, w=8, master_seed=13))
    s.apply_ops(wl.ops, wl.keys)
    ref = RefCount(4, 8, master_seed=13)
    for key in wl.keys:
        ref.insert(int(key))
    for key in np.unique(wl.keys):
        assert s.query(int(key)) == ref.query(int(key))


def test_count_insert_delete_restores():
    s = CountSketch(SketchParams(d=3, w=8, master_seed=4))
    s.insert(5)
    before = s.counters.copy()
    s.insert(6)
    s.delete(6)
    assert np.array_equal(s.counters, before)
    s.delete(5)  # signed counters: deleting to empty is fine
    assert not s.counters.any()


def test_count_two_sided_errors():
    spec = WorkloadSpec(kind="zipf", distinct_items=200, total_ops=100_000, seed=8)
    wl = generate(spec)
    s = CountSketch(SketchParams(d=3, w=16, master_seed=8))
    s.apply_ops(wl.ops, wl.keys)
    counts = tally_counts(wl.ops, wl.keys)
    items = np.fromiter(counts, dtype=np.uint64)
    true = np.array([counts[int(k)] for k in items])
    est = s.query_many(items)
    assert (est > true).any() and (est < true).any()


def test_cu_fresh_item_fills_all_rows():
    s = CuSketch(SketchParams(d=4, w=8))
    s.insert(42)
    assert int(s.counters.sum()) == 4
    assert s.query(42) == 1


def test_cu_shared_counter_scenario():
    # e1 and e2 collide in row 0 and land in different row-1 cells; after one
    # insert each, the shared cell and both private cells all read 1
    e1, e2 = colliding_pair(0, 2, 8, row=0)
    s = CuSketch(SketchParams(d=2, w=8))
    s.insert(e1)
    s.insert(e2)
    fam = derive_seeds(0, 2)
    shared = bucket_hash(fam, 0, e1, 8)
    assert s.counters[0, shared] == 1
    assert s.counters[1, bucket_hash(fam, 1, e1, 8)] == 1
    assert s.counters[1, bucket_hash(fam, 1, e2, 8)] == 1
    assert int(s.counters.sum()) == 3


def test_cu_below_cm_and_differential():
    spec = WorkloadSpec(kind="zipf", distinct_items=100, total_ops=20_000, seed=17)
    wl = generate(spec)
    params = SketchParams(d=3, w=16, master_seed=6)
    cu, cm = CuSketch(params), CmSketch(params)
    cu.apply_ops(wl.ops, wl.keys)
    cm.apply_ops(wl.ops, wl.keys)
    ref = RefCu(3, 16, master_seed=6)
    for key in wl.keys[:2_000]:
        ref.insert(int(key))
    probe = np.unique(wl.keys)
    assert np.all(cu.query_many(probe) <= cm.query_many(probe))
    cu2 = CuSketch(params)
    cu2.apply_ops(wl.ops[:2_000], wl.keys[:2_000])
    for key in probe:
        assert cu2.query(int(key)) == ref.query(int(key))


def test_cu_delete_unsupported():
    s = CuSketch(SketchParams(d=2, w=4))
    s.insert(1)
    with pytest.raises(UnsupportedOperationError):
        s.delete(1)


def test_cml_first_insert_base_two():
    s = CmlSketch(SketchParams(d=3, w=8), base=2.0)
    s.insert(5)
    assert s.query(5) == 1
    assert int(s.exponents.max()) == 1


def test_cml_value_identities():
    assert cml_value(np.array([0]), 2.0)[0] == 0
    assert cml_value(np.array([1]), 2.0)[0] == 1
    assert cml_value(np.array([2]), 2.0)[0] == 3
    assert cml_value(np.array([0]), 1.08)[0] == 0
    assert cml_value(np.array([1]), 1.08)[0] == 1


def test_cml_exponents_nondecreasing_and_no_delete():
    spec = WorkloadSpec(kind="zipf", distinct_items=50, total_ops=3_000, seed=2)
    wl = generate(spec)
    s = CmlSketch(SketchParams(d=2, w=8, master_seed=3))
    prev = s.exponents.copy()
    for i in range(0, 3_000, 500):
        s.apply_ops(wl.ops[i : i + 500], wl.keys[i : i + 500])
        assert np.all(s.exponents >= prev)
        prev = s.exponents.copy()
    with pytest.raises(UnsupportedOperationError):
        s.delete(int(wl.keys[0]))


def test_cml_differential():
    spec = WorkloadSpec(kind="uniform", distinct_items=30, total_ops=1_500, seed=4)
    wl = generate(spec)
    s = CmlSketch(SketchParams(d=3, w=8, master_seed=9))
    s.apply_ops(wl.ops, wl.keys)
    ref = RefCml(3, 8, master_seed=9)
    for key in wl.keys:
        ref.insert(int(key))
    for key in np.unique(wl.keys):
        assert s.query(int(key)) == ref.query(int(key))


def test_cml_monte_carlo_unbiased():
    n = 1_000_000
    ops = np.zeros(n, dtype=np.uint8)
    keys = np.full(n, 42, dtype=np.uint64)
    estimates = []
    for seed in range(30):
        s = CmlSketch(SketchParams(d=2, w=4, master_seed=seed))
        s.apply_ops(ops, keys)
        estimates.append(s.query(42))
    estimates = np.asarray(estimates, dtype=np.float64)
    se = estimates.std(ddof=1) / np.sqrt(len(estimates))
    assert abs(estimates.mean() - n) <= 3 * se
