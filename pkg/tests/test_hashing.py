"""Hash family tests.

The finalizer goldens below were computed by an independent straight-line
reimplementation of the published splitmix64 finalizer (integer math only,
no imports from the package) and then frozen.
"""

import numpy as np
import pytest
from scipy import stats

from sfsketch import _kernels
from sfsketch.errors import ConfigurationError
from sfsketch.hashing import (
    GOLDEN,
    MASK64,
    bucket_hash,
    derive_seeds,
    finalize64,
    finalize64_array,
    fold_to_slim,
    key_from_string,
    seed_array,
    sign_hash,
    slot_hash,
)

# fmt: off
FINALIZE_GOLDENS = {
    0x0000000000000000: 0x0000000000000000,
    0x0000000000000001: 0x5692161D100B05E5,
    0x0000000000000002: 0xDBD238973A2B148A,
    0x000000000000002A: 0xA759EA27D4727622,
    0x123456789ABCDEF0: 0x9629F58E8EC5B906,
    0xFFFFFFFFFFFFFFFF: 0xB4D055FCF2CBBD7B,
}
# fmt: on


def test_finalize64_frozen_values():
    for x, want in FINALIZE_GOLDENS.items():
        assert finalize64(x) == want


def test_finalize64_array_matches_scalar():
    xs = np.array(list(FINALIZE_GOLDENS), dtype=np.uint64)
    got = finalize64_array(xs)
    assert got.dtype == np.uint64
    assert [int(v) for v in got] == [FINALIZE_GOLDENS[int(x)] for x in xs]


def test_first_derived_seed_is_finalize_of_golden():
    fam = derive_seeds(0, 1)
    assert fam.per_array_seeds[0] == finalize64(GOLDEN)
    # frozen: splitmix64's first output for state 0
    assert fam.per_array_seeds[0] == 0xE220A8397B1DCDAF


def test_derive_seeds_deterministic_and_distinct():
    a = derive_seeds(123, 3)
    b = derive_seeds(123, 3)
    assert a == b
    wide = derive_seeds(1, 64)
    assert len(set(wide.per_array_seeds)) == 64


def test_derive_seeds_rejects_zero_arrays():
    with pytest.raises(ConfigurationError):
        derive_seeds(0, 0)


def test_bucket_hash_range_one_and_determinism():
    fam = derive_seeds(9, 2)
    assert bucket_hash(fam, 0, 12345, 1) == 0
    assert bucket_hash(fam, 1, 12345, 7) == bucket_hash(fam, 1, 12345, 7)
    with pytest.raises(ConfigurationError):
        bucket_hash(fam, 0, 1, 0)


def test_bucket_hash_uniformity_chi_square():
    fam = derive_seeds(1, 2)
    counts = np.zeros(16, dtype=np.int64)
    for item in range(10_000):
        counts[bucket_hash(fam, 0, item, 16)] += 1
    expected = 10_000 / 16
    sigma = np.sqrt(expected * (1 - 1 / 16))
    assert np.all(np.abs(counts - expected) <= 3 * sigma)


def test_slot_hash_uniform_and_independent_of_bucket():
    fam = derive_seeds(5, 3)
    assert slot_hash(fam, 0, 42, 1) == 0
    counts = np.zeros(4, dtype=np.int64)
    for item in range(10_000):
        counts[slot_hash(fam, 1, item, 4)] += 1
    chi2 = float(((counts - 2_500.0) ** 2 / 2_500.0).sum())
    assert stats.chi2.sf(chi2, df=3) > 0.001
    # joint (bucket, slot) table should look independent too
    table = np.zeros((8, 4), dtype=np.int64)
    for item in range(10_000):
        table[bucket_hash(fam, 1, item, 8), slot_hash(fam, 1, item, 4)] += 1
    _, p, _, _ = stats.chi2_contingency(table)
    assert p > 0.001


def test_bucket_rows_pairwise_independent():
    fam = derive_seeds(2, 2)
    table = np.zeros((8, 8), dtype=np.int64)
    for item in range(10_000):
        table[bucket_hash(fam, 0, item, 8), bucket_hash(fam, 1, item, 8)] += 1
    _, p, _, _ = stats.chi2_contingency(table)
    assert p > 0.001


def test_sign_hash_values_and_balance():
    fam = derive_seeds(3, 2)
    vals = [sign_hash(fam, 0, item) for item in range(10_000)]
    assert set(vals) <= {-1, 1}
    assert sign_hash(fam, 0, 77) == sign_hash(fam, 0, 77)
    plus = sum(1 for v in vals if v == 1) / len(vals)
    assert 0.47 <= plus <= 0.53


def test_fold_examples():
    assert fold_to_slim(4, 4) == 0
    assert fold_to_slim(0, 5) == 0
    assert fold_to_slim(7, 3) == 1
    with pytest.raises(ConfigurationError):
        fold_to_slim(3, 0)


def test_range_safety_fuzz():
    fam = derive_seeds(11, 2)
    rng = np.random.Generator(np.random.PCG64(0))
    items = rng.integers(0, 1 << 63, size=1_000_000, dtype=np.uint64)
    hashed = finalize64_array(items ^ np.uint64(fam.per_array_seeds[0]))
    buckets = hashed % np.uint64(37)
    assert int(buckets.max()) < 37
    assert int(buckets.min()) >= 0


def test_kernel_mix_matches_python():
    xs = np.array(list(FINALIZE_GOLDENS), dtype=np.uint64)
    out = np.empty(xs.shape[0], dtype=np.uint64)
    _kernels.mix_batch(xs, out)
    assert [int(v) for v in out] == [finalize64(int(x)) for x in xs]


def test_kernel_bucket_matches_python():
    fam = derive_seeds(6, 4)
    seeds = seed_array(6, 0, 4)
    assert [int(s) for s in seeds] == list(fam.per_array_seeds)
    keys = np.array([0, 1, 42, 2**63 + 5], dtype=np.uint64)
    mixed = np.empty(keys.shape[0], dtype=np.uint64)
    for i in range(4):
        _kernels.mix_batch(keys ^ seeds[i], mixed)
        assert [int(v % 13) for v in mixed] == [
            bucket_hash(fam, i, int(k), 13) for k in keys
        ]


def test_key_from_string_frozen_and_distinct():
    # frozen from an inline FNV-1a + finalizer recomputation
    assert key_from_string("apple") == 0xBA8E799DCEB3BCB1
    assert key_from_string("") == 0xF52A15E9A9B5E89B
    assert key_from_string("apple") != key_from_string("apples")
