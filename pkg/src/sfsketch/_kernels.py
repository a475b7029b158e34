"""Compiled batch kernels behind the per-operation hot loops.

The Python classes own validation, array lifetimes, and error reporting;
these functions do the per-op work. Apply-style kernels never raise: they
return ``(status, op_index, inserts_done)`` and the wrapper maps a nonzero
status onto the right exception. Every op validates all of its counter
touches before mutating any of them, so a failing op aborts cleanly — ops
before it stay applied, the failing op leaves no trace.

``ops`` arrays use code 0 for insert, 1 for delete. Query kernels write into
caller-provided buffers and release the GIL, so read-only query workers can
run in parallel over a quiesced sketch.

The hash arithmetic here mirrors ``hashing.finalize64`` exactly; a test pins
the two paths together.
"""

import numpy as np
from numba import njit

OK = 0
PHANTOM = 1
SATURATED = 2
UNSUPPORTED = 3
VIOLATION = 4
MISMATCH = 5

OP_INSERT = 0
OP_DELETE = 1

_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_SIGN_SALT = np.uint64(0xA5A5A5A5A5A5A5A5)
_U32_MAX = np.uint32(0xFFFFFFFF)
_U64_MAX = np.uint64(0xFFFFFFFFFFFFFFFF)
_ONE = np.uint64(1)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(inline="always")
def _mix(x):
    x = (x ^ (x >> _S30)) * _C1
    x = (x ^ (x >> _S27)) * _C2
    return x ^ (x >> _S31)


@njit(inline="always")
def _bucket(key, seed, modulus):
    return _mix(key ^ seed) % modulus


@njit(cache=True, nogil=True)
def mix_batch(keys, out):
    for t in range(keys.shape[0]):
        out[t] = _mix(keys[t])


@njit(cache=True, nogil=True)
def cm_apply(counters, seeds, ops, keys, inc_counts):
    d = counters.shape[0]
    w = np.uint64(counters.shape[1])
    idx = np.empty(d, np.int64)
    n_ins = 0
    for t in range(ops.shape[0]):
        key = keys[t]
        if ops[t] == OP_INSERT:
            for i in range(d):
                j = np.int64(_bucket(key, seeds[i], w))
                if counters[i, j] == _U32_MAX:
                    return SATURATED, t, n_ins
                idx[i] = j
            for i in range(d):
                counters[i, idx[i]] += np.uint32(1)
                inc_counts[i] += 1
            n_ins += 1
        else:
            for i in range(d):
                j = np.int64(_bucket(key, seeds[i], w))
                if counters[i, j] == np.uint32(0):
                    return PHANTOM, t, n_ins
                idx[i] = j
            for i in range(d):
                counters[i, idx[i]] -= np.uint32(1)
    return OK, -1, n_ins


@njit(cache=True, nogil=True)
def cu_apply(counters, seeds, ops, keys, inc_counts):
    d = counters.shape[0]
    w = np.uint64(counters.shape[1])
    idx = np.empty(d, np.int64)
    n_ins = 0
    for t in range(ops.shape[0]):
        if ops[t] != OP_INSERT:
            return UNSUPPORTED, t, n_ins
        key = keys[t]
        m = _U64_MAX
        for i in range(d):
            j = np.int64(_bucket(key, seeds[i], w))
            idx[i] = j
            v = np.uint64(counters[i, j])
            if v < m:
                m = v
        if m >= np.uint64(0xFFFFFFFF):
            return SATURATED, t, n_ins
        for i in range(d):
            if np.uint64(counters[i, idx[i]]) == m:
                counters[i, idx[i]] += np.uint32(1)
                inc_counts[i] += 1
        n_ins += 1
    return OK, -1, n_ins


@njit(cache=True, nogil=True)
def count_apply(counters, seeds, ops, keys):
    d = counters.shape[0]
    w = np.uint64(counters.shape[1])
    idx = np.empty(d, np.int64)
    delta = np.empty(d, np.int64)
    n_ins = 0
    for t in range(ops.shape[0]):
        key = keys[t]
        for i in range(d):
            j = np.int64(_bucket(key, seeds[i], w))
            s = _mix(key ^ seeds[i] ^ _SIGN_SALT) & _ONE
            dlt = 1 if s == np.uint64(0) else -1
            if ops[t] == OP_DELETE:
                dlt = -dlt
            v = np.int64(counters[i, j])
            if dlt > 0 and v == 2147483647:
                return SATURATED, t, n_ins
            if dlt < 0 and v == -2147483648:
                return SATURATED, t, n_ins
            idx[i] = j
            delta[i] = dlt
        for i in range(d):
            counters[i, idx[i]] += np.int32(delta[i])
        if ops[t] == OP_INSERT:
            n_ins += 1
    return OK, -1, n_ins


@njit(cache=True, nogil=True)
def count_query(counters, seeds, keys, out):
    d = counters.shape[0]
    w = np.uint64(counters.shape[1])
    buf = np.empty(d, np.int64)
    for t in range(keys.shape[0]):
        key = keys[t]
        for i in range(d):
            j = np.int64(_bucket(key, seeds[i], w))
            s = _mix(key ^ seeds[i] ^ _SIGN_SALT) & _ONE
            v = np.int64(counters[i, j])
            buf[i] = v if s == np.uint64(0) else -v
        # insertion sort; d is small
        for a in range(1, d):
            x = buf[a]
            b = a - 1
            while b >= 0 and buf[b] > x:
                buf[b + 1] = buf[b]
                b -= 1
            buf[b + 1] = x
        if d & 1 == 1:
            med = buf[d // 2]
        else:
            # even d: mean of the central pair, half rounded away from zero
            pair = buf[d // 2 - 1] + buf[d // 2]
            if pair % 2 == 0:
                med = pair // 2
            elif pair > 0:
                med = (pair + 1) // 2
            else:
                med = (pair - 1) // 2
        if med < 0:
            med = 0
        out[t] = med


@njit(cache=True, nogil=True)
def cml_apply(exps, seeds, ops, keys, base, rng_seed, start_pos):
    d = exps.shape[0]
    w = np.uint64(exps.shape[1])
    idx = np.empty(d, np.int64)
    n_ins = 0
    u16_max = np.uint16(0xFFFF)
    for t in range(ops.shape[0]):
        if ops[t] != OP_INSERT:
            return UNSUPPORTED, t, n_ins
        key = keys[t]
        cmin = u16_max
        for i in range(d):
            j = np.int64(_bucket(key, seeds[i], w))
            idx[i] = j
            if exps[i, j] < cmin:
                cmin = exps[i, j]
        # one uniform draw per insert, keyed by the global insert index
        pos = np.uint64(start_pos + n_ins)
        u = _mix(rng_seed + (pos + _ONE) * _GOLDEN)
        uf = np.float64(u >> np.uint64(11)) * _INV_2_53
        if uf < base ** (-np.float64(cmin)):
            if cmin == u16_max:
                return SATURATED, t, n_ins
            for i in range(d):
                if exps[i, idx[i]] == cmin:
                    exps[i, idx[i]] += np.uint16(1)
        n_ins += 1
    return OK, -1, n_ins


@njit(cache=True, nogil=True)
def cml_min_exp(exps, seeds, keys, out):
    d = exps.shape[0]
    w = np.uint64(exps.shape[1])
    for t in range(keys.shape[0]):
        key = keys[t]
        best = np.int64(0xFFFF)
        for i in range(d):
            j = np.int64(_bucket(key, seeds[i], w))
            v = np.int64(exps[i, j])
            if v < best:
                best = v
        out[t] = best


@njit(cache=True, nogil=True)
def min_query(counters, seeds, keys, out):
    d = counters.shape[0]
    w = np.uint64(counters.shape[1])
    for t in range(keys.shape[0]):
        key = keys[t]
        best = _U64_MAX
        for i in range(d):
            j = np.int64(_bucket(key, seeds[i], w))
            v = np.uint64(counters[i, j])
            if v < best:
                best = v
        out[t] = np.int64(best)


@njit(cache=True, nogil=True)
def sf_flat_apply(slim, fat, dsub, slim_seeds, fat_seeds, variant, ops, keys, inc_counts):
    """Flat-fat variants. variant: 1 no deletion, 2 deletion subsketch, 3 fold.

    For variant 3 the slim index is the fat index mod w; for the others the
    slim index comes from the primary seeds and the fat index from the
    extended ones. ``dsub`` is only touched when variant == 2.
    """
    d = slim.shape[0]
    wi = slim.shape[1]
    w = np.uint64(wi)
    wp = np.uint64(fat.shape[1])
    z = fat.shape[1] // wi
    sidx = np.empty(d, np.int64)
    fidx = np.empty(d, np.int64)
    n_ins = 0
    for t in range(ops.shape[0]):
        key = keys[t]
        for i in range(d):
            if variant == 3:
                g = _bucket(key, fat_seeds[i], wp)
                fidx[i] = np.int64(g)
                sidx[i] = np.int64(g % w)
            else:
                fidx[i] = np.int64(_bucket(key, fat_seeds[i], wp))
                sidx[i] = np.int64(_bucket(key, slim_seeds[i], w))
        if ops[t] == OP_INSERT:
            for i in range(d):
                if fat[i, fidx[i]] == _U32_MAX:
                    return SATURATED, t, n_ins
                if variant == 2 and dsub[i, sidx[i]] == _U32_MAX:
                    return SATURATED, t, n_ins
            bmin = _U64_MAX
            for i in range(d):
                fat[i, fidx[i]] += np.uint32(1)
                v = np.uint64(fat[i, fidx[i]])
                if v < bmin:
                    bmin = v
                if variant == 2:
                    dsub[i, sidx[i]] += np.uint32(1)
            m = _U64_MAX
            for i in range(d):
                v = np.uint64(slim[i, sidx[i]])
                if v < m:
                    m = v
            if m < bmin:
                for i in range(d):
                    if np.uint64(slim[i, sidx[i]]) == m:
                        slim[i, sidx[i]] += np.uint32(1)
                        inc_counts[i] += 1
            n_ins += 1
        else:
            if variant == 1:
                return UNSUPPORTED, t, n_ins
            for i in range(d):
                if fat[i, fidx[i]] == np.uint32(0):
                    return PHANTOM, t, n_ins
                if variant == 2 and dsub[i, sidx[i]] == np.uint32(0):
                    return PHANTOM, t, n_ins
            for i in range(d):
                fat[i, fidx[i]] -= np.uint32(1)
                if variant == 2:
                    dsub[i, sidx[i]] -= np.uint32(1)
                    if slim[i, sidx[i]] > dsub[i, sidx[i]]:
                        slim[i, sidx[i]] -= np.uint32(1)
                else:
                    total = np.uint64(0)
                    for m_assoc in range(z):
                        total += np.uint64(fat[i, sidx[i] + m_assoc * wi])
                    if np.uint64(slim[i, sidx[i]]) > total:
                        slim[i, sidx[i]] -= np.uint32(1)
    return OK, -1, n_ins


@njit(cache=True, nogil=True)
def sf_bucket_apply(slim, fat, bucket_seeds, slot_seeds, mode, ops, keys, inc_counts):
    """Bucketed-fat variants. mode: 0 sum trigger, 1 max clamp, 2 changed-max
    trigger (the clamp's reference twin, kept for the equivalence check)."""
    d = slim.shape[0]
    w = np.uint64(slim.shape[1])
    z = fat.shape[2]
    zu = np.uint64(z)
    jidx = np.empty(d, np.int64)
    kidx = np.empty(d, np.int64)
    n_ins = 0
    for t in range(ops.shape[0]):
        key = keys[t]
        for i in range(d):
            jidx[i] = np.int64(_bucket(key, bucket_seeds[i], w))
            kidx[i] = np.int64(_bucket(key, slot_seeds[i], zu))
        if ops[t] == OP_INSERT:
            for i in range(d):
                if fat[i, jidx[i], kidx[i]] == _U32_MAX:
                    return SATURATED, t, n_ins
            bmin = _U64_MAX
            for i in range(d):
                fat[i, jidx[i], kidx[i]] += np.uint32(1)
                v = np.uint64(fat[i, jidx[i], kidx[i]])
                if v < bmin:
                    bmin = v
            m = _U64_MAX
            for i in range(d):
                v = np.uint64(slim[i, jidx[i]])
                if v < m:
                    m = v
            if m < bmin:
                for i in range(d):
                    if np.uint64(slim[i, jidx[i]]) == m:
                        slim[i, jidx[i]] += np.uint32(1)
                        inc_counts[i] += 1
            n_ins += 1
        else:
            for i in range(d):
                if fat[i, jidx[i], kidx[i]] == np.uint32(0):
                    return PHANTOM, t, n_ins
            for i in range(d):
                j = jidx[i]
                pre = np.uint32(0)
                if mode == 2:
                    for k in range(z):
                        if fat[i, j, k] > pre:
                            pre = fat[i, j, k]
                fat[i, j, kidx[i]] -= np.uint32(1)
                if mode == 0:
                    total = np.uint64(0)
                    for k in range(z):
                        total += np.uint64(fat[i, j, k])
                    if np.uint64(slim[i, j]) > total:
                        slim[i, j] -= np.uint32(1)
                else:
                    mx = np.uint32(0)
                    for k in range(z):
                        if fat[i, j, k] > mx:
                            mx = fat[i, j, k]
                    if mode == 1:
                        if slim[i, j] > mx:
                            slim[i, j] = mx
                    else:
                        if mx != pre and slim[i, j] > mx:
                            slim[i, j] = mx
    return OK, -1, n_ins


@njit(cache=True, nogil=True)
def oracle_slim_apply(slim, seeds, keys, true_counts, inc_counts):
    """Insert-only slim updates gated by exact post-insert counts."""
    d = slim.shape[0]
    w = np.uint64(slim.shape[1])
    sidx = np.empty(d, np.int64)
    n_ins = 0
    for t in range(keys.shape[0]):
        key = keys[t]
        m = _U64_MAX
        for i in range(d):
            j = np.int64(_bucket(key, seeds[i], w))
            sidx[i] = j
            v = np.uint64(slim[i, j])
            if v < m:
                m = v
        if m < np.uint64(true_counts[t]):
            if m >= np.uint64(0xFFFFFFFF):
                return SATURATED, t, n_ins
            for i in range(d):
                if np.uint64(slim[i, sidx[i]]) == m:
                    slim[i, sidx[i]] += np.uint32(1)
                    inc_counts[i] += 1
        n_ins += 1
    return OK, -1, n_ins


@njit(cache=True)
def running_occurrences(ranks, v):
    """Post-insert count of each op's item, for an insert-only rank stream."""
    counts = np.zeros(v, np.int64)
    out = np.empty(ranks.shape[0], np.int64)
    for t in range(ranks.shape[0]):
        r = ranks[t]
        counts[r] += 1
        out[t] = counts[r]
    return out


@njit(cache=True)
def interleave_deletions(candidates, decide, pick, p, v):
    """Build a mixed op stream that never deletes below zero.

    Walks ``len(decide)`` steps; with probability ``p`` (and at least one
    currently-positive item) a step deletes an item chosen uniformly among
    the distinct positive ones, otherwise it inserts the next candidate rank.
    """
    n = decide.shape[0]
    ops = np.zeros(n, np.uint8)
    ranks = np.empty(n, np.int64)
    counts = np.zeros(v, np.int64)
    poslist = np.empty(v, np.int64)
    posindex = np.full(v, -1, np.int64)
    npos = 0
    cur = 0
    for t in range(n):
        if decide[t] < p and npos > 0:
            slot = np.int64(pick[t] * npos)
            if slot >= npos:
                slot = npos - 1
            r = poslist[slot]
            ops[t] = 1
            ranks[t] = r
            counts[r] -= 1
            if counts[r] == 0:
                last = poslist[npos - 1]
                poslist[slot] = last
                posindex[last] = slot
                posindex[r] = -1
                npos -= 1
        else:
            r = candidates[cur]
            cur += 1
            ops[t] = 0
            ranks[t] = r
            counts[r] += 1
            if counts[r] == 1:
                poslist[npos] = r
                posindex[r] = npos
                npos += 1
    return ops, ranks


@njit(cache=True, nogil=True)
def sff_fuzz_invariant(slim, fat, bucket_seeds, slot_seeds, ops, keys, skip_clamp):
    """Apply max-clamp ops one at a time, checking after each op that every
    slim counter is bounded by its fat bucket's max. ``skip_clamp`` breaks the
    deletion path on purpose (negative-control hook for the selftest)."""
    d = slim.shape[0]
    wi = slim.shape[1]
    w = np.uint64(wi)
    z = fat.shape[2]
    zu = np.uint64(z)
    jidx = np.empty(d, np.int64)
    kidx = np.empty(d, np.int64)
    for t in range(ops.shape[0]):
        key = keys[t]
        for i in range(d):
            jidx[i] = np.int64(_bucket(key, bucket_seeds[i], w))
            kidx[i] = np.int64(_bucket(key, slot_seeds[i], zu))
        if ops[t] == OP_INSERT:
            for i in range(d):
                if fat[i, jidx[i], kidx[i]] == _U32_MAX:
                    return SATURATED, t
            bmin = _U64_MAX
            for i in range(d):
                fat[i, jidx[i], kidx[i]] += np.uint32(1)
                v = np.uint64(fat[i, jidx[i], kidx[i]])
                if v < bmin:
                    bmin = v
            m = _U64_MAX
            for i in range(d):
                v = np.uint64(slim[i, jidx[i]])
                if v < m:
                    m = v
            if m < bmin:
                for i in range(d):
                    if np.uint64(slim[i, jidx[i]]) == m:
                        slim[i, jidx[i]] += np.uint32(1)
        else:
            for i in range(d):
                if fat[i, jidx[i], kidx[i]] == np.uint32(0):
                    return PHANTOM, t
            for i in range(d):
                j = jidx[i]
                fat[i, j, kidx[i]] -= np.uint32(1)
                if not skip_clamp:
                    mx = np.uint32(0)
                    for k in range(z):
                        if fat[i, j, k] > mx:
                            mx = fat[i, j, k]
                    if slim[i, j] > mx:
                        slim[i, j] = mx
        for i in range(d):
            for j in range(wi):
                mx = np.uint32(0)
                for k in range(z):
                    if fat[i, j, k] > mx:
                        mx = fat[i, j, k]
                if slim[i, j] > mx:
                    return VIOLATION, t
    return OK, -1


@njit(cache=True, nogil=True)
def sff_clamp_trigger_lockstep(slim_a, fat_a, slim_b, fat_b, bucket_seeds, slot_seeds, ops, keys):
    """Apply each op with the unconditional clamp to state A and with the
    changed-max trigger to state B; compare every counter after every op."""
    d = slim_a.shape[0]
    wi = slim_a.shape[1]
    w = np.uint64(wi)
    z = fat_a.shape[2]
    zu = np.uint64(z)
    jidx = np.empty(d, np.int64)
    kidx = np.empty(d, np.int64)
    for t in range(ops.shape[0]):
        key = keys[t]
        for i in range(d):
            jidx[i] = np.int64(_bucket(key, bucket_seeds[i], w))
            kidx[i] = np.int64(_bucket(key, slot_seeds[i], zu))
        if ops[t] == OP_INSERT:
            for i in range(d):
                if fat_a[i, jidx[i], kidx[i]] == _U32_MAX:
                    return SATURATED, t
            # identical insert path on both states
            bmin = _U64_MAX
            for i in range(d):
                fat_a[i, jidx[i], kidx[i]] += np.uint32(1)
                fat_b[i, jidx[i], kidx[i]] += np.uint32(1)
                v = np.uint64(fat_a[i, jidx[i], kidx[i]])
                if v < bmin:
                    bmin = v
            m_a = _U64_MAX
            m_b = _U64_MAX
            for i in range(d):
                va = np.uint64(slim_a[i, jidx[i]])
                if va < m_a:
                    m_a = va
                vb = np.uint64(slim_b[i, jidx[i]])
                if vb < m_b:
                    m_b = vb
            if m_a < bmin:
                for i in range(d):
                    if np.uint64(slim_a[i, jidx[i]]) == m_a:
                        slim_a[i, jidx[i]] += np.uint32(1)
            if m_b < bmin:
                for i in range(d):
                    if np.uint64(slim_b[i, jidx[i]]) == m_b:
                        slim_b[i, jidx[i]] += np.uint32(1)
        else:
            for i in range(d):
                if fat_a[i, jidx[i], kidx[i]] == np.uint32(0):
                    return PHANTOM, t
            for i in range(d):
                j = jidx[i]
                # A: unconditional clamp
                fat_a[i, j, kidx[i]] -= np.uint32(1)
                mx = np.uint32(0)
                for k in range(z):
                    if fat_a[i, j, k] > mx:
                        mx = fat_a[i, j, k]
                if slim_a[i, j] > mx:
                    slim_a[i, j] = mx
                # B: clamp only when the bucket max changed
                pre = np.uint32(0)
                for k in range(z):
                    if fat_b[i, j, k] > pre:
                        pre = fat_b[i, j, k]
                fat_b[i, j, kidx[i]] -= np.uint32(1)
                post = np.uint32(0)
                for k in range(z):
                    if fat_b[i, j, k] > post:
                        post = fat_b[i, j, k]
                if post != pre and slim_b[i, j] > post:
                    slim_b[i, j] = post
        for i in range(d):
            for j in range(wi):
                if slim_a[i, j] != slim_b[i, j]:
                    return MISMATCH, t
                for k in range(z):
                    if fat_a[i, j, k] != fat_b[i, j, k]:
                        return MISMATCH, t
    return OK, -1
