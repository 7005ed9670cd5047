"""Compiled decoder kernels.

The Monte Carlo experiments spend essentially all their time inside decoder
iterations, so the two decode loops (single-flip with incremental counters,
and threshold batch flipping) are implemented as numba kernels operating on
plain arrays:

- ``s``: uint8 syndrome of length r (mutated in place),
- ``h1``/``h2``: int32 key supports of length v,
- ``rows``/``nc_idx``: the sorted near-codeword syndrome table,
- ``e_hat``: uint8 error estimate of length 2r (filled in place).

The kernels mirror the pure-python reference in decoders.py bit for bit,
including the SplitMix64 tie-break stream: a draw happens only when more
than one counter attains the maximum. Equivalence of the two paths is
enforced by tests, so either can be used interchangeably.

If numba is unavailable the same functions run as plain python; they stay
correct but are far too slow for the larger experiments.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit

    KERNELS_AVAILABLE = True
except Exception:  # pragma: no cover - exercised only without numba
    KERNELS_AVAILABLE = False

    def njit(*args, **kwargs):
        def _wrap(fn):
            return fn

        return _wrap


_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)


@njit(cache=True)
def _sm64_next(state):
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return state, z ^ (z >> _S31)


@njit(cache=True)
def sm64_fill(seed, out):
    """Fill ``out`` with consecutive SplitMix64 draws (parity test hook)."""
    state = np.uint64(seed)
    for i in range(out.shape[0]):
        state, z = _sm64_next(state)
        out[i] = z


@njit(cache=True)
def _syndrome_weight(s):
    w = 0
    for p in range(s.shape[0]):
        if s[p]:
            w += 1
    return w


@njit(cache=True)
def _counters_fill(r, h1, h2, s, counters):
    # Transposed iteration: each set syndrome bit p is a parity check touching
    # coordinates (p - k) mod r of block 1 and r + (p - k) mod r of block 2.
    for i in range(counters.shape[0]):
        counters[i] = 0
    for p in range(r):
        if s[p]:
            for k in h1:
                idx = p - k
                if idx < 0:
                    idx += r
                counters[idx] += 1
            for k in h2:
                idx = p - k
                if idx < 0:
                    idx += r
                counters[r + idx] += 1


@njit(cache=True)
def _extract_support(s, out):
    pos = 0
    for p in range(s.shape[0]):
        if s[p]:
            if pos < out.shape[0]:
                out[pos] = p
            pos += 1
    return pos


@njit(cache=True)
def _nc_search(rows, query):
    """Lexicographic binary search over sorted support rows; -1 if absent."""
    lo = 0
    hi = rows.shape[0]
    while lo < hi:
        mid = (lo + hi) >> 1
        cmp = 0
        for idx in range(rows.shape[1]):
            a = rows[mid, idx]
            b = query[idx]
            if a != b:
                cmp = -1 if a < b else 1
                break
        if cmp == 0:
            return mid
        if cmp < 0:
            lo = mid + 1
        else:
            hi = mid
    return -1


@njit(cache=True)
def _apply_nc(r, h1, h2, nc_index, e_hat):
    if nc_index < r:
        for k in h1:
            p = nc_index + k
            if p >= r:
                p -= r
            e_hat[p] ^= 1
    else:
        base = nc_index - r
        for k in h2:
            p = base + k
            if p >= r:
                p -= r
            e_hat[r + p] ^= 1


@njit(cache=True)
def _nc_gate(r, v, h1, h2, s, rows, nc_idx, e_hat, supp_buf):
    """Weight-v table probe; applies the matched near-codeword on a hit.

    Returns the matched near-codeword index or -1.
    """
    _extract_support(s, supp_buf)
    pos = _nc_search(rows, supp_buf)
    if pos < 0:
        return -1
    hit = int(nc_idx[pos])
    _apply_nc(r, h1, h2, hit, e_hat)
    return hit


@njit(cache=True)
def bfmax_kernel(h1, h2, v, s, iter_max, seed, nc_on, check_first, rows, nc_idx, e_hat):
    """Single-flip decoding: flip one argmax-counter coordinate per iteration.

    Counters are maintained incrementally: a flip toggles v syndrome bits, and
    each toggled bit adjusts the 2v counters of the coordinates it checks.
    """
    r = s.shape[0]
    n = 2 * r
    state = np.uint64(seed)
    counters = np.zeros(n, dtype=np.int32)
    cand = np.empty(n, dtype=np.int32)
    supp_buf = np.empty(v, dtype=np.int32)

    s_wt = _syndrome_weight(s)

    if nc_on and check_first and s_wt == v:
        hit = _nc_gate(r, v, h1, h2, s, rows, nc_idx, e_hat, supp_buf)
        if hit >= 0:
            return 1, 0, hit, state

    _counters_fill(r, h1, h2, s, counters)

    it = 0
    while s_wt != 0 and it < iter_max:
        m = np.int32(0)
        cnt = 0
        for i in range(n):
            c = counters[i]
            if c > m:
                m = c
                cand[0] = i
                cnt = 1
            elif c == m and c > 0:
                cand[cnt] = i
                cnt += 1
        if m <= 0:
            break  # stalled: nonzero syndrome but no positive counter
        if cnt > 1:
            state, z = _sm64_next(state)
            j = int(cand[int(z % np.uint64(cnt))])
        else:
            j = int(cand[0])

        e_hat[j] ^= 1
        if j < r:
            base = j
            col = h1
        else:
            base = j - r
            col = h2
        for a in col:
            p = base + a
            if p >= r:
                p -= r
            if s[p]:
                delta = np.int32(-1)
                s[p] = 0
                s_wt -= 1
            else:
                delta = np.int32(1)
                s[p] = 1
                s_wt += 1
            for k in h1:
                idx = p - k
                if idx < 0:
                    idx += r
                counters[idx] += delta
            for k in h2:
                idx = p - k
                if idx < 0:
                    idx += r
                counters[r + idx] += delta
        it += 1

        if nc_on and s_wt == v:
            hit = _nc_gate(r, v, h1, h2, s, rows, nc_idx, e_hat, supp_buf)
            if hit >= 0:
                return 1, it, hit, state

    status = 1 if s_wt == 0 else 0
    return status, it, -1, state


@njit(cache=True)
def threshold_kernel(
    h1,
    h2,
    v,
    s,
    iter_max,
    thr_fixed,
    use_affine,
    aff_a,
    aff_b,
    aff_min,
    nc_on,
    check_first,
    rows,
    nc_idx,
    e_hat,
):
    """Batch flipping: every coordinate whose counter meets the iteration
    threshold is flipped, with counters taken from the iteration-entry
    syndrome. The threshold is thr_fixed[it], or affine in the syndrome
    weight when use_affine is set."""
    r = s.shape[0]
    n = 2 * r
    counters = np.zeros(n, dtype=np.int32)
    flips = np.empty(n, dtype=np.int32)
    supp_buf = np.empty(v, dtype=np.int32)

    s_wt = _syndrome_weight(s)

    if nc_on and check_first and s_wt == v:
        hit = _nc_gate(r, v, h1, h2, s, rows, nc_idx, e_hat, supp_buf)
        if hit >= 0:
            return 1, 0, hit

    it = 0
    while s_wt != 0 and it < iter_max:
        _counters_fill(r, h1, h2, s, counters)
        if use_affine:
            thr = int(math.ceil(aff_a * s_wt + aff_b))
            if thr < aff_min:
                thr = aff_min
            if thr > v:
                thr = v
        else:
            thr = int(thr_fixed[it])

        cnt = 0
        for i in range(n):
            if counters[i] >= thr:
                flips[cnt] = i
                cnt += 1
        for fi in range(cnt):
            j = flips[fi]
            e_hat[j] ^= 1
            if j < r:
                base = j
                col = h1
            else:
                base = j - r
                col = h2
            for a in col:
                p = base + a
                if p >= r:
                    p -= r
                if s[p]:
                    s[p] = 0
                    s_wt -= 1
                else:
                    s[p] = 1
                    s_wt += 1
        it += 1

        if nc_on and s_wt == v:
            hit = _nc_gate(r, v, h1, h2, s, rows, nc_idx, e_hat, supp_buf)
            if hit >= 0:
                return 1, it, hit

    status = 1 if s_wt == 0 else 0
    return status, it, -1
