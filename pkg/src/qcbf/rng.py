"""Deterministic randomness for simulations.

All stochastic choices (key sampling, error sampling, decoder tie-breaks)
draw from SplitMix64 streams seeded with plain integers, so a run is exactly
reproducible from its seeds, independent of worker count or scheduling.
Per-trial seeds are derived by hashing the experiment coordinates; decoder
pairs that differ only in near-codeword awareness share the same derived
seeds so that trial i decodes the same error vector under both.
"""

from __future__ import annotations

import hashlib

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """SplitMix64 generator over python ints; state and outputs in [0, 2^64)."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        """Uniform draw from [0, n). Modulo bias is < n/2^64, negligible here."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def sample_subset(self, n: int, k: int) -> list[int]:
        """Uniform k-subset of range(n), returned sorted ascending.

        Rejection-samples when k is small, otherwise samples the complement,
        so the expected number of draws stays O(min(k, n-k)).
        """
        if not 0 <= k <= n:
            raise ValueError(f"cannot pick {k} elements out of {n}")
        if k == 0:
            return []
        if k == n:
            return list(range(n))
        if k > n // 2:
            comp = set(self.sample_subset(n, n - k))
            return [i for i in range(n) if i not in comp]
        chosen: set[int] = set()
        while len(chosen) < k:
            chosen.add(self.next_below(n))
        return sorted(chosen)


def derive_trial_seeds(
    master_seed: int,
    kind: str,
    sweep_value,
    decoder_id: str,
    trial_index: int,
) -> tuple[int, int]:
    """Derive (sampling seed, decoding seed) for one trial.

    The decoder id must not encode near-codeword awareness: paired runs of a
    standard and a table-aware decoder are meant to see identical trials.
    """
    msg = f"qcbf|{master_seed}|{kind}|{sweep_value}|{decoder_id}|{trial_index}"
    digest = hashlib.sha256(msg.encode("utf-8")).digest()
    return (
        int.from_bytes(digest[:8], "little"),
        int.from_bytes(digest[8:16], "little"),
    )
