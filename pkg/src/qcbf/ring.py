"""Arithmetic in the ring F2[x]/(x^r + 1).

Two representations are used side by side:

- ``CirculantPoly``: an immutable sparse element, stored as a strictly
  increasing tuple of exponents. This is the canonical form for key blocks,
  error blocks and near-codeword syndromes, all of which are sparse.
- ``DenseBits``: a mutable r-bit vector packed into a python int, with a
  cached Hamming weight that is maintained incrementally on single-bit flips.
  Syndromes live here.

Multiplication picks its algorithm by operand weight: if either operand is
sparse (weight <= 64) it accumulates rotations of the denser operand,
otherwise it runs a carryless schoolbook product on spread integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .exceptions import DimensionMismatch, RangeError, UnsupportedParameter

# Above this weight on both sides, rotation-accumulation loses to the
# carryless dense product.
_SPARSE_CUTOFF = 64


@dataclass(frozen=True)
class CirculantPoly:
    """Sparse element of F2[x]/(x^r + 1): modulus degree plus sorted support."""

    r: int
    support: tuple[int, ...]

    def __post_init__(self):
        if self.r < 1:
            raise UnsupportedParameter(f"ring modulus degree must be >= 1, got {self.r}")
        prev = -1
        for e in self.support:
            if not 0 <= e < self.r:
                raise RangeError(f"exponent {e} outside [0, {self.r})")
            if e <= prev:
                raise ValueError("support must be strictly increasing")
            prev = e

    @classmethod
    def zero(cls, r: int) -> "CirculantPoly":
        return cls(r, ())

    @classmethod
    def one(cls, r: int) -> "CirculantPoly":
        return cls(r, (0,))

    @classmethod
    def from_exponents(cls, r: int, exponents) -> "CirculantPoly":
        return cls(r, tuple(sorted(int(e) for e in exponents)))

    @property
    def weight(self) -> int:
        return len(self.support)

    def is_zero(self) -> bool:
        return not self.support

    def __add__(self, other: "CirculantPoly") -> "CirculantPoly":
        return add(self, other)

    def __mul__(self, other: "CirculantPoly") -> "CirculantPoly":
        return mul(self, other)

    def __str__(self) -> str:
        if not self.support:
            return "0"
        terms = []
        for e in self.support:
            terms.append("1" if e == 0 else ("x" if e == 1 else f"x^{e}"))
        return "+".join(terms)


class DenseBits:
    """Mutable r-bit vector with word-packed storage and a cached weight.

    The weight is updated in O(1) on every flip; ``recount()`` recomputes it
    from the raw bits so tests can re-validate the cache after mutations.
    """

    __slots__ = ("r", "_bits", "weight")

    def __init__(self, r: int, bits: int = 0):
        if r < 1:
            raise UnsupportedParameter(f"length must be >= 1, got {r}")
        if bits < 0 or bits >> r:
            raise RangeError("bit pattern wider than the declared length")
        self.r = r
        self._bits = bits
        self.weight = bits.bit_count()

    @classmethod
    def zeros(cls, r: int) -> "DenseBits":
        return cls(r, 0)

    @classmethod
    def from_support(cls, r: int, support) -> "DenseBits":
        bits = 0
        for e in support:
            if not 0 <= e < r:
                raise RangeError(f"index {e} outside [0, {r})")
            bits |= 1 << e
        return cls(r, bits)

    @classmethod
    def from_bit_array(cls, arr: np.ndarray) -> "DenseBits":
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        packed = np.packbits(arr, bitorder="little")
        return cls(arr.shape[0], int.from_bytes(packed.tobytes(), "little"))

    @property
    def bits(self) -> int:
        return self._bits

    def get(self, i: int) -> int:
        if not 0 <= i < self.r:
            raise RangeError(f"index {i} outside [0, {self.r})")
        return (self._bits >> i) & 1

    __getitem__ = get

    def flip(self, i: int) -> None:
        if not 0 <= i < self.r:
            raise RangeError(f"index {i} outside [0, {self.r})")
        mask = 1 << i
        self.weight += -1 if self._bits & mask else 1
        self._bits ^= mask

    def recount(self) -> int:
        """Independent recount of set bits (cache validation hook)."""
        return self._bits.bit_count()

    def support(self) -> tuple[int, ...]:
        return _support_of_int(self._bits)

    def to_bit_array(self) -> np.ndarray:
        raw = self._bits.to_bytes((self.r + 7) // 8, "little")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        return bits[: self.r].copy()

    def rotated(self, k: int) -> "DenseBits":
        """Cyclic rotation moving bit i to bit (i + k) mod r."""
        if not 0 <= k < self.r:
            raise RangeError(f"rotation {k} outside [0, {self.r})")
        return DenseBits(self.r, _rotl(self._bits, k, self.r))

    def copy(self) -> "DenseBits":
        return DenseBits(self.r, self._bits)

    def __xor__(self, other: "DenseBits") -> "DenseBits":
        if self.r != other.r:
            raise DimensionMismatch(f"length mismatch: {self.r} vs {other.r}")
        return DenseBits(self.r, self._bits ^ other._bits)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DenseBits)
            and self.r == other.r
            and self._bits == other._bits
        )

    def __hash__(self):
        return hash((self.r, self._bits))

    def __repr__(self) -> str:
        return f"DenseBits(r={self.r}, weight={self.weight})"


def _rotl(x: int, k: int, r: int) -> int:
    if k == 0:
        return x
    return ((x << k) | (x >> (r - k))) & ((1 << r) - 1)


def _support_of_int(x: int) -> tuple[int, ...]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return tuple(out)


def shift(p: CirculantPoly, k: int) -> CirculantPoly:
    """Multiply by the monomial x^k, i.e. rotate every exponent by k.

    k must already be reduced: values outside [0, r) are rejected rather than
    silently wrapped, since a caller passing k >= r has a bookkeeping bug.
    """
    if not 0 <= k < p.r:
        raise RangeError(f"shift {k} outside [0, {p.r})")
    if k == 0:
        return p
    return CirculantPoly(p.r, tuple(sorted((e + k) % p.r for e in p.support)))


def add(a: CirculantPoly, b: CirculantPoly) -> CirculantPoly:
    """Characteristic-2 addition: symmetric difference of supports."""
    if a.r != b.r:
        raise DimensionMismatch(f"modulus mismatch: {a.r} vs {b.r}")
    return CirculantPoly(a.r, tuple(sorted(set(a.support) ^ set(b.support))))


def mul(a: CirculantPoly, b: CirculantPoly) -> CirculantPoly:
    """Ring product, equal to the XOR of shift(b, i) over i in support(a)."""
    if a.r != b.r:
        raise DimensionMismatch(f"modulus mismatch: {a.r} vs {b.r}")
    wa, wb = a.weight, b.weight
    if wa == 0 or wb == 0:
        return CirculantPoly.zero(a.r)
    if min(wa, wb) <= _SPARSE_CUTOFF:
        sparse, dense = (a, b) if wa <= wb else (b, a)
        dense_bits = to_dense(dense).bits
        acc = reduce(lambda s, k: s ^ _rotl(dense_bits, k, a.r), sparse.support, 0)
        return CirculantPoly(a.r, _support_of_int(acc))
    return _mul_dense_carryless(a, b)


def _spread(support, slot: int) -> int:
    """Place bit i at position i*slot, leaving guard bits between coefficients."""
    acc = 0
    for e in support:
        acc |= 1 << (e * slot)
    return acc


def _mul_dense_carryless(a: CirculantPoly, b: CirculantPoly) -> CirculantPoly:
    # Integer multiplication computes all coefficient counts at once if each
    # coefficient gets enough guard bits to hold its maximum count, which is
    # bounded by the smaller operand weight.
    r = a.r
    slot = min(a.weight, b.weight).bit_length() + 1
    prod = _spread(a.support, slot) * _spread(b.support, slot)
    nslots = 2 * r - 1
    raw = prod.to_bytes((nslots * slot + 7) // 8, "little")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    parity = bits[:: slot][:nslots]  # LSB of each slot = coefficient mod 2
    folded = parity[:r].copy()
    folded[: r - 1] ^= parity[r:]  # x^(r+e) == x^e
    return CirculantPoly(r, tuple(int(i) for i in np.flatnonzero(folded)))


def square(p: CirculantPoly) -> CirculantPoly:
    """Frobenius squaring: exponent doubling mod r.

    Requires odd r, where doubling permutes Z_r and the weight is preserved;
    for even r the map is not injective and exponents would collide.
    """
    if p.r % 2 == 0:
        raise UnsupportedParameter("square requires an odd modulus degree")
    return CirculantPoly(p.r, tuple(sorted((2 * e) % p.r for e in p.support)))


def to_dense(p: CirculantPoly) -> DenseBits:
    return DenseBits.from_support(p.r, p.support)


def from_dense(d: DenseBits) -> CirculantPoly:
    return CirculantPoly(d.r, d.support())
