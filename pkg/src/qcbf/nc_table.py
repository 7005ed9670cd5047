"""Near-codeword syndrome lookup table.

The 2r near-codewords of a double-circulant code are the shifted key columns
(x^i * h1, 0) and (0, x^i * h2). Their syndromes are x^i * h1^2 and
x^i * h2^2, each of weight exactly v for odd r. The table stores every
syndrome as its sorted v-exponent support together with the originating
near-codeword index, sorted lexicographically so membership queries are a
binary search costing O(log(r)) support comparisons.
"""

from __future__ import annotations

import struct

import numpy as np

from .code import ErrorVector, QcMdpcCode
from .exceptions import RangeError, TableBuildError, UnsupportedParameter
from .ring import DenseBits, square

_MAGIC = b"QCNC"
_VERSION = 1


def nc_error(code: QcMdpcCode, nc_index: int) -> ErrorVector:
    """The near-codeword with the given index, as a weight-v error vector.

    Indices below r select shifted h1 columns in block 1; the rest select
    shifted h2 columns in block 2.
    """
    r = code.r
    if not 0 <= nc_index < 2 * r:
        raise RangeError(f"near-codeword index {nc_index} outside [0, {2 * r})")
    if nc_index < r:
        coords = ((nc_index + k) % r for k in code.h1.support)
    else:
        coords = (r + (nc_index - r + k) % r for k in code.h2.support)
    return ErrorVector.from_support(r, coords)


class NcSyndromeTable:
    """Sorted table of all 2r near-codeword syndromes with their indices."""

    def __init__(self, r: int, v: int, rows: np.ndarray, nc_indices: np.ndarray):
        if rows.shape != (2 * r, v):
            raise UnsupportedParameter(f"rows shape {rows.shape}, expected ({2 * r}, {v})")
        if nc_indices.shape != (2 * r,):
            raise UnsupportedParameter("nc_indices length must be 2r")
        self.r = r
        self.v = v
        self.rows = np.ascontiguousarray(rows, dtype=np.int32)
        self.nc_indices = np.ascontiguousarray(nc_indices, dtype=np.int32)
        self.rows.flags.writeable = False
        self.nc_indices.flags.writeable = False

    def __len__(self) -> int:
        return self.rows.shape[0]

    @classmethod
    def build(cls, code: QcMdpcCode) -> "NcSyndromeTable":
        """Enumerate all 2r syndromes (one squaring per block, then shifts)."""
        r, v = code.r, code.v
        base1 = np.asarray(square(code.h1).support, dtype=np.int64)
        base2 = np.asarray(square(code.h2).support, dtype=np.int64)
        shifts = np.arange(r, dtype=np.int64)[:, None]
        rows = np.empty((2 * r, v), dtype=np.int32)
        rows[:r] = np.sort((shifts + base1[None, :]) % r, axis=1)
        rows[r:] = np.sort((shifts + base2[None, :]) % r, axis=1)
        nc_indices = np.arange(2 * r, dtype=np.int32)

        order = np.lexsort(rows.T[::-1])
        rows = rows[order]
        nc_indices = nc_indices[order]

        dup = np.flatnonzero(np.all(rows[1:] == rows[:-1], axis=1))
        if dup.size:
            k = int(dup[0])
            a, b = int(nc_indices[k]), int(nc_indices[k + 1])
            raise TableBuildError(
                f"near-codewords {a} and {b} share a syndrome; "
                "this key cannot be disambiguated by syndrome lookup"
            )
        return cls(r, v, rows, nc_indices)

    def _search(self, query: np.ndarray) -> tuple[int, int]:
        """Binary search; returns (row position or -1, comparisons used)."""
        rows = self.rows
        lo, hi = 0, rows.shape[0]
        ncomp = 0
        while lo < hi:
            mid = (lo + hi) // 2
            row = rows[mid]
            ncomp += 1
            neq = row != query
            if not neq.any():
                return mid, ncomp
            first = int(np.argmax(neq))
            if row[first] < query[first]:
                lo = mid + 1
            else:
                hi = mid
        return -1, ncomp

    def lookup(self, s) -> int | None:
        """Near-codeword index whose syndrome equals s, if any.

        Callers gate on wt(s) == v before looking up; that precondition is
        asserted here rather than re-checked in release runs.
        """
        if isinstance(s, DenseBits):
            query = np.asarray(s.support(), dtype=np.int32)
        else:
            arr = np.asarray(s)
            if arr.dtype == np.uint8 and arr.shape == (self.r,):
                query = np.flatnonzero(arr).astype(np.int32)
            else:
                query = np.asarray(sorted(int(x) for x in arr), dtype=np.int32)
        assert query.shape[0] == self.v, "lookup reached without the weight-v gate"
        pos, _ = self._search(query)
        return int(self.nc_indices[pos]) if pos >= 0 else None

    def save(self, path) -> None:
        """Cache file: (magic, version, r, v) header then sorted records of
        v little-endian u32 exponents plus a u32 near-codeword index."""
        records = np.empty((len(self), self.v + 1), dtype="<u4")
        records[:, : self.v] = self.rows
        records[:, self.v] = self.nc_indices
        with open(path, "wb") as fh:
            fh.write(struct.pack("<4sIII", _MAGIC, _VERSION, self.r, self.v))
            fh.write(records.tobytes())

    @classmethod
    def load(cls, path) -> "NcSyndromeTable":
        with open(path, "rb") as fh:
            header = fh.read(16)
            if len(header) != 16:
                raise UnsupportedParameter("table file truncated header")
            magic, version, r, v = struct.unpack("<4sIII", header)
            if magic != _MAGIC:
                raise UnsupportedParameter("not a near-codeword table file")
            if version != _VERSION:
                raise UnsupportedParameter(f"unsupported table version {version}")
            body = fh.read()
        expect = 2 * r * (v + 1) * 4
        if len(body) != expect:
            raise UnsupportedParameter(f"table body is {len(body)} bytes, expected {expect}")
        records = np.frombuffer(body, dtype="<u4").reshape(2 * r, v + 1)
        rows = records[:, :v].astype(np.int32)
        nc_indices = records[:, v].astype(np.int32)
        table = cls(r, v, rows, nc_indices)
        table._validate()
        return table

    def _validate(self) -> None:
        rows, r = self.rows, self.r
        if rows.size and (rows.min() < 0 or rows.max() >= r):
            raise UnsupportedParameter("table exponent outside [0, r)")
        if not np.all(np.diff(rows, axis=1) > 0):
            raise UnsupportedParameter("table row support not strictly increasing")
        neq = rows[1:] != rows[:-1]
        has_diff = neq.any(axis=1)
        if not has_diff.all():
            raise UnsupportedParameter("duplicate syndrome rows in table")
        first = neq.argmax(axis=1)
        sel = np.arange(rows.shape[0] - 1)
        if not np.all(rows[1:][sel, first] > rows[:-1][sel, first]):
            raise UnsupportedParameter("table rows not sorted")
        if not np.array_equal(np.sort(self.nc_indices), np.arange(2 * r)):
            raise UnsupportedParameter("table indices are not a permutation of [0, 2r)")

    def packed_bytes(self) -> bytes:
        """Bit-packed image: every exponent and index in ceil(log2(2r)) bits.

        This is the compact form whose size realizes the r*v*log2(r) memory
        footprint; the cache file above trades space for mmap-friendliness.
        """
        width = (2 * self.r - 1).bit_length()
        vals = np.empty((len(self), self.v + 1), dtype=np.uint64)
        vals[:, : self.v] = self.rows
        vals[:, self.v] = self.nc_indices
        flat = vals.ravel()
        bits = ((flat[:, None] >> np.arange(width, dtype=np.uint64)[None, :]) & 1).astype(np.uint8)
        payload = np.packbits(bits.ravel(), bitorder="little").tobytes()
        return struct.pack("<4sIII", b"QCNP", _VERSION, self.r, self.v) + payload
