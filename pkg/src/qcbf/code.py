"""Double-circulant QC-MDPC code: syndromes, counters, adjacency.

The parity-check matrix is H = (H1, H2) with both blocks r x r circulant of
column weight v. Keys are held as the polynomials h1, h2 associated with the
transposed blocks, so column i of block b has support Supp(x^(i mod r) * h_b)
and the syndrome of an error e = (e1, e2) is the polynomial e1*h1 + e2*h2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .exceptions import RangeError, UnsupportedParameter
from .ring import CirculantPoly, DenseBits, shift
from .rng import SplitMix64

# The syndrome type: a dense r-bit vector with cached weight.
Syndrome = DenseBits

# Counters are plain integer arrays of length 2r with entries in [0, v].
CounterVector = np.ndarray


@dataclass(frozen=True)
class QcMdpcCode:
    """Double-circulant code description: block size r, weight v, keys h1, h2."""

    r: int
    v: int
    h1: CirculantPoly
    h2: CirculantPoly

    def __post_init__(self):
        if self.r % 2 == 0 or self.r < 3:
            raise UnsupportedParameter(f"block size must be odd and >= 3, got {self.r}")
        if self.v % 2 == 0 or not 0 < self.v < self.r:
            raise UnsupportedParameter(f"circulant weight must be odd and in (0, r), got {self.v}")
        for name, h in (("h1", self.h1), ("h2", self.h2)):
            if h.r != self.r:
                raise UnsupportedParameter(f"{name} has modulus {h.r}, expected {self.r}")
            if h.weight != self.v:
                raise UnsupportedParameter(f"{name} has weight {h.weight}, expected {self.v}")

    @property
    def n(self) -> int:
        return 2 * self.r

    def h_support_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Key supports as int32 arrays (the layout decoder kernels consume)."""
        return (
            np.asarray(self.h1.support, dtype=np.int32),
            np.asarray(self.h2.support, dtype=np.int32),
        )


@dataclass(frozen=True)
class ErrorVector:
    """Error pattern on 2r coordinates; block 1 is [0, r), block 2 is [r, 2r)."""

    r: int
    support: tuple[int, ...]

    def __post_init__(self):
        prev = -1
        for c in self.support:
            if not 0 <= c < 2 * self.r:
                raise RangeError(f"coordinate {c} outside [0, {2 * self.r})")
            if c <= prev:
                raise ValueError("support must be strictly increasing")
            prev = c

    @classmethod
    def zero(cls, r: int) -> "ErrorVector":
        return cls(r, ())

    @classmethod
    def from_support(cls, r: int, coords) -> "ErrorVector":
        return cls(r, tuple(sorted(int(c) for c in coords)))

    @property
    def weight(self) -> int:
        return len(self.support)

    def block_supports(self) -> tuple[np.ndarray, np.ndarray]:
        """In-block coordinate arrays (block-2 coordinates reduced by r)."""
        arr = np.asarray(self.support, dtype=np.int64)
        e1 = arr[arr < self.r]
        e2 = arr[arr >= self.r] - self.r
        return e1, e2


def random_code(r: int, v: int, seed: int) -> QcMdpcCode:
    """Generic random code: both key supports are uniform v-subsets of [0, r)."""
    rng = SplitMix64(seed)
    h1 = CirculantPoly(r, tuple(rng.sample_subset(r, v)))
    h2 = CirculantPoly(r, tuple(rng.sample_subset(r, v)))
    return QcMdpcCode(r, v, h1, h2)


def column_support(code: QcMdpcCode, i: int) -> CirculantPoly:
    """Support of column i of H, as a polynomial: x^(i mod r) * h_b."""
    if not 0 <= i < code.n:
        raise RangeError(f"column {i} outside [0, {code.n})")
    if i < code.r:
        return shift(code.h1, i)
    return shift(code.h2, i - code.r)


def syndrome(code: QcMdpcCode, e: ErrorVector) -> Syndrome:
    """s = e H^T, the XOR of the column supports selected by e."""
    if e.r != code.r:
        raise UnsupportedParameter(f"error vector has r={e.r}, code has r={code.r}")
    return Syndrome.from_bit_array(syndrome_bits(code, e))


def syndrome_bits(code: QcMdpcCode, e: ErrorVector) -> np.ndarray:
    """Dense uint8 syndrome, the working format of the decoders."""
    r = code.r
    e1, e2 = e.block_supports()
    h1, h2 = code.h_support_arrays()
    counts = np.zeros(r, dtype=np.int64)
    if e1.size:
        counts += np.bincount(((e1[:, None] + h1[None, :]) % r).ravel(), minlength=r)
    if e2.size:
        counts += np.bincount(((e2[:, None] + h2[None, :]) % r).ravel(), minlength=r)
    return (counts & 1).astype(np.uint8)


def _as_bit_array(s, r: int) -> np.ndarray:
    if isinstance(s, DenseBits):
        if s.r != r:
            raise UnsupportedParameter(f"syndrome length {s.r}, expected {r}")
        return s.to_bit_array()
    arr = np.asarray(s, dtype=np.uint8)
    if arr.shape != (r,):
        raise UnsupportedParameter(f"syndrome shape {arr.shape}, expected ({r},)")
    return arr


def counters(code: QcMdpcCode, s) -> CounterVector:
    """Unsatisfied-check counters for all 2r coordinates.

    sigma_i = |Supp(s) intersect Supp(column i)|. Computed by transposed
    iteration: every set syndrome bit p touches the v columns per block whose
    support contains p, i.e. coordinates (p - k) mod r for k in Supp(h_b).
    """
    r = code.r
    arr = _as_bit_array(s, r)
    supp = np.flatnonzero(arr)
    out = np.zeros(2 * r, dtype=np.int32)
    if supp.size == 0:
        return out
    h1, h2 = code.h_support_arrays()
    out[:r] = np.bincount(((supp[:, None] - h1[None, :]) % r).ravel(), minlength=r)
    out[r:] = np.bincount(((supp[:, None] - h2[None, :]) % r).ravel(), minlength=r)
    return out


def adjacency(code: QcMdpcCode, i: int, j: int) -> int:
    """Number of parity checks shared by columns i and j; zero on the diagonal."""
    if not 0 <= i < code.n or not 0 <= j < code.n:
        raise RangeError(f"column pair ({i}, {j}) outside [0, {code.n})")
    if i == j:
        return 0
    a = set(column_support(code, i).support)
    b = set(column_support(code, j).support)
    return len(a & b)


def counter_approximation(code: QcMdpcCode, e: ErrorVector, i: int) -> int:
    """Adjacency-based counter estimate for coordinate i under error e.

    v minus the adjacency sum over the other error coordinates when i is in
    error, the plain adjacency sum otherwise. Diagnostic only; decoders never
    use this.
    """
    if not 0 <= i < code.n:
        raise RangeError(f"coordinate {i} outside [0, {code.n})")
    in_error = i in e.support
    total = sum(adjacency(code, i, j) for j in e.support if j != i)
    return code.v - total if in_error else total


def save_code(code: QcMdpcCode, path) -> None:
    """Write the canonical JSON code file (sorted supports, decimal ints)."""
    doc = {
        "r": code.r,
        "v": code.v,
        "h1_support": list(code.h1.support),
        "h2_support": list(code.h2.support),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_code(path) -> QcMdpcCode:
    """Read and fully re-validate a JSON code file."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    for key in ("r", "v", "h1_support", "h2_support"):
        if key not in doc:
            raise UnsupportedParameter(f"code file missing field '{key}'")
    r, v = doc["r"], doc["v"]
    if not isinstance(r, int) or not isinstance(v, int):
        raise UnsupportedParameter("fields 'r' and 'v' must be integers")
    def _poly(key):
        supp = doc[key]
        if not isinstance(supp, list) or any(not isinstance(x, int) for x in supp):
            raise UnsupportedParameter(f"field '{key}' must be a list of integers")
        if supp != sorted(set(supp)):
            raise UnsupportedParameter(f"field '{key}' must be strictly sorted")
        return CirculantPoly(r, tuple(supp))
    return QcMdpcCode(r, v, _poly("h1_support"), _poly("h2_support"))
