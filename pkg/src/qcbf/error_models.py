"""Error samplers and near-codeword overlap analysis.

Besides uniform weight-t errors, this module samples errors conditioned on
their maximum overlap with the near-codeword family: a (t, u)-almost
near-codeword is a weight-t vector whose largest support intersection with
any shifted key column is exactly u. Overlaps are computed with the
difference trick: coordinate a of block b lies in the support of the
near-codeword shifted by d iff d == (a - j) mod r for some key exponent j,
so a histogram over (a - j) mod r counts every overlap in O(wt(e) * v).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .code import ErrorVector, QcMdpcCode
from .exceptions import RangeError, SamplingExhausted, UnsupportedParameter
from .nc_table import nc_error
from .rng import SplitMix64


@dataclass(frozen=True)
class IntersectionProfile:
    """Overlap histogram of an error with all 2r near-codewords."""

    max_u: int
    close_ncs: tuple[int, ...]  # near-codeword indices attaining max_u
    block_histograms: tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class BitClassification:
    """Bad bits: error coordinates inside a close near-codeword's support.
    Suspicious bits: error-free coordinates inside such a support."""

    bad_bits: tuple[int, ...]
    suspicious_bits: tuple[int, ...]


def sample_uniform_error(r: int, t: int, rng: SplitMix64) -> ErrorVector:
    """Uniform weight-t error on 2r coordinates."""
    if not 0 <= t <= 2 * r:
        raise RangeError(f"weight {t} outside [0, {2 * r}]")
    return ErrorVector(r, tuple(rng.sample_subset(2 * r, t)))


def intersection_profile(code: QcMdpcCode, e: ErrorVector) -> IntersectionProfile:
    """Max overlap with any near-codeword, plus the full per-shift histograms."""
    if e.weight == 0:
        raise UnsupportedParameter("intersection profile undefined for the zero vector")
    r = code.r
    e1, e2 = e.block_supports()
    h1, h2 = code.h_support_arrays()
    hists = []
    for eb, hb in ((e1, h1), (e2, h2)):
        if eb.size:
            hists.append(np.bincount(((eb[:, None] - hb[None, :]) % r).ravel(), minlength=r))
        else:
            hists.append(np.zeros(r, dtype=np.int64))
    max_u = int(max(hists[0].max(), hists[1].max()))
    close = np.concatenate(
        [np.flatnonzero(hists[0] == max_u), r + np.flatnonzero(hists[1] == max_u)]
    )
    return IntersectionProfile(max_u, tuple(int(i) for i in close), (hists[0], hists[1]))


def classify_bits(
    code: QcMdpcCode, e: ErrorVector, profile: IntersectionProfile
) -> BitClassification:
    """Split the union of close near-codeword supports into bad/suspicious bits."""
    union: set[int] = set()
    for i in profile.close_ncs:
        union.update(nc_error(code, i).support)
    esupp = set(e.support)
    return BitClassification(
        bad_bits=tuple(sorted(union & esupp)),
        suspicious_bits=tuple(sorted(union - esupp)),
    )


def _map_into_complement(samples: list[int], forbidden: list[int]) -> list[int]:
    # samples are draws from [0, N - len(forbidden)); shift each one past the
    # forbidden coordinates below it. Both inputs ascending.
    out = []
    for x in samples:
        for f in forbidden:
            if f <= x:
                x += 1
            else:
                break
        out.append(x)
    return out


def sample_almost_nc(
    code: QcMdpcCode,
    t: int,
    u: int,
    rng: SplitMix64,
    max_attempts: int = 1000,
) -> ErrorVector:
    """Sample a weight-t error with maximum near-codeword overlap exactly u.

    Construction: pick a block and shift uniformly, take a uniform u-subset of
    that near-codeword's support, then fill with t-u coordinates drawn outside
    it. The filler may collide with *other* near-codewords and push the true
    maximum above u, so every candidate is re-profiled and rejected unless the
    maximum equals u exactly.
    """
    r, v = code.r, code.v
    if not 1 <= u <= min(t, v):
        raise RangeError(f"u={u} outside [1, min(t={t}, v={v})]")
    if t > 2 * r:
        raise RangeError(f"weight {t} exceeds the {2 * r} coordinates")
    if t - u > 2 * r - v:
        raise RangeError("filler weight exceeds the coordinates outside one near-codeword")
    if max_attempts < 1:
        raise RangeError("max_attempts must be >= 1")

    for attempt in range(1, max_attempts + 1):
        block = rng.next_below(2)
        shift_i = rng.next_below(r)
        anchor = nc_error(code, shift_i + block * r)
        anchor_supp = list(anchor.support)
        inside = [anchor_supp[k] for k in rng.sample_subset(v, u)]
        raw = rng.sample_subset(2 * r - v, t - u)
        outside = _map_into_complement(raw, anchor_supp)
        e = ErrorVector.from_support(r, inside + outside)
        if intersection_profile(code, e).max_u == u:
            return e
    raise SamplingExhausted(
        f"no (t={t}, u={u}) vector accepted in {max_attempts} attempts "
        f"(acceptance rate < {1.0 / max_attempts:.2e})"
    )
