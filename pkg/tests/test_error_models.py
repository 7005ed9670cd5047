import math

import numpy as np
import pytest

from qcbf import (
    ErrorVector,
    SplitMix64,
    classify_bits,
    intersection_profile,
    nc_error,
    random_code,
    sample_almost_nc,
    sample_uniform_error,
)
from qcbf.error_models import _map_into_complement
from qcbf.exceptions import RangeError, SamplingExhausted, UnsupportedParameter


def brute_force_profile_max(code, e):
    """Oracle: scan every near-codeword support explicitly."""
    esupp = set(e.support)
    best = 0
    for i in range(2 * code.r):
        best = max(best, len(esupp & set(nc_error(code, i).support)))
    return best


class TestUniformSampler:
    def test_zero_weight(self):
        assert sample_uniform_error(101, 0, SplitMix64(1)).weight == 0

    def test_full_weight(self):
        e = sample_uniform_error(7, 14, SplitMix64(1))
        assert e.support == tuple(range(14))

    def test_weight_too_large(self):
        with pytest.raises(RangeError):
            sample_uniform_error(7, 15, SplitMix64(1))

    def test_per_coordinate_frequency(self):
        # binomial check at 3 sigma with a frozen stream (202 coordinates are
        # checked at once, so the seed matters; 0 passes with worst z = 2.86)
        r, t, draws = 101, 9, 100_000
        rng = SplitMix64(0)
        hits = np.zeros(2 * r, dtype=np.int64)
        for _ in range(draws):
            hits[list(sample_uniform_error(r, t, rng).support)] += 1
        p = t / (2 * r)
        sigma = math.sqrt(draws * p * (1 - p))
        assert np.all(np.abs(hits - draws * p) <= 3 * sigma)


class TestIntersectionProfile:
    def test_near_codeword_self_overlap(self, small_code):
        rng = SplitMix64(2)
        for _ in range(10):
            i = rng.next_below(2 * small_code.r)
            prof = intersection_profile(small_code, nc_error(small_code, i))
            assert prof.max_u == small_code.v
            assert i in prof.close_ncs

    def test_single_coordinate(self, small_code):
        r, v = small_code.r, small_code.v
        prof = intersection_profile(small_code, ErrorVector(r, (5,)))
        assert prof.max_u == 1
        assert len(prof.close_ncs) == v
        assert all(i < r for i in prof.close_ncs)  # block-1 coordinate
        prof2 = intersection_profile(small_code, ErrorVector(r, (r + 5,)))
        assert len(prof2.close_ncs) == v
        assert all(i >= r for i in prof2.close_ncs)

    def test_difference_method_matches_brute_force(self, small_code):
        rng = SplitMix64(31)
        for _ in range(100):
            t = 1 + rng.next_below(12)
            e = sample_uniform_error(small_code.r, t, rng)
            prof = intersection_profile(small_code, e)
            assert prof.max_u == brute_force_profile_max(small_code, e)

    def test_shift_invariance(self, small_code):
        # rotating both blocks by the same offset preserves the profile maximum
        r = small_code.r
        rng = SplitMix64(77)
        for _ in range(20):
            e = sample_uniform_error(r, 7, rng)
            d = rng.next_below(r)
            e1, e2 = e.block_supports()
            shifted = sorted(
                [int((c + d) % r) for c in e1] + [int(r + (c + d) % r) for c in e2]
            )
            prof_a = intersection_profile(small_code, e)
            prof_b = intersection_profile(small_code, ErrorVector.from_support(r, shifted))
            assert prof_a.max_u == prof_b.max_u

    def test_zero_vector_rejected(self, small_code):
        with pytest.raises(UnsupportedParameter):
            intersection_profile(small_code, ErrorVector.zero(small_code.r))


class TestClassifyBits:
    def test_full_overlap_unique_close_nc(self, small_code):
        i = 17
        e = nc_error(small_code, i)
        prof = intersection_profile(small_code, e)
        marks = classify_bits(small_code, e, prof)
        if prof.close_ncs == (i,):
            assert set(marks.bad_bits) == set(e.support)
            assert marks.suspicious_bits == ()

    def test_counts_with_unique_close_nc(self, toy_code):
        rng = SplitMix64(5)
        v = toy_code.v
        for _ in range(20):
            u = 10 + rng.next_below(4)
            e = sample_almost_nc(toy_code, t=u, u=u, rng=rng)
            prof = intersection_profile(toy_code, e)
            marks = classify_bits(toy_code, e, prof)
            assert set(marks.bad_bits) <= set(e.support)
            assert not set(marks.suspicious_bits) & set(e.support)
            if len(prof.close_ncs) == 1:
                assert len(marks.bad_bits) == u
                assert len(marks.suspicious_bits) == v - u

    def test_union_over_multiple_close_ncs(self, small_code):
        # a single coordinate has v close near-codewords; the union of their
        # supports is larger than one support
        e = ErrorVector(small_code.r, (5,))
        prof = intersection_profile(small_code, e)
        marks = classify_bits(small_code, e, prof)
        assert marks.bad_bits == (5,)
        assert len(marks.suspicious_bits) > small_code.v - 1


class TestAlmostNcSampler:
    def test_u_equals_t(self, small_code):
        rng = SplitMix64(4)
        for _ in range(20):
            e = sample_almost_nc(small_code, t=3, u=3, rng=rng)
            assert e.weight == 3
            assert intersection_profile(small_code, e).max_u == 3

    def test_exactness_reverified(self, small_code):
        rng = SplitMix64(6)
        for u in (2, 3, 4):
            for _ in range(10):
                e = sample_almost_nc(small_code, t=6, u=u, rng=rng)
                assert e.weight == 6
                assert intersection_profile(small_code, e).max_u == u
                assert brute_force_profile_max(small_code, e) == u

    def test_parameter_validation(self, small_code):
        rng = SplitMix64(1)
        with pytest.raises(RangeError):
            sample_almost_nc(small_code, t=5, u=0, rng=rng)
        with pytest.raises(RangeError):
            sample_almost_nc(small_code, t=5, u=6, rng=rng)
        with pytest.raises(RangeError):
            sample_almost_nc(small_code, t=5, u=small_code.v + 1, rng=rng)

    def test_exhaustion_reported(self):
        # u=1 with t*v > 2r is infeasible: some near-codeword always overlaps
        # the error twice, so every candidate is rejected
        code = random_code(7, 3, seed=2)
        with pytest.raises(SamplingExhausted, match="acceptance"):
            sample_almost_nc(code, t=5, u=1, rng=SplitMix64(3), max_attempts=50)

    @pytest.mark.slow
    def test_bike_scale_acceptance_rate(self):
        code = random_code(12323, 71, seed=42)
        rng = SplitMix64(8)
        accepted = 0
        total = 100
        for _ in range(total):
            try:
                sample_almost_nc(code, t=134, u=36, rng=rng, max_attempts=1)
                accepted += 1
            except SamplingExhausted:
                pass
        assert accepted / total >= 0.5


class TestComplementMapping:
    def test_small_cases(self):
        assert _map_into_complement([0, 1, 2], [0, 1, 2]) == [3, 4, 5]
        assert _map_into_complement([0, 2, 3], [2, 5]) == [0, 3, 4]

    def test_bijection_property(self):
        rng = SplitMix64(9)
        n = 50
        for _ in range(50):
            forbidden = rng.sample_subset(n, 7)
            allowed = [x for x in range(n) if x not in forbidden]
            mapped = _map_into_complement(list(range(n - 7)), forbidden)
            assert mapped == allowed
