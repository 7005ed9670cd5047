import math
import time

import numpy as np
import pytest

from qcbf import (
    CirculantPoly,
    ErrorVector,
    NcSyndromeTable,
    QcMdpcCode,
    SplitMix64,
    nc_error,
    random_code,
    shift,
    syndrome,
)
from qcbf.exceptions import RangeError, TableBuildError, UnsupportedParameter


def tiny_code():
    h1 = CirculantPoly.from_exponents(7, [0, 1, 3])
    h2 = CirculantPoly.from_exponents(7, [0, 2, 3])
    return QcMdpcCode(7, 3, h1, h2)


class TestNcError:
    def test_block_anchors(self, small_code):
        assert nc_error(small_code, 0).support == small_code.h1.support
        assert nc_error(small_code, small_code.r).support == tuple(
            small_code.r + k for k in small_code.h2.support
        )

    def test_out_of_range(self, small_code):
        with pytest.raises(RangeError):
            nc_error(small_code, 2 * small_code.r)

    def test_syndromes_match_table_entries(self, small_code, small_table):
        for i in range(2 * small_code.r):
            s = syndrome(small_code, nc_error(small_code, i))
            row_pos, _ = small_table._search(np.asarray(s.support(), dtype=np.int32))
            assert row_pos >= 0
            assert small_table.nc_indices[row_pos] == i


class TestBuild:
    def test_known_entry(self):
        # h1 = 1+x+x^3 over r=7: h1^2 = 1+x^2+x^6, shifted by 2 -> {1, 2, 4}
        code = tiny_code()
        table = NcSyndromeTable.build(code)
        s = syndrome(code, nc_error(code, 2))
        assert s.support() == (1, 2, 4)
        assert table.lookup(s) == 2

    def test_entry_count_and_weights(self):
        for seed in range(4):
            code = random_code(101, 9, seed=seed)
            table = NcSyndromeTable.build(code)
            assert len(table) == 2 * code.r
            assert table.rows.shape == (2 * code.r, code.v)
            assert np.all(np.diff(table.rows, axis=1) > 0)  # v distinct exponents

    def test_rows_sorted_and_immutable(self, small_table):
        rows = small_table.rows
        for k in range(len(small_table) - 1):
            assert tuple(rows[k]) < tuple(rows[k + 1])
        with pytest.raises(ValueError):
            rows[0, 0] = 99

    def test_duplicate_syndromes_abort(self):
        # h2 a shift of h1 makes every block-2 syndrome collide with a
        # block-1 syndrome
        h1 = CirculantPoly.from_exponents(7, [0, 1, 3])
        code = QcMdpcCode(7, 3, h1, shift(h1, 1))
        with pytest.raises(TableBuildError, match=r"near-codewords \d+ and \d+"):
            NcSyndromeTable.build(code)

    def test_build_time_roughly_linear_in_r(self):
        def build_time(r):
            code = random_code(r, 15, seed=5)
            best = math.inf
            for _ in range(5):
                t0 = time.perf_counter()
                NcSyndromeTable.build(code)
                best = min(best, time.perf_counter() - t0)
            return best

        small, big = build_time(6007), build_time(12015)
        assert big / small <= 2.5, f"doubling r scaled build time by {big / small:.2f}"


class TestLookup:
    def test_all_entries_round_trip(self, small_code, small_table):
        for i in range(2 * small_code.r):
            s = syndrome(small_code, nc_error(small_code, i))
            assert small_table.lookup(s) == i

    def test_random_weight_v_probes_miss(self, small_code, small_table):
        # collision probability per probe is 2r / C(r, v) ~ 1e-10: a hit is a bug
        rng = SplitMix64(99)
        for _ in range(2000):
            probe = np.asarray(rng.sample_subset(small_code.r, small_code.v), dtype=np.int32)
            assert small_table.lookup(probe) is None

    def test_one_bit_perturbation_misses(self, small_code, small_table):
        rng = SplitMix64(55)
        r = small_code.r
        for _ in range(50):
            i = rng.next_below(2 * r)
            supp = set(syndrome(small_code, nc_error(small_code, i)).support())
            removed = sorted(supp)[rng.next_below(len(supp))]
            added = rng.next_below(r)
            while added in supp:
                added = rng.next_below(r)
            perturbed = sorted((supp - {removed}) | {added})
            assert small_table.lookup(np.asarray(perturbed, dtype=np.int32)) is None

    def test_comparison_budget(self, small_code, small_table):
        bound = math.ceil(math.log2(2 * small_code.r))
        worst = 0
        for i in range(2 * small_code.r):
            query = np.asarray(
                syndrome(small_code, nc_error(small_code, i)).support(), dtype=np.int32
            )
            _, ncomp = small_table._search(query)
            worst = max(worst, ncomp)
        assert worst <= bound


class TestSerialization:
    def test_cache_round_trip(self, tmp_path, small_code, small_table):
        path = tmp_path / "table.bin"
        small_table.save(path)
        loaded = NcSyndromeTable.load(path)
        assert np.array_equal(loaded.rows, small_table.rows)
        assert np.array_equal(loaded.nc_indices, small_table.nc_indices)

    def test_loader_rejects_corruption(self, tmp_path, small_table):
        path = tmp_path / "table.bin"
        small_table.save(path)
        blob = bytearray(path.read_bytes())
        blob[16:20] = (999999).to_bytes(4, "little")  # first stored exponent
        path.write_bytes(bytes(blob))
        with pytest.raises(UnsupportedParameter):
            NcSyndromeTable.load(path)

    def test_loader_rejects_bad_magic(self, tmp_path, small_table):
        path = tmp_path / "table.bin"
        small_table.save(path)
        blob = bytearray(path.read_bytes())
        blob[0:4] = b"XXXX"
        path.write_bytes(bytes(blob))
        with pytest.raises(UnsupportedParameter):
            NcSyndromeTable.load(path)

    def test_packed_size_within_budget(self, small_table, toy_table):
        for table in (small_table, toy_table):
            r, v = table.r, table.v
            budget = 2 * r * (v + 1) * math.ceil(math.log2(2 * r)) / 8
            assert len(table.packed_bytes()) <= 1.25 * budget
