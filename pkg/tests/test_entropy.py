import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irav import entropy_decode_block, entropy_encode_block
from irav.codec import BitReader, BitstreamError, BitWriter
from irav.codec.bitio import signed_to_unsigned, ue_bits, unsigned_to_signed
from irav.codec.entropy import block_bits, zigzag_order


class TestBitIO:
    def test_uint_round_trip(self):
        w = BitWriter()
        w.write_uint(0b1011, 4)
        w.write_uint(0, 3)
        w.write_uint(511, 9)
        w.byte_align()
        r = BitReader(w.getvalue())
        assert r.read_uint(4) == 0b1011
        assert r.read_uint(3) == 0
        assert r.read_uint(9) == 511

    def test_value_too_wide(self):
        w = BitWriter()
        with pytest.raises(ValueError):
            w.write_uint(4, 2)

    def test_exhaustion_reports_offset(self):
        r = BitReader(b"\xff")
        r.read_uint(8)
        with pytest.raises(BitstreamError, match="offset 8"):
            r.read_bit()

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 2000), st.integers(0, 2)), max_size=30))
    def test_exp_golomb_round_trip(self, pairs):
        w = BitWriter()
        for value, order in pairs:
            w.write_ue(value, order)
        w.byte_align()
        r = BitReader(w.getvalue())
        for value, order in pairs:
            assert r.read_ue(order) == value

    def test_ue_bits_matches_writer(self):
        for order in (0, 1, 2):
            for value in list(range(70)) + [255, 1000, 40000]:
                w = BitWriter()
                w.write_ue(value, order)
                assert w.bit_position == ue_bits(value, order), (value, order)

    def test_signed_mapping_bijective(self):
        seen = set()
        for v in range(-50, 51):
            u = signed_to_unsigned(v)
            assert u >= 0 and unsigned_to_signed(u) == v
            seen.add(u)
        assert seen == set(range(101))


class TestZigzag:
    def test_8x8_prefix(self):
        # classic zigzag starts (0,0),(0,1),(1,0),(2,0),(1,1),(0,2)
        zz = zigzag_order(8)
        assert list(zz[:6]) == [0, 1, 8, 16, 9, 2]

    def test_permutation(self):
        for n in (8, 16, 32):
            zz = zigzag_order(n)
            assert sorted(zz) == list(range(n * n))


class TestBlockCoding:
    def encode_bits(self, levels):
        w = BitWriter()
        entropy_encode_block(levels, w)
        return w

    def test_all_zero_is_one_bit(self):
        w = self.encode_bits(np.zeros((8, 8), np.int32))
        assert w.bit_position == 1

    def test_single_dc_plus_one_is_six_bits(self):
        levels = np.zeros((8, 8), np.int32)
        levels[0, 0] = 1
        # cbf(1) + EG0(0)(1) + significance(1) + EG1(0)(2) + sign(1)
        assert self.encode_bits(levels).bit_position == 6

    def test_round_trip_10000_sparse(self, rng):
        for _ in range(10000):
            levels = np.zeros(64, np.int32)
            k = rng.integers(0, 8)
            pos = rng.choice(64, size=k, replace=False)
            levels[pos] = rng.integers(-30, 31, size=k)
            levels = levels.reshape(8, 8)
            w = self.encode_bits(levels)
            w.byte_align()
            back = entropy_decode_block(BitReader(w.getvalue()), 8)
            assert np.array_equal(levels, back)

    @pytest.mark.parametrize("n", [8, 16, 32])
    def test_round_trip_dense(self, n, rng):
        levels = rng.integers(-1000, 1000, (n, n)).astype(np.int32)
        w = self.encode_bits(levels)
        w.byte_align()
        assert np.array_equal(entropy_decode_block(BitReader(w.getvalue()), n), levels)

    def test_block_bits_exact(self, rng):
        for _ in range(300):
            n = int(rng.choice([8, 16, 32]))
            levels = np.where(rng.random((n, n)) < 0.2,
                              rng.integers(-500, 501, (n, n)), 0).astype(np.int32)
            assert block_bits(levels) == self.encode_bits(levels).bit_position

    def test_malformed_stream_errors(self):
        # cbf=1 then EG0 pointing past the block
        w = BitWriter()
        w.write_bit(1)
        w.write_ue(64, 0)  # out of range for 8x8
        w.byte_align()
        with pytest.raises(BitstreamError, match="out of range"):
            entropy_decode_block(BitReader(w.getvalue()), 8)

    def test_truncated_stream_errors(self):
        levels = np.zeros((8, 8), np.int32)
        levels[3, 4] = -9
        w = self.encode_bits(levels)
        w.byte_align()
        data = w.getvalue()[:-1]
        with pytest.raises(BitstreamError, match="offset"):
            entropy_decode_block(BitReader(data), 8)
