from itertools import product
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarmoments.codebook import (
    CodeSpec,
    Path,
    channel_symbols,
    encode_monomial_sum,
    encode_plotkin,
    message_vector,
    monomial_codeword,
    rm_info_set,
)


def evaluate_monomial(m, bits):
    """Independent oracle: evaluate prod x_l^a_l at the points in order."""
    out = []
    for x in product((0, 1), repeat=m):  # x_1 varies slowest
        v = 1
        for xl, al in zip(x, bits):
            if al:
                v &= xl
        out.append(v)
    return np.array(out, dtype=np.uint8)


def bits_of(s):
    return np.array([int(c) for c in s], dtype=np.uint8)


class TestPath:
    def test_text_round_trip(self):
        p = Path.parse("0110")
        assert str(p) == "0110"
        assert p.weight == 2
        assert p.m == 4
        assert Path.from_index(p.index, 4) == p

    def test_index_is_lexicographic(self):
        paths = [Path.from_index(i, 3) for i in range(8)]
        assert [str(p) for p in paths] == sorted(str(p) for p in paths)

    @pytest.mark.parametrize("bad", ["", "012", "ab"])
    def test_rejects_bad_text(self, bad):
        with pytest.raises(ValueError):
            Path.parse(bad)


class TestCodeSpec:
    def test_rate_and_k(self):
        spec = CodeSpec.from_paths(3, ["000", "111"])
        assert spec.k == 2 and spec.n == 8 and spec.rate == 0.25
        assert "111" in spec and "110" not in spec

    def test_rejects_empty_and_duplicates(self):
        with pytest.raises(ValueError):
            CodeSpec(2, ())
        with pytest.raises(ValueError):
            CodeSpec.from_paths(2, ["01", "01"])
        with pytest.raises(ValueError):
            CodeSpec.from_paths(2, ["011"])


class TestMonomialCodeword:
    def test_constant(self):
        assert monomial_codeword(2, "00").tolist() == [1, 1, 1, 1]

    def test_product_of_both(self):
        assert monomial_codeword(2, "11").tolist() == [0, 0, 0, 1]

    def test_first_variable_is_upper_half(self):
        assert monomial_codeword(3, "100").tolist() == bits_of("00001111").tolist()

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            monomial_codeword(3, "10")

    @pytest.mark.parametrize("m", range(1, 11))
    def test_weight_law(self, m):
        for i in range(1 << m):
            p = Path.from_index(i, m)
            assert int(monomial_codeword(m, p).sum()) == 2 ** (m - p.weight)

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_matches_pointwise_evaluation(self, m):
        for bits in product((0, 1), repeat=m):
            np.testing.assert_array_equal(monomial_codeword(m, Path(bits)), evaluate_monomial(m, bits))


class TestRmInfoSet:
    def test_repetition(self):
        spec = rm_info_set(0, 3)
        assert [str(p) for p in spec.paths] == ["000"] and spec.k == 1

    def test_first_order(self):
        assert rm_info_set(1, 3).k == comb(3, 0) + comb(3, 1) == 4

    def test_full_rm44(self):
        assert rm_info_set(4, 4).k == 16

    @pytest.mark.parametrize("r,m", [(-1, 3), (4, 3)])
    def test_bad_degree(self, r, m):
        with pytest.raises(ValueError):
            rm_info_set(r, m)


class TestEncoders:
    full2 = CodeSpec.full(2)

    @pytest.mark.parametrize(
        "msg,expected",
        [
            ({"00": 1, "01": 0, "10": 0, "11": 0}, "1111"),
            ({"00": 1, "01": 0, "10": 0, "11": 1}, "1110"),
            ({"00": 0, "01": 0, "10": 0, "11": 0}, "0000"),
        ],
    )
    def test_examples_both_encoders(self, msg, expected):
        assert encode_monomial_sum(self.full2, msg).tolist() == bits_of(expected).tolist()
        assert encode_plotkin(self.full2, msg).tolist() == bits_of(expected).tolist()

    def test_single_level(self):
        assert encode_plotkin(CodeSpec.from_paths(1, ["1"]), {"1": 1}).tolist() == [0, 1]
        assert encode_plotkin(CodeSpec.from_paths(1, ["0"]), {"0": 1}).tolist() == [1, 1]

    def test_message_outside_info_set(self):
        spec = CodeSpec.from_paths(2, ["00"])
        with pytest.raises(ValueError):
            encode_plotkin(spec, {"00": 1, "11": 1})
        with pytest.raises(ValueError):
            encode_monomial_sum(spec, {"11": 1})

    def test_incomplete_message(self):
        with pytest.raises(ValueError):
            message_vector(CodeSpec.full(2), {"00": 1})

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_equivalence_exhaustive(self, m):
        spec = CodeSpec.full(m)
        for bits in product((0, 1), repeat=spec.n):
            msg = np.array(bits, dtype=np.uint8)
            np.testing.assert_array_equal(encode_plotkin(spec, msg), encode_monomial_sum(spec, msg))

    def test_batch_matches_single(self):
        rng = np.random.default_rng(3)
        spec = rm_info_set(2, 5)
        msgs = rng.integers(0, 2, (6, spec.k))
        batch = encode_plotkin(spec, msgs)
        for row, msg in zip(batch, msgs):
            np.testing.assert_array_equal(row, encode_plotkin(spec, msg))

    def test_channel_symbols(self):
        assert channel_symbols(np.zeros(4, dtype=np.uint8)).tolist() == [1, 1, 1, 1]
        assert channel_symbols(np.array([0, 1])).tolist() == [1, -1]


@st.composite
def spec_and_messages(draw, max_m=10):
    m = draw(st.integers(1, max_m))
    n = 1 << m
    k = draw(st.integers(1, n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    spec = CodeSpec(m, tuple(rng.choice(n, size=k, replace=False).tolist()))
    return spec, rng.integers(0, 2, spec.k), rng.integers(0, 2, spec.k)


@settings(max_examples=60, deadline=None)
@given(spec_and_messages())
def test_random_equivalence(case):
    spec, msg, _ = case
    np.testing.assert_array_equal(encode_plotkin(spec, msg), encode_monomial_sum(spec, msg))


@settings(max_examples=60, deadline=None)
@given(spec_and_messages())
def test_linearity(case):
    spec, a, b = case
    np.testing.assert_array_equal(
        encode_plotkin(spec, a ^ b), encode_plotkin(spec, a) ^ encode_plotkin(spec, b)
    )
