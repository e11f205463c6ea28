import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cclab.bits import (
    EQ,
    GAP,
    HD,
    HD44,
    BitString,
    BlockedString,
    CapacityError,
    DistanceSignature,
    GapHD,
    SetFamily,
    distance_signature,
    hamming_distance,
    hdkk_truth_array,
    popcount,
    slice_count,
    slice_enumerate,
    truth,
)


def bitstrings(n):
    return st.integers(0, (1 << n) - 1).map(lambda v: BitString(n, v))


def test_text_form_is_bit_zero_first():
    x = BitString.from_str("1000")
    assert x.value == 1
    assert str(x) == "1000"
    assert x[0] == 1 and x[3] == 0
    assert BitString.from_bits([0, 1, 1]).value == 6
    assert BitString.from_positions(5, [0, 4]).positions() == {0, 4}


@pytest.mark.parametrize("text", ["", "012", "abc"])
def test_from_str_rejects_garbage(text):
    with pytest.raises(ValueError):
        BitString.from_str(text)


def test_value_must_fit():
    with pytest.raises(ValueError):
        BitString(3, 8)
    with pytest.raises(ValueError):
        BitString(0, 0)


def test_distance_needs_equal_lengths():
    with pytest.raises(ValueError):
        hamming_distance(BitString(3, 1), BitString(4, 1))


@given(bitstrings(12), bitstrings(12), bitstrings(12))
def test_distance_is_a_metric(x, y, z):
    assert hamming_distance(x, x) == 0
    assert hamming_distance(x, y) == hamming_distance(y, x)
    assert hamming_distance(x, z) <= hamming_distance(x, y) + hamming_distance(y, z)
    assert hamming_distance(x, y) == (x ^ y).weight


@given(bitstrings(9))
def test_str_round_trip(x):
    assert BitString.from_str(str(x)) == x


def test_slice_enumeration_is_complete_and_ordered():
    elems = list(slice_enumerate(6, 3))
    assert len(elems) == slice_count(6, 3) == 20
    assert len({e.value for e in elems}) == 20
    assert all(e.weight == 3 for e in elems)
    assert [sorted(e.positions()) for e in elems] == sorted(sorted(e.positions()) for e in elems)


def test_slice_guard():
    with pytest.raises(CapacityError):
        next(slice_enumerate(40, 2))


def test_blocked_strings_and_signatures():
    x = BlockedString.from_str("1100|0000|1111")
    y = BlockedString.from_str("0000|0000|0001")
    assert x.block_count == 3 and x.block_length == 4
    assert str(x) == "1100|0000|1111"
    sig = distance_signature(x, y)
    assert sig == (2, 3)
    assert sig == DistanceSignature((3, 2))
    assert x.flatten().length == 12
    assert x.select([2]).rows == (BitString.from_str("1111").value,)


def test_blocked_shape_errors():
    with pytest.raises(ValueError):
        BlockedString((BitString(2, 0), BitString(3, 0)))
    with pytest.raises(ValueError):
        distance_signature(BlockedString.from_str("00|00"), BlockedString.from_str("000|000"))


def test_signature_rejects_zero():
    with pytest.raises(ValueError):
        DistanceSignature((0, 1))


def test_set_family_checks():
    assert len(SetFamily(4, [{0, 1}, {2}])) == 2
    with pytest.raises(ValueError):
        SetFamily(3, [{5}])
    with pytest.raises(ValueError):
        SetFamily(3, [{1}, {1}])


def test_truth_values():
    x, y = BitString.from_str("1100"), BitString.from_str("0110")
    assert truth(EQ(), x, x) == 1 and truth(EQ(), x, y) == 0
    assert truth(HD(2), x, y) == 1 and truth(HD(1), x, y) == 0
    g = GapHD("1/4")
    assert g.classify(1, 4) == 1 and g.classify(3, 4) == 0 and g.classify(2, 4) is GAP
    a = BlockedString.from_str("11110000|00000000")
    b = BlockedString.from_str("00000000|11110000")
    assert truth(HD44, a, b) == 1
    assert truth(HD44, a, a) == 0
    with pytest.raises(TypeError):
        truth(HD44, x, y)


def test_gap_gamma_range():
    with pytest.raises(ValueError):
        GapHD("1/2")


@given(st.lists(st.integers(0, 255), min_size=3, max_size=3), st.lists(st.integers(0, 255), min_size=3, max_size=3))
def test_vectorised_hdkk_matches_scalar(xs, ys):
    X = np.array([xs], dtype=np.uint64)
    Y = np.array([ys], dtype=np.uint64)
    want = truth(HD44, BlockedString.from_rows(xs, 8), BlockedString.from_rows(ys, 8))
    assert hdkk_truth_array(X, Y, 4)[0] == want


def test_popcount():
    a = np.array([0, 1, 3, (1 << 64) - 1], dtype=np.uint64)
    assert popcount(a).tolist() == [0, 1, 2, 64]
    assert math.comb(8, 4) == len(list(slice_enumerate(8, 4)))
