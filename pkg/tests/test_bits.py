import pytest
from hypothesis import given
from hypothesis import strategies as st

from locald.bits import (
    all_bitstrings,
    bits_to_int,
    decode_fields,
    decode_ints,
    decode_pair,
    decode_record,
    encode_fields,
    encode_ints,
    encode_pair,
    encode_record,
    gamma_decode,
    gamma_encode,
    id_length,
    int_to_bits,
    is_bitstring,
)
from locald.errors import CodecError

bitstrings = st.text(alphabet="01", max_size=24)


def test_minimal_binary():
    assert int_to_bits(0) == "0"
    assert int_to_bits(5) == "101"
    assert bits_to_int("101") == 5
    assert id_length(1) == 1 and id_length(8) == 4


@pytest.mark.parametrize("bad", ["", "01", "2", "1a"])
def test_bits_to_int_rejects_non_minimal(bad):
    with pytest.raises(CodecError):
        bits_to_int(bad)


def test_gamma_known_values():
    assert gamma_encode(1) == "1"
    assert gamma_encode(5) == "00101"
    assert gamma_decode("00101" + "1", 0) == (5, 5)
    with pytest.raises(CodecError):
        gamma_encode(0)


def test_is_bitstring():
    assert is_bitstring("") and is_bitstring("0101")
    assert not is_bitstring("012") and not is_bitstring(3)


def test_all_bitstrings_order():
    assert all_bitstrings(2) == ["", "0", "1", "00", "01", "10", "11"]


def test_record_tag_checked():
    s = encode_record(3, ["1", ""])
    assert decode_record(s, 3, 2) == ["1", ""]
    with pytest.raises(CodecError):
        decode_record(s, 4)


@given(st.integers(min_value=0, max_value=10**12))
def test_int_round_trip(n):
    assert bits_to_int(int_to_bits(n)) == n


@given(st.integers(min_value=1, max_value=10**9))
def test_gamma_round_trip(n):
    assert gamma_decode(gamma_encode(n), 0) == (n, len(gamma_encode(n)))


@given(st.lists(bitstrings, max_size=6))
def test_fields_round_trip(fields):
    assert decode_fields(encode_fields(fields)) == fields


@given(st.lists(st.integers(min_value=0, max_value=10**6), max_size=8))
def test_ints_round_trip(values):
    assert decode_ints(encode_ints(values)) == values


@given(bitstrings, bitstrings)
def test_pair_round_trip(a, b):
    assert decode_pair(encode_pair(a, b)) == (a, b)
