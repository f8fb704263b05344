import pytest
from hypothesis import given, strategies as st

from betalab.errors import AlphabetMismatch, UsageError
from betalab.words import (
    SymbolWord,
    format_digits,
    format_periodic,
    lex_le_prefix,
    parse_digit_string,
    periodic_stream,
    self_admissible,
)


def test_symbol_word_basics():
    w = SymbolWord((1, 0, 1), 1)
    assert len(w) == 3
    assert list(w) == [1, 0, 1]
    assert w[1] == 0
    assert str(w) == "101"


def test_symbol_word_rejects_out_of_alphabet():
    with pytest.raises(UsageError):
        SymbolWord((2,), 1)
    with pytest.raises(UsageError):
        SymbolWord((-1,), 1)


def test_concat_and_shift():
    a = SymbolWord((1, 0), 1)
    b = SymbolWord((0, 1), 1)
    assert a.concat(b).digits == (1, 0, 0, 1)
    assert a.shift(1).digits == (0,)


def test_hamming():
    a = SymbolWord((1, 0, 1), 1)
    b = SymbolWord((1, 1, 1), 1)
    assert a.hamming(b) == 1
    assert a.hamming(a) == 0


def test_hamming_length_mismatch():
    with pytest.raises(UsageError):
        SymbolWord((1,), 1).hamming(SymbolWord((1, 0), 1))


def test_periodic_stream():
    s = periodic_stream((2,), (0, 1), 2)
    assert [s.digit(i) for i in range(1, 6)] == [2, 0, 1, 0, 1]


def test_lex_le_prefix():
    assert lex_le_prefix((1, 0), (1, 0))
    assert lex_le_prefix((0, 1), (1, 0))
    assert not lex_le_prefix((1, 1), (1, 0))


def test_self_admissible():
    assert self_admissible((1, 0, 1, 0))
    assert not self_admissible((1, 0, 1, 1))  # shifted suffix exceeds the word


def test_parse_digit_string_forms():
    assert parse_digit_string("10(10)") == ((1, 0), (1, 0))
    assert parse_digit_string("(201001)") == ((), (2, 0, 1, 0, 0, 1))
    assert parse_digit_string("111") == ((1, 1, 1), ())
    assert parse_digit_string("[10]3") == ((10, 3), ())


def test_parse_digit_string_rejects_garbage():
    with pytest.raises(UsageError):
        parse_digit_string("1(2")


def test_format_round_trip():
    assert format_digits((1, 0, 1)) == "101"
    assert format_periodic((1, 0), (1, 0)) == "10(10)"
    assert parse_digit_string(format_periodic((2,), (0, 1))) == ((2,), (0, 1))


@given(st.lists(st.integers(min_value=0, max_value=3), min_size=1,
                max_size=12))
def test_parse_format_inverse(digits):
    assert parse_digit_string(format_digits(digits))[0] == tuple(digits)


@given(st.lists(st.integers(min_value=0, max_value=1), min_size=1,
                max_size=10),
       st.lists(st.integers(min_value=0, max_value=1), min_size=1,
                max_size=10))
def test_lex_total_on_equal_lengths(a, b):
    a, b = tuple(a), tuple(b)
    if len(a) == len(b):
        assert lex_le_prefix(a, b) or lex_le_prefix(b, a)
