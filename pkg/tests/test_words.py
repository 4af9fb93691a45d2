from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from blockmass.errors import BaseMismatchError, EnumerationCapError, InvalidInputError
from blockmass.words import (
    Block,
    DigitString,
    admissible_counts,
    check_enumeration_cap,
    count_occurrences,
    enumerate_admissible,
    iter_admissible,
    k_star,
    minimal_representation,
    occurrences,
    reverse,
    to_fraction,
)
from tests.conftest import block


def s(text: str, base: int) -> DigitString:
    return DigitString.parse(text, base)


class TestParsing:
    def test_compact_digits(self):
        assert s("0110", 2).digits == (0, 1, 1, 0)

    def test_comma_separated_above_ten(self):
        assert s("10,3,15", 16).digits == (10, 3, 15)

    def test_empty_string(self):
        assert s("", 2).digits == ()
        assert s("ε", 3).length == 0

    def test_empty_block_rejected(self):
        with pytest.raises(InvalidInputError):
            Block.parse("", 2)

    def test_digit_out_of_range(self):
        with pytest.raises(InvalidInputError):
            block("12", 2)

    def test_base_one_rejected(self):
        with pytest.raises(InvalidInputError):
            DigitString(1, (0,))

    def test_prefix_and_suffix(self):
        w = block("942", 10)
        assert str(w.prefix) == "94"
        assert str(w.suffix) == "42"
        assert w.p == 3


class TestCounting:
    def test_overlapping(self):
        assert count_occurrences(s("1111", 2), block("11", 2)) == 3

    def test_empty_string_has_none(self):
        assert count_occurrences(s("", 10), block("42", 10)) == 0

    def test_decimal_scan(self):
        assert count_occurrences(s("42042", 10), block("42", 10)) == 2

    def test_base_mismatch(self):
        with pytest.raises(BaseMismatchError):
            count_occurrences(s("11", 3), block("11", 2))

    @pytest.mark.parametrize("prefix,expected", [("1", 1), ("", 0), ("111", 3), ("0", 0)])
    def test_k_star(self, prefix, expected):
        assert k_star(s(prefix, 2), block("11", 2)) == expected


class TestRepresentations:
    def test_zero_is_empty(self):
        assert minimal_representation(0, 2).digits == ()

    def test_binary_six(self):
        assert str(minimal_representation(6, 2)) == "110"

    def test_decimal(self):
        assert str(minimal_representation(42, 10)) == "42"

    @pytest.mark.parametrize("base", [1, 0, -3])
    def test_rejects_degenerate_base(self, base):
        with pytest.raises(InvalidInputError):
            minimal_representation(5, base)

    def test_fractions(self):
        assert to_fraction(s("", 2)) == 0
        assert to_fraction(s("100", 2)) == Fraction(1, 2)
        assert to_fraction(s("042", 10)) == Fraction(42, 1000)

    def test_reverse(self):
        assert str(reverse(s("110", 2))) == "011"
        assert reverse(s("", 2)).digits == ()


class TestEnumeration:
    def test_fibonacci_layer(self):
        assert enumerate_admissible(block("11", 2), 0, 2).count == 3

    def test_empty_length(self):
        w = block("42", 10)
        assert enumerate_admissible(w, 0, 0).count == 1
        assert enumerate_admissible(w, 1, 0).count == 0

    def test_collect_strings(self):
        result = enumerate_admissible(block("1", 2), 1, 2, collect=True)
        assert result.count == 2
        assert sorted(str(x) for x in result.strings) == ["01", "10"]

    def test_leading_nonzero(self):
        found = list(iter_admissible(block("11", 2), 0, 3, leading_nonzero=True))
        assert sorted(found) == [(1, 0, 0), (1, 0, 1)]

    def test_all_counts_at_once(self):
        assert admissible_counts(block("11", 2), 4) == Counter({0: 8, 1: 5, 2: 2, 3: 1})

    def test_cap(self):
        with pytest.raises(EnumerationCapError):
            check_enumeration_cap(2, 25)

    def test_cap_from_environment(self, monkeypatch):
        monkeypatch.setenv("BLOCKMASS_CAP", "8")
        with pytest.raises(EnumerationCapError):
            list(iter_admissible(block("1", 2), 0, 4))
        assert list(iter_admissible(block("1", 2), 0, 3)) == [(0, 0, 0)]


digits = st.lists(st.integers(0, 2), max_size=12)
blocks = st.lists(st.integers(0, 2), min_size=1, max_size=3)


@given(digits, blocks)
def test_reversal_preserves_count(xs, ws):
    x, w = DigitString(3, tuple(xs)), Block(3, tuple(ws))
    assert count_occurrences(reverse(x), w.reversed()) == count_occurrences(x, w)


@settings(max_examples=30, deadline=None)
@given(blocks, st.integers(0, 6), st.integers(0, 3))
def test_enumeration_matches_counts(ws, length, k):
    w = Block(3, tuple(ws))
    found = list(iter_admissible(w, k, length))
    assert len(found) == admissible_counts(w, length)[k]
    assert all(occurrences(x, w.digits) == k for x in found)
