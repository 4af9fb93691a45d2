import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from blockmass.automaton import (
    build,
    failure_function,
    mass_table,
    prefix_gf,
    prefix_mass,
    stratified_gf,
)
from blockmass.errors import InvalidInputError
from blockmass.exactnum import Polynomial, RationalFunction
from blockmass.genfun import gf_k, gf_loop, gf_v0
from blockmass.words import Block, DigitString, k_star, occurrences
from tests.conftest import DECIMAL_BLOCKS, SMALL_BLOCKS, block


def s(text: str, base: int) -> DigitString:
    return DigitString.parse(text, base)


class TestAutomaton:
    def test_failure_function(self):
        assert failure_function((0, 1, 0, 1)) == [-1, 0, 0, 1, 2]

    def test_transitions(self):
        auto = build(block("11", 2))
        assert auto.delta == ((0, 1), (0, 1))
        assert auto.emit == ((0, 0), (0, 1))

    def test_transfer_matrices(self):
        b0, b1 = build(block("11", 2)).transfer_matrices()
        assert b0 == [[1, 1], [1, 0]]
        assert b1 == [[0, 0], [0, 1]]

    def test_count(self):
        auto = build(block("42", 10))
        assert auto.count(s("42042", 10)) == 2

    @given(
        st.lists(st.integers(0, 2), min_size=1, max_size=4),
        st.lists(st.integers(0, 2), max_size=20),
    )
    def test_agrees_with_scan(self, pattern, digits):
        auto = build(Block(3, tuple(pattern)))
        assert auto.run(digits)[1] == occurrences(digits, pattern)

    def test_random_decimal_strings(self):
        rng = random.Random(7)
        auto = build(block("1212", 10))
        for _ in range(10_000):
            digits = [rng.choice((1, 2, rng.randrange(10))) for _ in range(rng.randint(0, 16))]
            assert auto.run(digits)[1] == occurrences(digits, (1, 2, 1, 2))


class TestMasses:
    def test_single_digit_block(self):
        table = mass_table(block("1", 2), 4)
        assert table.masses == tuple((Fraction(2),) for _ in range(5))

    def test_negative_index(self):
        assert mass_table(block("1", 2), 0).mass(-1, 0) == 0

    def test_total(self):
        assert prefix_mass(block("11", 2), s("", 2), 3) == 4

    def test_impossible_prefix(self):
        assert prefix_mass(block("11", 2), s("1111", 2), 2) == 0

    def test_leading_one(self):
        assert prefix_mass(block("1", 2), s("1", 2), 1) == 1

    @pytest.mark.parametrize("base,text", SMALL_BLOCKS + DECIMAL_BLOCKS)
    def test_suffix_carries_base(self, base, text):
        w = block(text, base)
        assert all(prefix_mass(w, w.suffix, k) == base for k in range(4))

    @pytest.mark.parametrize("base,text", SMALL_BLOCKS)
    def test_prefix_mass_theorem(self, base, text):
        w = block(text, base)
        for length in range(5):
            expected = Fraction(base) ** (w.p - length)
            for digits in itertools.product(range(base), repeat=length):
                prefix = DigitString(base, digits)
                for k in range(k_star(prefix, w) + 1, 7):
                    assert prefix_mass(w, prefix, k) == expected, (str(prefix), k)

    @pytest.mark.parametrize("base,text", SMALL_BLOCKS)
    def test_leading_digits_share_the_mass(self, base, text):
        w = block(text, base)
        for k in range(1, 7):
            cells = [prefix_mass(w, DigitString(base, (a,)), k) for a in range(1, base)]
            assert sum(cells) == (base - 1) * Fraction(base) ** (w.p - 1)

    def test_negative_k(self):
        with pytest.raises(InvalidInputError):
            prefix_mass(block("1", 2), s("", 2), -1)


class TestTransferMatrix:
    def test_fibonacci(self):
        assert stratified_gf(block("11", 2), 0) == RationalFunction(
            Polynomial((1, 1)), Polynomial((1, -1, -1))
        )

    def test_single_one(self):
        assert stratified_gf(block("1", 2), 1) == gf_k(block("1", 2), 1)

    @pytest.mark.parametrize("base,text", SMALL_BLOCKS + DECIMAL_BLOCKS)
    def test_matches_closed_form(self, base, text):
        w = block(text, base)
        for k in range(6):
            assert stratified_gf(w, k) == gf_k(w, k)

    @pytest.mark.parametrize("base,text", SMALL_BLOCKS)
    def test_prefix_series(self, base, text):
        w = block(text, base)
        assert prefix_gf(w, w.suffix, 0) == gf_v0(w)
        assert prefix_gf(w, w.suffix, 0, ending_in_u=True).shift(2 - w.p) == gf_loop(w)

    def test_impossible_prefix_series(self):
        assert prefix_gf(block("1", 2), s("11", 2), 1) == 0
