from fractions import Fraction

import pytest

from blockmass.errors import EnumerationCapError, InvalidInputError
from blockmass.genfun import mass
from blockmass.kempner import (
    BimalInterval,
    Enclosure,
    bimal_resolution,
    check_limit_bound,
    choose_depth,
    coarse_bound,
    enclose_sum,
    ideal_depth,
    limit_bound,
    log_base_enclosure,
    measure_histogram,
    measure_interval,
    partial_sum,
    width_bound,
)
from tests.conftest import DECIMAL_BLOCKS, SMALL_BLOCKS, block

LN2_LOW = Fraction("0.6931471805599453094172321214")
LN2_HIGH = Fraction("0.6931471805599453094172321215")
LN10_LOW = Fraction("2.3025850929940456840179914546843")
LN10_HIGH = Fraction("2.3025850929940456840179914546844")


class TestIntervals:
    def test_parse(self):
        interval = BimalInterval.parse("2/4", "3/4", 2)
        assert (interval.resolution, interval.n1, interval.n2) == (2, 2, 3)
        assert interval.length == Fraction(1, 4)

    def test_mixed_resolutions(self):
        interval = BimalInterval.parse("1/2", "5/8", 2)
        assert (interval.resolution, interval.n1, interval.n2) == (3, 4, 5)

    def test_not_bimal(self):
        with pytest.raises(InvalidInputError):
            BimalInterval.parse("1/3", "1/2", 2)

    def test_empty(self):
        with pytest.raises(InvalidInputError):
            BimalInterval(2, 2, 3, 3)

    def test_resolution(self):
        assert bimal_resolution(Fraction(3, 4), 2) == 2
        assert bimal_resolution(Fraction(1, 10), 10) == 1
        assert bimal_resolution(Fraction(0), 7) == 0


class TestMeasures:
    def test_stabilized_cell(self):
        w = block("1", 2)
        assert measure_interval(w, 3, BimalInterval.parse("2/4", "3/4", 2)) == Fraction(1, 2)

    def test_upper_half(self):
        assert measure_interval(block("1", 2), 1, BimalInterval.parse("1/2", "1", 2)) == 1

    @pytest.mark.parametrize("k", [1, 2, 5])
    def test_whole_interval(self, k):
        w = block("010", 3)
        assert measure_interval(w, k, BimalInterval(3, 0, 0, 1)) == 27

    def test_additive(self):
        w, k = block("11", 2), 1
        left = measure_interval(w, k, BimalInterval.parse("0", "3/8", 2))
        right = measure_interval(w, k, BimalInterval.parse("3/8", "1", 2))
        assert left + right == mass(w, k)

    def test_base_mismatch(self):
        with pytest.raises(InvalidInputError):
            measure_interval(block("1", 2), 1, BimalInterval(3, 1, 0, 1))

    def test_histogram_stabilizes(self):
        hist = measure_histogram(block("11", 2), 3, 2)
        assert hist.cells == (1, 1, 1, 1)

    def test_histogram_first_digit(self):
        hist = measure_histogram(block("42", 10), 1, 1)
        assert set(hist.cells) == {10}
        assert hist.total == 100

    def test_histogram_zero_occurrences(self):
        assert measure_histogram(block("11", 2), 0, 3).total == 6

    def test_histogram_matches_intervals(self):
        w, k = block("01", 3), 1
        hist = measure_histogram(w, k, 2)
        for i, cell in enumerate(hist.cells):
            assert cell == measure_interval(w, k, BimalInterval(3, 2, i, i + 1))

    def test_histogram_csv(self):
        csv_text = measure_histogram(block("1", 2), 1, 1).to_csv()
        assert csv_text == "cell_index,n_over_bl,mass_num,mass_den\n0,0/2,1,1\n1,1/2,1,1\n"

    def test_histogram_cap(self):
        with pytest.raises(EnumerationCapError):
            measure_histogram(block("1", 2), 1, 8, cap=100)


class TestPartialSums:
    def test_powers_of_two(self):
        assert partial_sum(block("1", 2), 1, 3) == Fraction(7, 4)

    def test_nothing_admissible(self):
        assert partial_sum(block("1", 2), 0, 10) == 0

    def test_avoiding_nine(self):
        assert partial_sum(block("9", 10), 0, 1) == Fraction(761, 280)

    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_finiteness_bound(self, k):
        w = block("11", 2)
        assert partial_sum(w, k, 12) <= 2 * mass(w, k)


class TestEnclosures:
    @pytest.mark.parametrize("depth", [1, 2, 5, 12, 20])
    def test_contains_two(self, depth):
        enclosure = enclose_sum(block("1", 2), 1, depth)
        assert enclosure.contains(2)
        assert enclosure.width <= Fraction(4, 2**depth) + Fraction(1, 2**120)

    def test_nothing_admissible(self):
        enclosure = enclose_sum(block("1", 2), 0, 8)
        assert enclosure.exact
        assert enclosure.lower == 0

    def test_nested(self):
        w = block("1", 2)
        assert enclose_sum(w, 1, 10).within(enclose_sum(w, 1, 9))

    def test_fibonacci_block(self):
        w = block("11", 2)
        enclosure = enclose_sum(w, 1, 16)
        assert enclosure.width - enclosure.slack <= width_bound(w, 1, 16)
        assert enclosure.upper >= partial_sum(w, 1, 16)

    def test_threads_do_not_change_the_result(self):
        w = block("1", 3)
        assert enclose_sum(w, 1, 8, threads=1) == enclose_sum(w, 1, 8, threads=3)

    def test_bad_depth(self):
        with pytest.raises(InvalidInputError):
            enclose_sum(block("1", 2), 1, 0)

    @pytest.mark.parametrize("precision", [-5, 0, 7])
    def test_bad_precision(self, precision):
        with pytest.raises(InvalidInputError):
            enclose_sum(block("1", 2), 1, 4, precision=precision)
        with pytest.raises(InvalidInputError):
            log_base_enclosure(2, precision)

    def test_json(self):
        data = enclose_sum(block("1", 2), 1, 6, precision=64).as_dict()
        assert set(data) == {"lower", "upper", "decimal", "certified_digits"}
        assert data["upper"] == "2/1"

    def test_exact_decimal(self):
        assert Enclosure(512, 512, 8).decimal() == ("2.000", 3)

    def test_disjoint_integer_parts(self):
        assert Enclosure(256, 768, 8).decimal() == ("", 0)

    def test_invalid(self):
        with pytest.raises(InvalidInputError):
            Enclosure(3, 2, 8)

    def test_arithmetic(self):
        a = Enclosure(1, 2, 8, terms=1)
        assert a + a == Enclosure(2, 4, 8, terms=2)
        assert a.scale(3) == Enclosure(3, 6, 8, terms=3)


class TestLogarithm:
    def test_log_two(self):
        enclosure = log_base_enclosure(2, 128)
        assert enclosure.lower <= LN2_HIGH and enclosure.upper >= LN2_LOW
        assert enclosure.width <= Fraction(1, 2**126)
        assert enclosure.as_dict()["decimal"].startswith("0.6931471805599453")

    def test_log_ten(self):
        enclosure = log_base_enclosure(10, 128)
        assert enclosure.lower <= LN10_HIGH and enclosure.upper >= LN10_LOW

    def test_log_four_is_twice_log_two(self):
        four, two = log_base_enclosure(4, 128), log_base_enclosure(2, 128).scale(2)
        assert four.lower <= two.upper and two.lower <= four.upper

    def test_product_of_factors(self):
        six = log_base_enclosure(6, 96)
        two_plus_three = log_base_enclosure(2, 96) + log_base_enclosure(3, 96)
        assert six.lower <= two_plus_three.upper and two_plus_three.lower <= six.upper

    def test_bad_base(self):
        with pytest.raises(InvalidInputError):
            log_base_enclosure(1)


class TestLimitBound:
    def test_single_digit(self):
        report = check_limit_bound(block("1", 2), 1, 16)
        assert report.bound == 1
        assert report.status == "verified"
        assert Fraction(6, 10) < report.worst_gap < Fraction(62, 100)

    def test_bound_formula(self):
        assert limit_bound(block("942", 10), 5) == Fraction(9, 10)
        assert limit_bound(block("11", 2), 1) == 2

    def test_default_depth(self):
        report = check_limit_bound(block("11", 2), 2)
        assert report.depth == choose_depth(block("11", 2), 2, report.bound / 10)
        assert report.status != "violated"

    def test_choose_depth(self):
        assert choose_depth(block("1", 2), 1, Fraction(1, 100)) == 8
        assert width_bound(block("1", 2), 1, 10) == Fraction(1, 512)

    def test_needs_positive_k(self):
        with pytest.raises(InvalidInputError):
            check_limit_bound(block("1", 2), 0, 4)

    def test_ideal_depth_ignores_the_cap(self):
        w = block("9", 10)
        target = limit_bound(w, 1) / 10
        assert ideal_depth(w, 1, target) == 3
        with pytest.raises(EnumerationCapError):
            choose_depth(w, 1, target, cap=100)

    def test_coarse_bracket_at_k1(self):
        report = check_limit_bound(block("1", 2), 1, 8)
        assert report.coarse_bound == coarse_bound(block("1", 2)) == 1
        assert report.leading_mass == 1
        assert report.coarse_status == "verified"
        assert report.bracket_status == "verified"
        assert report.cell_resolution == 1
        assert report.cells_uniform is True

    def test_coarse_bracket_decimal(self):
        w = block("9", 10)
        report = check_limit_bound(w, 1, 3)
        assert report.coarse_bound == 81
        assert report.leading_mass == 9
        assert report.cell_masses == (1,) * 9
        assert report.bracket_status == "verified"
        assert report.coarse_status == "verified"

    def test_coarse_fields_only_at_k1(self):
        data = check_limit_bound(block("11", 2), 2, 8).as_dict()
        assert "coarse_bound" not in data and "bracket_status" not in data
        assert data["leading_mass"] == "2/1"
        assert data["cells_uniform"] is True

    @pytest.mark.parametrize("base,text", SMALL_BLOCKS)
    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_gap_within_bound(self, base, text, k):
        report = check_limit_bound(block(text, base), k)
        assert report.status == "verified", report.as_dict()
        assert report.cells_uniform is not False

    @pytest.mark.parametrize("base,text", DECIMAL_BLOCKS)
    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_decimal_gap_within_bound(self, base, text, k):
        assert check_limit_bound(block(text, base), k).status == "verified"

    @pytest.mark.slow
    @pytest.mark.parametrize("base,text", DECIMAL_BLOCKS)
    def test_decimal_gap_within_bound_k5(self, base, text):
        assert check_limit_bound(block(text, base), 5).status == "verified"

    def test_report_dict(self):
        data = check_limit_bound(block("1", 2), 1, 8).as_dict()
        assert data["status"] == "verified"
        assert data["bound"] == "1/1"
        assert data["sum"]["upper"] == "2/1"
        assert data["coarse_bound"] == "1/1"
        assert data["coarse_status"] == "verified"
