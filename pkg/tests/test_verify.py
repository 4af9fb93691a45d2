import pytest
import structlog.testing

from blockmass.errors import InvalidInputError
from blockmass.verify import _limit_check, run_acceptance
from tests.conftest import block

CHECK_NAMES = {
    "automaton_count", "suffix_mass", "first_digit_masses", "stratified_gf", "prefix_mass",
    "partition", "stabilization", "finiteness", "enclosure", "limit_bound",
}


@pytest.mark.parametrize(
    "base,text,kmax,maxlen,depth",
    [
        (2, "1", 3, 8, 10),
        (2, "11", 3, 8, 10),
        (2, "101", 2, 8, 10),
        (3, "010", 2, 5, 6),
        (3, "0", 2, 5, 6),
    ],
)
def test_acceptance_passes(base, text, kmax, maxlen, depth):
    report = run_acceptance(block(text, base), kmax=kmax, maxlen=maxlen, depth=depth)
    assert report.passed, report.first_failure
    assert CHECK_NAMES <= {c.name for c in report.checks}


def test_decimal_block():
    report = run_acceptance(block("42", 10), kmax=2, maxlen=3, depth=3)
    assert report.passed, report.first_failure


def test_injected_mutation_fails():
    report = run_acceptance(block("11", 2), kmax=2, maxlen=6, depth=8, mutation=1)
    assert not report.passed
    data = report.as_dict()
    assert data["mutation"] == 1
    assert data["first_failure"]["name"] == "closed_form_v0"


def test_mutation_needs_a_period_slot():
    with pytest.raises(InvalidInputError):
        run_acceptance(block("1", 2), kmax=1, maxlen=4, depth=4, mutation=1)


def test_limit_check_stays_under_the_cap():
    # k = 1 wants depth 3 at b = 10, which a cap of 100 forbids; depth 2 is used instead
    result = _limit_check(block("9", 10), 2, 2, None, None, 100)
    assert result.name == "limit_bound"
    assert result.passed, result


def test_failed_item_is_logged(monkeypatch):
    import blockmass.report

    logger = structlog.testing.CapturingLogger()
    monkeypatch.setattr(blockmass.report, "logger", logger)
    run_acceptance(block("11", 2), kmax=2, maxlen=6, depth=8, mutation=1)
    events = [call.args[0] for call in logger.calls if call.method_name == "warning"]
    assert events and set(events) == {"battery_item_failed"}
