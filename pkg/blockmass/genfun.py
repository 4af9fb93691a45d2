"""
Closed-form generating functions built from the autocorrelation polynomial.

With A = A_w and D = (1 - b t)·A + t^p:

    Z_w(0)               = A / D
    Z_w(v,0)             = t^(p-1) / D
    t^(2-p)·Z_w(v,0,u)   = ((1 - b t)(A - 1) + t^p) / D
    Z_w(k), k >= 1       = t^p · ((1 - b t)(A - 1) + t^p)^(k-1) / D^(k+1)

``identity_battery`` checks these against the transfer-matrix series and
against brute-force enumeration.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import structlog

from blockmass.automaton import prefix_gf, stratified_gf
from blockmass.errors import InvalidInputError, KCapError
from blockmass.exactnum import (
    T,
    Polynomial,
    RationalFunction,
    evaluate,
    first_series_mismatch,
    series_coefficients,
)
from blockmass.report import CheckResult, Report
from blockmass.words import Block, admissible_counts, iter_admissible, occurrences
from config.settings import get_settings

logger = structlog.get_logger()


@dataclass(frozen=True)
class Correlation:
    """c_i = 1 iff i is a period of w (prefix of length p-i equals the suffix)."""

    block: Block
    coefficients: tuple[int, ...]

    @property
    def periods(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.coefficients) if c)

    @property
    def positive_periods(self) -> tuple[int, ...]:
        return self.periods[1:] if self.coefficients[0] else self.periods

    @property
    def polynomial(self) -> Polynomial:
        return Polynomial(self.coefficients)

    def flipped(self, index: int) -> Correlation:
        """Same block with c_index toggled (a deliberately wrong A_w)."""
        if not 1 <= index < len(self.coefficients):
            raise InvalidInputError(f"can only flip c_i for 1 <= i < p, got {index}")
        cs = list(self.coefficients)
        cs[index] ^= 1
        return Correlation(self.block, tuple(cs))


def autocorrelation(w: Block) -> Correlation:
    d, p = w.digits, w.p
    return Correlation(w, tuple(int(d[i:] == d[: p - i]) for i in range(p)))


def _parts(w: Block, correlation: Correlation | None) -> tuple[Polynomial, Polynomial]:
    corr = correlation or autocorrelation(w)
    a = corr.polynomial
    one_minus_bt = 1 - w.base * T
    return a, one_minus_bt * a + T.shift(w.p - 1)


def _loop_numerator(w: Block, a: Polynomial) -> Polynomial:
    return (1 - w.base * T) * (a - 1) + T.shift(w.p - 1)


def gf_zero(w: Block, *, correlation: Correlation | None = None) -> RationalFunction:
    """Z_w(0) = A_w / ((1 - b t) A_w + t^p)"""
    a, den = _parts(w, correlation)
    return RationalFunction(a, den)


def gf_v0(w: Block, *, correlation: Correlation | None = None) -> RationalFunction:
    """Z_w(v,0): 0-admissible strings starting with v"""
    _, den = _parts(w, correlation)
    return RationalFunction(Polynomial.monomial(w.p - 1), den)


def gf_loop(w: Block, *, correlation: Correlation | None = None) -> RationalFunction:
    """t^(2-p)·Z_w(v,0,u)"""
    a, den = _parts(w, correlation)
    return RationalFunction(_loop_numerator(w, a), den)


def gf_k(
    w: Block, k: int, *, correlation: Correlation | None = None, kmax: int | None = None
) -> RationalFunction:
    if k < 0:
        raise InvalidInputError("k must be non-negative")
    kmax = get_settings().kmax if kmax is None else kmax
    if k > kmax:
        raise KCapError(f"k = {k} exceeds the configured cap {kmax}", k=k, kmax=kmax)
    if k == 0:
        return gf_zero(w, correlation=correlation)
    a, den = _parts(w, correlation)
    return RationalFunction(
        Polynomial.monomial(w.p) * _loop_numerator(w, a) ** (k - 1), den ** (k + 1)
    )


def mass(w: Block, k: int, *, correlation: Correlation | None = None) -> Fraction:
    """M_w(k) = Z_w(k)(1/b)"""
    return evaluate(gf_k(w, k, correlation=correlation), Fraction(1, w.base))


def period_mass(w: Block) -> Fraction:
    """b^p + b^(p - i_1) + ... over the positive periods; equals M_w(0)."""
    return sum((Fraction(w.base) ** (w.p - i) for i in autocorrelation(w).periods), Fraction(0))


def _equality(name: str, expected: RationalFunction, actual: RationalFunction) -> CheckResult:
    mismatch = first_series_mismatch(expected, actual)
    if mismatch is None:
        return CheckResult(name, True)
    length, a, b = mismatch
    return CheckResult(
        name,
        False,
        "rational functions differ",
        {"length": length, "expected": str(a), "actual": str(b)},
    )


def identity_battery(
    w: Block,
    maxlen: int,
    *,
    kmax: int = 4,
    correlation: Correlation | None = None,
    cap: int | None = None,
) -> Report:
    """
    Exact checks of the generating-function identities for one block.

    Closed forms come from ``correlation`` (default: the true A_w), so passing a
    flipped correlation is a negative control.  The comparison series are the
    transfer-matrix ones and brute-force counts, which never see A_w.
    """
    corr = correlation or autocorrelation(w)
    b, p = w.base, w.p
    u, v = w.prefix, w.suffix
    report = Report({"base": b, "block": str(w), "maxlen": maxlen, "kmax": kmax})

    z0 = stratified_gf(w, 0)
    zv0 = prefix_gf(w, v, 0)
    loop = prefix_gf(w, v, 0, ending_in_u=True).shift(2 - p)
    one_minus_bt = RationalFunction(1 - b * T)
    t = RationalFunction(T)

    # prefix and suffix series against the unrestricted one
    report.add(_equality("prefix_series", 1 - t * zv0, one_minus_bt * z0))
    report.add(_equality("suffix_loop", 1 - loop, one_minus_bt * zv0.shift(1 - p)))
    report.add(_equality("closed_form_v0", zv0, gf_v0(w, correlation=corr)))
    report.add(_equality("closed_form_loop", loop, gf_loop(w, correlation=corr)))
    # Z_w(0) = A_w t^(1-p) Z_w(v,0)
    report.add(_equality("cluster", RationalFunction(corr.polynomial) * zv0.shift(1 - p), z0))
    reversed_series = stratified_gf(w.reversed(), 0)
    report.add(_equality("reversal_closed_form", reversed_series, gf_zero(w, correlation=corr)))

    counts = [admissible_counts(w, length, cap=cap) for length in range(maxlen + 1)]
    report.add(_coefficient_check(w, corr, counts, kmax))
    report.add(_mass_check(w, corr, kmax))
    report.add(_upper_bound_check(w, corr, kmax))

    zero_adm = [list(iter_admissible(w, 0, length, cap=cap)) for length in range(maxlen + 1)]
    report.add(_reversal_count_check(u.digits, v.digits, zero_adm))
    report.add(_cluster_partition_check(w, corr, zero_adm))

    logger.info("identity_battery_done", block=str(w), base=b, passed=report.passed)
    return report


def _coefficient_check(
    w: Block, corr: Correlation, counts: list[Counter], kmax: int
) -> CheckResult:
    maxlen = len(counts) - 1
    for k in range(kmax + 1):
        series = series_coefficients(gf_k(w, k, correlation=corr, kmax=kmax), maxlen)
        for length, (coef, brute) in enumerate(zip(series, counts)):
            if coef != brute.get(k, 0):
                return CheckResult(
                    "coefficients",
                    False,
                    "series coefficient differs from brute force",
                    {"k": k, "length": length, "series": str(coef), "brute_force": brute.get(k, 0)},
                )
    return CheckResult("coefficients", True)


def _mass_check(w: Block, corr: Correlation, kmax: int) -> CheckResult:
    b, p = w.base, w.p
    inv_b = Fraction(1, b)
    expected = {0: Fraction(b) ** p * corr.polynomial.evaluate(inv_b)}
    expected.update({k: Fraction(b) ** p for k in range(1, kmax + 1)})
    for k, value in expected.items():
        got = mass(w, k, correlation=corr)
        if got != value:
            return CheckResult("masses", False, "M_w(k)", {"k": k, "expected": str(value), "actual": str(got)})
    for name, series, value in (
        ("M_w(v,0)", gf_v0(w, correlation=corr), Fraction(b)),
        ("b^(p-2)·M_w(v,0,u)", gf_loop(w, correlation=corr), Fraction(1)),
    ):
        got = evaluate(series, inv_b)
        if got != value:
            return CheckResult("masses", False, name, {"expected": str(value), "actual": str(got)})
    return CheckResult("masses", True)


def _upper_bound_check(w: Block, corr: Correlation, kmax: int) -> CheckResult:
    b, p = w.base, w.p
    inv_b = Fraction(1, b)
    _, den = _parts(w, corr)
    # 1/b lies inside the disk of convergence
    if den.evaluate(inv_b) != Fraction(1, b**p):
        return CheckResult("mass_upper_bound", False, "D(1/b) != b^-p", {"value": str(den.evaluate(inv_b))})
    running = Fraction(0)
    for k in range(kmax + 1):
        running += mass(w, k, correlation=corr)
        if running > p * (k + 1) * b**p:
            return CheckResult(
                "mass_upper_bound", False, "sum of masses too large", {"k": k, "sum": str(running)}
            )
    return CheckResult("mass_upper_bound", True)


def _reversal_count_check(
    u: tuple[int, ...], v: tuple[int, ...], zero_adm: list[list[tuple[int, ...]]]
) -> CheckResult:
    n = len(u)
    for length, strings in enumerate(zero_adm):
        ends_u = sum(1 for s in strings if len(s) >= n and s[len(s) - n :] == u)
        starts_v = sum(1 for s in strings if s[:n] == v and len(s) >= n)
        if ends_u != starts_v:
            return CheckResult(
                "reversal", False, "ending in u vs starting with v",
                {"length": length, "ends_with_u": ends_u, "starts_with_v": starts_v},
            )
    return CheckResult("reversal", True)


def _cluster_partition_check(
    w: Block, corr: Correlation, zero_adm: list[list[tuple[int, ...]]]
) -> CheckResult:
    """#{X : k_w(vX) = j} = #{Y : |Y| = |X| - i_j, k_w(vY) = 0} for the j-th positive period."""
    v, pattern = w.suffix.digits, w.digits
    by_length = [Counter(occurrences(v + s, pattern) for s in strings) for strings in zero_adm]
    periods = corr.positive_periods
    for length, classes in enumerate(by_length):
        for j in range(1, w.p):
            got = classes.get(j, 0)
            if j <= len(periods):
                shorter = length - periods[j - 1]
                expected = by_length[shorter].get(0, 0) if shorter >= 0 else 0
            else:
                expected = 0
            if got != expected:
                return CheckResult(
                    "cluster_partition", False, "class size differs",
                    {"length": length, "j": j, "expected": expected, "actual": got},
                )
        if any(j >= w.p for j in classes):
            return CheckResult("cluster_partition", False, "k_w(vX) >= p", {"length": length})
    return CheckResult("cluster_partition", True)
