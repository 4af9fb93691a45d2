"""
Acceptance run for one block: every exact identity plus the enclosure and
limit-bound checks, collected into a single ``Report``.
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

import structlog

from blockmass.automaton import build, prefix_mass, stratified_gf
from blockmass.genfun import autocorrelation, gf_k, identity_battery, mass
from blockmass.kempner import (
    BimalInterval,
    check_limit_bound,
    enclose_sum,
    ideal_depth,
    limit_bound,
    measure_histogram,
    measure_interval,
    partial_sum,
    width_bound,
)
from blockmass.report import CheckResult, Report
from blockmass.words import Block, DigitString, k_star, occurrences

logger = structlog.get_logger()

# Checks that enumerate prefixes together with their continuations stay below this
PREFIX_WORK_LIMIT = 2**14
RANDOM_STRINGS = 200


def _longest(base: int, extra: int, upper: int, limit: int = PREFIX_WORK_LIMIT) -> int:
    """Largest l <= upper with base^(l + extra) <= limit (at least 0)."""
    l = upper
    while l > 0 and base ** (l + extra) > limit:
        l -= 1
    return l


def run_acceptance(
    w: Block,
    *,
    kmax: int = 4,
    maxlen: int = 8,
    depth: int = 12,
    mutation: int | None = None,
    seed: int = 0,
    precision: int | None = None,
    threads: int | None = None,
    cap: int | None = None,
) -> Report:
    """
    Full battery for (b, w).

    ``mutation`` flips one autocorrelation coefficient before the closed forms
    are built; the run is then expected to fail.
    """
    correlation = autocorrelation(w)
    if mutation is not None:
        correlation = correlation.flipped(mutation)
    report = Report(
        {
            "base": w.base,
            "block": str(w),
            "kmax": kmax,
            "maxlen": maxlen,
            "depth": depth,
            "mutation": mutation,
        }
    )

    battery = identity_battery(w, maxlen, kmax=kmax, correlation=correlation, cap=cap)
    report.extend(battery)
    report.add(_automaton_check(w, maxlen, seed))
    report.add(_suffix_mass_check(w, kmax))
    report.add(_first_digit_check(w, kmax))
    report.add(_stratified_check(w, kmax, correlation))
    report.add(_prefix_mass_check(w, kmax))
    report.add(_partition_check(w, kmax))
    report.add(_stabilization_check(w, kmax, cap))
    report.add(_finiteness_check(w, kmax, maxlen, cap))
    report.add(_enclosure_check(w, kmax, depth, precision, threads, cap))
    report.add(_limit_check(w, kmax, depth, precision, threads, cap))

    logger.info(
        "acceptance_done",
        block=str(w),
        base=w.base,
        passed=report.passed,
        checks=len(report.checks),
        mutation=mutation,
    )
    return report


def _automaton_check(w: Block, maxlen: int, seed: int) -> CheckResult:
    rng = random.Random(seed)
    auto = build(w)
    for _ in range(RANDOM_STRINGS):
        digits = tuple(rng.randrange(w.base) for _ in range(rng.randint(0, maxlen + w.p)))
        got, expected = auto.run(digits)[1], occurrences(digits, w.digits)
        if got != expected:
            return CheckResult(
                "automaton_count", False, "automaton disagrees with scanning",
                {"string": list(digits), "automaton": got, "scan": expected},
            )
    return CheckResult("automaton_count", True)


def _suffix_mass_check(w: Block, kmax: int) -> CheckResult:
    """Strings starting with v carry mass b for every k."""
    for k in range(kmax + 1):
        got = prefix_mass(w, w.suffix, k)
        if got != w.base:
            return CheckResult("suffix_mass", False, "M_w(v,k) != b", {"k": k, "actual": str(got)})
    return CheckResult("suffix_mass", True)


def _first_digit_check(w: Block, kmax: int) -> CheckResult:
    b, p = w.base, w.p
    expected = (b - 1) * Fraction(b) ** (p - 1)
    for k in range(1, kmax + 1):
        cells = [prefix_mass(w, DigitString(b, (a,)), k) for a in range(1, b)]
        if sum(cells) != expected or any(c != Fraction(b) ** (p - 1) for c in cells):
            return CheckResult(
                "first_digit_masses", False, "mass of a leading digit != b^(p-1)",
                {"k": k, "cells": [str(c) for c in cells]},
            )
    return CheckResult("first_digit_masses", True)


def _stratified_check(w: Block, kmax: int, correlation) -> CheckResult:
    for k in range(kmax + 1):
        if stratified_gf(w, k) != gf_k(w, k, correlation=correlation, kmax=kmax):
            return CheckResult(
                "stratified_gf", False, "transfer matrix and closed form differ", {"k": k}
            )
    return CheckResult("stratified_gf", True)


def _prefixes(w: Block, longest: int):
    for length in range(longest + 1):
        for digits in itertools.product(range(w.base), repeat=length):
            yield DigitString(w.base, digits)


def _prefix_mass_check(w: Block, kmax: int) -> CheckResult:
    """prefix_mass(s, k) = b^(p - |s|) once k > k_star(s)."""
    longest = _longest(w.base, w.p - 1, 4)
    for s in _prefixes(w, longest):
        expected = Fraction(w.base) ** (w.p - len(s))
        for k in range(k_star(s, w) + 1, kmax + 1):
            got = prefix_mass(w, s, k)
            if got != expected:
                return CheckResult(
                    "prefix_mass", False, "prefix mass != b^(p-|s|)",
                    {"prefix": str(s), "k": k, "expected": str(expected), "actual": str(got)},
                )
    return CheckResult("prefix_mass", True)


def _partition_check(w: Block, kmax: int) -> CheckResult:
    """Split the strings below s by their next p - 1 digits z."""
    b, p = w.base, w.p
    longest = _longest(b, 2 * (p - 1), 2)
    for s in _prefixes(w, longest):
        for k in range(k_star(s, w) + 1, kmax + 1):
            parts = []
            for z in itertools.product(range(b), repeat=p - 1):
                c = occurrences(s.digits + z, w.digits)
                if c <= k:
                    parts.append(prefix_mass(w, DigitString(b, z), k - c))
            total = sum(parts, Fraction(0)) / b ** len(s)
            got = prefix_mass(w, s, k)
            if total != got:
                return CheckResult(
                    "partition", False, "prefix mass != sum over continuations",
                    {"prefix": str(s), "k": k, "sum": str(total), "actual": str(got)},
                )
    return CheckResult("partition", True)


def _stabilization_check(w: Block, kmax: int, cap: int | None) -> CheckResult:
    b, p = w.base, w.p
    for l in range(_longest(b, 0, 4) + 1):
        for k in range(kmax + 1):
            hist = measure_histogram(w, k, l, cap=cap)
            total = mass(w, k)
            if hist.total != total:
                return CheckResult(
                    "stabilization", False, "histogram does not sum to M_w(k)",
                    {"resolution": l, "k": k, "sum": str(hist.total), "mass": str(total)},
                )
            if k >= l + 1 and any(cell != Fraction(b) ** (p - l) for cell in hist.cells):
                return CheckResult(
                    "stabilization", False, "cell mass != b^(p-l)", {"resolution": l, "k": k}
                )
            if l >= 1:
                half = b**l // 2
                left = measure_interval(w, k, BimalInterval(b, l, 0, half), cap=cap)
                right = measure_interval(w, k, BimalInterval(b, l, half, b**l), cap=cap)
                if left + right != total or left != sum(hist.cells[:half], Fraction(0)):
                    return CheckResult(
                        "stabilization", False, "interval measures are not additive",
                        {"resolution": l, "k": k, "left": str(left), "right": str(right)},
                    )
    return CheckResult("stabilization", True)


def _finiteness_check(w: Block, kmax: int, maxlen: int, cap: int | None) -> CheckResult:
    # partial sums grow with L, so the longest one is the binding case
    longest = _longest(w.base, 0, maxlen, PREFIX_WORK_LIMIT * 4)
    for k in range(kmax + 1):
        s = partial_sum(w, k, longest, cap=cap)
        if s > w.base * mass(w, k):
            return CheckResult(
                "finiteness", False, "partial sum above b·M_w(k)",
                {"k": k, "length": longest, "partial_sum": str(s)},
            )
    return CheckResult("finiteness", True)


def _enclosure_check(w, kmax, depth, precision, threads, cap) -> CheckResult:
    """Soundness, nesting and the width law, for k = 0..kmax."""
    shallow = max(1, depth - 1)
    longest = min(shallow, _longest(w.base, 0, shallow, PREFIX_WORK_LIMIT * 4))
    for k in range(kmax + 1):
        outer = enclose_sum(w, k, shallow, precision=precision, threads=threads, cap=cap)
        inner = enclose_sum(w, k, depth, precision=precision, threads=threads, cap=cap)
        lower_sum = partial_sum(w, k, longest, cap=cap)
        witness = {"k": k, "depth": depth, "lower": str(inner.lower), "upper": str(inner.upper)}
        if inner.upper < lower_sum:
            return CheckResult("enclosure", False, "enclosure below a partial sum", witness)
        # per-term rounding can push a refined bound past its parent by the slack
        if not inner.within(outer, inner.slack):
            return CheckResult("enclosure", False, "enclosures are not nested", witness)
        if inner.width - inner.slack > width_bound(w, k, depth):
            return CheckResult("enclosure", False, "width law violated", witness)
    return CheckResult("enclosure", True)


def _limit_check(w, kmax, depth, precision, threads, cap) -> CheckResult:
    """Violations fail; enclosures too wide to decide are only reported."""
    undecided = []
    for k in range(1, kmax + 1):
        # the ideal depth may be far past the cap; only min(ideal, depth) is enumerated
        wanted = ideal_depth(w, k, limit_bound(w, k) / 10)
        result = check_limit_bound(
            w, k, min(wanted, depth), precision=precision, threads=threads, cap=cap
        )
        if result.status == "violated":
            return CheckResult("limit_bound", False, "certified gap above the bound", result.as_dict())
        if "violated" in (result.coarse_status, result.bracket_status):
            return CheckResult("limit_bound", False, "k = 1 bracket violated", result.as_dict())
        if result.cells_uniform is False:
            return CheckResult("limit_bound", False, "leading cell mass != b^(p-r)", result.as_dict())
        if result.status == "undecided":
            undecided.append(k)
    if undecided:
        return CheckResult("limit_bound", True, "undecided at this depth", {"k": undecided})
    return CheckResult("limit_bound", True)
