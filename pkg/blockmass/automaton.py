"""
Occurrence-counting automaton for a block w and the exact masses it yields.

State q is the length of the longest suffix of the input read so far that is
a proper prefix of w (Knuth-Morris-Pratt).  Reading a digit moves to
``delta[q][d]`` and emits 1 exactly when an occurrence of w is completed.

Masses depend on a prefix s only through the state q_s reached after s and
the number of occurrences already inside s, so the b^(p-1) contexts of the
cut-and-glue arguments collapse to p states.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import structlog

from blockmass.errors import InvalidInputError
from blockmass.exactnum import Polynomial, RationalFunction, solve_linear_system
from blockmass.words import Block, DigitString, same_base

logger = structlog.get_logger()


def failure_function(pattern: Sequence[int]) -> list[int]:
    """f[i] = length of the longest proper border of pattern[:i]; f[0] = -1."""
    f = [-1] * (len(pattern) + 1)
    for i in range(1, len(pattern) + 1):
        j = f[i - 1]
        while j != -1 and pattern[j] != pattern[i - 1]:
            j = f[j]
        f[i] = j + 1
    return f


@dataclass(frozen=True)
class OccurrenceAutomaton:
    block: Block
    delta: tuple[tuple[int, ...], ...]
    emit: tuple[tuple[int, ...], ...]

    @property
    def states(self) -> range:
        return range(self.block.p)

    def run(self, digits: Sequence[int], start: int = 0) -> tuple[int, int]:
        """(final state, emissions) after reading ``digits`` from ``start``."""
        q, count = start, 0
        delta, emit = self.delta, self.emit
        for d in digits:
            q, count = delta[q][d], count + emit[q][d]
        return q, count

    def count(self, x: DigitString) -> int:
        same_base(x, self.block)
        return self.run(x.digits)[1]

    def transfer_matrices(self) -> tuple[list[list[int]], list[list[int]]]:
        """B_0 / B_1: number of digits moving q -> q' without / with an emission."""
        p = self.block.p
        b0 = [[0] * p for _ in range(p)]
        b1 = [[0] * p for _ in range(p)]
        for q in self.states:
            for d in range(self.block.base):
                (b1 if self.emit[q][d] else b0)[q][self.delta[q][d]] += 1
        return b0, b1


@lru_cache(maxsize=256)
def build(w: Block) -> OccurrenceAutomaton:
    pattern, p = w.digits, w.p
    f = failure_function(pattern)
    delta: list[list[int]] = []
    emit: list[list[int]] = []
    for q in range(p):
        row_d, row_e = [], []
        for d in range(w.base):
            if d == pattern[q]:
                if q + 1 == p:
                    row_d.append(f[p])
                    row_e.append(1)
                else:
                    row_d.append(q + 1)
                    row_e.append(0)
            elif q == 0:
                row_d.append(0)
                row_e.append(0)
            else:
                # f[q] < q, so its row is complete and never emits here
                row_d.append(delta[f[q]][d])
                row_e.append(0)
        delta.append(row_d)
        emit.append(row_e)
    return OccurrenceAutomaton(w, tuple(map(tuple, delta)), tuple(map(tuple, emit)))


@dataclass(frozen=True)
class MassTable:
    """m_j(q) for 0 <= j <= jmax: mass of continuations from q with j emissions."""

    block: Block
    jmax: int
    masses: tuple[tuple[Fraction, ...], ...]

    def mass(self, j: int, q: int) -> Fraction:
        if j < 0:
            return Fraction(0)
        return self.masses[j][q]


_mass_rows: dict[Block, list[tuple[Fraction, ...]]] = {}
_mass_lock = threading.Lock()


def mass_table(w: Block, jmax: int) -> MassTable:
    """
    Solve (I - B_0/b)·m_j = [j=0]·1 + (1/b)·B_1·m_{j-1} for j = 0..jmax.

    Rows are memoized per block and extended on demand.
    """
    if jmax < 0:
        raise InvalidInputError("jmax must be non-negative")
    with _mass_lock:
        rows = _mass_rows.setdefault(w, [])
        if len(rows) <= jmax:
            auto = build(w)
            b0, b1 = auto.transfer_matrices()
            inv_b = Fraction(1, w.base)
            p = w.p
            system = [
                [(1 if i == j else 0) - inv_b * b0[i][j] for j in range(p)] for i in range(p)
            ]
            start = len(rows)
            for j in range(start, jmax + 1):
                prev = rows[j - 1] if j else None
                rhs = [
                    Fraction(int(j == 0))
                    + (inv_b * sum(b1[i][c] * prev[c] for c in range(p)) if prev else 0)
                    for i in range(p)
                ]
                rows.append(tuple(solve_linear_system(system, rhs)))
            logger.debug("mass_table_extended", block=str(w), base=w.base, start=start, jmax=jmax)
        return MassTable(w, jmax, tuple(rows[: jmax + 1]))


def prefix_mass(w: Block, s: DigitString, k: int) -> Fraction:
    """
    Total mass of the k-admissible strings having s as prefix.

    b^{-|s|} · m_{k - k_w(s)}(q_s); zero when s already holds more than k
    occurrences.
    """
    same_base(s, w)
    if k < 0:
        raise InvalidInputError("k must be non-negative")
    q, c = build(w).run(s.digits)
    if c > k:
        return Fraction(0)
    return Fraction(1, w.base ** len(s)) * mass_table(w, k - c).mass(k - c, q)


def prefix_gf(
    w: Block, s: DigitString | None, k: int, *, ending_in_u: bool = False
) -> RationalFunction:
    """
    Generating function of the k-admissible strings starting with s,
    optionally restricted to those ending with u = d_1..d_{p-1}.

    Transfer-matrix method: (I - t·B_0)·G_j = [j=0]·χ + t·B_1·G_{j-1}, where χ
    marks the accepted end states (state p-1 means "ends with u").
    """
    if k < 0:
        raise InvalidInputError("k must be non-negative")
    s = s if s is not None else DigitString(w.base)
    same_base(s, w)
    auto = build(w)
    q_s, c_s = auto.run(s.digits)
    if c_s > k:
        return RationalFunction(Polynomial())

    p = w.p
    t = RationalFunction(Polynomial.monomial(1))
    b0, b1 = auto.transfer_matrices()
    system = [
        [RationalFunction.coerce(int(i == j)) - t * b0[i][j] for j in range(p)] for i in range(p)
    ]
    accept = [int(not ending_in_u or q == p - 1) for q in range(p)]

    g_prev = None
    for j in range(k - c_s + 1):
        rhs = []
        for i in range(p):
            term = RationalFunction.coerce(accept[i] if j == 0 else 0)
            if g_prev is not None:
                term = term + t * sum((b1[i][c] * g_prev[c] for c in range(p) if b1[i][c]), 0)
            rhs.append(term)
        g_prev = solve_linear_system(system, rhs)
    return g_prev[q_s].shift(len(s))


def stratified_gf(w: Block, k: int) -> RationalFunction:
    """Z_w(k) read off the transfer matrix from the start state."""
    return prefix_gf(w, None, k)
