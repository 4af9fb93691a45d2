"""
Exact arithmetic substrate: rationals, dense polynomials in ``t``, rational
functions in canonical form, power-series expansion and exact linear solving.

Rationals are ``fractions.Fraction``.  A ``Polynomial`` stores its
coefficients low degree first with no trailing zeros; products, division,
gcd and cancellation go through ``sympy.Poly`` over QQ.  A
``RationalFunction`` is always kept in canonical form: coprime numerator and
denominator, integer coefficients with joint content 1, and a positive
constant term in the denominator.  Two equal rational functions therefore
compare equal structurally.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import sympy as sym
from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMError

from blockmass.errors import (
    InvalidInputError,
    NotExpandableError,
    PoleError,
    SingularMatrixError,
)

BigRational = Fraction
Scalar = Union[int, Fraction]

t = sym.Symbol("t")


def as_fraction(q) -> Fraction:
    if isinstance(q, sym.Rational):
        return Fraction(int(q.p), int(q.q))
    return Fraction(q)


def as_sympy(q: Scalar) -> sym.Rational:
    q = Fraction(q)
    return sym.Rational(q.numerator, q.denominator)


def format_rational(q: Scalar) -> str:
    """Serialize as ``num/den`` in base 10."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInputError(f"not a rational number: {text!r}") from exc


def exact_sum(values: Iterable[Scalar]) -> Fraction:
    """Balanced pairwise sum; keeps intermediate denominators small."""
    items = [Fraction(v) for v in values]
    if not items:
        return Fraction(0)
    while len(items) > 1:
        paired = [items[i] + items[i + 1] for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            paired.append(items[-1])
        items = paired
    return items[0]


@dataclass(frozen=True)
class Polynomial:
    """Dense univariate polynomial with rational coefficients; index = degree."""

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def constant(cls, c: Scalar) -> Polynomial:
        return cls((c,))

    @classmethod
    def monomial(cls, degree: int, c: Scalar = 1) -> Polynomial:
        return cls((0,) * degree + (c,))

    @classmethod
    def coerce(cls, value) -> Polynomial:
        if isinstance(value, Polynomial):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.constant(value)
        return NotImplemented

    @classmethod
    def from_sympy(cls, poly: sym.Poly) -> Polynomial:
        return cls(tuple(as_fraction(c) for c in reversed(poly.all_coeffs())))

    def to_sympy(self) -> sym.Poly:
        """The same polynomial as a ``sympy.Poly`` in ``t`` over QQ."""
        rep = [as_sympy(c) for c in reversed(self.coeffs)] or [sym.Integer(0)]
        return sym.Poly.from_list(rep, t, domain=QQ)

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial"""
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def coefficient(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __add__(self, other) -> Polynomial:
        other = Polynomial.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(tuple(self.coefficient(i) + other.coefficient(i) for i in range(n)))

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> Polynomial:
        other = Polynomial.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> Polynomial:
        return (-self) + other

    def __mul__(self, other) -> Polynomial:
        other = Polynomial.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self or not other:
            return Polynomial()
        return Polynomial.from_sympy(self.to_sympy() * other.to_sympy())

    __rmul__ = __mul__

    def __pow__(self, n: int) -> Polynomial:
        if n < 0:
            raise InvalidInputError("negative polynomial power")
        return Polynomial.from_sympy(self.to_sympy() ** n)

    def shift(self, n: int) -> Polynomial:
        """Multiply by t^n; a negative n drops low coefficients, which must be 0."""
        if n >= 0:
            return Polynomial((0,) * n + self.coeffs)
        if any(self.coeffs[: -n]):
            raise InvalidInputError(f"polynomial not divisible by t^{-n}")
        return Polynomial(self.coeffs[-n:])

    def evaluate(self, q: Scalar) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * q + c
        return acc

    __call__ = evaluate

    def divmod(self, other: Polynomial) -> tuple[Polynomial, Polynomial]:
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        q, r = self.to_sympy().div(other.to_sympy())
        return Polynomial.from_sympy(q), Polynomial.from_sympy(r)

    def monic(self) -> Polynomial:
        return Polynomial.from_sympy(self.to_sympy().monic())

    def gcd(self, other: Polynomial) -> Polynomial:
        """Monic gcd over Q."""
        return Polynomial.from_sympy(self.to_sympy().gcd(other.to_sympy()))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def to_json(self) -> list:
        """Integer coefficients as JSON integers, otherwise ``num/den`` strings."""
        if self.is_integral():
            return [int(c) for c in self.coeffs]
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, items: Sequence) -> Polynomial:
        return cls(tuple(c if isinstance(c, int) else parse_rational(str(c)) for c in items))

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append(f"-{mono}")
            else:
                terms.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(terms).replace("+ -", "- ") or "0"


T = Polynomial.monomial(1)


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    """Exact ring arithmetic, ``op`` one of add|sub|mul."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise InvalidInputError(f"unknown polynomial operation {op!r}")


def _canonical(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    if not den:
        raise ZeroDivisionError("rational function with zero denominator")
    if not num:
        return Polynomial(), Polynomial.constant(1)
    p, q = num.to_sympy().cancel(den.to_sympy(), include=True)
    # p/q = (cq·p') / (cp·q') with p', q' over ZZ
    cp, p = p.clear_denoms(convert=True)
    cq, q = q.clear_denoms(convert=True)
    p, q = p.mul_ground(cq), q.mul_ground(cp)
    content = sym.igcd(p.content(), q.content())
    num = Polynomial.from_sympy(p.exquo_ground(content))
    den = Polynomial.from_sympy(q.exquo_ground(content))
    if den.coefficient(0) == 0:
        raise NotExpandableError("denominator vanishes at t = 0", den=den.to_json())
    if den.coefficient(0) < 0:
        num, den = -num, -den
    return num, den


@dataclass(frozen=True)
class RationalFunction:
    """Quotient num/den of polynomials in t, expandable as a power series at 0."""

    num: Polynomial
    den: Polynomial = Polynomial((1,))

    def __post_init__(self):
        num, den = _canonical(Polynomial.coerce(self.num), Polynomial.coerce(self.den))
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def coerce(cls, value) -> RationalFunction:
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, (int, Fraction, Polynomial)):
            return cls(Polynomial.coerce(value))
        return NotImplemented

    @classmethod
    def from_sympy(cls, expr) -> RationalFunction:
        num, den = sym.fraction(sym.cancel(expr))
        return cls(
            Polynomial.from_sympy(sym.Poly(num, t, domain=QQ)),
            Polynomial.from_sympy(sym.Poly(den, t, domain=QQ)),
        )

    def to_sympy(self):
        """num/den as a sympy expression in ``t``."""
        return self.num.to_sympy().as_expr() / self.den.to_sympy().as_expr()

    def __bool__(self) -> bool:
        return bool(self.num)

    def __eq__(self, other) -> bool:
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __add__(self, other) -> RationalFunction:
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> RationalFunction:
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other) -> RationalFunction:
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> RationalFunction:
        return (-self) + other

    def __mul__(self, other) -> RationalFunction:
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> RationalFunction:
        other = RationalFunction.coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> RationalFunction:
        return RationalFunction.coerce(other) / self

    def __pow__(self, n: int) -> RationalFunction:
        if n < 0:
            return RationalFunction.coerce(1) / (self ** -n)
        return RationalFunction(self.num ** n, self.den ** n)

    def shift(self, n: int) -> RationalFunction:
        """Multiply by t^n (n may be negative when the numerator allows it)."""
        return RationalFunction(self.num.shift(n), self.den)

    def evaluate(self, q: Scalar) -> Fraction:
        return evaluate(self, q)

    def series(self, order: int) -> list[Fraction]:
        return series_coefficients(self, order)

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> RationalFunction:
        return cls(Polynomial.from_json(data["num"]), Polynomial.from_json(data["den"]))

    def __str__(self) -> str:
        return f"({self.num}) / ({self.den})"


def series_coefficients(r: RationalFunction, order: int) -> list[Fraction]:
    """Taylor coefficients of ``r`` at 0 through t^order (division recurrence)."""
    d0 = r.den.coefficient(0)
    if d0 == 0:
        raise NotExpandableError("denominator vanishes at t = 0")
    out: list[Fraction] = []
    for n in range(order + 1):
        acc = r.num.coefficient(n)
        for i in range(1, min(n, r.den.degree) + 1):
            acc -= r.den.coeffs[i] * out[n - i]
        out.append(acc / d0)
    return out


def evaluate(r: RationalFunction, q: Scalar) -> Fraction:
    d = r.den.evaluate(q)
    if d == 0:
        raise PoleError(f"pole at t = {format_rational(q)}", at=format_rational(q))
    return r.num.evaluate(q) / d


def first_series_mismatch(
    a: RationalFunction, b: RationalFunction
) -> tuple[int, Fraction, Fraction] | None:
    """First index where the series of ``a`` and ``b`` differ, or None if a == b."""
    if a == b:
        return None
    order = max(a.num.degree + b.den.degree, b.num.degree + a.den.degree, 0)
    sa, sb = series_coefficients(a, order), series_coefficients(b, order)
    for i, (x, y) in enumerate(zip(sa, sb)):
        if x != y:
            return i, x, y
    raise AssertionError("distinct rational functions with identical leading series")


def _entry_to_sympy(x):
    if isinstance(x, RationalFunction):
        return x.to_sympy()
    if isinstance(x, Polynomial):
        return x.to_sympy().as_expr()
    return as_sympy(x)


def solve_linear_system(matrix: Sequence[Sequence], rhs: Sequence) -> list:
    """
    Solve ``matrix · x = rhs`` exactly.

    Entries are ``Fraction``/int (solved over QQ) or ``RationalFunction``
    (solved over QQ(t)); the elimination is sympy's ``DomainMatrix.lu_solve``.
    The solution is checked against the system.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix) or len(rhs) != n:
        raise InvalidInputError("linear system must be square")
    functions = any(
        isinstance(x, (RationalFunction, Polynomial)) for x in itertools.chain(*matrix, rhs)
    )
    a = DomainMatrix.from_list_sympy(n, n, [[_entry_to_sympy(x) for x in row] for row in matrix])
    b = DomainMatrix.from_list_sympy(n, 1, [[_entry_to_sympy(x)] for x in rhs])
    a, b = a.unify(b)
    try:
        solution = a.to_field().lu_solve(b.to_field()).to_Matrix()
    except (DMError, ValueError, ZeroDivisionError) as exc:
        raise SingularMatrixError("singular linear system", size=n) from exc

    if functions:
        x = [RationalFunction.from_sympy(solution[i, 0]) for i in range(n)]
    else:
        x = [as_fraction(solution[i, 0]) for i in range(n)]

    for i, row in enumerate(matrix):
        lhs = sum((row[j] * x[j] for j in range(n) if row[j]), 0)
        if lhs != rhs[i]:
            raise SingularMatrixError("solution failed verification", row=i)
    return x

