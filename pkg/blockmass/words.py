"""
Digit strings, blocks and brute-force occurrence counting.

Everything here works directly on digit tuples and is deliberately naive: the
enumeration helpers are the ground truth the closed forms, the automaton and
the measures are checked against.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from blockmass.errors import BaseMismatchError, EnumerationCapError, InvalidInputError
from config.settings import get_settings

MAX_BASE = 2**16


@dataclass(frozen=True)
class DigitString:
    """A finite string of base-b digits, possibly empty."""

    base: int
    digits: tuple[int, ...] = ()

    def __post_init__(self):
        check_base(self.base)
        digits = tuple(int(d) for d in self.digits)
        bad = [d for d in digits if not 0 <= d < self.base]
        if bad:
            raise InvalidInputError(f"digits out of range for base {self.base}: {bad}")
        object.__setattr__(self, "digits", digits)

    @classmethod
    def parse(cls, text: str, base: int) -> DigitString:
        """Compact digits for b <= 10, comma-separated integers otherwise."""
        return cls(base, _parse_digits(text, base))

    def __len__(self) -> int:
        return len(self.digits)

    @property
    def length(self) -> int:
        return len(self.digits)

    @property
    def value(self) -> int:
        """n(X), with n(ε) = 0"""
        return digits_value(self.digits, self.base)

    def __add__(self, other: DigitString) -> DigitString:
        same_base(self, other)
        return DigitString(self.base, self.digits + other.digits)

    def reversed(self) -> DigitString:
        return DigitString(self.base, self.digits[::-1])

    def __str__(self) -> str:
        return format_digits(self.digits, self.base)


@dataclass(frozen=True)
class Block(DigitString):
    """The pattern w = d_1..d_p, p >= 1."""

    def __post_init__(self):
        super().__post_init__()
        if not self.digits:
            raise InvalidInputError("the empty block is not allowed")

    @classmethod
    def parse(cls, text: str, base: int) -> Block:
        return cls(base, _parse_digits(text, base))

    @property
    def p(self) -> int:
        return len(self.digits)

    @property
    def prefix(self) -> DigitString:
        """u = d_1..d_{p-1}"""
        return DigitString(self.base, self.digits[:-1])

    @property
    def suffix(self) -> DigitString:
        """v = d_2..d_p"""
        return DigitString(self.base, self.digits[1:])

    def reversed(self) -> Block:
        return Block(self.base, self.digits[::-1])


def check_base(base: int) -> None:
    if not isinstance(base, int) or not 2 <= base <= MAX_BASE:
        raise InvalidInputError(f"base must be an integer in [2, {MAX_BASE}]", base=base)


def _parse_digits(text: str, base: int) -> tuple[int, ...]:
    text = text.strip()
    if not text or text in ("ε", "eps"):
        return ()
    try:
        if "," in text or base > 10:
            return tuple(int(part) for part in text.split(","))
        return tuple(int(ch) for ch in text)
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse digits from {text!r}") from exc


def format_digits(digits: Sequence[int], base: int) -> str:
    if base <= 10:
        return "".join(str(d) for d in digits)
    return ",".join(str(d) for d in digits)


def digits_value(digits: Sequence[int], base: int) -> int:
    n = 0
    for d in digits:
        n = n * base + d
    return n


def padded_digits(n: int, base: int, length: int) -> tuple[int, ...]:
    """The length-``length`` representation of n, with leading zeros."""
    out = [0] * length
    for i in range(length - 1, -1, -1):
        n, out[i] = divmod(n, base)
    if n:
        raise InvalidInputError(f"{n} does not fit in {length} digits")
    return tuple(out)


def same_base(x: DigitString, w: DigitString) -> None:
    if x.base != w.base:
        raise BaseMismatchError(f"base mismatch: {x.base} vs {w.base}")


def occurrences(digits: Sequence[int], pattern: Sequence[int]) -> int:
    """Overlapping occurrences of ``pattern`` in ``digits`` (plain scan)."""
    p = len(pattern)
    pattern = tuple(pattern)
    digits = tuple(digits)
    return sum(1 for i in range(len(digits) - p + 1) if digits[i : i + p] == pattern)


def count_occurrences(x: DigitString, w: Block) -> int:
    """k_w(X)"""
    same_base(x, w)
    return occurrences(x.digits, w.digits)


def k_star(s: DigitString, w: Block) -> int:
    """max of k_w(s·z) over all strings z of length p - 1"""
    same_base(s, w)
    return max(
        occurrences(s.digits + z, w.digits)
        for z in itertools.product(range(w.base), repeat=w.p - 1)
    )


def minimal_representation(n: int, base: int) -> DigitString:
    """X(n): no leading zero, X(0) = ε."""
    check_base(base)
    if n < 0:
        raise InvalidInputError("negative integers have no representation")
    digits = []
    while n:
        n, d = divmod(n, base)
        digits.append(d)
    return DigitString(base, tuple(reversed(digits)))


def to_fraction(x: DigitString) -> Fraction:
    """x(X) = n(X) / b^|X|, in [0, 1)"""
    return Fraction(x.value, x.base ** len(x))


def reverse(x: DigitString) -> DigitString:
    return x.reversed()


def check_enumeration_cap(base: int, length: int, cap: int | None = None) -> None:
    cap = get_settings().cap if cap is None else cap
    if length < 0:
        raise InvalidInputError("length must be non-negative")
    if base**length > cap:
        raise EnumerationCapError(
            f"{base}^{length} strings exceed the enumeration cap {cap}",
            base=base,
            length=length,
            cap=cap,
        )


def iter_admissible(
    w: Block, k: int, length: int, *, leading_nonzero: bool = False, cap: int | None = None
) -> Iterator[tuple[int, ...]]:
    """
    Yield every string of ``length`` digits with exactly k occurrences of w.

    Depth-first over all b^length strings; a branch is dropped as soon as its
    count exceeds k (counts never decrease when digits are appended).
    """
    check_enumeration_cap(w.base, length, cap)
    if k < 0:
        return
    pattern, p, b = w.digits, w.p, w.base
    first = range(1, b) if leading_nonzero else range(b)
    if length == 0:
        if k == 0 and not leading_nonzero:
            yield ()
        return
    stack = [((d,), int((d,) == pattern)) for d in reversed(first)]
    stack = [(s, c) for s, c in stack if c <= k]
    while stack:
        prefix, c = stack.pop()
        if len(prefix) == length:
            if c == k:
                yield prefix
            continue
        for d in range(b - 1, -1, -1):
            nxt = prefix + (d,)
            hit = len(nxt) >= p and nxt[-p:] == pattern
            if c + hit <= k:
                stack.append((nxt, c + hit))


def admissible_counts(w: Block, length: int, *, cap: int | None = None) -> Counter:
    """
    N_w(k, length) for every k at once: one pass over all strings.

    Each string is represented by its last p - 1 digits and its running count;
    strings agreeing on both are carried as one entry with a multiplicity.
    """
    check_enumeration_cap(w.base, length, cap)
    pattern, keep = w.digits, w.p - 1
    layer: Counter = Counter({((), 0): 1})
    for _ in range(length):
        nxt: Counter = Counter()
        for (tail, c), n in layer.items():
            for d in range(w.base):
                window = tail + (d,)
                hit = window[-w.p :] == pattern
                nxt[(window[-keep:] if keep else (), c + hit)] += n
        layer = nxt
    counts: Counter = Counter()
    for (_, c), n in layer.items():
        counts[c] += n
    return counts


@dataclass(frozen=True)
class Admissible:
    count: int
    strings: tuple[DigitString, ...] | None = None


def enumerate_admissible(
    w: Block, k: int, length: int, *, collect: bool = False, cap: int | None = None
) -> Admissible:
    """N_w(k, l) by brute force, optionally with the strings themselves."""
    if not collect:
        return Admissible(admissible_counts(w, length, cap=cap).get(k, 0))
    strings = tuple(DigitString(w.base, s) for s in iter_admissible(w, k, length, cap=cap))
    return Admissible(len(strings), strings)
