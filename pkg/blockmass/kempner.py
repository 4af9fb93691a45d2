"""
Measures mu_k on [0, 1), the harmonic sums S_w(k) and certified enclosures.

mu_k puts mass b^-|X| at x(X) = n(X)/b^|X| for every k-admissible string X.
S_w(k) is the integral of 1/x over [1/b, 1) against mu_k; cutting [1/b, 1)
into the cells of the length-``depth`` prefixes s gives

    S_w(k) = sum over short admissible m of 1/m
           + sum_s mass(s) · [b^depth / (n(s) + 1), b^depth / n(s)]

where mass(s) = b^-depth · m_{k - k_w(s)}(q_s) comes from the automaton, so the
cell bracket is simply m_{k-c}(q) · [1/(n+1), 1/n].

Masses and measures are exact rationals.  Enclosure sums are accumulated as
integers scaled by 2^F with every term rounded outward.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import structlog

from blockmass.automaton import build, mass_table
from blockmass.errors import InvalidInputError
from blockmass.exactnum import exact_sum, format_rational
from blockmass.words import Block, check_enumeration_cap, digits_value, iter_admissible, padded_digits
from config.settings import get_settings

logger = structlog.get_logger()

DECIMAL_DIGITS_MAX = 60
# leading cells are listed in the limit report only up to this many
CELL_CHECK_LIMIT = 2**12


@dataclass(frozen=True)
class BimalInterval:
    """[n1 / b^l, n2 / b^l) with 0 <= n1 < n2 <= b^l."""

    base: int
    resolution: int
    n1: int
    n2: int

    def __post_init__(self):
        if self.resolution < 0:
            raise InvalidInputError("resolution must be non-negative")
        if not 0 <= self.n1 < self.n2 <= self.base**self.resolution:
            raise InvalidInputError(
                "need 0 <= n1 < n2 <= b^l",
                n1=self.n1, n2=self.n2, resolution=self.resolution,
            )

    @property
    def start(self) -> Fraction:
        return Fraction(self.n1, self.base**self.resolution)

    @property
    def end(self) -> Fraction:
        return Fraction(self.n2, self.base**self.resolution)

    @property
    def length(self) -> Fraction:
        return self.end - self.start

    @classmethod
    def from_endpoints(cls, start: Fraction, end: Fraction, base: int) -> BimalInterval:
        resolution = max(bimal_resolution(start, base), bimal_resolution(end, base))
        scale = base**resolution
        return cls(base, resolution, int(start * scale), int(end * scale))

    @classmethod
    def parse(cls, start: str, end: str, base: int) -> BimalInterval:
        """Endpoints as ``n/b^l`` literals, e.g. ``2/4`` and ``3/4`` in base 2."""
        try:
            return cls.from_endpoints(Fraction(start), Fraction(end), base)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"bad interval endpoints {start!r}, {end!r}") from exc


def bimal_resolution(x: Fraction, base: int) -> int:
    """Smallest l with b^l · x an integer."""
    den = Fraction(x).denominator
    for l in range(den.bit_length() + 1):
        if base**l % den == 0:
            return l
    raise InvalidInputError(f"{format_rational(x)} is not a b-imal number for b = {base}")


def measure_interval(w: Block, k: int, interval: BimalInterval, *, cap: int | None = None) -> Fraction:
    """
    mu_k(I), exactly.

    Strings shorter than the resolution are enumerated one by one; longer
    ones are grouped by their length-l prefix and counted through prefix masses.
    """
    if interval.base != w.base:
        raise InvalidInputError("interval and block bases differ")
    if k < 0:
        raise InvalidInputError("k must be non-negative")
    b, l = w.base, interval.resolution
    check_enumeration_cap(b, l, cap)
    auto = build(w)
    table = mass_table(w, k)

    short: list[Fraction] = []
    for m in range(l):
        scale = b ** (l - m)
        lo, hi = -(-interval.n1 // scale), -(-interval.n2 // scale)
        for n in range(lo, hi):
            if auto.run(padded_digits(n, b, m))[1] == k:
                short.append(Fraction(1, b**m))

    cells: list[Fraction] = []
    for n in range(interval.n1, interval.n2):
        q, c = auto.run(padded_digits(n, b, l))
        if c <= k:
            cells.append(table.mass(k - c, q))
    return exact_sum(short) + exact_sum(cells) / b**l


@dataclass(frozen=True)
class Histogram:
    block: Block
    k: int
    resolution: int
    cells: tuple[Fraction, ...]

    @property
    def total(self) -> Fraction:
        return exact_sum(self.cells)

    def rows(self):
        size = self.block.base**self.resolution
        for i, cell in enumerate(self.cells):
            yield i, f"{i}/{size}", cell.numerator, cell.denominator

    def to_csv(self) -> str:
        output = io.StringIO()
        writer = csv.writer(output, lineterminator="\n")
        writer.writerow(["cell_index", "n_over_bl", "mass_num", "mass_den"])
        writer.writerows(self.rows())
        return output.getvalue()


def measure_histogram(w: Block, k: int, resolution: int, *, cap: int | None = None) -> Histogram:
    """mu_k of every cell [i/b^l, (i+1)/b^l), in one pass over the prefix tree."""
    if k < 0:
        raise InvalidInputError("k must be non-negative")
    b, l = w.base, resolution
    check_enumeration_cap(b, l, cap)
    auto = build(w)
    table = mass_table(w, k)
    cells = [Fraction(0)] * b**l

    layer = [(0, 0, 0)]
    for m in range(l):
        weight, spread = Fraction(1, b**m), b ** (l - m)
        nxt = []
        for n, q, c in layer:
            if c == k:
                cells[n * spread] += weight
            for d in range(b):
                c2 = c + auto.emit[q][d]
                if c2 <= k:
                    nxt.append((n * b + d, auto.delta[q][d], c2))
        layer = nxt
    tail_weight = Fraction(1, b**l)
    for n, q, c in layer:
        cells[n] += tail_weight * table.mass(k - c, q)
    return Histogram(w, k, l, tuple(cells))


def partial_sum(w: Block, k: int, maxlen: int, *, cap: int | None = None) -> Fraction:
    """Sum of 1/m over k-admissible positive integers with at most ``maxlen`` digits."""
    check_enumeration_cap(w.base, maxlen, cap)
    terms = [
        Fraction(1, digits_value(digits, w.base))
        for length in range(1, maxlen + 1)
        for digits in iter_admissible(w, k, length, leading_nonzero=True, cap=cap)
    ]
    return exact_sum(terms)


def _floor_scaled(q: Fraction, bits: int) -> int:
    return (q.numerator << bits) // q.denominator


def _ceil_scaled(q: Fraction, bits: int) -> int:
    return -((-q.numerator << bits) // q.denominator)


def _truncated(q: Fraction, digits: int) -> str:
    sign = "-" if q < 0 else ""
    q = abs(q)
    whole = q.numerator // q.denominator
    frac = ((q - whole) * 10**digits).numerator // ((q - whole) * 10**digits).denominator
    return f"{sign}{whole}.{frac:0{digits}d}"


@dataclass(frozen=True)
class Enclosure:
    """[lower_scaled, upper_scaled] · 2^-precision, certified to contain its target."""

    lower_scaled: int
    upper_scaled: int
    precision: int
    terms: int = 0

    def __post_init__(self):
        if self.lower_scaled > self.upper_scaled:
            raise InvalidInputError("enclosure with lower > upper")

    @classmethod
    def from_bounds(cls, lower: Fraction, upper: Fraction, precision: int, terms: int = 0) -> Enclosure:
        return cls(_floor_scaled(Fraction(lower), precision), _ceil_scaled(Fraction(upper), precision), precision, terms)

    @property
    def lower(self) -> Fraction:
        return Fraction(self.lower_scaled, 1 << self.precision)

    @property
    def upper(self) -> Fraction:
        return Fraction(self.upper_scaled, 1 << self.precision)

    @property
    def exact(self) -> bool:
        return self.lower_scaled == self.upper_scaled

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def slack(self) -> Fraction:
        """Upper bound on what outward rounding added to the width."""
        return Fraction(2 * self.terms, 1 << self.precision)

    def contains(self, x) -> bool:
        return self.lower <= Fraction(x) <= self.upper

    def within(self, other: Enclosure, tolerance: Fraction = Fraction(0)) -> bool:
        """self ⊆ other, each bound allowed to stick out by ``tolerance``."""
        return other.lower - tolerance <= self.lower and self.upper <= other.upper + tolerance

    def scale(self, n: int) -> Enclosure:
        if n <= 0:
            raise InvalidInputError("can only scale by a positive integer")
        return Enclosure(self.lower_scaled * n, self.upper_scaled * n, self.precision, self.terms * n)

    def __add__(self, other: Enclosure) -> Enclosure:
        if other.precision != self.precision:
            return NotImplemented
        return Enclosure(
            self.lower_scaled + other.lower_scaled,
            self.upper_scaled + other.upper_scaled,
            self.precision,
            self.terms + other.terms,
        )

    def decimal(self) -> tuple[str, int]:
        """Digits shared by both bounds and how many of them follow the point."""
        digits = min(DECIMAL_DIGITS_MAX, self.precision * 30103 // 100000 + 1)
        lo, hi = _truncated(self.lower, digits), _truncated(self.upper, digits)
        if lo.split(".")[0] != hi.split(".")[0]:
            return "", 0
        shared = []
        for a, b in zip(lo, hi):
            if a != b:
                break
            shared.append(a)
        text = "".join(shared).rstrip(".")
        return text, (len(text) - text.index(".") - 1 if "." in text else 0)

    def as_dict(self) -> dict:
        text, certified = self.decimal()
        return {
            "lower": format_rational(self.lower),
            "upper": format_rational(self.upper),
            "decimal": text,
            "certified_digits": certified,
        }


def _enclose_leading(auto, w: Block, k: int, depth: int, lead: int, scaled, one: int) -> tuple[int, int, int]:
    """Scaled lower/upper sums over the integers whose first digit is ``lead``."""
    b = w.base
    delta, emit = auto.delta, auto.emit
    lower = upper = terms = 0
    c0 = emit[0][lead]
    stack = [(1, lead, delta[0][lead], c0)] if c0 <= k else []
    while stack:
        length, n, q, c = stack.pop()
        if length == depth:
            num, den = scaled[k - c][q]
            if num:
                lower += num // (den * (n + 1))
                upper += -(-num // (den * n))
                terms += 1
            continue
        if c == k:
            lower += one // n
            upper += -(-one // n)
            terms += 1
        row_d, row_e = delta[q], emit[q]
        for d in range(b):
            c2 = c + row_e[d]
            if c2 <= k:
                stack.append((length + 1, n * b + d, row_d[d], c2))
    return lower, upper, terms


PRECISION_RANGE = (8, 4096)


def _check_precision(precision: int) -> None:
    low, high = PRECISION_RANGE
    if not low <= precision <= high:
        raise InvalidInputError(f"precision must be in [{low}, {high}] bits", precision=precision)


def enclose_sum(
    w: Block,
    k: int,
    depth: int,
    *,
    precision: int | None = None,
    threads: int | None = None,
    cap: int | None = None,
) -> Enclosure:
    """
    Certified enclosure of S_w(k).

    Admissible integers shorter than ``depth`` contribute 1/m; every prefix of
    length ``depth`` contributes its cell bracket.  Work is split by leading
    digit; partial sums are integers, so the merge is order independent.
    """
    if k < 0:
        raise InvalidInputError("k must be non-negative")
    if depth < 1:
        raise InvalidInputError("depth must be at least 1")
    settings = get_settings()
    precision = settings.precision_bits if precision is None else precision
    _check_precision(precision)
    threads = settings.threads if threads is None else threads
    check_enumeration_cap(w.base, depth, cap)

    auto = build(w)
    table = mass_table(w, k)
    scaled = [[(m.numerator << precision, m.denominator) for m in row] for row in table.masses]
    one = 1 << precision
    leads = range(1, w.base)

    def job(lead: int) -> tuple[int, int, int]:
        return _enclose_leading(auto, w, k, depth, lead, scaled, one)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, leads))
    else:
        parts = [job(lead) for lead in leads]

    enclosure = Enclosure(
        sum(p[0] for p in parts), sum(p[1] for p in parts), precision, sum(p[2] for p in parts)
    )
    logger.info(
        "enclosure_computed",
        block=str(w), base=w.base, k=k, depth=depth, precision=precision,
        terms=enclosure.terms, width=float(enclosure.width),
    )
    return enclosure


def width_bound(w: Block, k: int, depth: int) -> Fraction:
    """max m_j(q) · (b - 1) · b^-depth: the bracket width before rounding."""
    table = mass_table(w, k)
    largest = max(m for row in table.masses for m in row)
    return largest * (w.base - 1) / Fraction(w.base) ** depth


def ideal_depth(w: Block, k: int, target_width: Fraction) -> int:
    """Smallest depth whose bracket width is below ``target_width``, ignoring the cap."""
    if target_width <= 0:
        raise InvalidInputError("target width must be positive")
    depth = 1
    while width_bound(w, k, depth) >= target_width:
        depth += 1
    return depth


def choose_depth(w: Block, k: int, target_width: Fraction, *, cap: int | None = None) -> int:
    """``ideal_depth``, refused when b^depth is over the enumeration cap."""
    depth = ideal_depth(w, k, target_width)
    check_enumeration_cap(w.base, depth, cap)
    return depth


def _atanh_bounds(x: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    """atanh(x) for 0 <= x <= 1/3, to within 2^-bits; the tail is geometric."""
    x2 = x * x
    eps = Fraction(1, 1 << bits)
    total, power, i = Fraction(0), x, 0
    while True:
        total += power / (2 * i + 1)
        power *= x2
        i += 1
        tail = power / ((2 * i + 1) * (1 - x2))
        if tail < eps:
            return total, total + tail


def log_base_enclosure(base: int, precision: int | None = None) -> Enclosure:
    """
    log(b) = 2e·atanh(1/3) + 2·atanh((b - 2^e)/(b + 2^e)) with 2^e <= b < 2^(e+1).

    Both arguments are at most 1/3; width <= 2^(-F+2).
    """
    if base < 2:
        raise InvalidInputError("base must be at least 2")
    precision = get_settings().precision_bits if precision is None else precision
    _check_precision(precision)
    e = base.bit_length() - 1
    guard = precision + 8 + (2 * e + 2).bit_length()
    lo2, hi2 = _atanh_bounds(Fraction(1, 3), guard)
    lo_r, hi_r = _atanh_bounds(Fraction(base - 2**e, base + 2**e), guard)
    return Enclosure.from_bounds(2 * e * lo2 + 2 * lo_r, 2 * e * hi2 + 2 * hi_r, precision)


@dataclass(frozen=True)
class LimitBoundReport:
    block: Block
    k: int
    depth: int
    bound: Fraction
    sum_enclosure: Enclosure
    limit_enclosure: Enclosure
    worst_gap: Fraction
    best_gap: Fraction
    leading_mass: Fraction
    coarse_bound: Fraction | None = None
    cell_resolution: int | None = None
    cell_masses: tuple[Fraction, ...] = ()

    @property
    def status(self) -> str:
        return _gap_status(self.worst_gap, self.best_gap, self.bound)

    @property
    def coarse_status(self) -> str | None:
        """k = 1 only: the gap against (b - 1)^2 b^(p - 1)."""
        if self.coarse_bound is None:
            return None
        return _gap_status(self.worst_gap, self.best_gap, self.coarse_bound)

    @property
    def bracket_status(self) -> str | None:
        """k = 1 only: mu_1([1/b, 1)) <= S_w(1) <= b·mu_1([1/b, 1))."""
        if self.k != 1:
            return None
        low, high = self.leading_mass, self.block.base * self.leading_mass
        s = self.sum_enclosure
        if low <= s.lower and s.upper <= high:
            return "verified"
        if s.upper < low or s.lower > high:
            return "violated"
        return "undecided"

    @property
    def cells_uniform(self) -> bool | None:
        """Every leading cell at the resolution carries b^(p - resolution)."""
        if self.cell_resolution is None:
            return None
        expected = Fraction(self.block.base) ** (self.block.p - self.cell_resolution)
        return all(m == expected for m in self.cell_masses)

    def as_dict(self) -> dict:
        data = {
            "base": self.block.base,
            "block": str(self.block),
            "k": self.k,
            "depth": self.depth,
            "bound": format_rational(self.bound),
            "worst_gap": format_rational(self.worst_gap),
            "best_gap": format_rational(self.best_gap),
            "worst_gap_float": float(self.worst_gap),
            "bound_float": float(self.bound),
            "status": self.status,
            "sum": self.sum_enclosure.as_dict(),
            "limit": self.limit_enclosure.as_dict(),
            "leading_mass": format_rational(self.leading_mass),
        }
        if self.coarse_bound is not None:
            data["coarse_bound"] = format_rational(self.coarse_bound)
            data["coarse_status"] = self.coarse_status
            data["bracket_status"] = self.bracket_status
        if self.cell_resolution is not None:
            data["cell_resolution"] = self.cell_resolution
            data["cells_uniform"] = self.cells_uniform
        return data


def limit_bound(w: Block, k: int) -> Fraction:
    """(b - 1) · b^(p - max(k, 2) + 1)"""
    return (w.base - 1) * Fraction(w.base) ** (w.p - max(k, 2) + 1)


def coarse_bound(w: Block) -> Fraction:
    """(b - 1)^2 · b^(p - 1): 1/x replaced by 1 and by b on [1/b, 1), at k = 1."""
    return (w.base - 1) ** 2 * Fraction(w.base) ** (w.p - 1)


def _gap_status(worst_gap: Fraction, best_gap: Fraction, bound: Fraction) -> str:
    if worst_gap <= bound:
        return "verified"
    if best_gap > bound:
        return "violated"
    return "undecided"


def _leading_cells(w: Block, k: int, cap: int | None) -> tuple[int | None, tuple[Fraction, ...]]:
    """mu_k of the cells [n/b^r, (n+1)/b^r) with n >= b^(r-1), r = max(1, k - 1)."""
    r = max(1, k - 1)
    limit = min(CELL_CHECK_LIMIT, get_settings().cap if cap is None else cap)
    if w.base**r > limit:
        return None, ()
    hist = measure_histogram(w, k, r, cap=cap)
    return r, tuple(hist.cells[w.base ** (r - 1):])


def check_limit_bound(
    w: Block,
    k: int,
    depth: int | None = None,
    *,
    precision: int | None = None,
    threads: int | None = None,
    cap: int | None = None,
) -> LimitBoundReport:
    """
    Compare an enclosure of S_w(k) with one of b^p·log(b).

    ``worst_gap`` bounds |S_w(k) - b^p log b| from above, ``best_gap`` from
    below.  Without a depth, the smallest one with width below bound/10 is used.
    """
    if k < 1:
        raise InvalidInputError("the limit bound needs k >= 1")
    bound = limit_bound(w, k)
    if depth is None:
        depth = choose_depth(w, k, bound / 10, cap=cap)
    s = enclose_sum(w, k, depth, precision=precision, threads=threads, cap=cap)
    c = log_base_enclosure(w.base, s.precision).scale(w.base**w.p)
    worst = max(s.upper - c.lower, c.upper - s.lower)
    best = max(Fraction(0), s.lower - c.upper, c.lower - s.upper)
    leading = measure_interval(w, k, BimalInterval(w.base, 1, 1, w.base), cap=cap)
    resolution, cells = _leading_cells(w, k, cap)
    report = LimitBoundReport(
        w, k, depth, bound, s, c, worst, best,
        leading_mass=leading,
        coarse_bound=coarse_bound(w) if k == 1 else None,
        cell_resolution=resolution,
        cell_masses=cells,
    )
    logger.info(
        "limit_bound_checked",
        block=str(w), base=w.base, k=k, depth=depth, status=report.status,
        coarse_status=report.coarse_status, bracket_status=report.bracket_status,
        cells_uniform=report.cells_uniform, worst_gap=float(worst), bound=float(bound),
    )
    return report
