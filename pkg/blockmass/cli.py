"""
Command-line front end.

Exit codes: 0 success, 1 failed verification or ``--expect``, 2 usage error.
Results go to stdout, logs to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Callable

import structlog

from blockmass.automaton import prefix_mass
from blockmass.errors import BlockMassError
from blockmass.exactnum import format_rational, parse_rational, series_coefficients
from blockmass.genfun import autocorrelation, gf_k, gf_loop, gf_v0, identity_battery, mass
from blockmass.kempner import (
    PRECISION_RANGE,
    BimalInterval,
    check_limit_bound,
    enclose_sum,
    log_base_enclosure,
    measure_histogram,
    measure_interval,
    partial_sum,
)
from blockmass.schemas import (
    AutocorrOut,
    EnclosureOut,
    LimitBoundOut,
    RationalFunctionOut,
    ReportOut,
    dump,
)
from blockmass.verify import run_acceptance
from blockmass.words import Block, DigitString
from config.logging import configure_logging
from config.settings import get_settings

logger = structlog.get_logger()

FORMATS = ("json", "csv", "text")


class CommandFailed(Exception):
    """The command ran but an assertion about its result did not hold."""


def _emit(args, data, *, text: str | None = None, csv: str | None = None) -> None:
    fmt = args.format or args.default_format
    if fmt == "json":
        out = json.dumps(data, separators=(",", ":"))
    elif fmt == "csv":
        out = csv if csv is not None else (text if text is not None else json.dumps(data))
    else:
        out = text if text is not None else json.dumps(data, separators=(",", ":"))
    sys.stdout.write(out if out.endswith("\n") else out + "\n")


def _coefficient(c: Fraction):
    return int(c) if c.denominator == 1 else format_rational(c)


def _expect_equal(args, value: Fraction) -> None:
    if args.expect is not None and value != parse_rational(args.expect):
        raise CommandFailed(f"expected {args.expect}, got {format_rational(value)}")


def cmd_autocorr(args, w: Block) -> int:
    corr = autocorrelation(w)
    out = AutocorrOut.build(corr)
    coefficients = ",".join(str(c) for c in out.coefficients)
    _emit(args, out.coefficients, text=str(corr.polynomial), csv=coefficients)
    return 0


def cmd_genfun(args, w: Block) -> int:
    series = {"k": lambda: gf_k(w, args.k), "v0": lambda: gf_v0(w), "loop": lambda: gf_loop(w)}
    r = series[args.series]()
    _emit(args, dump(RationalFunctionOut.build(r)), text=str(r))
    return 0


def cmd_coeffs(args, w: Block) -> int:
    coefficients = [_coefficient(c) for c in series_coefficients(gf_k(w, args.k), args.maxlen)]
    _emit(args, coefficients, text=",".join(str(c) for c in coefficients))
    return 0


def cmd_mass(args, w: Block) -> int:
    if args.prefix is not None:
        value = prefix_mass(w, DigitString.parse(args.prefix, w.base), args.k)
    else:
        value = mass(w, args.k)
    _emit(args, {"value": format_rational(value)}, text=format_rational(value))
    _expect_equal(args, value)
    return 0


def cmd_measure(args, w: Block) -> int:
    interval = BimalInterval.parse(args.start, args.end, w.base)
    value = measure_interval(w, args.k, interval, cap=args.cap)
    _emit(args, {"value": format_rational(value)}, text=format_rational(value))
    _expect_equal(args, value)
    return 0


def cmd_histogram(args, w: Block) -> int:
    hist = measure_histogram(w, args.k, args.resolution, cap=args.cap)
    cells = [format_rational(c) for c in hist.cells]
    _emit(args, cells, text=hist.to_csv(), csv=hist.to_csv())
    return 0


def cmd_partial(args, w: Block) -> int:
    value = partial_sum(w, args.k, args.maxlen, cap=args.cap)
    _emit(args, {"value": format_rational(value)}, text=format_rational(value))
    _expect_equal(args, value)
    return 0


def cmd_sum(args, w: Block) -> int:
    enclosure = enclose_sum(
        w, args.k, args.depth, precision=args.precision, threads=args.threads, cap=args.cap
    )
    out = EnclosureOut.build(enclosure)
    _emit(args, dump(out), text=f"[{out.lower}, {out.upper}] {out.decimal}")
    if args.expect is not None and not enclosure.contains(parse_rational(args.expect)):
        raise CommandFailed(f"{args.expect} is not inside the enclosure")
    return 0


def cmd_logb(args, w: Block | None) -> int:
    enclosure = log_base_enclosure(args.base, args.precision)
    out = EnclosureOut.build(enclosure)
    _emit(args, dump(out), text=out.decimal)
    return 0


def cmd_limit(args, w: Block) -> int:
    report = check_limit_bound(
        w, args.k, args.depth, precision=args.precision, threads=args.threads, cap=args.cap
    )
    _emit(args, dump(LimitBoundOut.build(report)), text=report.status)
    return 1 if report.status == "violated" else 0


def cmd_battery(args, w: Block) -> int:
    corr = autocorrelation(w)
    if args.inject_mutation is not None:
        corr = corr.flipped(args.inject_mutation)
    report = identity_battery(w, args.maxlen, kmax=args.kmax, correlation=corr, cap=args.cap)
    _emit(args, dump(ReportOut.build(report)), text="passed" if report.passed else "failed")
    return 0 if report.passed else 1


def cmd_verify(args, w: Block) -> int:
    report = run_acceptance(
        w,
        kmax=args.kmax,
        maxlen=args.maxlen,
        depth=args.depth,
        mutation=args.inject_mutation,
        seed=args.seed,
        precision=args.precision,
        threads=args.threads,
        cap=args.cap,
    )
    _emit(args, dump(ReportOut.build(report)), text="passed" if report.passed else "failed")
    return 0 if report.passed else 1


def _precision_bits(text: str) -> int:
    low, high = PRECISION_RANGE
    try:
        bits = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not low <= bits <= high:
        raise argparse.ArgumentTypeError(f"precision must be in [{low}, {high}] bits")
    return bits


def _common(block: bool = True) -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--base", type=int, required=True)
    if block:
        parent.add_argument("--block", required=True, help="digits, comma-separated when b > 10")
    parent.add_argument("--format", choices=FORMATS, default=None)
    parent.add_argument("--cap", type=int, default=None, help="enumeration cap (default BLOCKMASS_CAP)")
    parent.add_argument("--log-level", default=None)
    return parent


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockmass", description="Block-counting measures and sums")
    sub = parser.add_subparsers(dest="command", required=True)
    common, no_block = _common(), _common(block=False)

    def add(name: str, handler: Callable, default_format: str, parent=common, **kwargs):
        p = sub.add_parser(name, parents=[parent], **kwargs)
        p.set_defaults(handler=handler, default_format=default_format)
        return p

    add("autocorr", cmd_autocorr, "json", help="autocorrelation polynomial A_w")

    p = add("genfun", cmd_genfun, "json", help="generating function as a rational function")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--series", choices=("k", "v0", "loop"), default="k")

    p = add("coeffs", cmd_coeffs, "text", help="N_w(k, l) for l = 0..maxlen")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--maxlen", type=int, required=True)

    p = add("mass", cmd_mass, "text", help="total mass, optionally below a prefix")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--prefix", default=None)
    p.add_argument("--expect", default=None)

    p = add("measure", cmd_measure, "text", help="mu_k of a b-imal interval")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--from", dest="start", required=True)
    p.add_argument("--to", dest="end", required=True)
    p.add_argument("--expect", default=None)

    p = add("histogram", cmd_histogram, "csv", help="mu_k of every cell at a resolution")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--resolution", "--l", dest="resolution", type=int, required=True)

    p = add("partial", cmd_partial, "text", help="exact partial harmonic sum")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--maxlen", type=int, required=True)
    p.add_argument("--expect", default=None)

    p = add("sum", cmd_sum, "json", help="certified enclosure of S_w(k)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--precision", type=_precision_bits, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--expect", default=None, help="rational that must lie in the enclosure")

    p = add("logb", cmd_logb, "json", parent=no_block, help="certified enclosure of log(b)")
    p.add_argument("--precision", type=_precision_bits, default=None)

    p = add("limit", cmd_limit, "json", help="compare S_w(k) with b^p log b")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--precision", type=_precision_bits, default=None)
    p.add_argument("--threads", type=int, default=None)

    p = add("battery", cmd_battery, "json", help="generating-function identity battery")
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--maxlen", type=int, default=8)
    p.add_argument("--inject-mutation", type=int, default=None)

    p = add("verify", cmd_verify, "json", help="full acceptance run for one block")
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--maxlen", type=int, default=8)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--precision", type=_precision_bits, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--inject-mutation", type=int, default=None, help="flip c_i of A_w")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    settings = get_settings()
    if args.log_level:
        settings = settings.model_copy(update={"log_level": args.log_level})
    configure_logging(settings)

    try:
        w = Block.parse(args.block, args.base) if hasattr(args, "block") else None
        return args.handler(args, w)
    except CommandFailed as exc:
        logger.warning("expectation_failed", command=args.command, reason=str(exc))
        sys.stderr.write(f"{exc}\n")
        return 1
    except BlockMassError as exc:
        logger.warning("command_rejected", command=args.command, error_code=exc.error_code)
        sys.stderr.write(json.dumps(exc.as_dict(), default=str) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
