"""Command-line front end: ``rotkepler {catalog,cz-index,diagram,convexity-scan,verify}``.

Exit codes: 0 success, 1 verify failure, 2 assertion failure,
3 oracle disagreement, 64 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import serialize
from .catalog import (RESONANT, circular_cz_index, cz_index_oracle, dynamical_convexity_report)
from .levicivita import convexity_scan, convexity_witness
from .mechanics import CRITICAL_C

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_ASSERTION = 2
EXIT_DISAGREE = 3
EXIT_USAGE = 64

MIN_SCAN_C = 1.4
MAX_SAMPLES = 10_000_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _sign(text: str) -> str:
    aliases = {"retrograde": "retrograde", "+": "retrograde", "+1": "retrograde",
               "direct": "direct", "-": "direct", "-1": "direct"}
    if text not in aliases:
        raise argparse.ArgumentTypeError(f"sign must be retrograde or direct, got {text!r}")
    return aliases[text]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rotkepler", description="Periodic orbits, indices and convexity of the rotating Kepler problem.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_output(p, default_format):
        p.add_argument("--format", choices=["json", "csv"], default=default_format)
        p.add_argument("--output", help="write to this path instead of stdout")

    p = sub.add_parser("catalog", help="orbit table and dynamical-convexity assertions at level c")
    p.add_argument("--c", type=_finite, required=True)
    p.add_argument("--n-max", type=_positive_int, default=20)
    p.add_argument("--k-max", type=_positive_int, default=20)
    add_output(p, "json")

    p = sub.add_parser("cz-index", help="Conley-Zehnder index of an iterated circular orbit")
    p.add_argument("--E", type=_finite, required=True)
    p.add_argument("--sign", type=_sign, required=True)
    p.add_argument("--N", type=_positive_int, default=1)
    p.add_argument("--oracle", action="store_true", help="also compute the index from crossing forms")

    p = sub.add_parser("diagram", help="energy-Jacobi or life-of-tori data")
    p.add_argument("--kind", choices=["energy-jacobi", "life-of-tori"], required=True)
    p.add_argument("--c-min", type=_finite, default=CRITICAL_C)
    p.add_argument("--c-max", type=_finite, default=3.0)
    p.add_argument("--points", type=_positive_int, default=151)
    p.add_argument("--k-max", type=_positive_int, default=7)
    add_output(p, "csv")

    p = sub.add_parser("convexity-scan", help="minimum tangential Hessian eigenvalue of the regularised level set")
    p.add_argument("--c", type=_finite, required=True)
    p.add_argument("--samples", type=_positive_int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    add_output(p, "json")

    sub.add_parser("verify", help="run the acceptance suite")
    return parser


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_catalog(args) -> int:
    if not args.c > CRITICAL_C:
        raise UsageError(f"catalog needs c > 3/2, got c={args.c}")
    report = dynamical_convexity_report(args.c, N_max=args.n_max, k_max=args.k_max)
    if args.format == "json":
        _emit(serialize.to_json(serialize.catalog_dict(report)), args.output)
    else:
        rows = [serialize.record_row(r) for r in report.records]
        _emit(serialize.to_csv(rows, serialize.CATALOG_COLUMNS), args.output)
        for name, ok in report.assertions.items():
            print(f"{name}: {'pass' if ok else 'FAIL'}", file=sys.stderr)
    if report.passed:
        return EXIT_OK
    for what, rec in report.violations:
        detail = serialize.record_row(rec) if rec is not None else "-"
        print(f"assertion failed: {what}: {detail}", file=sys.stderr)
    return EXIT_ASSERTION


def cmd_cz_index(args) -> int:
    if not args.E < 0.0:
        raise UsageError(f"circular orbits need E < 0, got {args.E}")
    if args.sign == "direct" and args.E >= -0.5:
        raise UsageError(f"direct orbits of the bounded component need E < -1/2, got {args.E}")
    closed = circular_cz_index(args.E, args.sign, args.N)
    if not args.oracle:
        print(closed)
        return EXIT_OK
    oracle = cz_index_oracle(args.E, args.sign, args.N)
    if closed == RESONANT and oracle == RESONANT:
        print(RESONANT)
        return EXIT_OK
    verdict = "AGREE" if closed == oracle else "DISAGREE"
    print(f"{closed} {oracle} {verdict}")
    return EXIT_OK if verdict == "AGREE" else EXIT_DISAGREE


def cmd_diagram(args) -> int:
    if args.kind == "energy-jacobi":
        if not CRITICAL_C <= args.c_min <= args.c_max:
            raise UsageError(f"need 3/2 <= c-min <= c-max, got [{args.c_min}, {args.c_max}]")
        rows = serialize.energy_jacobi_rows(np.linspace(args.c_min, args.c_max, args.points))
        columns = serialize.ENERGY_JACOBI_COLUMNS
    else:
        if args.k_max < 2:
            raise UsageError("life-of-tori needs k-max >= 2")
        rows = serialize.life_of_tori_rows(args.k_max)
        columns = serialize.LIFE_OF_TORI_COLUMNS
    if args.format == "csv":
        _emit(serialize.to_csv(rows, columns), args.output)
    else:
        _emit(serialize.to_json(rows), args.output)
    return EXIT_OK


def cmd_convexity_scan(args) -> int:
    if args.c < MIN_SCAN_C:
        raise UsageError(f"convexity-scan needs c >= {MIN_SCAN_C}, got c={args.c}")
    if args.samples > MAX_SAMPLES:
        raise UsageError(f"at most {MAX_SAMPLES} samples")
    at_critical = args.c == CRITICAL_C
    report = convexity_scan(args.c, args.samples, seed=args.seed, inject_witness=at_critical)
    witness = convexity_witness() if at_critical else None
    if args.format == "json":
        _emit(serialize.to_json(serialize.convexity_dict(report, witness)), args.output)
    else:
        _emit(serialize.to_csv([serialize.convexity_row(report)], serialize.CONVEXITY_COLUMNS), args.output)
        if witness is not None:
            point, direction, value = witness
            print(f"analytic witness: point={point.as_array().tolist()} direction={direction.tolist()} "
                  f"value={serialize.format_real(value)}", file=sys.stderr)
    if at_critical and not report.min_eigenvalue < 0.0:
        print("assertion failed: no negative tangential curvature at c = 3/2", file=sys.stderr)
        return EXIT_ASSERTION
    return EXIT_OK


def cmd_verify(args) -> int:
    from .acceptance import format_table, run_all

    results = run_all()
    print(format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAILED


COMMANDS = {
    "catalog": cmd_catalog,
    "cz-index": cmd_cz_index,
    "diagram": cmd_diagram,
    "convexity-scan": cmd_convexity_scan,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"rotkepler {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
