"""Command line: ``matcorrect {gen,inject,correct,bench}``."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .core_math import CapacityError, check_capacity
from .harness import (
    DEFAULT_ORACLE_CAP,
    EXIT_CAPACITY,
    EXIT_INPUT,
    EXIT_OK,
    PATTERNS,
    InjectionSpec,
    RunConfig,
    benchmark,
    format_bench,
    inject_errors,
    load_matrix,
    random_instance,
    run,
    save_matrix,
)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _delta_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    return int(lo), int(hi)


def cmd_gen(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    A, B, C = random_instance(args.n, args.alpha, args.seed, args.bigint)
    if not args.bigint:
        check_capacity(A, B, C)
    for name, M in (("a", A), ("b", B), ("c", C)):
        save_matrix(out / f"{name}.txt", M)
    print(f"wrote {out}/a.txt, b.txt, c.txt (n={args.n}, alpha={args.alpha}, seed={args.seed})")
    return EXIT_OK


def cmd_inject(args) -> int:
    C = load_matrix(args.c, args.bigint)
    spec = InjectionSpec(args.k, args.pattern, args.seed, _delta_range(args.delta_range))
    corrupted, truth = inject_errors(C, spec)
    save_matrix(args.out, corrupted)
    if args.truth:
        with open(args.truth, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["row", "col", "delta"])
            writer.writerows(truth)
    print(f"injected {len(truth)} errors ({args.pattern}) into {args.out}")
    return EXIT_OK


def cmd_correct(args) -> int:
    config = RunConfig(
        algorithm=args.algo,
        k=args.k,
        verify=args.verify,
        verify_trials=args.trials,
        seed=args.seed,
        a=args.a,
        b=args.b,
        c=args.c,
        n=args.n,
        alpha=args.alpha,
        errors=args.errors,
        pattern=args.pattern,
        delta_range=_delta_range(args.delta_range),
        bigint=args.bigint,
        oracle_cap=args.oracle_cap,
        corrected_out=args.write_c,
    )
    result = run(config)
    if result.exit_code == EXIT_INPUT or result.exit_code == EXIT_CAPACITY:
        sys.stderr.write(result.text)
    else:
        _emit(result.text, args.out)
    return result.exit_code


def cmd_bench(args) -> int:
    algorithms = ("baseline", "fast") if args.algo == "both" else (args.algo,)
    rows = benchmark(args.n, args.k, args.reps, args.seed, args.pattern, algorithms, args.alpha)
    _emit(format_bench(rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matcorrect",
        description="Verify and correct integer matrix products with at most k wrong entries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--bigint", action="store_true", help="arbitrary-precision integers")

    p = sub.add_parser("gen", help="random A, B in [-alpha, alpha] and C = AB")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=int, default=100)
    p.add_argument("--out", required=True, help="output directory")
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("inject", help="corrupt exactly k entries of C")
    p.add_argument("--c", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--pattern", choices=PATTERNS, default="uniform")
    p.add_argument("--delta-range", default="-10:10", help="inclusive lo:hi, zero excluded")
    p.add_argument("--out", required=True)
    p.add_argument("--truth", help="write injected (row, col, delta) CSV here")
    common(p)
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("correct", help="correct C in place of AB and report")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--c")
    p.add_argument("--n", type=int, help="generate a random instance of this size")
    p.add_argument("--alpha", type=int, default=100)
    p.add_argument("--errors", type=int, help="errors to inject when generating (default k)")
    p.add_argument("--pattern", choices=PATTERNS, default="uniform")
    p.add_argument("--delta-range", default="-10:10")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--algo", choices=("baseline", "fast", "both"), default="fast")
    p.add_argument("--verify", action="store_true", help="Freivalds check after correcting")
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_ORACLE_CAP)
    p.add_argument("--out", help="report path (default stdout)")
    p.add_argument("--write-c", help="write the corrected C here")
    common(p)
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("bench", help="operation counts over an (n, k) grid as CSV")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--k", type=int, nargs="+", required=True)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--pattern", choices=PATTERNS, default="scatter")
    p.add_argument("--algo", choices=("baseline", "fast", "both"), default="both")
    p.add_argument("--alpha", type=int, default=10)
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
