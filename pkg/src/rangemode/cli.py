"""Command line entry point: run, verify, bench, gen, balance."""

import argparse
import sys

from .exponents import DEFAULT_T2, balance_exponents
from .harness.runner import IMPLS, bench, run_trace, verify_seeds, write_csv
from .harness.trace import TraceError, format_trace, generate_trace, parse_distribution, parse_trace


def seed_range(text):
    """``S0..S1`` (inclusive) or a single seed."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed range {text!r}; use S0..S1") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty seed range {text!r}")
    return range(lo, hi + 1)


def distribution(text):
    try:
        parse_distribution(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None
    return text


def add_exponents(p):
    p.add_argument("--t1", type=float, help="frequent-value exponent (default 1 - t2/2)")
    p.add_argument("--t2", type=float, help=f"rebuild exponent (default {DEFAULT_T2})")
    p.add_argument("--t3", type=float, help="segment-length exponent (default t2)")


def build_parser():
    parser = argparse.ArgumentParser(prog="rangemode", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="replay a trace and print one '<value> <freq>' line per query")
    p.add_argument("--trace", required=True, help="trace file")
    p.add_argument("--impl", choices=IMPLS, default="mpq")
    p.add_argument("--out", help="write answers here instead of stdout")
    p.add_argument("--deamortize", action="store_true")
    add_exponents(p)

    p = sub.add_parser("verify", help="compare the structure against a recount on random traces")
    p.add_argument("--ops", type=int, default=2000)
    p.add_argument("--maxlen", type=int, default=1000, help="capacity N")
    p.add_argument("--seeds", type=seed_range, default=range(0, 10))
    p.add_argument("--dist", type=distribution, default="zipf:1.1")
    p.add_argument("--deamortize", action="store_true")
    p.add_argument("--purity", action="store_true", help="also compare checksums around queries")
    add_exponents(p)

    p = sub.add_parser("bench", help="time each implementation and write CSV")
    p.add_argument("--ops", type=int, default=10000)
    p.add_argument("--maxlen", type=int, default=1000)
    p.add_argument("--impl", choices=IMPLS + ("all",), default="all")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dist", type=distribution, default="zipf:1.1")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--warmup", type=int, default=1)
    add_exponents(p)

    p = sub.add_parser("gen", help="write a random trace")
    p.add_argument("--ops", type=int, default=1000)
    p.add_argument("--maxlen", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dist", type=distribution, default="zipf:1.1")
    p.add_argument("--out", help="trace path (stdout if omitted)")

    p = sub.add_parser("balance", help="print the per-operation and rebuild exponents")
    p.add_argument("--t2", type=float, default=DEFAULT_T2)
    return parser


def exponent_kwargs(args):
    return {"t1": args.t1, "t2": args.t2, "t3": args.t3}


def cmd_run(args):
    try:
        with open(args.trace, encoding="utf-8") as fh:
            trace = parse_trace(fh.read())
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except TraceError as err:
        print(f"error: {args.trace}: {err}", file=sys.stderr)
        return 2
    kwargs = exponent_kwargs(args) if args.impl == "mpq" else {}
    if args.impl == "mpq":
        kwargs["deamortize"] = args.deamortize
    answers, _ = run_trace(trace, args.impl, **kwargs)
    text = "".join(f"{v} {f}\n" for v, f in answers)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args):
    reports = verify_seeds(
        args.ops, args.maxlen, args.seeds, args.dist,
        deamortize=args.deamortize, check_purity=args.purity, **exponent_kwargs(args),
    )
    for seed, report in reports:
        print(f"seed {seed}: {report.describe()}")
    if all(r.ok for _, r in reports):
        print(f"verify: {len(reports)} seeds passed")
        return 0
    return 1


def cmd_bench(args):
    impls = IMPLS if args.impl == "all" else (args.impl,)
    rows = bench(
        args.ops, args.maxlen, impls, seed=args.seed, dist=args.dist,
        repeats=args.repeats, warmup=args.warmup, **exponent_kwargs(args),
    )
    write_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_gen(args):
    trace = generate_trace(args.ops, args.maxlen, args.dist, seed=args.seed)
    text = format_trace(trace)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_balance(args):
    per_op, rebuild = balance_exponents(args.t2)
    print(f"{per_op:.6f} {rebuild:.6f}")
    return 0


COMMANDS = {
    "run": cmd_run, "verify": cmd_verify, "bench": cmd_bench,
    "gen": cmd_gen, "balance": cmd_balance,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
