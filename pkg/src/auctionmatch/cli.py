"""Command-line interface: run engines, generate instances, run the suite.

Exit codes: 0 all asserted bounds hold, 1 bound or audit violation,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import AuctionMatchError
from .graph import Epsilon, dumps_instance, generate_random, load_instance
from .suite import aggregate_report, run_criteria, run_single

MODES = ("memory", "stream", "gp")
KERNELS = ("det", "rand")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="auctionmatch",
        description="Auction-based bipartite matching engines with "
                    "streaming and communication accounting.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one engine on an instance file")
    run_p.add_argument("instance", help="instance file path")
    run_p.add_argument("--algo", required=True, choices=("mcm", "mwm", "mcbm"))
    run_p.add_argument("--eps", required=True,
                       help="approximation parameter, written 1/k")
    run_p.add_argument("--mode", default="memory", choices=MODES)
    run_p.add_argument("--kernel", default="det", choices=KERNELS)
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--verify", action="store_true",
                       help="run the exact oracle and assert the engine's bound")
    run_p.add_argument("--audit", action="store_true",
                       help="assert per-round invariants during the run")
    run_p.add_argument("--report", help="write the JSON report here instead of stdout")
    run_p.add_argument("--gp-schedule", choices=("sequential", "concurrent"),
                       help="stream the reduction's levels under this schedule "
                            "(gp mode only)")

    gen_p = sub.add_parser("gen", help="generate a random instance file")
    gen_p.add_argument("--nl", type=int, default=8)
    gen_p.add_argument("--nr", type=int, default=8)
    gen_p.add_argument("--density", type=float, default=0.5)
    gen_p.add_argument("--wmin", type=int, default=1)
    gen_p.add_argument("--wmax", type=int, default=1)
    gen_p.add_argument("--bl", default="1:1", help="bidder capacity range lo:hi")
    gen_p.add_argument("--br", default="1:1", help="item capacity range lo:hi")
    gen_p.add_argument("--seed", type=int, default=0)
    gen_p.add_argument("-o", "--out", help="output path (stdout when omitted)")

    suite_p = sub.add_parser("suite", help="run the acceptance criteria")
    suite_p.add_argument("--criteria",
                         help="comma-separated criterion numbers (default: all)")
    suite_p.add_argument("--report", help="write the aggregate JSON here")
    return parser


def _parse_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    low = int(lo)
    high = int(hi) if hi else low
    if low < 1 or high < low:
        raise ValueError(f"bad capacity range {text!r}")
    return low, high


def _cmd_run(args) -> int:
    try:
        eps = Epsilon.parse(args.eps)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.algo == "mcm" and args.mode != "memory":
        print("error: mcm runs in memory only", file=sys.stderr)
        return 2
    if args.algo == "mcbm" and args.mode == "gp":
        print("error: the weight reduction applies to mwm only", file=sys.stderr)
        return 2
    if args.algo == "mcbm" and args.kernel == "rand":
        print("error: the capacitated engine has no randomized kernel",
              file=sys.stderr)
        return 2
    if args.mode == "stream" and args.kernel == "rand":
        print("error: streaming runs use the stream-order kernel; "
              "--kernel rand is unavailable", file=sys.stderr)
        return 2
    if args.gp_schedule and args.mode != "gp":
        print("error: --gp-schedule requires --mode gp", file=sys.stderr)
        return 2
    if args.gp_schedule and args.kernel == "rand":
        print("error: streamed reduction levels use the stream-order kernel; "
              "--kernel rand is unavailable", file=sys.stderr)
        return 2
    try:
        inst = load_instance(args.instance)
    except (OSError, AuctionMatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    report, exit_code = run_single(
        inst, algo=args.algo, eps=eps, mode=args.mode, kernel=args.kernel,
        seed=args.seed, verify=args.verify, audit=args.audit,
        gp_schedule=args.gp_schedule)
    blob = json.dumps(report, sort_keys=True, indent=2)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(blob + "\n")
    else:
        print(blob)
    return exit_code


def _cmd_gen(args) -> int:
    try:
        b_l = _parse_range(args.bl)
        b_r = _parse_range(args.br)
        inst = generate_random(
            n_l=args.nl, n_r=args.nr, density=args.density,
            w_range=(args.wmin, args.wmax), b_l_range=b_l, b_r_range=b_r,
            seed=args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = dumps_instance(inst)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_suite(args) -> int:
    numbers = None
    if args.criteria:
        try:
            numbers = [int(x) for x in args.criteria.split(",") if x.strip()]
        except ValueError:
            print(f"error: bad criteria list {args.criteria!r}", file=sys.stderr)
            return 2
        if any(n < 1 or n > 10 for n in numbers):
            print("error: criteria numbers run 1..10", file=sys.stderr)
            return 2
    outcomes = run_criteria(numbers)
    for oc in outcomes:
        print(oc.line(), file=sys.stderr)
        for failure in oc.failures:
            print(f"  - {failure}", file=sys.stderr)
    blob = json.dumps(aggregate_report(outcomes), sort_keys=True, indent=2)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(blob + "\n")
    else:
        print(blob)
    return 0 if all(oc.passed for oc in outcomes) else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "gen":
        return _cmd_gen(args)
    return _cmd_suite(args)


if __name__ == "__main__":
    sys.exit(main())
