#!/usr/bin/env python3
"""Which variant wins the cost model as p grows?

Sweeps p over a range, ranks the exclusive-scan variants under the
linear cost model, and prints one line per stretch of consecutive p
with the same winner.  The parameters are illustrative, not measured;
the point is the shape of the frontier, not absolute times.
"""

import argparse
import sys

from circscan.cli import CostParams, compare_variants, parse_range


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--p", default="2..513", help="half-open range a..b")
    parser.add_argument("--m", type=int, default=1)
    parser.add_argument("--alpha", type=float, default=1.0)
    parser.add_argument("--beta", type=float, default=0.01)
    parser.add_argument("--gamma", type=float, default=0.005)
    args = parser.parse_args()

    lo, hi = parse_range(args.p)
    if lo < 2:
        parser.error("need p >= 2")
    cost = CostParams(alpha=args.alpha, beta=args.beta, gamma=args.gamma)

    print(f"m={args.m} alpha={cost.alpha} beta={cost.beta} gamma={cost.gamma}")
    run_start, run_winner = lo, None
    for p in range(lo, hi):
        winner = compare_variants(p, args.m, cost)[0][0]
        if winner != run_winner:
            if run_winner is not None:
                print(f"p {run_start:>5}..{p - 1:>5}: {run_winner}")
            run_start, run_winner = p, winner
    print(f"p {run_start:>5}..{hi - 1:>5}: {run_winner}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
