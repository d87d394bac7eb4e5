#!/usr/bin/env python3
"""How tight are the per-rank application bounds, over a range of p?

For every p up to --p-max, compares the measured peak application count
(closed-form accounting, anchored to simulation by the test suite)
against the q+q'-2 bound for each q' and against the popcount bound for
the roughly-halving variant, then prints how often each bound is met
with equality.
"""

import argparse
import sys
from collections import Counter

from circscan.schedule import (
    build_halving_schedule,
    build_qprime_schedule,
    ceil_log2,
    predict_ops_bound_halving,
    predict_ops_bound_qprime,
)
from circscan.verify import analytic_metrics


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--p-max", type=int, default=1024)
    args = parser.parse_args()
    if args.p_max < 2:
        parser.error("--p-max must be at least 2")

    qprime_cells = 0
    qprime_tight = 0
    slack = Counter()
    halving_tight = 0
    for p in range(2, args.p_max + 1):
        for qp in range(1, ceil_log2(p) + 1):
            met = analytic_metrics(build_qprime_schedule(p, qp))
            gap = predict_ops_bound_qprime(p, qp) - met.max_ops
            qprime_cells += 1
            qprime_tight += gap == 0
            slack[gap] += 1
        met = analytic_metrics(build_halving_schedule(p))
        halving_tight += met.max_ops == predict_ops_bound_halving(p)

    total_p = args.p_max - 1
    print(f"p in 2..{args.p_max}")
    print(
        f"q'-doubling: bound met with equality in {qprime_tight}/{qprime_cells} "
        f"(p, q') cells"
    )
    for gap in sorted(slack):
        print(f"  slack {gap}: {slack[gap]} cells")
    print(f"roughly halving: bound tight for {halving_tight}/{total_p} values of p")
    return 0


if __name__ == "__main__":
    sys.exit(main())
