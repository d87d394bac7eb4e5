#!/usr/bin/env python3
"""Emit the measured rounds/ops table for both reference ranges.

Runs every variant at m=1 with a call-counting operator and prints the
measured table; the acceptance suite holds the same numbers against the
reference values cell for cell.
"""

import argparse
import sys

from circscan.verify import reproduce_table, table_to_csv, table_to_markdown

RANGES = ((24, 36), (1140, 1152))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--format", choices=("md", "csv"), default="md")
    args = parser.parse_args()

    render = table_to_markdown if args.format == "md" else table_to_csv
    for lo, hi in RANGES:
        sys.stdout.write(render(reproduce_table(lo, hi)))
        sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
