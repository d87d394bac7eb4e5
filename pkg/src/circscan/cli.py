"""Command-line front end: table reproduction, verification sweeps,
schedule/trace dumps, and analytic variant comparison.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .operators import BUILTIN_NAMES, builtin_operator
from .schedule import VARIANT_KINDS, Variant, build_schedule
from .simulator import simulate, trace_records
from .verify import (
    analytic_metrics,
    check_oracle_equivalence,
    reproduce_table,
    run_window_checked,
    sweep_bounds,
    table_to_csv,
    table_to_markdown,
    validate_trace,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

# Illustrative, not measured: these stand in for hardware constants so the
# variants can be compared qualitatively on round versus reduce pressure.
DEFAULT_ALPHA = 1.0
DEFAULT_BETA = 0.01
DEFAULT_GAMMA = 0.005
DEFAULT_ELEM_SIZE = 8


@dataclass(frozen=True)
class CostParams:
    """Linear cost model: time = rounds*(alpha + beta*m) + gamma*m*max_ops."""

    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA
    gamma: float = DEFAULT_GAMMA
    elem_size: int = DEFAULT_ELEM_SIZE

    def __post_init__(self) -> None:
        if min(self.alpha, self.beta, self.gamma, self.elem_size) < 0:
            raise ValueError("cost parameters must be non-negative")

    def modeled_time(self, rounds: int, max_ops: int, m: int) -> float:
        return rounds * (self.alpha + self.beta * m) + self.gamma * m * max_ops


def parse_range(text: str) -> tuple[int, int]:
    """Half-open 'a..b' with a < b."""
    try:
        lo_text, hi_text = text.split("..", 1)
        lo, hi = int(lo_text), int(hi_text)
    except ValueError:
        raise ValueError(f"range must look like 'a..b', got {text!r}") from None
    if lo >= hi:
        raise ValueError(f"empty range {text!r} (need a < b)")
    return lo, hi


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(","))


def compare_variants(
    p: int, m: int, cost: CostParams
) -> list[tuple[str, int, int, float]]:
    """(label, rounds, max_ops, modeled time) for each exclusive variant,
    cheapest first; ties broken by label for stable output."""
    entries = []
    for variant in (
        Variant.one_doubling(),
        Variant.best_doubling(),
        Variant.two_oplus(),
        Variant.halving(),
    ):
        concrete = variant.resolve(p)
        met = analytic_metrics(build_schedule(concrete, p))
        label = variant.kind
        if concrete.kind == "qprime":
            label = f"{variant.kind}(q'={concrete.qprime})"
        entries.append(
            (
                label,
                met.rounds_used,
                met.max_ops,
                cost.modeled_time(met.rounds_used, met.max_ops, m),
            )
        )
    entries.sort(key=lambda e: (e[3], e[0]))
    return entries


# ---------------------------------------------------------------- commands

def cmd_table(args: argparse.Namespace) -> int:
    lo, hi = parse_range(args.p)
    if lo < 2:
        raise ValueError(f"table needs p >= 2, got {lo}")
    rows = reproduce_table(lo, hi - 1)
    if args.format == "csv":
        sys.stdout.write(table_to_csv(rows))
    else:
        sys.stdout.write(table_to_markdown(rows))
    return EXIT_OK


def _oracle_job(payload: tuple[int, tuple[int, ...], tuple[str, ...], int]) -> list[str]:
    p, m_values, op_names, seed = payload
    return check_oracle_equivalence(p, m_values, op_names, seed)


def cmd_verify(args: argparse.Namespace) -> int:
    if args.p_max < 2:
        raise ValueError(f"verify needs --p-max >= 2, got {args.p_max}")
    m_values = _parse_int_list(args.m)
    op_names = tuple(args.ops.split(","))
    for name in op_names:
        if name not in BUILTIN_NAMES:
            raise ValueError(f"unknown operator {name!r}")

    failures: list[str] = []

    jobs = [
        (p, m_values, op_names, args.seed) for p in range(2, args.p_max + 1)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for found in pool.map(_oracle_job, jobs, chunksize=8):
                failures.extend(found)
    else:
        for payload in jobs:
            failures.extend(_oracle_job(payload))
    checked_runs = len(jobs) * len(m_values) * len(op_names) * 5

    window_cap = min(args.p_max, 256)
    window_runs = 0
    for p in range(2, window_cap + 1):
        for variant in (
            Variant.inclusive(),
            Variant.one_doubling(),
            Variant.best_doubling(),
            Variant.two_oplus(),
            Variant.halving(),
        ):
            window_runs += 1
            try:
                result = run_window_checked(variant, p)
            except Exception as exc:  # window or adjacency violation
                failures.append(f"window check {variant.kind} p={p}: {exc}")
                continue
            failures.extend(
                f"window run {variant.kind} p={p}: {s}"
                for s in validate_trace(result)
            )

    report = sweep_bounds(args.p_max)
    failures.extend(report.violations)

    print(
        f"oracle runs: {checked_runs}  window runs: {window_runs}  "
        f"bound cells: {report.cells_checked} (spot-checked {report.spot_checks})"
    )
    if failures:
        print(f"FAILED: {len(failures)} violation(s); first shown", file=sys.stderr)
        for line in failures[:10]:
            print(f"  {line}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    print("all checks passed")
    return EXIT_OK


def cmd_trace(args: argparse.Namespace) -> int:
    variant = _variant_from_args(args)
    if args.p < 2:
        raise ValueError("trace needs p >= 2")
    concrete = variant.resolve(args.p)
    schedule = build_schedule(concrete, args.p)
    print(f"variant {variant.kind} -> {concrete.label()}, p={args.p}")
    for rspec in schedule.rounds:
        eps = f" eps={rspec.epsilon}" if rspec.phase.value == "halving" else ""
        print(f"round {rspec.index}: skip {rspec.skip} phase {rspec.phase.value}{eps}")
    result = simulate(
        concrete, args.p, [(r,) for r in range(args.p)], builtin_operator("int-sum")
    )
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        for record in trace_records(result):
            out.write(json.dumps(record) + "\n")
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    if args.p < 2:
        raise ValueError("compare needs p >= 2")
    cost = CostParams(args.alpha, args.beta, args.gamma, args.elem_size)
    print(
        f"p={args.p} m={args.m} alpha={cost.alpha} beta={cost.beta} "
        f"gamma={cost.gamma} (illustrative, not measured)"
    )
    print(f"{'variant':>16} {'rounds':>7} {'max_ops':>8} {'time':>10}")
    for label, rounds, max_ops, t in compare_variants(args.p, args.m, cost):
        print(f"{label:>16} {rounds:>7} {max_ops:>8} {t:>10.4f}")
    return EXIT_OK


def _variant_from_args(args: argparse.Namespace) -> Variant:
    kind = args.variant
    if kind not in VARIANT_KINDS:
        raise ValueError(f"unknown variant {kind!r}")
    if kind == "qprime":
        if args.qprime is None:
            raise ValueError("--variant qprime needs --qprime N")
        return Variant.qprime_doubling(args.qprime)
    if args.qprime is not None:
        raise ValueError("--qprime only applies to --variant qprime")
    return Variant(kind)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circscan",
        description="Simulate and verify circulant-graph scan algorithms.",
    )
    sub = parser.add_subparsers(required=True)

    p_table = sub.add_parser("table", help="measured rounds/ops per variant")
    p_table.add_argument("--p", required=True, help="half-open range a..b")
    p_table.add_argument("--format", choices=("csv", "md"), default="md")
    p_table.set_defaults(func=cmd_table)

    p_verify = sub.add_parser("verify", help="oracle, window, and bound sweeps")
    p_verify.add_argument("--p-max", type=int, default=128)
    p_verify.add_argument("--m", default="0,1", help="comma-separated vector lengths")
    p_verify.add_argument(
        "--ops", default="int-sum,string-concat", help="comma-separated operator names"
    )
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--jobs", type=int, default=1)
    p_verify.set_defaults(func=cmd_verify)

    p_trace = sub.add_parser("trace", help="dump one run's schedule and messages")
    p_trace.add_argument("--variant", required=True, choices=VARIANT_KINDS)
    p_trace.add_argument("--p", type=int, required=True)
    p_trace.add_argument("--qprime", type=int)
    p_trace.add_argument("--out", help="write JSON lines here instead of stdout")
    p_trace.set_defaults(func=cmd_trace)

    p_cmp = sub.add_parser("compare", help="rank variants under the cost model")
    p_cmp.add_argument("--p", type=int, required=True)
    p_cmp.add_argument("--m", type=int, default=1)
    p_cmp.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p_cmp.add_argument("--beta", type=float, default=DEFAULT_BETA)
    p_cmp.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    p_cmp.add_argument("--elem-size", type=int, default=DEFAULT_ELEM_SIZE)
    p_cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
