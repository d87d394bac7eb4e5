"""Oracles and verification sweeps.

Everything the simulator claims is checked here against an independent
route: outputs against strictly left-associated sequential folds, per-rank
reduce counts and round usage against closed-form accounting derived from
the guard intervals, window contents against the interval operator, and
trace structure against the one-ported circulant rules.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .operators import (
    CountingOperator,
    ElementVector,
    Operator,
    builtin_operator,
    interval_inputs,
    interval_operator,
    sample_inputs,
)
from .schedule import (
    Phase,
    SkipSchedule,
    Variant,
    best_qprime,
    build_halving_schedule,
    build_qprime_schedule,
    build_schedule,
    ceil_log2,
    predict_ops_bound_halving,
    predict_ops_bound_qprime,
    predict_rounds_qprime,
)
from .simulator import ScanResult, simulate


def sequential_exscan(
    inputs: list[ElementVector], op: Operator
) -> list[ElementVector | None]:
    """Left-fold exclusive prefix: out[0] is None, out[r] = V_0 (+) ... (+) V_{r-1}."""
    out: list[ElementVector | None] = [None]
    acc: ElementVector | None = None
    for v in inputs[:-1]:
        acc = v if acc is None else op.reduce(acc, v)
        out.append(acc)
    return out


def sequential_scan(inputs: list[ElementVector], op: Operator) -> list[ElementVector]:
    """Left-fold inclusive prefix: out[r] = V_0 (+) ... (+) V_r."""
    out: list[ElementVector] = []
    acc: ElementVector | None = None
    for v in inputs:
        acc = v if acc is None else op.reduce(acc, v)
        out.append(acc)
    return out


# ------------------------------------------------------------------ metrics

@dataclass
class AnalyticMetrics:
    """Closed-form per-rank accounting for one schedule.

    Derived from the guard intervals: receivers of a round form [lo, p),
    staging senders form a second interval, and a send-only rank pays for
    its staged value exactly once across the whole run.  The test suite
    holds these equal to full simulation; sweeps use them for speed.
    """

    ops_per_rank: list[int]
    rounds_used: int
    messages_per_round: list[int]

    @property
    def max_ops(self) -> int:
        return max(self.ops_per_rank)


def analytic_metrics(schedule: SkipSchedule) -> AnalyticMetrics:
    p = schedule.p
    diff = [0] * (p + 1)

    def add(lo: int, hi: int) -> None:
        lo, hi = max(lo, 0), min(hi, p)
        if lo < hi:
            diff[lo] += 1
            diff[hi] -= 1

    msgs: list[int] = []
    stage_hi = 0  # send-only ranks in [1, stage_hi) stage W (+) V exactly once
    for rspec in schedule.rounds:
        s = rspec.skip
        if rspec.phase is Phase.SHIFT:
            msgs.append(p - 1)
        elif rspec.phase is Phase.INCLUSIVE and schedule.variant.kind == "inclusive":
            add(s, p)
            msgs.append(p - s)
        elif rspec.phase is Phase.INCLUSIVE:
            add(s, p)          # every receiver merges
            add(s, p - s)      # send+receive ranks restage every round
            stage_hi = max(stage_hi, min(s, p - s))
            msgs.append(p - s)
        elif rspec.phase is Phase.EXCLUSIVE:
            add(s + 1, p)      # rank s would receive from rank 0, which is done
            msgs.append(p - s - 1)
        else:  # halving, k >= 1
            add(s, p)
            if rspec.epsilon == 0:
                add(s, p - s)
                stage_hi = max(stage_hi, min(s, p - s))
            msgs.append(p - s)
    add(1, stage_hi)

    ops: list[int] = []
    acc = 0
    for r in range(p):
        acc += diff[r]
        ops.append(acc)
    return AnalyticMetrics(
        ops_per_rank=ops,
        rounds_used=sum(1 for n in msgs if n > 0),
        messages_per_round=msgs,
    )


# ------------------------------------------------------------- table rows

@dataclass
class TableRow:
    """Measured rounds and peak reduce counts for one processor count."""

    p: int
    one: tuple[int, int]      # (rounds, max_ops) for q'=1
    best: tuple[int, int]     # ... for q'=best_qprime(p)
    twoop: tuple[int, int]    # ... for q'=ceil(log2 p)
    halving: tuple[int, int]
    best_qprime: int


def _measure(variant: Variant, p: int) -> tuple[int, int]:
    counting = CountingOperator(builtin_operator("int-sum"))
    inputs = [(r,) for r in range(p)]
    result = simulate(variant, p, inputs, counting)
    trace = result.trace
    if sum(trace.ops_per_rank) != counting.count:
        raise AssertionError(
            f"op accounting out of sync at p={p}, {variant.label()}: "
            f"{sum(trace.ops_per_rank)} booked vs {counting.count} counted"
        )
    return trace.rounds_used, trace.max_ops


def reproduce_table(p_lo: int, p_hi: int) -> list[TableRow]:
    """Measured (rounds, max_ops) per variant for every p in [p_lo, p_hi]."""
    if not 2 <= p_lo <= p_hi:
        raise ValueError(f"need 2 <= p_lo <= p_hi, got {p_lo}..{p_hi}")
    rows = []
    for p in range(p_lo, p_hi + 1):
        qp_best = best_qprime(p)
        rows.append(
            TableRow(
                p=p,
                one=_measure(Variant.qprime_doubling(1), p),
                best=_measure(Variant.qprime_doubling(qp_best), p),
                twoop=_measure(Variant.qprime_doubling(max(1, ceil_log2(p))), p),
                halving=_measure(Variant.halving(), p),
                best_qprime=qp_best,
            )
        )
    return rows


# ---------------------------------------------------------------- sweeps

@dataclass
class BoundsReport:
    p_max: int
    cells_checked: int = 0
    spot_checks: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def sweep_bounds(p_max: int, spot_check_limit: int = 48) -> BoundsReport:
    """Check round laws and op bounds for every p <= p_max and every q'.

    Metrics come from the closed-form accounting; for p up to
    spot_check_limit each schedule is additionally executed in full and
    must agree exactly, keeping the fast route anchored to the real one.
    """
    if p_max < 2:
        raise ValueError("sweep needs p_max >= 2")
    report = BoundsReport(p_max=p_max)

    def check(cond: bool, msg: str) -> None:
        report.cells_checked += 1
        if not cond:
            report.violations.append(msg)

    for p in range(2, p_max + 1):
        q = ceil_log2(p)
        for qp in range(1, q + 1):
            sched = build_qprime_schedule(p, qp)
            met = analytic_metrics(sched)
            want_rounds = predict_rounds_qprime(p, qp)
            check(
                met.rounds_used == want_rounds == len(sched.rounds),
                f"rounds p={p} q'={qp}: used {met.rounds_used}, "
                f"schedule {len(sched.rounds)}, predicted {want_rounds}",
            )
            bound = predict_ops_bound_qprime(p, qp)
            check(
                met.max_ops <= bound,
                f"ops p={p} q'={qp}: max {met.max_ops} > bound {bound}",
            )
            if p <= spot_check_limit:
                report.spot_checks += 1
                sim = simulate(
                    Variant.qprime_doubling(qp), p, [() for _ in range(p)],
                    builtin_operator("int-sum"),
                )
                check(
                    sim.trace.ops_per_rank == met.ops_per_rank
                    and sim.trace.rounds_used == met.rounds_used,
                    f"analytic/simulated mismatch p={p} q'={qp}",
                )
        sched = build_halving_schedule(p)
        met = analytic_metrics(sched)
        check(
            met.rounds_used == q == len(sched.rounds),
            f"halving rounds p={p}: used {met.rounds_used}, want {q}",
        )
        bound = predict_ops_bound_halving(p)
        check(
            met.max_ops <= bound,
            f"halving ops p={p}: max {met.max_ops} > bound {bound}",
        )
        if p <= spot_check_limit:
            report.spot_checks += 1
            sim = simulate(
                Variant.halving(), p, [() for _ in range(p)],
                builtin_operator("int-sum"),
            )
            check(
                sim.trace.ops_per_rank == met.ops_per_rank
                and sim.trace.rounds_used == met.rounds_used,
                f"analytic/simulated mismatch p={p} halving",
            )
    return report


# ------------------------------------------------- window invariant checks

class WindowInvariantError(RuntimeError):
    """A rank's window deviated from the documented per-round formula."""


def _expect_window(
    st_w, r: int, lo: int, hi: int, when: str
) -> None:
    if lo >= hi:
        if st_w is not None:
            raise WindowInvariantError(
                f"{when}: rank {r} should be unset, holds {st_w}"
            )
        return
    if st_w is None:
        raise WindowInvariantError(f"{when}: rank {r} unset, expected [{lo},{hi})")
    win = st_w[0]
    if (win.lo, win.hi) != (lo, hi):
        raise WindowInvariantError(
            f"{when}: rank {r} holds [{win.lo},{win.hi}), expected [{lo},{hi})"
        )


def run_window_checked(variant: Variant, p: int) -> ScanResult:
    """Simulate with the interval operator, asserting the per-round windows.

    Checks, per variant: straight doubling holds W_r = [max(0, r-s+1), r+1)
    before the round with skip s; the q'-doubling exclusive phase holds
    W_r = [max(0, r-s), r) before each of its rounds; halving holds
    W_r = [max(0, r-s_next+1), r) after round k, where s_next is the next
    round's skip (p after the last round).  Final windows must be [0, r)
    for exclusive variants (rank 0 unset) and [0, r+1) for the inclusive.
    """
    concrete = variant.resolve(p)
    schedule = build_schedule(concrete, p)
    kind = concrete.kind

    def before(rspec, states):
        if kind == "inclusive":
            s = rspec.skip
            for st in states:
                lo = max(0, st.r - s + 1)
                _expect_window(st.W, st.r, lo, st.r + 1,
                               f"before round {rspec.index} (s={s})")
        elif kind == "qprime" and rspec.phase is Phase.EXCLUSIVE:
            s = rspec.skip
            for st in states:
                lo = max(0, st.r - s)
                _expect_window(st.W, st.r, lo, st.r,
                               f"before round {rspec.index} (s={s})")

    def after(rspec, states):
        if kind != "halving":
            return
        k = rspec.index
        s_next = schedule.rounds[k + 1].skip if k + 1 < schedule.q else int(schedule.p)
        for st in states:
            lo = max(0, st.r - s_next + 1)
            _expect_window(st.W, st.r, lo, st.r, f"after round {k}")

    result = simulate(
        concrete, p, interval_inputs(p), interval_operator(),
        before_round=before, after_round=after,
    )
    for r, out in enumerate(result.outputs):
        if kind == "inclusive":
            _expect_window(out, r, 0, r + 1, "final")
        else:
            _expect_window(out, r, 0, r, "final")
    return result


# ------------------------------------------------------ structural checks

def validate_trace(result: ScanResult) -> list[str]:
    """One-ported and circulant structure violations in a finished trace."""
    problems: list[str] = []
    sched = result.trace.schedule
    for rspec, msgs in zip(sched.rounds, result.trace.messages):
        srcs = [m.src for m in msgs]
        dsts = [m.dst for m in msgs]
        if len(set(srcs)) != len(srcs):
            problems.append(f"round {rspec.index}: duplicate sender")
        if len(set(dsts)) != len(dsts):
            problems.append(f"round {rspec.index}: duplicate receiver")
        disp = rspec.skip - rspec.epsilon
        for m in msgs:
            if m.dst - m.src != disp:
                problems.append(
                    f"round {rspec.index}: displacement {m.dst - m.src} != {disp}"
                )
            if not (0 <= m.src < sched.p and 0 <= m.dst < sched.p):
                problems.append(f"round {rspec.index}: endpoint out of range")
    return problems


# ------------------------------------------------------- table rendering

_CSV_HEADER = (
    "p,one_q,one_ops,best_qprime,best_q,best_ops,"
    "twoop_q,twoop_ops,halving_q,halving_ops"
)


def table_to_csv(rows: list[TableRow]) -> str:
    lines = [_CSV_HEADER]
    for row in rows:
        lines.append(
            f"{row.p},{row.one[0]},{row.one[1]},{row.best_qprime},"
            f"{row.best[0]},{row.best[1]},{row.twoop[0]},{row.twoop[1]},"
            f"{row.halving[0]},{row.halving[1]}"
        )
    return "\n".join(lines) + "\n"


def table_from_csv(text: str) -> list[TableRow]:
    lines = [ln for ln in text.strip().splitlines() if ln]
    if not lines or lines[0] != _CSV_HEADER:
        raise ValueError("unrecognized table header")
    rows = []
    for ln in lines[1:]:
        v = [int(x) for x in ln.split(",")]
        rows.append(
            TableRow(
                p=v[0], one=(v[1], v[2]), best=(v[4], v[5]),
                twoop=(v[6], v[7]), halving=(v[8], v[9]), best_qprime=v[3],
            )
        )
    return rows


def table_to_markdown(rows: list[TableRow]) -> str:
    header = (
        "|    p | q'=1 q | q'=1 ⊕ | best q' | best q | best ⊕ "
        "| q'=q q | q'=q ⊕ | halving q | halving ⊕ |"
    )
    sep = "|-----:|-------:|-------:|--------:|-------:|-------:|-------:|-------:|----------:|----------:|"
    lines = [header, sep]
    for r in rows:
        lines.append(
            f"| {r.p:4d} | {r.one[0]:6d} | {r.one[1]:6d} | {r.best_qprime:7d} "
            f"| {r.best[0]:6d} | {r.best[1]:6d} | {r.twoop[0]:6d} | {r.twoop[1]:6d} "
            f"| {r.halving[0]:9d} | {r.halving[1]:9d} |"
        )
    return "\n".join(lines) + "\n"


# ----------------------------------------------- oracle-equivalence sweep

def check_oracle_equivalence(
    p: int,
    m_values: tuple[int, ...],
    op_names: tuple[str, ...],
    seed: int = 0,
) -> list[str]:
    """Compare every variant against the sequential folds at one p."""
    problems: list[str] = []
    rng = random.Random(seed * 1_000_003 + p)
    variants = [
        Variant.qprime_doubling(1),
        Variant.best_doubling(),
        Variant.two_oplus(),
        Variant.halving(),
        Variant.inclusive(),
    ]
    for name in op_names:
        op = builtin_operator(name)
        for m in m_values:
            inputs = sample_inputs(name, p, m, rng)
            want_ex = sequential_exscan(inputs, op)
            want_in = sequential_scan(inputs, op)
            for variant in variants:
                result = simulate(variant, p, inputs, op)
                want = want_in if variant.kind == "inclusive" else want_ex
                if result.outputs != want:
                    bad = next(
                        r for r in range(p) if result.outputs[r] != want[r]
                    )
                    problems.append(
                        f"{variant.label()} p={p} m={m} {name}: rank {bad} "
                        f"got {result.outputs[bad]!r}, want {want[bad]!r}"
                    )
                structural = validate_trace(result)
                problems.extend(
                    f"{variant.label()} p={p} m={m} {name}: {s}" for s in structural
                )
    return problems
