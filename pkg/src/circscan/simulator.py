"""Round-synchronous, one-ported execution of scan schedules.

Each round is double-buffered: every outgoing payload is staged from
pre-round state, then all messages are delivered, then receivers apply
their local reduction.  No rank ever observes a mid-round value, which is
what makes simultaneous send-receive faithful without modeling time.

Reduce calls are charged to the rank that performs them: receivers pay
one application per merge (W <- T (+) W), and senders in rounds that stage
W (+) V pay one application per staging.  A send-only rank keeps its staged
value until its W changes; since such ranks never receive again, the
staging is paid at most once.  Send+receive ranks restage every round
because the merge always invalidates the previous value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, IO, Iterable, NamedTuple

from .operators import ElementVector, Operator, OperatorError
from .schedule import (
    Phase,
    ProcCount,
    RoundSpec,
    SkipSchedule,
    Variant,
    build_schedule,
)


class SimulationError(RuntimeError):
    """An operator failed mid-run; carries the round and the ranks involved."""

    def __init__(self, round_index: int, ranks: tuple[int, ...], detail: str):
        self.round_index = round_index
        self.ranks = ranks
        super().__init__(
            f"round {round_index}, ranks {ranks}: {detail}"
        )


@dataclass(slots=True)
class ProcessorState:
    """One simulated rank's buffers.

    V is the immutable input; W accumulates the result (None = unset);
    T is the receive buffer; Wprime holds the staged send value, valid
    while staged_fresh is set and W has not been merged into since.
    """

    r: int
    V: ElementVector
    W: ElementVector | None = None
    T: ElementVector | None = None
    Wprime: ElementVector | None = None
    staged_fresh: bool = False
    done: bool = False


class Message(NamedTuple):
    """One delivered payload; dst - src always equals the round's skip - epsilon."""

    round: int
    src: int
    dst: int
    payload: ElementVector
    payload_kind: str  # "V" | "W" | "Wprime"


@dataclass
class RunTrace:
    schedule: SkipSchedule
    messages: tuple[tuple[Message, ...], ...]
    ops_per_rank: list[int]
    rounds_used: int
    max_ops: int
    bytes_per_round: list[int]


@dataclass
class ScanResult:
    """outputs[r] is rank r's final W; None means unset (rank 0, exclusive)."""

    outputs: list[ElementVector | None]
    trace: RunTrace


RoundHook = Callable[[RoundSpec, list[ProcessorState]], None]


def _stage(state: ProcessorState, op: Operator, ops: list[int], k: int) -> ElementVector:
    """Compute W (+) V for sending, charging one application."""
    try:
        staged = op.reduce(state.W, state.V)
    except OperatorError as exc:
        raise SimulationError(k, (state.r,), f"staging W(+)V failed: {exc}") from exc
    ops[state.r] += 1
    return staged


def step_qprime(
    state: ProcessorState,
    rspec: RoundSpec,
    p: int,
    pprime: int,
    op: Operator,
    ops: list[int],
) -> tuple[int, str, ElementVector] | None:
    """One rank's send action for a q'-doubling round.

    Shift round: every rank forwards its raw input one rank up.  Inclusive
    phase: send+receive ranks stage W (+) V fresh each round; send-only
    ranks (0 < r < s) stage it at most once, since they never receive
    again; rank 0 forwards raw V.  Exclusive phase: senders (1 <= r < p-s)
    forward W as-is, so rank 0 is finished and rank s receives nothing
    (its would-be source is rank 0).

    The matching receive action, applied by the simulation loop after
    delivery, is W <- T for the shift round and W <- T (+) W otherwise.
    """
    r = state.r
    s = rspec.skip
    t = r + s
    if rspec.phase is Phase.SHIFT:
        return (t, "V", state.V) if t < p else None
    if rspec.phase is Phase.INCLUSIVE:
        if r >= s:
            if t >= p:
                return None  # receive-only
            state.Wprime = _stage(state, op, ops, rspec.index)
            return (t, "Wprime", state.Wprime)
        if t >= p:
            return None
        if r == 0:
            return (t, "V", state.V)
        if not state.staged_fresh:
            state.Wprime = _stage(state, op, ops, rspec.index)
            state.staged_fresh = True
        return (t, "Wprime", state.Wprime)
    # exclusive phase
    if r >= 1 and t < p:
        return (t, "W", state.W)
    return None


def step_halving(
    state: ProcessorState,
    rspec: RoundSpec,
    p: int,
    op: Operator,
    ops: list[int],
) -> tuple[int, str, ElementVector] | None:
    """One rank's send action for a roughly-halving round.

    Round 0 is the plain shift.  Later rounds displace by skip - epsilon.
    When epsilon = 0 the staged send value is W (+) V (restaged every round
    by send+receive ranks, at most once ever by send-only ranks); when
    epsilon = 1 the send value aliases W at zero cost.  Rank 0 sends raw V
    in epsilon = 0 rounds and stays silent in epsilon = 1 rounds.
    Receivers are exactly the ranks with r >= skip; each applies
    W <- T (+) W after delivery.
    """
    r = state.r
    s = rspec.skip
    if rspec.phase is Phase.SHIFT:
        t = r + s
        return (t, "V", state.V) if t < p else None
    eps = rspec.epsilon
    t = r + s - eps
    if t >= p:
        return None
    if r >= s:  # will also receive this round
        if eps == 0:
            state.Wprime = _stage(state, op, ops, rspec.index)
            return (t, "Wprime", state.Wprime)
        return (t, "W", state.W)
    if r > 0:
        if eps == 0:
            if not state.staged_fresh:
                state.Wprime = _stage(state, op, ops, rspec.index)
                state.staged_fresh = True
            return (t, "Wprime", state.Wprime)
        return (t, "W", state.W)
    if eps == 0:
        return (t, "V", state.V)
    return None


def step_inclusive(
    state: ProcessorState,
    rspec: RoundSpec,
    p: int,
) -> tuple[int, str, ElementVector] | None:
    """Straight-doubling round: forward the current partial result."""
    t = state.r + rspec.skip
    if t < p:
        return (t, "W", state.W)
    return None


def simulate(
    variant: Variant,
    p: int,
    inputs: list[ElementVector],
    op: Operator,
    before_round: RoundHook | None = None,
    after_round: RoundHook | None = None,
) -> ScanResult:
    """Run one scan to completion and return outputs plus the full trace.

    The hooks, when given, observe the per-rank states around every round;
    they exist for invariant checking and must not mutate the states.
    """
    p = ProcCount(p)
    if len(inputs) != p:
        raise ValueError(f"expected {p} input vectors, got {len(inputs)}")
    sizes = {len(v) for v in inputs}
    if len(sizes) > 1:
        raise ValueError(f"input vectors must share one length, got {sorted(sizes)}")
    m = sizes.pop() if sizes else 0
    concrete = variant.resolve(p)

    if p == 1:
        outputs = [inputs[0]] if concrete.kind == "inclusive" else [None]
        empty = SkipSchedule(p=1, variant=concrete, rounds=(), q=0)
        trace = RunTrace(empty, (), [0], 0, 0, [])
        return ScanResult(outputs, trace)

    schedule = build_schedule(concrete, p)
    states = [ProcessorState(r=r, V=inputs[r]) for r in range(p)]
    if concrete.kind == "inclusive":
        for st in states:
            st.W = st.V
    ops = [0] * p
    per_round: list[tuple[Message, ...]] = []
    bytes_per_round: list[int] = []
    elem_size = op.element_size

    for rspec in schedule.rounds:
        if before_round is not None:
            before_round(rspec, states)
        k = rspec.index
        staged: list[Message] = []
        if concrete.kind == "qprime":
            for st in states:
                act = step_qprime(st, rspec, p, schedule.pprime, op, ops)
                if act is not None:
                    staged.append(Message(k, st.r, act[0], act[2], act[1]))
        elif concrete.kind == "halving":
            for st in states:
                act = step_halving(st, rspec, p, op, ops)
                if act is not None:
                    staged.append(Message(k, st.r, act[0], act[2], act[1]))
        else:
            for st in states:
                act = step_inclusive(st, rspec, p)
                if act is not None:
                    staged.append(Message(k, st.r, act[0], act[2], act[1]))

        # one-ported: with a uniform displacement, distinct senders imply
        # distinct receivers; assert both anyway so a schedule bug cannot
        # silently overwrite a delivery.
        if len({msg.src for msg in staged}) != len(staged) or len(
            {msg.dst for msg in staged}
        ) != len(staged):
            raise SimulationError(k, (), "one-ported violation: duplicate endpoint")

        for msg in staged:
            states[msg.dst].T = msg.payload
        if rspec.phase is Phase.SHIFT:
            for msg in staged:
                states[msg.dst].W = msg.payload
        else:
            for msg in staged:
                st = states[msg.dst]
                try:
                    st.W = op.reduce(msg.payload, st.W)
                except OperatorError as exc:
                    raise SimulationError(
                        k, (msg.src, msg.dst), f"merge T(+)W failed: {exc}"
                    ) from exc
                ops[msg.dst] += 1
                st.staged_fresh = False

        per_round.append(tuple(staged))
        bytes_per_round.append(m * elem_size * len(staged))
        if concrete.kind == "qprime" and rspec.phase is Phase.EXCLUSIVE:
            states[0].done = True
        if after_round is not None:
            after_round(rspec, states)

    for st in states:
        st.done = True
    trace = RunTrace(
        schedule=schedule,
        messages=tuple(per_round),
        ops_per_rank=ops,
        rounds_used=sum(1 for msgs in per_round if msgs),
        max_ops=max(ops),
        bytes_per_round=bytes_per_round,
    )
    return ScanResult([st.W for st in states], trace)


def trace_records(result: ScanResult) -> Iterable[dict]:
    """Message records followed by one summary record (JSON-ready dicts)."""
    sched = result.trace.schedule
    for rspec, msgs in zip(sched.rounds, result.trace.messages):
        for msg in msgs:
            yield {
                "round": msg.round,
                "from": msg.src,
                "to": msg.dst,
                "skip": rspec.skip,
                "epsilon": rspec.epsilon,
                "payload_kind": msg.payload_kind,
            }
    variant = sched.variant
    yield {
        "p": int(sched.p),
        "variant": variant.kind,
        "qprime": variant.qprime,
        "rounds_used": result.trace.rounds_used,
        "max_ops": result.trace.max_ops,
        "ops_per_rank": list(result.trace.ops_per_rank),
    }


def export_trace(result: ScanResult, fp: IO[str]) -> None:
    """Write the run as JSON lines: one message per line, then a summary."""
    for record in trace_records(result):
        fp.write(json.dumps(record) + "\n")
