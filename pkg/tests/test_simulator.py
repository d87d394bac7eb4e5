"""Round-synchronous execution: outputs, op accounting, traces, hooks."""

import io
import json
import random

import pytest

from circscan.operators import (
    CountingOperator,
    IntervalElement,
    builtin_operator,
    interval_inputs,
    interval_operator,
    sample_inputs,
)
from circscan.schedule import Phase, RoundSpec, Variant, build_qprime_schedule
from circscan.simulator import (
    ProcessorState,
    SimulationError,
    export_trace,
    simulate,
    step_halving,
    step_qprime,
    trace_records,
)


def _ints(p):
    return [(r,) for r in range(p)]


def _strs(p):
    return [(str(r),) for r in range(p)]


# ------------------------------------------------------------ end-to-end

def test_best_doubling_p24_metrics():
    result = simulate(Variant.best_doubling(), 24, _ints(24), builtin_operator("int-xor"))
    assert result.trace.rounds_used == 5
    assert result.trace.max_ops == 5


def test_halving_p31_metrics():
    result = simulate(Variant.halving(), 31, _ints(31), builtin_operator("int-sum"))
    assert result.trace.rounds_used == 5
    assert result.trace.max_ops == 7


def test_one_doubling_p4_concat_outputs():
    result = simulate(
        Variant.qprime_doubling(1), 4, _strs(4), builtin_operator("string-concat")
    )
    assert result.outputs == [None, ("0",), ("01",), ("012",)]


def test_inclusive_p3_concat_outputs():
    result = simulate(Variant.inclusive(), 3, _strs(3), builtin_operator("string-concat"))
    assert result.outputs == [("0",), ("01",), ("012",)]


def test_single_rank_runs():
    op = builtin_operator("int-sum")
    inc = simulate(Variant.inclusive(), 1, [(7,)], op)
    assert inc.outputs == [(7,)]
    assert inc.trace.rounds_used == 0
    assert inc.trace.max_ops == 0
    for variant in (
        Variant.qprime_doubling(1),
        Variant.one_doubling(),
        Variant.two_oplus(),
        Variant.best_doubling(),
        Variant.halving(),
    ):
        exc = simulate(variant, 1, [(7,)], op)
        assert exc.outputs == [None]
        assert exc.trace.rounds_used == 0


def test_two_ranks_halving_is_one_silent_shift():
    result = simulate(Variant.halving(), 2, _ints(2), builtin_operator("int-sum"))
    assert result.outputs == [None, (0,)]
    assert result.trace.rounds_used == 1
    assert result.trace.max_ops == 0


def test_empty_vectors_run_everywhere():
    op = builtin_operator("int-sum")
    for variant in (
        Variant.inclusive(),
        Variant.one_doubling(),
        Variant.best_doubling(),
        Variant.halving(),
    ):
        result = simulate(variant, 9, [() for _ in range(9)], op)
        want = () if variant.kind == "inclusive" else None
        assert result.outputs[0] == want
        assert all(out == () for out in result.outputs[1:])


def test_input_validation():
    op = builtin_operator("int-sum")
    with pytest.raises(ValueError, match="expected 4 input vectors"):
        simulate(Variant.halving(), 4, _ints(3), op)
    with pytest.raises(ValueError, match="share one length"):
        simulate(Variant.halving(), 3, [(1,), (1, 2), (1,)], op)


def test_operator_failure_reports_round_and_ranks():
    # rank 2 and 3 swapped, so some merge sees non-adjacent windows
    inputs = interval_inputs(4)
    inputs[2], inputs[3] = inputs[3], inputs[2]
    with pytest.raises(SimulationError) as exc_info:
        simulate(Variant.qprime_doubling(1), 4, inputs, interval_operator())
    err = exc_info.value
    assert err.round_index >= 0
    assert err.ranks


# ---------------------------------------------------------- op accounting

@pytest.mark.parametrize("p", [2, 3, 7, 24, 33, 64])
@pytest.mark.parametrize(
    "variant",
    [Variant.qprime_doubling(1), Variant.best_doubling(), Variant.halving()],
    ids=lambda v: v.kind,
)
def test_booked_ops_equal_counted_calls(variant, p):
    counting = CountingOperator(builtin_operator("int-sum"))
    result = simulate(variant, p, _ints(p), counting)
    assert sum(result.trace.ops_per_rank) == counting.count
    assert result.trace.max_ops == max(result.trace.ops_per_rank)


def test_ops_are_m_independent():
    op = builtin_operator("int-sum")
    per_m = []
    for m in (0, 1, 5):
        inputs = [tuple(range(m)) for _ in range(24)]
        result = simulate(Variant.best_doubling(), 24, inputs, op)
        per_m.append(result.trace.ops_per_rank)
    assert per_m[0] == per_m[1] == per_m[2]


# ------------------------------------------------------------------ trace

def test_bytes_per_round_scale_with_messages():
    result = simulate(
        Variant.qprime_doubling(1), 4, _ints(4), builtin_operator("int-sum")
    )
    # skips [1, 1, 2]: 3 shift messages, then 2, then 1, at 8 bytes each
    assert [len(msgs) for msgs in result.trace.messages] == [3, 2, 1]
    assert result.trace.bytes_per_round == [24, 16, 8]


def test_shift_round_sends_raw_inputs():
    result = simulate(Variant.halving(), 8, _ints(8), builtin_operator("int-sum"))
    shift = result.trace.messages[0]
    assert len(shift) == 7
    assert all(m.payload_kind == "V" and m.dst == m.src + 1 for m in shift)


def test_qprime_exclusive_round_skips_rank_after_silent_zero():
    result = simulate(
        Variant.qprime_doubling(2), 24, _ints(24), builtin_operator("int-sum")
    )
    sched = result.trace.schedule
    assert sched.skips() == [1, 2, 3, 6, 12]
    first_exclusive = result.trace.messages[2]  # skip 3
    assert sorted(m.src for m in first_exclusive) == list(range(1, 21))
    assert sorted(m.dst for m in first_exclusive) == list(range(4, 24))
    assert all(m.payload_kind == "W" for m in first_exclusive)


def test_halving_payload_kinds_follow_epsilon():
    result = simulate(Variant.halving(), 24, _ints(24), builtin_operator("int-sum"))
    sched = result.trace.schedule
    assert sched.skips() == [1, 2, 3, 6, 12]
    assert sched.epsilons() == [1, 0, 0, 0]

    eps1 = result.trace.messages[1]  # skip 2, eps 1: W aliases, rank 0 silent
    assert all(m.payload_kind == "W" for m in eps1)
    assert min(m.src for m in eps1) == 1
    assert all(m.dst - m.src == 1 for m in eps1)

    eps0 = result.trace.messages[2]  # skip 3, eps 0: rank 0 ships raw input
    kinds = {m.src: m.payload_kind for m in eps0}
    assert kinds[0] == "V"
    assert all(kind == "Wprime" for src, kind in kinds.items() if src > 0)


def test_trace_records_schema_and_roundtrip():
    result = simulate(Variant.halving(), 6, _ints(6), builtin_operator("int-sum"))
    buf = io.StringIO()
    export_trace(result, buf)
    lines = [json.loads(ln) for ln in buf.getvalue().splitlines()]

    *messages, summary = lines
    assert len(messages) == sum(len(m) for m in result.trace.messages)
    for rec in messages:
        assert set(rec) == {"round", "from", "to", "skip", "epsilon", "payload_kind"}
        assert rec["to"] - rec["from"] == rec["skip"] - rec["epsilon"]
    assert summary["p"] == 6
    assert summary["variant"] == "halving"
    assert summary["qprime"] is None
    assert summary["rounds_used"] == result.trace.rounds_used
    assert summary["max_ops"] == result.trace.max_ops
    assert summary["ops_per_rank"] == result.trace.ops_per_rank

    assert list(trace_records(result)) == lines


def test_simulation_is_deterministic():
    inputs = sample_inputs("mat2-mult", 17, 2, random.Random(3))
    op = builtin_operator("mat2-mult")
    a = simulate(Variant.best_doubling(), 17, inputs, op)
    b = simulate(Variant.best_doubling(), 17, inputs, op)
    assert a.outputs == b.outputs
    assert a.trace.messages == b.trace.messages
    assert a.trace.ops_per_rank == b.trace.ops_per_rank


def test_hooks_observe_every_round():
    seen = []
    result = simulate(
        Variant.best_doubling(), 12, _ints(12), builtin_operator("int-sum"),
        before_round=lambda rspec, states: seen.append(("before", rspec.index, len(states))),
        after_round=lambda rspec, states: seen.append(("after", rspec.index)),
    )
    n = len(result.trace.schedule.rounds)
    assert seen == [
        item
        for k in range(n)
        for item in (("before", k, 12), ("after", k))
    ]


# ----------------------------------------------------------- step functions

def _state(r, w=None):
    return ProcessorState(r=r, V=(f"v{r}",), W=w)


def test_step_qprime_inclusive_send_receive_rank_restages():
    op = builtin_operator("string-concat")
    rspec = RoundSpec(1, 2, Phase.INCLUSIVE)
    ops = [0] * 24
    st = _state(12, w=("w12",))
    act = step_qprime(st, rspec, 24, 4, op, ops)
    assert act == (14, "Wprime", ("w12v12",))
    assert ops[12] == 1
    # a second call restages: send+receive ranks never reuse a staging
    step_qprime(st, rspec, 24, 4, op, ops)
    assert ops[12] == 2


def test_step_qprime_inclusive_receive_only_at_top():
    ops = [0] * 24
    st = _state(23, w=("w",))
    act = step_qprime(st, RoundSpec(1, 2, Phase.INCLUSIVE), 24, 4,
                      builtin_operator("string-concat"), ops)
    assert act is None
    assert ops[23] == 0


def test_step_qprime_inclusive_send_only_stages_once():
    op = builtin_operator("string-concat")
    ops = [0] * 24
    st = _state(1, w=("w1",))
    first = step_qprime(st, RoundSpec(1, 2, Phase.INCLUSIVE), 24, 4, op, ops)
    second = step_qprime(st, RoundSpec(2, 4, Phase.INCLUSIVE), 24, 4, op, ops)
    assert first == (3, "Wprime", ("w1v1",))
    assert second == (5, "Wprime", ("w1v1",))
    assert ops[1] == 1  # memoized across rounds


def test_step_qprime_rank0_sends_raw_input():
    ops = [0] * 24
    act = step_qprime(_state(0, w=("w0",)), RoundSpec(1, 2, Phase.INCLUSIVE),
                      24, 4, builtin_operator("string-concat"), ops)
    assert act == (2, "V", ("v0",))
    assert ops[0] == 0


def test_step_qprime_exclusive_forwards_w_unreduced():
    ops = [0] * 24
    rspec = RoundSpec(2, 3, Phase.EXCLUSIVE)
    op = builtin_operator("string-concat")
    assert step_qprime(_state(1, w=("w1",)), rspec, 24, 4, op, ops) == (4, "W", ("w1",))
    assert step_qprime(_state(0, w=("w0",)), rspec, 24, 4, op, ops) is None
    assert step_qprime(_state(21, w=("w",)), rspec, 24, 4, op, ops) is None
    assert ops == [0] * 24


def test_step_halving_epsilon_one_aliases_w():
    ops = [0] * 24
    rspec = RoundSpec(1, 2, Phase.HALVING, epsilon=1)
    op = builtin_operator("string-concat")
    assert step_halving(_state(5, w=("w5",)), rspec, 24, op, ops) == (6, "W", ("w5",))
    assert step_halving(_state(0, w=("w0",)), rspec, 24, op, ops) is None
    assert ops == [0] * 24


def test_step_halving_epsilon_zero_stages():
    op = builtin_operator("string-concat")
    ops = [0] * 24
    rspec = RoundSpec(2, 3, Phase.HALVING, epsilon=0)
    assert step_halving(_state(5, w=("w5",)), rspec, 24, op, ops) == (8, "Wprime", ("w5v5",))
    assert ops[5] == 1
    assert step_halving(_state(0, w=("w0",)), rspec, 24, op, ops) == (3, "V", ("v0",))
    assert ops[0] == 0

    sendonly = _state(2, w=("w2",))
    step_halving(sendonly, rspec, 24, op, ops)
    step_halving(sendonly, RoundSpec(3, 6, Phase.HALVING, epsilon=0), 24, op, ops)
    assert ops[2] == 1  # staged once, reused while W is untouched


def test_step_halving_shift_round():
    ops = [0] * 4
    rspec = RoundSpec(0, 1, Phase.SHIFT)
    op = builtin_operator("string-concat")
    assert step_halving(_state(0), rspec, 4, op, ops) == (1, "V", ("v0",))
    assert step_halving(_state(3), rspec, 4, op, ops) is None


def test_interval_run_all_variants_small():
    # the adjacency-checking operator accepts every delivered merge order
    for variant in (
        Variant.inclusive(),
        Variant.qprime_doubling(1),
        Variant.best_doubling(),
        Variant.halving(),
    ):
        for p in (2, 5, 16, 24):
            result = simulate(variant, p, interval_inputs(p), interval_operator())
            for r, out in enumerate(result.outputs):
                if variant.kind == "inclusive":
                    assert out == (IntervalElement(0, r + 1),)
                elif r == 0:
                    assert out is None
                else:
                    assert out == (IntervalElement(0, r),)
