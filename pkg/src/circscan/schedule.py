"""Skip-schedule construction and closed-form round/op predictions.

A schedule is the complete compile-time description of one algorithm run:
for each round, the uniform skip every rank uses, the phase that selects
the branch structure, and (for the roughly-halving variant) the epsilon
displacement correction.  Schedules are immutable and independent of the
operator and payloads, so one schedule can drive many simulations.

All arithmetic here is integer-only.  The round and bound formulas are
knife-edge at powers of two, where floating-point logarithms misround.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


def ceil_log2(n: int) -> int:
    """Smallest q with 2**q >= n, for n >= 1."""
    if n < 1:
        raise ValueError(f"ceil_log2 needs n >= 1, got {n}")
    return (n - 1).bit_length()


def _ceildiv(a: int, b: int) -> int:
    return -(-a // b)


class ProcCount(int):
    """Processor count; a plain int validated to be >= 1."""

    def __new__(cls, value: int) -> "ProcCount":
        v = int(value)
        if v < 1:
            raise ValueError(f"processor count must be >= 1, got {value}")
        return super().__new__(cls, v)


class Phase(enum.Enum):
    """Which branch structure a round executes."""

    SHIFT = "shift"            # round 0: send raw input, receive into W
    INCLUSIVE = "inclusive"    # doubling rounds that stage W (+) V
    EXCLUSIVE = "exclusive"    # doubling rounds that forward W as-is
    HALVING = "halving"        # roughly-halving rounds with epsilon correction


# CLI-facing variant tags.  The last three are aliases resolved once p is known.
VARIANT_KINDS = ("inclusive", "qprime", "halving", "one", "twoop", "best")


@dataclass(frozen=True)
class Variant:
    """Algorithm selector.

    kind "qprime" carries its q' parameter; "one", "twoop" and "best" are
    p-dependent aliases for q'=1, q'=ceil(log2 p) and q'=best_qprime(p).
    """

    kind: str
    qprime: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in VARIANT_KINDS:
            raise ValueError(f"unknown variant kind {self.kind!r}")
        if self.kind == "qprime" and (self.qprime is None or self.qprime < 1):
            raise ValueError("qprime variant needs a positive q'")
        if self.kind != "qprime" and self.qprime is not None:
            raise ValueError(f"variant {self.kind!r} takes no q' parameter")

    @classmethod
    def inclusive(cls) -> "Variant":
        return cls("inclusive")

    @classmethod
    def qprime_doubling(cls, qprime: int) -> "Variant":
        return cls("qprime", qprime)

    @classmethod
    def halving(cls) -> "Variant":
        return cls("halving")

    @classmethod
    def one_doubling(cls) -> "Variant":
        return cls("one")

    @classmethod
    def two_oplus(cls) -> "Variant":
        return cls("twoop")

    @classmethod
    def best_doubling(cls) -> "Variant":
        return cls("best")

    @property
    def exclusive(self) -> bool:
        return self.kind != "inclusive"

    def resolve(self, p: int) -> "Variant":
        """Replace p-dependent aliases with a concrete variant."""
        p = ProcCount(p)
        if self.kind == "one":
            return Variant.qprime_doubling(1)
        if self.kind == "twoop":
            return Variant.qprime_doubling(max(1, ceil_log2(p)))
        if self.kind == "best":
            return Variant.qprime_doubling(1 if p == 1 else best_qprime(p))
        return self

    def label(self) -> str:
        if self.kind == "qprime":
            return f"qprime(q'={self.qprime})"
        return self.kind


@dataclass(frozen=True)
class RoundSpec:
    """One communication round: every rank sends to r + (skip - epsilon)."""

    index: int
    skip: int
    phase: Phase
    epsilon: int = 0


@dataclass(frozen=True)
class SkipSchedule:
    """Ordered rounds plus the parameters that generated them.

    qprime is the inclusive-phase round count (0 for non-hybrid variants);
    pprime is the doubling threshold 2**q' (None for non-hybrid variants).
    """

    p: int
    variant: Variant
    rounds: tuple[RoundSpec, ...]
    q: int
    qprime: int = 0
    pprime: int | None = None

    def skips(self) -> list[int]:
        return [r.skip for r in self.rounds]

    def epsilons(self) -> list[int]:
        """Epsilon flags for halving rounds k >= 1 (empty for other variants)."""
        return [r.epsilon for r in self.rounds if r.phase is Phase.HALVING]


def build_qprime_schedule(p: int, qprime: int) -> SkipSchedule:
    """Round sequence of the q'-doubling exclusive scan.

    Shift round with s=1; inclusive-phase rounds double s while s < 2**q';
    then s is adjusted to 2**q' - 1 and exclusive-phase rounds double it
    while s < p-1.  The emitted round count equals predict_rounds_qprime.
    """
    p = ProcCount(p)
    if p < 2:
        raise ValueError("q'-doubling schedule needs p >= 2")
    q_ceil = ceil_log2(p)
    if not 1 <= qprime <= q_ceil:
        raise ValueError(f"q' must lie in [1, {q_ceil}] for p={p}, got {qprime}")
    pprime = 1 << qprime
    rounds = [RoundSpec(0, 1, Phase.SHIFT)]
    s = 2
    while s < pprime:
        rounds.append(RoundSpec(len(rounds), s, Phase.INCLUSIVE))
        s <<= 1
    s -= 1
    while s < p - 1:
        rounds.append(RoundSpec(len(rounds), s, Phase.EXCLUSIVE))
        s <<= 1
    return SkipSchedule(
        p=p,
        variant=Variant.qprime_doubling(qprime),
        rounds=tuple(rounds),
        q=len(rounds),
        qprime=qprime,
        pprime=pprime,
    )


def build_halving_schedule(p: int) -> SkipSchedule:
    """Round sequence of the roughly-halving exclusive scan.

    q = ceil(log2 p) rounds; skip of round k is ((p-1) >> (q-k)) + 1, which
    equals the ceiling-halving recurrence s_k = ceil(s_{k+1}/2) seeded with
    s_q = p.  Round k >= 1 carries epsilon = 1 iff s_{k+1} is odd.
    """
    p = ProcCount(p)
    if p < 2:
        raise ValueError("halving schedule needs p >= 2")
    q = ceil_log2(p)
    skip = [((p - 1) >> (q - k)) + 1 for k in range(q + 1)]  # skip[q] == p
    rounds = [RoundSpec(0, skip[0], Phase.SHIFT)]
    for k in range(1, q):
        rounds.append(RoundSpec(k, skip[k], Phase.HALVING, epsilon=skip[k + 1] & 1))
    return SkipSchedule(
        p=p, variant=Variant.halving(), rounds=tuple(rounds), q=len(rounds)
    )


def build_inclusive_schedule(p: int) -> SkipSchedule:
    """Straight-doubling inclusive scan: skips 2**k, no shift round."""
    p = ProcCount(p)
    q = ceil_log2(p) if p > 1 else 0
    rounds = tuple(RoundSpec(k, 1 << k, Phase.INCLUSIVE) for k in range(q))
    return SkipSchedule(
        p=p, variant=Variant.inclusive(), rounds=rounds, q=len(rounds)
    )


def build_schedule(variant: Variant, p: int) -> SkipSchedule:
    """Build the schedule for any variant, resolving aliases first."""
    concrete = variant.resolve(p)
    if concrete.kind == "inclusive":
        return build_inclusive_schedule(p)
    if concrete.kind == "halving":
        return build_halving_schedule(p)
    return build_qprime_schedule(p, concrete.qprime)


def predict_rounds_qprime(p: int, qprime: int) -> int:
    """Rounds used by the q'-doubling algorithm.

    The smallest q with (2**q' - 1) * 2**(q-q') >= p-1: after q' initial
    rounds the covered window spans 2**q' - 1 predecessors, and each
    exclusive-phase round doubles the span until it covers p-1.
    """
    p = ProcCount(p)
    if p < 2:
        raise ValueError("prediction needs p >= 2")
    q_ceil = ceil_log2(p)
    if not 1 <= qprime <= q_ceil:
        raise ValueError(f"q' must lie in [1, {q_ceil}] for p={p}, got {qprime}")
    extra = (_ceildiv(p - 1, (1 << qprime) - 1) - 1).bit_length()
    return qprime + extra


def predict_ops_bound_qprime(p: int, qprime: int) -> int:
    """Upper bound q + q' - 2 on any rank's reduce count (q = rounds used)."""
    return predict_rounds_qprime(p, qprime) + qprime - 2


def best_qprime(p: int) -> int:
    """Smallest q' that keeps the q'-doubling round count at ceil(log2 p).

    Integer form of the threshold 2**q' >= 2**q / (2**q - p + 1).
    """
    p = ProcCount(p)
    if p < 2:
        raise ValueError("best_qprime needs p >= 2")
    q = ceil_log2(p)
    headroom = (1 << q) - p + 1
    qp = 1
    while (1 << qp) * headroom < (1 << q):
        qp += 1
    return qp


def predict_ops_bound_halving(p: int) -> int:
    """Upper bound on any rank's reduce count for the halving variant.

    ceil(log2 p) + popcount(p-1) - 2 - (1 if p even else 0), floored at 0:
    the raw expression is -1 at p=2, where the single shift round performs
    no reduction at all.
    """
    p = ProcCount(p)
    if p < 2:
        raise ValueError("prediction needs p >= 2")
    q = ceil_log2(p)
    raw = q + (p - 1).bit_count() - 2 - (0 if p & 1 else 1)
    return max(0, raw)
