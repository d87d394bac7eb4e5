"""Associative reduction operators over element vectors.

A vector is a plain tuple of m opaque elements; reduce combines two
vectors element-wise, left operand first.  The algorithms never rely on
commutativity, and two deliberately non-commutative operators
(string-concat, mat2-mult) exist so that any ordering mistake in the
simulator shows up as a wrong result rather than a silent coincidence.

One "application" is one reduce() call on full vectors, counted even for
m = 0; the per-element work is irrelevant to the accounting.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Any, Callable

ElementVector = tuple[Any, ...]

# Unset results (rank 0 of an exclusive scan) are represented as None
# throughout the package; no operator identity element is ever fabricated.

_WORD_MASK = (1 << 64) - 1
_MAT2_PRIME = 1_000_000_007


class OperatorError(ValueError):
    """Reduce was called on arguments it is not defined for."""


class WindowAdjacencyError(OperatorError):
    """Interval reduce on non-adjacent windows; carries both operands."""

    def __init__(self, left: "IntervalElement", right: "IntervalElement"):
        self.left = left
        self.right = right
        super().__init__(
            f"windows [{left.lo},{left.hi}) and [{right.lo},{right.hi}) "
            "are not adjacent"
        )


@dataclass(frozen=True)
class IntervalElement:
    """Half-open window [lo, hi) of contributing input ranks."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo >= self.hi:
            raise ValueError(f"empty window [{self.lo},{self.hi})")


class Operator:
    """Element-wise associative reduction with a few accounting attributes."""

    def __init__(
        self,
        name: str,
        combine: Callable[[Any, Any], Any],
        commutative: bool,
        element_size: int = 8,
    ):
        self.name = name
        self.commutative = commutative
        self.element_size = element_size
        self._combine = combine

    def reduce(self, left: ElementVector, right: ElementVector) -> ElementVector:
        if len(left) != len(right):
            raise OperatorError(
                f"{self.name}: vector lengths differ ({len(left)} vs {len(right)})"
            )
        c = self._combine
        return tuple(c(a, b) for a, b in zip(left, right))

    def __repr__(self) -> str:
        return f"Operator({self.name!r})"


class CountingOperator:
    """Wraps an operator and counts reduce calls; changes nothing else."""

    def __init__(self, inner: Operator):
        self.inner = inner
        self.count = 0

    @property
    def name(self) -> str:
        return self.inner.name

    @property
    def commutative(self) -> bool:
        return self.inner.commutative

    @property
    def element_size(self) -> int:
        return self.inner.element_size

    def reset(self) -> None:
        self.count = 0

    def reduce(self, left: ElementVector, right: ElementVector) -> ElementVector:
        self.count += 1
        return self.inner.reduce(left, right)

    def __repr__(self) -> str:
        return f"CountingOperator({self.inner.name!r}, count={self.count})"


def _mat2_mult(a: tuple, b: tuple) -> tuple:
    # 2x2 integer matrices (row-major 4-tuples) multiplied modulo a fixed
    # prime; modular reduction keeps associativity exact.
    a00, a01, a10, a11 = a
    b00, b01, b10, b11 = b
    m = _MAT2_PRIME
    return (
        (a00 * b00 + a01 * b10) % m,
        (a00 * b01 + a01 * b11) % m,
        (a10 * b00 + a11 * b10) % m,
        (a10 * b01 + a11 * b11) % m,
    )


_BUILTINS: dict[str, Callable[[], Operator]] = {
    # int-sum wraps modulo 2**64 so that associativity holds exactly for
    # arbitrary integer inputs.
    "int-sum": lambda: Operator("int-sum", lambda a, b: (a + b) & _WORD_MASK, True),
    "int-max": lambda: Operator("int-max", max, True),
    "int-xor": lambda: Operator("int-xor", lambda a, b: a ^ b, True),
    "string-concat": lambda: Operator("string-concat", lambda a, b: a + b, False),
    "mat2-mult": lambda: Operator("mat2-mult", _mat2_mult, False),
}

BUILTIN_NAMES = tuple(_BUILTINS)


def builtin_operator(name: str) -> Operator:
    """Look up a named builtin operator."""
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise ValueError(
            f"unknown operator {name!r}; choose from {', '.join(_BUILTINS)}"
        ) from None
    return factory()


def _interval_combine(a: IntervalElement, b: IntervalElement) -> IntervalElement:
    if a.hi != b.lo:
        raise WindowAdjacencyError(a, b)
    return IntervalElement(a.lo, b.hi)


def interval_operator() -> Operator:
    """Adjacency-checking window operator.

    Run a scan with inputs V_r = [r, r+1); every reduce must merge adjacent
    windows in ascending rank order, or it raises WindowAdjacencyError.
    Final values make window claims machine-checkable: [0, r) for the
    exclusive scans, [0, r+1) for the inclusive one.
    """
    return Operator("interval", _interval_combine, False)


def interval_inputs(p: int, m: int = 1) -> list[ElementVector]:
    """Per-rank singleton windows, the canonical interval-operator inputs."""
    return [tuple(IntervalElement(r, r + 1) for _ in range(m)) for r in range(p)]


def sample_inputs(name: str, p: int, m: int, rng: random.Random) -> list[ElementVector]:
    """Random inputs suited to the named builtin (rank-distinct for the
    non-commutative ones, so ordering errors cannot cancel out)."""
    if name == "string-concat":
        return [tuple(f"{r}." for _ in range(m)) for r in range(p)]
    if name == "mat2-mult":
        return [
            tuple(
                tuple(rng.randrange(_MAT2_PRIME) for _ in range(4)) for _ in range(m)
            )
            for _ in range(p)
        ]
    return [tuple(rng.randrange(1 << 48) for _ in range(m)) for _ in range(p)]
