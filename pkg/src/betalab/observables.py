"""Locally constant observables on digit sequences."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UsageError


@dataclass(frozen=True)
class Observable:
    """A range-r observable given by a table on length-r digit blocks."""

    name: str
    range_r: int
    table: dict = field(hash=False)

    def __post_init__(self):
        if self.range_r < 1:
            raise UsageError("observable range must be >= 1")
        if not self.table:
            raise UsageError("observable table is empty")

    @property
    def sup_norm(self) -> float:
        return max(abs(v) for v in self.table.values())

    @property
    def oscillation(self) -> float:
        return max(self.table.values()) - min(self.table.values())

    def block_value(self, block: tuple[int, ...]) -> float:
        try:
            return self.table[block]
        except KeyError:
            raise UsageError(f"observable {self.name} undefined on block {block}")

    def average_on_word(self, digits) -> float:
        """Truncated Birkhoff average over the materialized prefix.

        A range-r observable only sees the first len - r + 1 windows; the
        discarded tail is accounted for in callers' boundary terms.
        """
        digits = tuple(digits)
        r = self.range_r
        if len(digits) < r:
            raise UsageError(f"word shorter than observable range {r}")
        m = len(digits) - r + 1
        return sum(self.block_value(digits[i:i + r]) for i in range(m)) / m

    def periodic_average(self, period_digits) -> float:
        """Exact Birkhoff average of the periodic stream period_digits^inf."""
        period = tuple(period_digits)
        p = len(period)
        doubled = period * ((self.range_r // p) + 2)
        return sum(self.block_value(doubled[i:i + self.range_r])
                   for i in range(p)) / p


def digit_frequency(digit: int, alphabet_bound: int) -> Observable:
    table = {(i,): 1.0 if i == digit else 0.0 for i in range(alphabet_bound + 1)}
    return Observable(name=f"freq:{digit}", range_r=1, table=table)


def constant(value: float, alphabet_bound: int) -> Observable:
    table = {(i,): float(value) for i in range(alphabet_bound + 1)}
    return Observable(name=f"const:{value}", range_r=1, table=table)


def block_indicator(block: tuple[int, ...], alphabet_bound: int) -> Observable:
    from itertools import product

    r = len(block)
    table = {b: 1.0 if b == tuple(block) else 0.0
             for b in product(range(alphabet_bound + 1), repeat=r)}
    return Observable(name=f"block:{''.join(map(str, block))}", range_r=r, table=table)


def parse_observable(spec: str, alphabet_bound: int) -> Observable:
    """Parse CLI observable specs: "freq:1", "const:0.5", "block:101"."""
    kind, _, arg = spec.partition(":")
    if kind == "freq":
        return digit_frequency(int(arg), alphabet_bound)
    if kind == "const":
        return constant(float(arg), alphabet_bound)
    if kind == "block":
        return block_indicator(tuple(int(c) for c in arg), alphabet_bound)
    raise UsageError(f"unknown observable spec {spec!r}")
