"""Admissibility, the labelled presentation graph, word counting and repair.

The language of a beta-shift is decided two independent ways: the
lexicographic shift criterion on w(beta), and path-reading in the labelled
graph whose vertex i carries one forward edge labelled w_i(beta) plus
back-edges to vertex 1 labelled 0 .. w_i(beta)-1.  Tests cross-check the
two on every base in the battery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .beta_core import BetaNumber, simple_beta_approx
from .errors import (
    AlphabetMismatch,
    BudgetExceeded,
    NotAdmissibleInput,
    NotFound,
    UsageError,
)
from .observables import Observable
from .words import SymbolWord, lex_le_prefix


class Automaton:
    """Deterministic reader for the labelled graph of a beta-shift.

    States are 1-based vertex indices; when w(beta) is known to be
    eventually periodic, states are canonicalized into the periodic window
    so arbitrarily long words can be read in bounded memory.
    """

    def __init__(self, beta: BetaNumber, horizon: int = 4096):
        self.beta = beta
        self.horizon = horizon
        self._pf = beta.periodic_form()

    def digit_at(self, i: int) -> int:
        if self._pf is not None:
            pre, per = self._pf
            if i <= len(pre):
                return pre[i - 1]
            return per[(i - len(pre) - 1) % len(per)]
        if len(self.beta._w) < i:
            self.beta.digits(i)
        return self.beta._w[i - 1]

    def canon(self, i: int) -> int:
        if self._pf is None:
            return i
        pre, per = self._pf
        p, q = len(pre), len(per)
        if i <= p + q:
            return i
        return p + ((i - p - 1) % q) + 1

    def step(self, state: int, symbol: int) -> Optional[int]:
        w = self.digit_at(state)
        if symbol == w:
            return self.canon(state + 1)
        if 0 <= symbol < w:
            return 1
        return None

    def read(self, digits, start: int = 1) -> Optional[int]:
        state = start
        for s in digits:
            state = self.step(state, s)
            if state is None:
                return None
        return state

    def is_universal_state(self, state: int) -> bool:
        """True when every admissible word is readable from this state.

        That holds exactly when the digit stream seen from the state equals
        w(beta) itself; decidable when the expansion is eventually periodic,
        and conservatively False otherwise.
        """
        if state == 1:
            return True
        if self._pf is None:
            return False
        pre, per = self._pf
        p, q = len(pre), len(per)
        horizon = p + 2 * q
        return all(self.digit_at(state + j) == self.digit_at(1 + j)
                   for j in range(horizon))

    def z_of_state(self, state: int, search_cap: int = 1 << 20) -> int:
        """Zeros to read before the automaton can return to vertex 1."""
        k = 0
        i = state
        while self.digit_at(i) == 0:
            k += 1
            i = self.canon(i + 1)
            if k > search_cap:
                raise BudgetExceeded("no nonzero digit found within search cap")
        return k


@dataclass(frozen=True)
class PrefixGraph:
    """Finite truncation of the labelled graph, with per-vertex z-distances."""

    beta: BetaNumber
    vertex_count: int
    forward_labels: tuple[int, ...]
    back_edges: tuple[tuple[int, ...], ...]
    z_distance: tuple[int, ...]

    def step(self, state: int, symbol: int) -> Optional[int]:
        if not 1 <= state <= self.vertex_count:
            raise UsageError(f"state {state} outside graph")
        w = self.forward_labels[state - 1]
        if symbol == w:
            return state + 1
        if 0 <= symbol < w:
            return 1
        return None

    def read(self, digits, start: int = 1) -> Optional[int]:
        state = start
        for s in digits:
            if state > self.vertex_count:
                raise UsageError("word longer than graph truncation")
            state = self.step(state, s)
            if state is None:
                return None
        return state

    def accepts(self, digits) -> bool:
        try:
            return self.read(digits) is not None
        except UsageError:
            return False


def build_prefix_graph(beta: BetaNumber, n: int) -> PrefixGraph:
    if n < 1:
        raise UsageError("n must be >= 1")
    digits = beta.digits(n)
    back = tuple(tuple(range(w)) for w in digits)
    auto = Automaton(beta)
    z = tuple(auto.z_of_state(i) for i in range(1, n + 1))
    return PrefixGraph(beta=beta, vertex_count=n, forward_labels=digits,
                       back_edges=back, z_distance=z)


def is_admissible(word: SymbolWord | tuple, beta: BetaNumber) -> bool:
    """Parry's criterion: every shift of the word is lexicographically
    bounded by the matching-length prefix of w(beta)."""
    digits = tuple(word.digits if isinstance(word, SymbolWord) else word)
    if any(d > beta.digit_bound or d < 0 for d in digits):
        raise AlphabetMismatch(
            f"word uses digits outside {{0..{beta.digit_bound}}}")
    n = len(digits)
    if n == 0:
        return True
    w = beta.digits(n)
    return all(lex_le_prefix(digits[k:], w) for k in range(n))


def count_admissible(beta: BetaNumber, n: int) -> int:
    """Exact number of admissible words of length n (big-integer DP)."""
    if n < 1:
        raise UsageError("n must be >= 1")
    auto = Automaton(beta, horizon=n + 2)
    beta.digits(min(n + 1, _digit_need(auto, n)))
    counts = {1: 1}
    for _ in range(n):
        nxt: dict[int, int] = {}
        for state, c in counts.items():
            w = auto.digit_at(state)
            if w > 0:
                nxt[1] = nxt.get(1, 0) + c * w
            fwd = auto.canon(state + 1)
            nxt[fwd] = nxt.get(fwd, 0) + c
        counts = nxt
    return sum(counts.values())


def _digit_need(auto: Automaton, n: int) -> int:
    return n + 1 if auto._pf is None else 1


def count_profile(beta: BetaNumber, n_max: int):
    """(n, count, log(count)/n) rows for n = 1..n_max."""
    rows = []
    auto = Automaton(beta)
    beta.digits(min(n_max + 1, _digit_need(auto, n_max)))
    counts = {1: 1}
    for n in range(1, n_max + 1):
        nxt: dict[int, int] = {}
        for state, c in counts.items():
            w = auto.digit_at(state)
            if w > 0:
                nxt[1] = nxt.get(1, 0) + c * w
            fwd = auto.canon(state + 1)
            nxt[fwd] = nxt.get(fwd, 0) + c
        counts = nxt
        total = sum(counts.values())
        rows.append((n, total, math.log(total) / n))
    return rows


@dataclass
class ZReport:
    z: list[int]
    ratio_sup: Fraction
    ratio_argmax: int
    max_z: int
    spec_flag: bool
    window: int


def z_values_from_digits(digits, n_max: int) -> ZReport:
    """z_n over 1..n_max computed from an explicit digit sequence.

    digits must extend far enough that a nonzero digit exists at or after
    every position up to n_max.
    """
    digits = tuple(digits)
    z: list[int] = []
    next_nonzero = None  # absolute 1-based index of next nonzero >= current n
    nz_positions = [i + 1 for i, d in enumerate(digits) if d != 0]
    import bisect
    for n in range(1, n_max + 1):
        j = bisect.bisect_left(nz_positions, n)
        if j == len(nz_positions):
            raise UsageError(
                f"digit prefix too short: no nonzero digit at or after {n}")
        z.append(nz_positions[j] - n)
    ratio_sup = Fraction(0)
    argmax = 1
    for n, zn in enumerate(z, start=1):
        r = Fraction(zn, n)
        if r > ratio_sup:
            ratio_sup, argmax = r, n
    max_z = max(z)
    half = max(1, n_max // 2)
    non_growing = max(z[half:], default=0) <= max(z[:half])
    small = max_z <= max(4, int(math.log2(n_max)) + 1)
    return ZReport(z=z, ratio_sup=ratio_sup, ratio_argmax=argmax,
                   max_z=max_z, spec_flag=non_growing and small, window=n_max)


def z_values(beta: BetaNumber, n_max: int) -> ZReport:
    if n_max < 1:
        raise UsageError("n_max must be >= 1")
    # extend digits until a nonzero exists at or after n_max
    need = n_max
    cap = max(4 * n_max, n_max + 1000)
    while True:
        digits = beta.digits(need)
        if any(d != 0 for d in digits[n_max - 1:]):
            break
        need *= 2
        if need > cap:
            raise BudgetExceeded(
                f"no nonzero digit found up to {cap}; gap too long for window")
    return z_values_from_digits(digits, n_max)


def repair_word(word: SymbolWord, beta: BetaNumber) -> SymbolWord:
    """Zero the last nonzero digit; the result concatenates admissibly with
    every admissible continuation."""
    if not is_admissible(word, beta):
        raise NotAdmissibleInput(f"word {word} is not admissible")
    digits = list(word.digits)
    for i in range(len(digits) - 1, -1, -1):
        if digits[i] != 0:
            digits[i] = 0
            break
    return SymbolWord(tuple(digits), word.alphabet_bound)


@dataclass
class MarkovApprox:
    """n-step Markov subsystem: paths confined to the first vertices."""

    base_beta: BetaNumber
    order: int            # requested truncation index
    effective_order: int  # after dropping trailing zero digits
    approx_beta: BetaNumber
    confined_labels: tuple[int, ...]

    def step(self, state: int, symbol: int) -> Optional[int]:
        w = self.confined_labels[state - 1]
        if symbol == w and state < self.effective_order:
            return state + 1
        if 0 <= symbol < w:
            return 1
        return None

    def accepts(self, digits) -> bool:
        state = 1
        for s in digits:
            state = self.step(state, s)
            if state is None:
                return False
        return True

    def count(self, n: int) -> int:
        counts = {1: 1}
        for _ in range(n):
            nxt: dict[int, int] = {}
            for state, c in counts.items():
                w = self.confined_labels[state - 1]
                if w > 0:
                    nxt[1] = nxt.get(1, 0) + c * w
                if state < self.effective_order:
                    nxt[state + 1] = nxt.get(state + 1, 0) + c
            counts = nxt
        return sum(counts.values())

    @property
    def entropy(self) -> float:
        return self.approx_beta.log

    def enumerate_words(self, n: int):
        """All accepted words of length n, lexicographic order."""
        out: list[tuple[int, ...]] = []

        def rec(state, acc):
            if len(acc) == n:
                out.append(tuple(acc))
                return
            w = self.confined_labels[state - 1]
            for s in range(w + 1):
                nxt = self.step(state, s)
                if nxt is not None:
                    acc.append(s)
                    rec(nxt, acc)
                    acc.pop()

        rec(1, [])
        return out


def markov_approx(beta: BetaNumber, n: int) -> MarkovApprox:
    approx = simple_beta_approx(beta, n)
    m = approx.info["effective_n"]
    labels = beta.digits(m)
    return MarkovApprox(base_beta=beta, order=n, effective_order=m,
                        approx_beta=approx, confined_labels=labels)


def enumerate_admissible(beta: BetaNumber, n: int, budget: int = 10 ** 6):
    """All admissible words of length n via graph DFS, lexicographic order."""
    auto = Automaton(beta)
    beta.digits(min(n + 1, _digit_need(auto, n)))
    out: list[tuple[int, ...]] = []

    def rec(state, acc):
        if len(acc) == n:
            out.append(tuple(acc))
            if len(out) > budget:
                raise BudgetExceeded(f"more than {budget} admissible words")
            return
        w = auto.digit_at(state)
        for s in range(w + 1):
            nxt = auto.step(state, s)
            if nxt is not None:
                acc.append(s)
                rec(nxt, acc)
                acc.pop()

    rec(1, [])
    return out


def periodic_stream_admissible(beta: BetaNumber, period_digits,
                               copy_cap: int = 256) -> bool:
    """Whether the periodic stream period_digits^inf lies in the shift.

    Exact when w(beta) is eventually periodic (the canonical state space is
    finite); otherwise a finite-depth check over copy_cap copies.
    """
    auto = Automaton(beta)
    state = 1
    seen = {1}
    for _ in range(copy_cap):
        state = auto.read(period_digits, start=state)
        if state is None:
            return False
        state = auto.canon(state)
        if state in seen and auto._pf is not None:
            return True
        seen.add(state)
    return True


def periodic_witnesses(beta: BetaNumber, observable: Observable,
                       max_period: int):
    """Two admissible periodic words whose per-period averages realize the
    extreme gap found up to max_period."""
    best_lo = best_hi = None
    val_lo = math.inf
    val_hi = -math.inf
    for p in range(max(1, observable.range_r), max_period + 1):
        for word in enumerate_admissible(beta, p, budget=10 ** 6):
            if not periodic_stream_admissible(beta, word):
                continue
            avg = observable.periodic_average(word)
            if avg < val_lo:
                val_lo, best_lo = avg, word
            if avg > val_hi:
                val_hi, best_hi = avg, word
    if best_lo is None or val_hi - val_lo <= 1e-12:
        raise NotFound(
            "all periodic averages coincide up to the searched period")
    return (SymbolWord(best_lo, beta.digit_bound), val_lo,
            SymbolWord(best_hi, beta.digit_bound), val_hi)
