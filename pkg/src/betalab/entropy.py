"""Mistake-tolerant separation combinatorics and cover-based entropy.

Real separation scales are discretized: in the shift metric, two points are
epsilon-apart at time j exactly when their digits disagree somewhere in the
window [j, j+m), where m = min{k >= 1 : beta^-k <= epsilon}.  Every
operation here is therefore parameterized by the integer window m, making
all quantities exactly computable (m = 1 corresponds to any epsilon in
(1/beta, 1)).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional, Sequence

from .errors import (
    BudgetExceeded,
    DepthTooShallow,
    InsufficientSample,
    LengthMismatch,
    NotAdmissibleInput,
    UsageError,
)
from .words import SymbolWord

EXACT_WORDS_BUDGET = 20
EXACT_LENGTH_BUDGET = 12


class MistakeFunction:
    """Sublinear mistake allowance n -> g(n), monotone in n."""

    def __init__(self, name: str, fn: Callable[[int], int]):
        self.name = name
        self._fn = fn

    def __call__(self, n: int, eps: Optional[float] = None) -> int:
        g = int(self._fn(n))
        if g < 0:
            raise UsageError(f"mistake function {self.name} went negative")
        return g

    def check_window(self, n_lo: int, n_hi: int, ratio_bound: float = 0.5) -> bool:
        """Monotonicity plus empirically decaying ratio over [n_lo, n_hi]."""
        vals = [self(n) for n in range(n_lo, n_hi + 1)]
        if any(a > b for a, b in zip(vals, vals[1:])):
            return False
        r_start = vals[0] / n_lo
        r_end = vals[-1] / n_hi
        return r_end <= max(r_start, 1e-12) and r_end < ratio_bound

    @classmethod
    def zero(cls) -> "MistakeFunction":
        return cls("zero", lambda n: 0)

    @classmethod
    def constant(cls, c: int) -> "MistakeFunction":
        return cls(f"const:{c}", lambda n: c)

    @classmethod
    def log2(cls) -> "MistakeFunction":
        return cls("log", lambda n: math.ceil(math.log2(n)) if n > 1 else 0)

    @classmethod
    def parse(cls, spec: str) -> "MistakeFunction":
        if spec in ("zero", "0"):
            return cls.zero()
        if spec == "log":
            return cls.log2()
        if spec.startswith("const:"):
            return cls.constant(int(spec.split(":", 1)[1]))
        raise UsageError(f"unknown mistake function spec {spec!r}")

    def doubled(self) -> "MistakeFunction":
        return MistakeFunction(f"2*{self.name}", lambda n: 2 * self._fn(n))


def _digits_of(word) -> tuple[int, ...]:
    return tuple(word.digits if isinstance(word, SymbolWord) else word)


def window_bad_count(x, y, window: int) -> int:
    """# of j in [0, n) whose length-window look-ahead sees a disagreement."""
    xd, yd = _digits_of(x), _digits_of(y)
    if len(xd) != len(yd):
        raise LengthMismatch(f"{len(xd)} vs {len(yd)}")
    n = len(xd)
    if window < 1:
        raise UsageError("window must be >= 1")
    bad = 0
    next_bad = math.inf  # nearest disagreement at or after j, scanned right to left
    for j in range(n - 1, -1, -1):
        if xd[j] != yd[j]:
            next_bad = j
        if next_bad - j < window:
            bad += 1
    return bad


def mistake_ball_contains(x, y, g: MistakeFunction, window: int = 1) -> bool:
    """y lies in the length-n mistake ball around x."""
    xd = _digits_of(x)
    n = len(xd)
    return window_bad_count(x, y, window) <= g(n)


@dataclass
class SeparationInstance:
    """A finite word set with the window and mistake budget to test at."""

    words: tuple
    window: int = 1
    g: MistakeFunction = field(default_factory=MistakeFunction.zero)
    exact_budget: int = EXACT_WORDS_BUDGET

    def __post_init__(self):
        self.words = tuple(_digits_of(w) for w in self.words)
        if not self.words:
            raise UsageError("empty word set")
        n = len(self.words[0])
        if any(len(w) != n for w in self.words):
            raise LengthMismatch("all words must share one length")
        self.n = n
        self.threshold = self.g(n)

    def separated(self, i: int, j: int) -> bool:
        return window_bad_count(self.words[i], self.words[j], self.window) \
            > self.threshold

    def covers(self, center: int, z: int) -> bool:
        return window_bad_count(self.words[center], self.words[z],
                                self.window) <= self.threshold


@dataclass
class SeparationResult:
    size: int
    witness: list
    exact: bool
    bound_direction: str  # "exact", "lower" (packing) or "upper" (cover)


def _separation_adjacency(inst: SeparationInstance) -> list[int]:
    k = len(inst.words)
    adj = [0] * k
    fast = _binary_masks(inst)
    for i in range(k):
        for j in range(i + 1, k):
            if fast is not None:
                sep = _fast_bad(fast[i], fast[j], inst.window, inst.n) \
                    > inst.threshold
            else:
                sep = inst.separated(i, j)
            if sep:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return adj


def _binary_masks(inst: SeparationInstance):
    if all(all(d in (0, 1) for d in w) for w in inst.words):
        return [sum(d << p for p, d in enumerate(w)) for w in inst.words]
    return None


def _fast_bad(a: int, b: int, window: int, n: int) -> int:
    d = a ^ b
    spread = d
    for s in range(1, window):
        spread |= d >> s
    return (spread & ((1 << n) - 1)).bit_count()


def max_separated(inst: SeparationInstance) -> SeparationResult:
    """Largest pairwise-separated subset; exact below the search budget."""
    k = len(inst.words)
    if inst.threshold == 0:
        return _greedy_separated(inst)
    if k <= inst.exact_budget and inst.n <= EXACT_LENGTH_BUDGET:
        adj = _separation_adjacency(inst)
        best_mask = 0

        def grow(cand: int, cur: int, cur_size: int):
            nonlocal best_mask
            if cur_size + cand.bit_count() <= best_mask.bit_count():
                return
            if cand == 0:
                if cur_size > best_mask.bit_count():
                    best_mask = cur
                return
            v = (cand & -cand).bit_length() - 1
            grow((cand & adj[v]) >> 0, cur | (1 << v), cur_size + 1)
            grow(cand & ~(1 << v), cur, cur_size)

        grow((1 << k) - 1, 0, 0)
        witness = [inst.words[i] for i in range(k) if best_mask >> i & 1]
        return SeparationResult(len(witness), witness, True, "exact")
    return _greedy_separated(inst)


def _greedy_separated(inst: SeparationInstance) -> SeparationResult:
    if inst.threshold == 0:
        # any disagreement separates, so distinct words are pairwise separated
        witness = list(dict.fromkeys(inst.words))
        return SeparationResult(len(witness), witness, True, "exact")
    fast = _binary_masks(inst)
    chosen: list[int] = []
    for i in range(len(inst.words)):
        ok = True
        for j in chosen:
            if fast is not None:
                sep = _fast_bad(fast[i], fast[j], inst.window, inst.n) \
                    > inst.threshold
            else:
                sep = inst.separated(i, j)
            if not sep:
                ok = False
                break
        if ok:
            chosen.append(i)
    witness = [inst.words[i] for i in chosen]
    return SeparationResult(len(witness), witness, False, "lower")


def min_spanning(inst: SeparationInstance) -> SeparationResult:
    """Smallest subset whose mistake balls cover the whole word set."""
    k = len(inst.words)
    cover_masks = []
    for c in range(k):
        m = 0
        for z in range(k):
            if inst.covers(c, z):
                m |= 1 << z
        cover_masks.append(m)
    full = (1 << k) - 1
    greedy = _greedy_cover(cover_masks, full)
    if k > inst.exact_budget or inst.n > EXACT_LENGTH_BUDGET:
        witness = [inst.words[i] for i in greedy]
        return SeparationResult(len(witness), witness, False, "upper")
    for size in range(1, len(greedy) + 1):
        for combo in combinations(range(k), size):
            m = 0
            for c in combo:
                m |= cover_masks[c]
            if m == full:
                witness = [inst.words[i] for i in combo]
                return SeparationResult(size, witness, True, "exact")
    raise BudgetExceeded("exact cover search failed below greedy bound")


def _greedy_cover(cover_masks: list[int], full: int) -> list[int]:
    chosen: list[int] = []
    covered = 0
    while covered != full:
        best, gain = None, -1
        for c, m in enumerate(cover_masks):
            g = (m & ~covered).bit_count()
            if g > gain:
                best, gain = c, g
        if gain <= 0:
            raise UsageError("cover stalled; centers cannot span the set")
        chosen.append(best)
        covered |= cover_masks[best]
    return chosen


# --- Katok-style finite-scale estimates -----------------------------------

def katok_entropy_estimate(sampler, g: MistakeFunction, gamma: float,
                           n_list: Sequence[int], window: int = 1,
                           method: str = "separated") -> dict:
    """Finite-scale analogue of the mistake-tolerant entropy formula.

    For each n, keeps a weight-(1-gamma) word set (dropping lightest words
    first) and reports (1/n) log of its separated (or spanning) count under
    g and under the zero mistake function side by side.
    """
    if not 0 < gamma < 1:
        raise UsageError("gamma must lie in (0, 1)")
    rows = []
    for n in n_list:
        sample = list(sampler(n))
        if not sample:
            raise InsufficientSample(f"sampler produced nothing at n={n}")
        total = sum(w for _, w in sample)
        if total <= 0:
            raise InsufficientSample("nonpositive total weight")
        sample = [(d, w / total) for d, w in sample]
        sample.sort(key=lambda t: (t[1], t[0]))
        dropped = 0.0
        keep_from = 0
        for i, (_, w) in enumerate(sample):
            if dropped + w <= gamma:
                dropped += w
                keep_from = i + 1
            else:
                break
        z_words = tuple(d for d, _ in sample[keep_from:])
        if not z_words:
            raise InsufficientSample("mass threshold removed every word")
        row = {"n": n, "kept_words": len(z_words),
               "kept_mass": round(1.0 - dropped, 12)}
        for label, gg in (("g", g), ("zero", MistakeFunction.zero())):
            inst = SeparationInstance(z_words, window=window, g=gg)
            res = max_separated(inst) if method == "separated" \
                else min_spanning(inst)
            row[f"count_{label}"] = res.size
            row[f"estimate_{label}"] = math.log(res.size) / n if res.size else 0.0
            row[f"exact_{label}"] = res.exact
        row["difference"] = abs(row["estimate_g"] - row["estimate_zero"])
        rows.append(row)
    return {"gamma": gamma, "window": window, "mistake_function": g.name,
            "method": method, "rows": rows}


def uniform_admissible_sampler(beta):
    """Uniform weights over all admissible words of each length."""
    from .parry import enumerate_admissible

    def sampler(n):
        words = enumerate_admissible(beta, n)
        w = 1.0 / len(words)
        return [(d, w) for d in words]

    return sampler


# --- cylinder trees and cover entropy -------------------------------------

class CylinderTree:
    """Digit trie presenting a set of streams through its depth-D prefixes."""

    def __init__(self, root: dict, alphabet_bound: int):
        self.root = root
        self.alphabet_bound = alphabet_bound
        self.depth = self._depth(root)

    @staticmethod
    def _depth(node) -> int:
        if not node:
            return 0
        return 1 + max(CylinderTree._depth(c) for c in node.values())

    @classmethod
    def full(cls, alphabet_bound: int, depth: int) -> "CylinderTree":
        node: dict = {}
        for _ in range(depth):
            node = {s: dict(node) for s in range(alphabet_bound + 1)}
        return cls(node, alphabet_bound)

    @classmethod
    def from_step_function(cls, step, initial, alphabet_bound: int,
                           depth: int) -> "CylinderTree":
        def build(state, d):
            if d == 0:
                return {}
            out = {}
            for s in range(alphabet_bound + 1):
                nxt = step(state, s)
                if nxt is not None:
                    out[s] = build(nxt, d - 1)
            return out

        return cls(build(initial, depth), alphabet_bound)

    @classmethod
    def from_beta(cls, beta, depth: int) -> "CylinderTree":
        from .parry import Automaton
        auto = Automaton(beta)
        return cls.from_step_function(auto.step, 1, beta.digit_bound, depth)

    @classmethod
    def from_markov(cls, approx, depth: int) -> "CylinderTree":
        bound = max(approx.confined_labels)
        return cls.from_step_function(approx.step, 1, bound, depth)

    @classmethod
    def single_stream(cls, digits) -> "CylinderTree":
        node: dict = {}
        for d in reversed(tuple(digits)):
            node = {int(d): node}
        return cls(node, max(digits))

    def to_json(self) -> str:
        def conv(node):
            return {str(k): conv(v) for k, v in node.items()}
        return json.dumps({"alphabet_bound": self.alphabet_bound,
                           "trie": conv(self.root)}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CylinderTree":
        data = json.loads(text)

        def conv(node):
            return {int(k): conv(v) for k, v in node.items()}
        return cls(conv(data["trie"]), int(data["alphabet_bound"]))

    def leaf_count_at(self, depth: int) -> int:
        def count(node, d):
            if d == 0:
                return 1
            if not node:
                return 0
            return sum(count(c, d - 1) for c in node.values())
        return count(self.root, depth)


def cover_cost(tree: CylinderTree, s: float, n_min: int,
               max_depth: Optional[int] = None) -> float:
    """M(Z, s, N): optimal weighted cover by trie cylinders of depth in
    [n_min, max_depth]."""
    depth_cap = tree.depth if max_depth is None else min(max_depth, tree.depth)
    if n_min > depth_cap:
        raise DepthTooShallow(f"N={n_min} exceeds usable depth {depth_cap}")

    def cost(node, d):
        here = math.exp(-s * d) if d >= n_min else math.inf
        if not node or d == depth_cap:
            return here
        below = sum(cost(c, d + 1) for c in node.values())
        return min(here, below)

    return cost(tree.root, 0)


@dataclass
class CoverEntropyReport:
    estimate: float
    bracket: tuple[float, float]
    n_min: int
    depth: int
    monotonicity: list  # rows (s, [(N, M)]) certifying M nondecreasing in N


def _crossing(cost_at, lo: float, hi: float, tol: float) -> float:
    """s where the decreasing cover cost crosses 1."""
    while cost_at(hi) >= 1.0:
        hi *= 1.5
        if hi > 64:
            raise UsageError("cover cost never drops below 1")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if cost_at(mid) >= 1.0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def bowen_entropy(tree: CylinderTree, n_min: int = 1, tol: float = 1e-4,
                  n_grid: Optional[Sequence[int]] = None) -> CoverEntropyReport:
    """Finite-depth transition point of M(Z, s, N) in s."""
    est = _crossing(lambda s: cover_cost(tree, s, n_min), 0.0,
                    math.log(tree.alphabet_bound + 1) + 0.5, tol)
    grid = list(n_grid) if n_grid is not None else \
        sorted({1, max(1, tree.depth // 4), max(1, tree.depth // 2), tree.depth})
    mono = []
    for s in (max(est - 0.1, 0.0), est, est + 0.1):
        row = [(N, cover_cost(tree, s, N)) for N in grid if N <= tree.depth]
        mono.append((s, row))
    return CoverEntropyReport(estimate=est, bracket=(est - tol, est + tol),
                              n_min=n_min, depth=tree.depth, monotonicity=mono)


def box_dimension_estimate(tree: CylinderTree, beta, depth_list,
                           tol: float = 1e-4) -> dict:
    """Transition exponent of the cover cost with d_beta cylinder diameters."""
    log_b = beta.log
    rows = []
    for d in depth_list:
        if d > tree.depth:
            raise DepthTooShallow(f"depth {d} exceeds tree depth {tree.depth}")
        est = _crossing(
            lambda a: cover_cost(tree, a * log_b, 1, max_depth=d),
            0.0, 2.0, tol)
        rows.append({"depth": d, "alpha": est})
    return {"rows": rows, "estimate": rows[-1]["alpha"], "log_beta": log_b}


def cylinder_diameter_bounds(beta, word) -> tuple[float, float]:
    """[beta^-(n+z_n), beta^-n] in the d_beta metric; exact at w(beta) prefixes."""
    from .parry import is_admissible, z_values

    sw = word if isinstance(word, SymbolWord) else SymbolWord(tuple(word), beta.digit_bound)
    if not is_admissible(sw, beta):
        raise NotAdmissibleInput(f"{sw} is not admissible")
    n = len(sw)
    zn = z_values(beta, n).z[n - 1]
    b = beta.value
    lower = b ** -(n + zn)
    upper = b ** -n
    if tuple(sw.digits) == beta.digits(n):
        return lower, lower
    return lower, upper


def dimension_bounds(h: float, beta, z_ratio: float,
                     bounded_z_certificate: bool = False) -> dict:
    """Entropy-to-dimension sandwich in the d_beta metric."""
    if h < 0 or z_ratio < 0:
        raise UsageError("entropy and z ratio must be nonnegative")
    log_b = beta.log
    upper = h / log_b
    if bounded_z_certificate:
        return {"lower": upper, "upper": upper, "flag": "bounded-z"}
    if z_ratio < 1:
        return {"lower": h / ((1 + z_ratio) * log_b), "upper": upper,
                "flag": "sandwich"}
    return {"lower": 0.0, "upper": upper, "flag": "z-ratio>=1"}
