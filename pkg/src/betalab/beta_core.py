"""Controlled-precision arithmetic for beta, expansions, and digit recovery.

A base beta > 1 comes in three flavours: a rational (decimal literal), the
root of an integer polynomial, or the number encoded by a self-admissible
digit sequence.  All digit decisions are exact: rational bases use plain
fractions, algebraic bases use coefficient vectors in Q[x]/(p) for the
irreducible p vanishing at beta, with adaptive dyadic root enclosures used
only to resolve floors.  A comparison that cannot be resolved below the
precision cap raises UndecidableAtPrecision instead of guessing.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    DegenerateRoot,
    InvalidBeta,
    NotIncreasing,
    NotSelfAdmissible,
    UndecidableAtPrecision,
    UsageError,
)
from .words import (
    SymbolWord,
    format_periodic,
    lex_le_prefix,
    parse_digit_string,
)

DEFAULT_PRECISION_BITS = 256


def precision_cap() -> int:
    return int(os.environ.get("BETALAB_PRECISION_BITS", DEFAULT_PRECISION_BITS))


# --- interval helpers (exact Fraction endpoints) --------------------------

def _imul(a, b):
    products = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(products), max(products)


def _ipoly(coeffs_desc: Sequence[Fraction], iv):
    """Interval Horner evaluation; coeffs in descending degree order."""
    acc = (coeffs_desc[0], coeffs_desc[0])
    for c in coeffs_desc[1:]:
        acc = _imul(acc, iv)
        acc = (acc[0] + c, acc[1] + c)
    return acc


def _poly_at(coeffs_asc: Sequence[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs_asc):
        acc = acc * x + c
    return acc


class AlgebraicContext:
    """An irreducible integer polynomial plus a refinable root enclosure.

    The enclosure endpoints are dyadic rationals carrying opposite signs of
    the polynomial, so bisection refines them exactly.
    """

    def __init__(self, poly_asc: tuple[int, ...], lo: Fraction, hi: Fraction):
        self.poly_asc = poly_asc
        self.lo = lo
        self.hi = hi
        s_lo = _poly_at(poly_asc, lo)
        s_hi = _poly_at(poly_asc, hi)
        if s_lo == 0 or s_hi == 0 or (s_lo > 0) == (s_hi > 0):
            raise InvalidBeta("enclosure endpoints must straddle the root")
        self._sign_lo = s_lo > 0

    @property
    def degree(self) -> int:
        return len(self.poly_asc) - 1

    def refine_to(self, width: Fraction) -> None:
        while self.hi - self.lo > width:
            mid = (self.lo + self.hi) / 2
            s = _poly_at(self.poly_asc, mid)
            if s == 0:
                # dyadic mid can only be the root if the poly is linear
                half = (self.hi - self.lo) / 4
                self.lo, self.hi = mid - half, mid + half
                if min(abs(_poly_at(self.poly_asc, self.lo)),
                       abs(_poly_at(self.poly_asc, self.hi))) == 0:
                    raise InvalidBeta("rational root should use the rational path")
                continue
            if (s > 0) == self._sign_lo:
                self.lo = mid
            else:
                self.hi = mid

    def eval_vector(self, vec: Sequence[Fraction]):
        """Interval enclosure of sum vec[i] * beta^i."""
        coeffs_desc = list(reversed(vec))
        return _ipoly(coeffs_desc, (self.lo, self.hi))

    def mul_by_beta(self, vec: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
        d = self.degree
        lead = self.poly_asc[d]
        top = vec[d - 1]
        out = [Fraction(0)] * d
        for i in range(1, d):
            out[i] = vec[i - 1]
        if top:
            for i in range(d):
                out[i] -= top * Fraction(self.poly_asc[i], lead)
        return tuple(out)

    def floor_vector(self, vec: tuple[Fraction, ...], cap_bits: Optional[int] = None) -> int:
        """Exact floor of the algebraic number represented by vec."""
        if all(c == 0 for c in vec[1:]):
            return math.floor(vec[0])
        cap = cap_bits if cap_bits is not None else precision_cap()
        width = self.hi - self.lo
        while True:
            lo_v, hi_v = self.eval_vector(vec)
            f_lo, f_hi = math.floor(lo_v), math.floor(hi_v)
            if f_lo == f_hi:
                return f_lo
            if f_lo + 1 == f_hi and hi_v == f_hi:
                # closed upper endpoint touching an integer exactly
                return f_lo
            if width < Fraction(1, 2 ** cap):
                raise UndecidableAtPrecision(
                    f"floor undecided at {cap} bits: value in [{float(lo_v)}, {float(hi_v)}]"
                )
            width /= 2 ** 8
            self.refine_to(width)


def _shift_range(digits):
    """Indices whose shift comparisons decide eventual-periodic admissibility."""
    return range(1, len(digits))


class BetaNumber:
    """A real beta > 1 with digit bound and lazily computed expansion of 1."""

    def __init__(self, *, frac: Optional[Fraction] = None,
                 ctx: Optional[AlgebraicContext] = None,
                 source: str = "decimal-literal",
                 w_periodic: Optional[tuple[tuple[int, ...], tuple[int, ...]]] = None):
        if (frac is None) == (ctx is None):
            raise InvalidBeta("exactly one of frac/ctx required")
        self._frac = frac
        self._ctx = ctx
        self.source = source
        self.info: dict = {}
        if frac is not None:
            if frac <= 1:
                raise InvalidBeta(f"beta must exceed 1, got {frac}")
            self.digit_bound = int(frac) - 1 if frac.denominator == 1 else int(frac)
        else:
            ctx.refine_to(Fraction(1, 2 ** 16))
            if ctx.hi <= 1:
                raise InvalidBeta("root enclosure at or below 1")
            self.digit_bound = self._floor_of_beta()
        # quasi-greedy expansion cache
        self._w: list[int] = []
        self._w_periodic = w_periodic
        self._orbit = None  # lazy greedy-orbit state for w(beta)
        self._seen: dict = {}

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_decimal(cls, text) -> "BetaNumber":
        try:
            frac = Fraction(text) if not isinstance(text, Fraction) else text
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidBeta(f"cannot parse beta literal {text!r}") from exc
        if frac <= 1:
            raise InvalidBeta(f"beta must exceed 1, got {frac}")
        return cls(frac=frac, source="decimal-literal")

    @classmethod
    def from_polynomial(cls, coeffs_desc: Sequence[int]) -> "BetaNumber":
        """Largest real root > 1 of the integer polynomial (descending coeffs)."""
        coeffs_desc = [int(c) for c in coeffs_desc]
        while coeffs_desc and coeffs_desc[0] == 0:
            coeffs_desc.pop(0)
        if len(coeffs_desc) < 2:
            raise InvalidBeta("polynomial must be non-constant")
        asc = tuple(reversed(coeffs_desc))
        ctx, is_rational, rat = _isolate_largest_root_above_one(asc)
        if is_rational:
            return cls(frac=rat, source="polynomial-root")
        return cls(ctx=ctx, source="polynomial-root")

    @classmethod
    def from_digit_string(cls, text: str) -> "BetaNumber":
        prefix, period = parse_digit_string(text)
        return beta_from_expansion(prefix, period)

    # -- numeric access ----------------------------------------------------

    def _floor_of_beta(self) -> int:
        vec = tuple(
            Fraction(1 if i == 1 else 0) for i in range(self._ctx.degree)
        ) if self._ctx.degree > 1 else (Fraction(0),)
        if self._ctx.degree == 1:
            raise InvalidBeta("degree-1 context should be rational")
        return self._ctx.floor_vector(vec)

    def enclosure(self, width: Fraction = Fraction(1, 2 ** 60)) -> tuple[Fraction, Fraction]:
        if self._frac is not None:
            return self._frac, self._frac
        self._ctx.refine_to(width)
        return self._ctx.lo, self._ctx.hi

    @property
    def value(self) -> float:
        lo, hi = self.enclosure()
        return float((lo + hi) / 2)

    @property
    def log(self) -> float:
        return math.log(self.value)

    def is_rational(self) -> bool:
        return self._frac is not None

    def compare(self, other: "BetaNumber") -> int:
        """-1, 0, 1 ordering; refines both enclosures as needed."""
        width = Fraction(1, 2 ** 32)
        cap = Fraction(1, 2 ** precision_cap())
        while True:
            a_lo, a_hi = self.enclosure(width)
            b_lo, b_hi = other.enclosure(width)
            if a_hi < b_lo:
                return -1
            if b_hi < a_lo:
                return 1
            if a_lo == b_lo and a_hi == b_hi and a_lo == a_hi:
                return 0
            if width < cap:
                # same algebraic number: identical minimal data
                if (self.is_rational() and other.is_rational()
                        and self._frac == other._frac):
                    return 0
                if (not self.is_rational() and not other.is_rational()
                        and self._ctx.poly_asc == other._ctx.poly_asc):
                    return 0
                raise UndecidableAtPrecision("comparison undecided at cap")
            width /= 2 ** 16

    def __repr__(self):
        return f"BetaNumber({self.value:.10g}, source={self.source})"

    # -- expansion of 1 ----------------------------------------------------

    def digits(self, n: int) -> tuple[int, ...]:
        """First n digits of w(beta), the quasi-greedy expansion of 1."""
        while len(self._w) < n:
            if self._w_periodic is not None:
                pre, per = self._w_periodic
                i = len(self._w)
                if i < len(pre):
                    self._w.append(pre[i])
                else:
                    self._w.append(per[(i - len(pre)) % len(per)])
            else:
                self._step_w()
        return tuple(self._w[:n])

    def periodic_form(self):
        """(preperiod, period) of w(beta) if known, else None."""
        return self._w_periodic

    def _step_w(self) -> None:
        if self._orbit is None:
            if self._frac is not None:
                self._orbit = Fraction(1)
            else:
                d = self._ctx.degree
                self._orbit = tuple(Fraction(1 if i == 0 else 0) for i in range(d))
        r = self._orbit
        if self._frac is not None:
            t = self._frac * r
            digit = math.floor(t)
            r_new = t - digit
            zero = r_new == 0
        else:
            t_vec = self._ctx.mul_by_beta(r)
            if all(c == 0 for c in t_vec[1:]) and t_vec[0].denominator == 1:
                digit = int(t_vec[0])
                r_new = tuple(Fraction(0) for _ in t_vec)
                zero = True
            else:
                digit = self._ctx.floor_vector(t_vec)
                r_new = tuple(c for c in t_vec)
                r_new = tuple(
                    c - (digit if i == 0 else 0) for i, c in enumerate(t_vec)
                )
                zero = all(c == 0 for c in r_new)
        if zero:
            # finite greedy expansion: switch to the quasi-greedy periodic form
            period = tuple(self._w) + (digit - 1,)
            if all(d == 0 for d in period):
                raise InvalidBeta("degenerate expansion (beta would be 1)")
            self._w_periodic = (tuple(), period)
            self._w.append(period[len(self._w) % len(period)] if len(period) == 1
                           else period[len(self._w)])
            self._orbit = None
            return
        key = r_new
        if key in self._seen and len(self._seen) < 100000:
            start = self._seen[key]
            pre = tuple(self._w[:start])
            per = tuple(self._w[start:]) + (digit,)
            self._w_periodic = (pre, per)
            self._w.append(digit)
            self._orbit = None
            return
        if len(self._seen) < 100000:
            self._seen[key] = len(self._w)
        self._w.append(digit)
        self._orbit = r_new


# --- operations -----------------------------------------------------------

def expansion_of_one(beta: BetaNumber, n: int) -> SymbolWord:
    """First n digits of w(beta) (lexicographic supremum / quasi-greedy form)."""
    if n < 1:
        raise UsageError("n must be >= 1")
    return SymbolWord(beta.digits(n), beta.digit_bound)


def greedy_expansion(x, beta: BetaNumber, n: int) -> SymbolWord:
    """Greedy digits of x in [0, 1) under the base-beta partition."""
    if n < 1:
        raise UsageError("n must be >= 1")
    x = Fraction(x)
    if not 0 <= x < 1:
        raise UsageError(f"x must lie in [0, 1), got {x}")
    digits = []
    if beta.is_rational():
        b = beta._frac
        r = x
        for _ in range(n):
            t = b * r
            d = math.floor(t)
            digits.append(d)
            r = t - d
    else:
        ctx = beta._ctx
        deg = ctx.degree
        r = tuple(x if i == 0 else Fraction(0) for i in range(deg))
        for _ in range(n):
            t = ctx.mul_by_beta(r)
            if all(c == 0 for c in t[1:]) and t[0].denominator == 1:
                d = int(t[0])
            else:
                d = ctx.floor_vector(t)
            digits.append(d)
            r = tuple(c - (d if i == 0 else 0) for i, c in enumerate(t))
    return SymbolWord(tuple(digits), beta.digit_bound)


def beta_orbit(x, beta: BetaNumber, n: int) -> list[tuple[Fraction, Fraction]]:
    """Enclosures of x, f(x), ..., f^{n-1}(x) for f(x) = beta*x mod 1."""
    if n < 1:
        raise UsageError("n must be >= 1")
    x = Fraction(x)
    if not 0 <= x < 1:
        raise UsageError(f"x must lie in [0, 1), got {x}")
    out = []
    if beta.is_rational():
        b = beta._frac
        r = x
        for _ in range(n):
            out.append((r, r))
            r = b * r
            r -= math.floor(r)
    else:
        ctx = beta._ctx
        deg = ctx.degree
        r = tuple(x if i == 0 else Fraction(0) for i in range(deg))
        for _ in range(n):
            ctx.refine_to(Fraction(1, 2 ** 64))
            out.append(ctx.eval_vector(r))
            t = ctx.mul_by_beta(r)
            if all(c == 0 for c in t[1:]) and t[0].denominator == 1:
                d = int(t[0])
            else:
                d = ctx.floor_vector(t)
            r = tuple(c - (d if i == 0 else 0) for i, c in enumerate(t))
    return out


def _eventually_periodic_digit(prefix, period, j):
    """1-based digit of the sequence prefix, period, period, ..."""
    if j <= len(prefix):
        return prefix[j - 1]
    if not period:
        return 0
    return period[(j - len(prefix) - 1) % len(period)]


def _check_self_admissible_ep(prefix, period):
    p, q = len(prefix), len(period)
    horizon = p + 2 * max(q, 1) + 4
    base = [_eventually_periodic_digit(prefix, period, j) for j in range(1, horizon + 1)]
    for k in range(1, p + max(q, 1) + 1):
        shifted = [_eventually_periodic_digit(prefix, period, j) for j in range(k + 1, k + horizon + 1)]
        for a, b in zip(shifted, base):
            if a > b:
                return False
            if a < b:
                break
    return True


def beta_from_expansion(prefix, period=()) -> BetaNumber:
    """Recover beta from an eventually periodic self-admissible digit sequence."""
    prefix = tuple(int(d) for d in prefix)
    period = tuple(int(d) for d in period)
    if period and all(d == 0 for d in period):
        period = ()
    if not period:
        while prefix and prefix[-1] == 0:
            prefix = prefix[:-1]
    digits_all = prefix + period
    if not digits_all:
        raise NotSelfAdmissible("empty digit sequence")
    if digits_all[0] < 1:
        raise NotSelfAdmissible("leading digit must be >= 1")
    if any(d < 0 for d in digits_all):
        raise NotSelfAdmissible("digits must be nonnegative")
    if not _check_self_admissible_ep(prefix, period):
        raise NotSelfAdmissible(
            f"sequence {format_periodic(prefix, period)} fails sigma^k(w) <= w"
        )
    if not period and prefix == (1,):
        raise DegenerateRoot("sequence (1,0,0,...) gives beta = 1")

    # integer polynomial vanishing at the encoded beta
    p, q = len(prefix), len(period)
    if period:
        # (x^q - 1) * (x^p - sum a_j x^{p-j}) = sum c_i x^{q-i}  (cleared form)
        size = p + q + 1
        coeffs = [0] * size  # ascending
        coeffs[p + q] += 1
        coeffs[p] -= 1
        for j, a in enumerate(prefix, start=1):
            coeffs[p + q - j] -= a
            coeffs[p - j] += a
        for i, c in enumerate(period, start=1):
            coeffs[q - i] -= c
    else:
        coeffs = [0] * (p + 1)
        coeffs[p] = 1
        for j, a in enumerate(prefix, start=1):
            coeffs[p - j] -= a
    asc = tuple(coeffs)

    ctx, is_rational, rat = _isolate_expansion_root(asc, prefix, period)
    if is_rational:
        if rat <= 1:
            raise DegenerateRoot(f"encoded root {rat} is <= 1")
        beta = BetaNumber(frac=rat, source="digit-sequence")
    else:
        beta = BetaNumber(ctx=ctx, source="digit-sequence")
    # store the quasi-greedy normalization of the given digits as w(beta)
    if period:
        beta._w_periodic = (prefix, period)
    else:
        quasi = prefix[:-1] + (prefix[-1] - 1,)
        if all(d == 0 for d in quasi):
            raise DegenerateRoot("quasi-greedy form degenerates to all zeros")
        beta._w_periodic = (tuple(), quasi)
    return beta


def _series_value(prefix, period, x: Fraction) -> Fraction:
    """sum of digit * x^{-j} over the eventually periodic sequence, exact."""
    acc = Fraction(0)
    xp = Fraction(1)
    for a in prefix:
        xp /= x
        acc += a * xp
    if period:
        tail = Fraction(0)
        xq = Fraction(1)
        for c in period:
            xq /= x
            tail += c * xq
        acc += xp * tail / (1 - Fraction(1, x ** len(period)))
    return acc


def _isolate_expansion_root(asc, prefix, period):
    """Bracket the unique root > 1 of the expansion identity, then isolate."""
    digits_all = prefix + period
    hi = Fraction(max(digits_all) + 2)
    lo = Fraction(1)
    # series is strictly decreasing in x on (1, inf); root where it equals 1
    def above(x):
        return _series_value(prefix, period, x) >= 1
    if not above(lo + Fraction(1, 2 ** 40)):
        raise DegenerateRoot("expansion sums below 1 arbitrarily close to 1")
    for _ in range(80):
        mid = (lo + hi) / 2
        if _series_value(prefix, period, mid) == 1:
            return None, True, mid
        if above(mid):
            lo = mid
        else:
            hi = mid
    if hi <= 1:
        raise DegenerateRoot("encoded root at or below 1")
    return _select_irreducible_factor(asc, lo, hi)


def _real_root_intervals(poly):
    """Isolating (lo, hi) Fraction intervals of the real roots, ascending."""
    out = []
    for (a, b), _mult in poly.intervals():
        out.append((Fraction(str(a)), Fraction(str(b))))
    return out


def _isolate_largest_root_above_one(asc):
    from sympy import Poly, Rational, Symbol

    x = Symbol("x")
    poly = Poly(list(reversed(asc)), x)
    intervals = _real_root_intervals(poly)
    cands = [(a, b) for a, b in intervals if b > 1]
    if not cands:
        raise InvalidBeta("polynomial has no real root above 1")
    lo, hi = cands[-1]
    if lo == hi:
        return None, True, lo
    while lo <= 1:
        s, t = poly.refine_root(Rational(lo.numerator, lo.denominator),
                                Rational(hi.numerator, hi.denominator), steps=8)
        new_lo, new_hi = Fraction(str(s)), Fraction(str(t))
        if (new_lo, new_hi) == (lo, hi):
            raise InvalidBeta("largest real root is not above 1")
        lo, hi = new_lo, new_hi
        if hi <= 1:
            raise InvalidBeta("largest real root is not above 1")
    return _select_irreducible_factor(asc, lo, hi)


def _select_irreducible_factor(asc, lo: Fraction, hi: Fraction):
    """Replace the polynomial by its irreducible factor vanishing in (lo, hi)."""
    from sympy import Poly, Symbol

    x = Symbol("x")
    poly = Poly(list(reversed(asc)), x)
    _, factors = poly.factor_list()
    for fac, _mult in factors:
        fasc = tuple(int(c) for c in reversed(fac.all_coeffs()))
        if len(fasc) == 2:
            rat = Fraction(-fasc[0], fasc[1])
            if lo <= rat <= hi:
                return None, True, rat
            continue
        from sympy import Rational

        for r_lo, r_hi in _real_root_intervals(fac):
            if r_hi < lo or r_lo > hi:
                continue
            # refine until the endpoints carry opposite polynomial signs
            while True:
                s_lo = _poly_at(fasc, r_lo)
                s_hi = _poly_at(fasc, r_hi)
                if s_lo != 0 and s_hi != 0 and (s_lo > 0) != (s_hi > 0):
                    break
                s, t = fac.refine_root(
                    Rational(r_lo.numerator, r_lo.denominator),
                    Rational(r_hi.numerator, r_hi.denominator), steps=4)
                r_lo, r_hi = Fraction(str(s)), Fraction(str(t))
            return AlgebraicContext(fasc, r_lo, r_hi), False, None
    raise InvalidBeta("no irreducible factor vanishes in the root bracket")


def simple_beta_approx(beta: BetaNumber, n: int) -> BetaNumber:
    """The simple base beta(n) encoded by the truncated expansion of 1.

    Trailing zero digits shrink the effective truncation index, which is
    reported in the result's info dict.
    """
    if n < 1:
        raise UsageError("n must be >= 1")
    trunc = list(beta.digits(n))
    while trunc and trunc[-1] == 0:
        trunc.pop()
    if not trunc:
        raise DegenerateRoot("truncation is all zeros")
    if tuple(trunc) == (1,):
        raise DegenerateRoot("truncation (1) gives beta(n) = 1")
    approx = beta_from_expansion(tuple(trunc), ())
    approx.info["requested_n"] = n
    approx.info["effective_n"] = len(trunc)
    return approx


def make_beta_with_gaps(gaps: Sequence[int]) -> SymbolWord:
    """Digit prefix 1 0^{a_1} 1 0^{a_2} ... for strictly increasing gaps."""
    gaps = [int(a) for a in gaps]
    if not gaps or any(a <= 0 for a in gaps):
        raise NotIncreasing("gaps must be positive")
    if any(b <= a for a, b in zip(gaps, gaps[1:])):
        raise NotIncreasing("gaps must be strictly increasing")
    digits: list[int] = []
    for a in gaps:
        digits.append(1)
        digits.extend([0] * a)
    word = SymbolWord(tuple(digits), 1)
    assert all(lex_le_prefix(word.digits[k:], word.digits)
               for k in range(1, len(word)))
    return word
