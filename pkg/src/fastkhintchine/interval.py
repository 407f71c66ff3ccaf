"""Closed real intervals with outward rounding, built on mpmath's raw mpf layer.

Every operation takes an explicit working precision in bits so results do
not depend on the global ``mp.prec``.  Transcendental endpoints are pushed
out by one extra ulp because mpmath only promises directed rounding.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from mpmath import mp, mpf
from mpmath.libmp import (
    finf,
    fnan,
    fninf,
    from_int,
    from_rational,
    fzero,
    mpf_shift,
    mpf_add,
    mpf_cmp,
    mpf_div,
    mpf_exp,
    mpf_floor,
    mpf_log,
    mpf_mul,
    mpf_neg,
    mpf_perturb,
    mpf_sub,
    round_ceiling,
    round_floor,
    to_int,
    to_str,
)

DEFAULT_PREC = 256
MAX_PREC = 16384


def _lo_of(x, prec):
    if isinstance(x, int):
        return from_int(x, prec, round_floor)
    return from_rational(x.numerator, x.denominator, prec, round_floor)


def _hi_of(x, prec):
    if isinstance(x, int):
        return from_int(x, prec, round_ceiling)
    return from_rational(x.numerator, x.denominator, prec, round_ceiling)


def _down(raw, prec):
    return mpf_perturb(raw, 1, prec, round_floor)


def _up(raw, prec):
    return mpf_perturb(raw, 0, prec, round_ceiling)


class Interval:
    """A closed interval ``[lo, hi]`` of reals with raw mpf endpoints."""

    __slots__ = ("_a", "_b", "prec")

    def __init__(self, a, b, prec: int = DEFAULT_PREC):
        if mpf_cmp(a, b) > 0:
            raise ValueError("empty interval")
        self._a = a
        self._b = b
        self.prec = prec

    # construction ---------------------------------------------------------
    @classmethod
    def exact(cls, x, prec: int = DEFAULT_PREC) -> "Interval":
        """Enclose an int or Fraction."""
        if isinstance(x, Fraction) and x.denominator == 1:
            x = x.numerator
        return cls(_lo_of(x, prec), _hi_of(x, prec), prec)

    @classmethod
    def hull(cls, lo, hi, prec: int = DEFAULT_PREC) -> "Interval":
        return cls(_lo_of(lo, prec), _hi_of(hi, prec), prec)

    @classmethod
    def from_mpf(cls, lo: mpf, hi: mpf, prec: int = DEFAULT_PREC) -> "Interval":
        return cls(lo._mpf_, hi._mpf_, prec)

    # endpoints --------------------------------------------------------------
    @property
    def lo(self) -> mpf:
        return mp.make_mpf(self._a)

    @property
    def hi(self) -> mpf:
        return mp.make_mpf(self._b)

    @property
    def raw(self):
        return self._a, self._b

    def width(self) -> mpf:
        return mp.make_mpf(mpf_sub(self._b, self._a, self.prec, round_ceiling))

    def mid(self) -> mpf:
        s = mpf_add(self._a, self._b, self.prec + 2)
        return mp.make_mpf(mpf_shift(s, -1))

    def lo_float(self) -> float:
        return float(self.lo)

    def hi_float(self) -> float:
        return float(self.hi)

    def __float__(self) -> float:
        return float(self.mid())

    # arithmetic --------------------------------------------------------------
    def _coerce(self, other) -> "Interval":
        if isinstance(other, Interval):
            return other
        if isinstance(other, (int, Fraction)):
            return Interval.exact(other, self.prec)
        return NotImplemented

    def _p(self, other: "Interval") -> int:
        return max(self.prec, other.prec)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self._p(other)
        return Interval(mpf_add(self._a, other._a, p, round_floor),
                        mpf_add(self._b, other._b, p, round_ceiling), p)

    __radd__ = __add__

    def __neg__(self):
        return Interval(mpf_neg(self._b), mpf_neg(self._a), self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self._p(other)
        return Interval(mpf_sub(self._a, other._b, p, round_floor),
                        mpf_sub(self._b, other._a, p, round_ceiling), p)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self._p(other)
        los, his = [], []
        for x in (self._a, self._b):
            for y in (other._a, other._b):
                los.append(mpf_mul(x, y, p, round_floor))
                his.append(mpf_mul(x, y, p, round_ceiling))
        lo = min(los, key=_key)
        hi = max(his, key=_key)
        return Interval(lo, hi, p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.contains_zero():
            raise ZeroDivisionError("interval divisor contains zero")
        p = self._p(other)
        los, his = [], []
        for x in (self._a, self._b):
            for y in (other._a, other._b):
                los.append(mpf_div(x, y, p, round_floor))
                his.append(mpf_div(x, y, p, round_ceiling))
        return Interval(min(los, key=_key), max(his, key=_key), p)

    def __rtruediv__(self, other):
        return Interval.exact(other, self.prec) / self

    def log(self) -> "Interval":
        if mpf_cmp(self._a, fzero) <= 0:
            raise ValueError("log of non-positive interval")
        p = self.prec
        return Interval(_down(mpf_log(self._a, p, round_floor), p),
                        _up(mpf_log(self._b, p, round_ceiling), p), p)

    def exp(self) -> "Interval":
        p = self.prec
        a = mpf_exp(self._a, p, round_floor)
        b = mpf_exp(self._b, p, round_ceiling)
        a = _down(a, p) if a != fzero else a
        if mpf_cmp(a, fzero) < 0:
            a = fzero
        return Interval(a, _up(b, p), p)

    def with_prec(self, prec: int) -> "Interval":
        return Interval(self._a, self._b, prec)

    # predicates ---------------------------------------------------------------
    def contains_zero(self) -> bool:
        return mpf_cmp(self._a, fzero) <= 0 <= mpf_cmp(self._b, fzero)

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return mpf_cmp(self._a, x._a) <= 0 and mpf_cmp(x._b, self._b) <= 0
        if isinstance(x, (int, Fraction)):
            x = Fraction(x)
            lo = to_rational_exact(self._a)
            hi = to_rational_exact(self._b)
            return lo <= x <= hi
        x = mpf(x)._mpf_
        return mpf_cmp(self._a, x) <= 0 <= mpf_cmp(self._b, x)

    def certainly_lt(self, other) -> bool:
        other = self._coerce(other)
        return mpf_cmp(self._b, other._a) < 0

    def certainly_le(self, other) -> bool:
        other = self._coerce(other)
        return mpf_cmp(self._b, other._a) <= 0

    def certainly_gt(self, other) -> bool:
        other = self._coerce(other)
        return mpf_cmp(self._a, other._b) > 0

    def certainly_ge(self, other) -> bool:
        other = self._coerce(other)
        return mpf_cmp(self._a, other._b) >= 0

    def sign(self):
        """Return -1, 0 or 1 if the sign is certain, else ``None``."""
        if mpf_cmp(self._a, fzero) > 0:
            return 1
        if mpf_cmp(self._b, fzero) < 0:
            return -1
        if self._a == fzero and self._b == fzero:
            return 0
        return None

    def floor(self):
        """The common floor of both endpoints, or ``None`` if they differ."""
        fa = to_int(mpf_floor(self._a))
        fb = to_int(mpf_floor(self._b))
        return fa if fa == fb else None

    def hull_with(self, other: "Interval") -> "Interval":
        p = self._p(other)
        return Interval(min(self._a, other._a, key=_key),
                        max(self._b, other._b, key=_key), p)

    def to_strings(self, digits: int = 30) -> tuple[str, str]:
        return to_str(self._a, digits), to_str(self._b, digits)

    def __repr__(self) -> str:
        a, b = self.to_strings(20)
        return f"Interval([{a}, {b}])"


class _Key:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return mpf_cmp(self.v, other.v) < 0


def _key(raw):
    if raw in (fnan,):
        raise ValueError("nan endpoint")
    return _Key(raw)


def to_rational_exact(raw) -> Fraction:
    """Exact rational value of a finite raw mpf."""
    if raw in (finf, fninf, fnan):
        raise ValueError("non-finite endpoint")
    sign, man, exp, _ = raw
    if man == 0:
        return Fraction(0)
    v = Fraction(man) * (Fraction(2) ** exp)
    return -v if sign else v


@lru_cache(maxsize=4096)
def log_int(n: int, prec: int) -> Interval:
    """Cached enclosure of ``log n`` for a positive integer."""
    return Interval.exact(n, prec + 8).log().with_prec(prec)


def log_fraction(q: Fraction, prec: int) -> Interval:
    q = Fraction(q)
    if q <= 0:
        raise ValueError("log of non-positive rational")
    num = log_int(q.numerator, prec) if q.numerator > 1 else Interval.exact(0, prec)
    if q.denominator == 1:
        return num
    return num - log_int(q.denominator, prec)


def bits_for_magnitude(x: float) -> int:
    """Rough binary exponent of ``|x|`` used to size working precision."""
    if x == 0 or math.isnan(x):
        return 0
    return max(0, int(math.log2(abs(x))) + 1)
