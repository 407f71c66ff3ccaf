"""Positive reals stored through their natural logarithm.

A :class:`LogValue` keeps up to three views of the same quantity ``v > 0``:

* ``rational`` -- ``v`` itself when it is a known rational number,
* ``exact_form`` -- ``ln v = const + sum(coeff * log p)`` over primes ``p``
  with rational ``const`` and ``coeff``,
* an enclosure of ``ln v`` that can be recomputed at any precision.

Because ``1`` and the logarithms of the primes are linearly independent
over the rationals, two exact forms describe the same number only if they
are identical; every other comparison is settled by interval evaluation at
doubling precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Optional, Union

from .errors import DomainError, IndistinguishableError
from .interval import DEFAULT_PREC, MAX_PREC, Interval, log_int

Rational = Union[int, Fraction]

#: rationals larger than this many bits are kept symbolic
RATIONAL_BIT_LIMIT = 1 << 16
#: trial-division bound for exact forms
_SMALL_PRIME_LIMIT = 10_000


def _primes_upto(n: int) -> list[int]:
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(n ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i, f in enumerate(sieve) if f]


_PRIMES = _primes_upto(_SMALL_PRIME_LIMIT)


@lru_cache(maxsize=65536)
def factor_small(n: int) -> Optional[tuple[tuple[int, int], ...]]:
    """Prime factorisation of ``n >= 1`` if it is smooth enough, else ``None``."""
    if n < 1:
        raise DomainError("factor_small needs n >= 1")
    out = []
    for p in _PRIMES:
        if n == 1:
            break
        if p * p > n:
            out.append((n, 1))
            n = 1
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    if n != 1:
        if n < _SMALL_PRIME_LIMIT ** 2:
            out.append((n, 1))
        else:
            return None
    return tuple(out)


@dataclass(frozen=True)
class ExactLog:
    """``const + sum(coeff * log(prime))`` with rational coefficients."""

    const: Fraction = Fraction(0)
    terms: tuple[tuple[int, Fraction], ...] = ()

    @classmethod
    def from_bases(cls, pairs: Iterable[tuple[int, Rational]],
                   const: Rational = 0) -> Optional["ExactLog"]:
        """Normalise ``sum(coeff * log(base))`` onto prime bases."""
        acc: dict[int, Fraction] = {}
        for base, coeff in pairs:
            if base < 1:
                raise DomainError(f"log base must be a positive integer, got {base}")
            fac = factor_small(base)
            if fac is None:
                return None
            for p, e in fac:
                acc[p] = acc.get(p, Fraction(0)) + Fraction(coeff) * e
        return cls._build(Fraction(const), acc)

    @classmethod
    def of_rational(cls, q: Rational) -> Optional["ExactLog"]:
        q = Fraction(q)
        if q <= 0:
            raise DomainError("log of non-positive rational")
        pairs = []
        if q.numerator > 1:
            pairs.append((q.numerator, 1))
        if q.denominator > 1:
            pairs.append((q.denominator, -1))
        return cls.from_bases(pairs)

    @staticmethod
    def _build(const: Fraction, acc: dict) -> "ExactLog":
        terms = tuple(sorted((p, c) for p, c in acc.items() if c != 0))
        return ExactLog(Fraction(const), terms)

    def __add__(self, other: "ExactLog") -> "ExactLog":
        acc = dict(self.terms)
        for p, c in other.terms:
            acc[p] = acc.get(p, Fraction(0)) + c
        return self._build(self.const + other.const, acc)

    def __neg__(self) -> "ExactLog":
        return ExactLog(-self.const, tuple((p, -c) for p, c in self.terms))

    def __sub__(self, other: "ExactLog") -> "ExactLog":
        return self + (-other)

    def scale(self, q: Rational) -> "ExactLog":
        q = Fraction(q)
        if q == 0:
            return ExactLog()
        return ExactLog(self.const * q, tuple((p, c * q) for p, c in self.terms))

    def is_zero(self) -> bool:
        return self.const == 0 and not self.terms

    def magnitude_bits(self) -> int:
        """Crude bit size of the largest summand, used to size precision."""
        m = abs(self.const)
        for p, c in self.terms:
            m = max(m, abs(c) * p.bit_length())
        return int(m).bit_length() + 1

    def evaluate(self, prec: int = DEFAULT_PREC) -> Interval:
        acc = Interval.exact(self.const, prec)
        for p, c in self.terms:
            acc = acc + log_int(p, prec) * Interval.exact(c, prec)
        return acc

    def as_rational_value(self, bit_limit: int = RATIONAL_BIT_LIMIT) -> Optional[Fraction]:
        """``exp`` of this form when it is a (not too large) rational."""
        if self.const != 0:
            return None
        num, den = 1, 1
        size = 0
        for p, c in self.terms:
            if c.denominator != 1:
                return None
            size += abs(c.numerator) * p.bit_length()
            if size > bit_limit:
                return None
            if c > 0:
                num *= p ** c.numerator
            else:
                den *= p ** (-c.numerator)
        return Fraction(num, den)

    def is_integer_valued(self) -> bool:
        """True when ``exp`` of the form is rational (no constant, integer powers)."""
        return self.const == 0 and all(c.denominator == 1 for _, c in self.terms)

    def pairs(self) -> list[tuple[int, Fraction]]:
        return list(self.terms)


Enclosure = Callable[[int], Interval]


class LogValue:
    """A strictly positive real, represented by its natural log."""

    __slots__ = ("_rational", "_rat_done", "_exact", "_exact_done", "_enc",
                 "_fixed", "precision_bits", "_cache")

    def __init__(self, *, rational: Optional[Fraction] = None,
                 exact: Optional[ExactLog] = None,
                 enclosure: Optional[Enclosure] = None,
                 fixed: Optional[Interval] = None,
                 precision_bits: int = DEFAULT_PREC):
        if rational is not None:
            rational = Fraction(rational)
            if rational <= 0:
                raise DomainError("LogValue must be strictly positive")
        if rational is None and exact is None and enclosure is None and fixed is None:
            raise DomainError("LogValue needs at least one representation")
        self._rational = rational
        self._rat_done = rational is not None or exact is None
        self._exact = exact
        self._exact_done = exact is not None or rational is None
        self._enc = enclosure
        self._fixed = fixed
        self.precision_bits = precision_bits
        self._cache: dict[int, Interval] = {}

    # constructors ----------------------------------------------------------
    @classmethod
    def of(cls, x: Rational) -> "LogValue":
        """The positive rational ``x``."""
        return cls(rational=Fraction(x))

    @classmethod
    def from_exact(cls, form: ExactLog) -> "LogValue":
        return cls(exact=form)

    @classmethod
    def exp_of(cls, x: Union[Rational, "LogValue"]) -> "LogValue":
        """The quantity ``e**x``; ``x`` may itself be a LogValue-held real."""
        if isinstance(x, LogValue):
            if x.rational is not None:
                return cls(exact=ExactLog(const=x.rational))
            return cls(enclosure=x.value_enclosure)
        return cls(exact=ExactLog(const=Fraction(x)))

    @classmethod
    def power(cls, base: Rational, exponent: Union[Rational, "LogValue"]) -> "LogValue":
        """``base ** exponent`` for a rational base > 0 and a positive exponent."""
        lb = ExactLog.of_rational(base)
        if isinstance(exponent, LogValue):
            if exponent.rational is not None:
                exponent = exponent.rational
                if lb is None:
                    q0 = exponent
                    return cls(enclosure=lambda prec: _log_rational(base, prec) * Interval.exact(q0, prec))
                return cls(exact=lb.scale(exponent))
            else:
                ex = exponent

                def enc(prec: int) -> Interval:
                    p = prec + ex.magnitude_bits()
                    return (ex.value_enclosure(p) * _log_rational(base, p)).with_prec(prec)
                return cls(enclosure=enc)
        if lb is None:
            q = Fraction(exponent)
            return cls(enclosure=lambda prec: _log_rational(base, prec) * Interval.exact(q, prec))
        return cls(exact=lb.scale(Fraction(exponent)))

    @classmethod
    def from_enclosure(cls, fn: Enclosure) -> "LogValue":
        return cls(enclosure=fn)

    @classmethod
    def from_ln_interval(cls, iv: Interval) -> "LogValue":
        """A value known only through a fixed enclosure of its log."""
        return cls(fixed=iv, precision_bits=iv.prec)

    # views -----------------------------------------------------------------
    @property
    def rational(self) -> Optional[Fraction]:
        """``v`` as a Fraction when it is rational and of manageable size."""
        if not self._rat_done:
            self._rat_done = True
            if self._exact.is_integer_valued():
                self._rational = self._exact.as_rational_value()
        return self._rational

    @property
    def exact_form(self) -> Optional[ExactLog]:
        if not self._exact_done:
            self._exact_done = True
            q = self._rational
            if q is not None and max(q.numerator.bit_length(), q.denominator.bit_length()) <= 4096:
                self._exact = ExactLog.of_rational(q)
        return self._exact

    def is_refinable(self) -> bool:
        return (self._rational is not None or self._exact is not None
                or self._enc is not None)

    def magnitude_bits(self) -> int:
        """Approximate bit length of ``|ln v|``."""
        x = abs(float(self.ln_enclosure(64).mid())) if self._fixed is None else abs(float(self._fixed.mid()))
        return 0 if x < 2 else int(math.log2(x)) + 1

    def ln_enclosure(self, prec: Optional[int] = None) -> Interval:
        """Enclosure of ``ln v`` with roughly ``prec`` bits of absolute accuracy."""
        prec = prec or self.precision_bits
        hit = self._cache.get(prec)
        if hit is not None:
            return hit
        if self._exact is not None:
            p = prec + self._exact.magnitude_bits()
            iv = self._exact.evaluate(p)
        elif self._rational is not None:
            q = self._rational
            p = prec + 8
            iv = _log_rational(q, p)
        elif self._enc is not None:
            iv = self._enc(prec)
        else:
            iv = self._fixed
        if len(self._cache) < 8:
            self._cache[prec] = iv
        return iv

    @property
    def ln(self):
        """Midpoint of the log enclosure at default precision (an mpf)."""
        return self.ln_enclosure().mid()

    def value_enclosure(self, prec: Optional[int] = None) -> Interval:
        """Enclosure of ``v`` itself with about ``prec`` relative bits."""
        prec = prec or self.precision_bits
        if self.rational is not None:
            return Interval.exact(self._rational, prec)
        extra = self.magnitude_bits()
        return self.ln_enclosure(prec + extra + 8).exp().with_prec(prec)

    # arithmetic ------------------------------------------------------------
    def __mul__(self, other: "LogValue") -> "LogValue":
        if not isinstance(other, LogValue):
            other = LogValue.of(other)
        if self._rational is not None and other._rational is not None:
            return LogValue(rational=self._rational * other._rational)
        a, b = self._exact_or_none(), other._exact_or_none()
        if a is not None and b is not None:
            return LogValue(exact=a + b)
        x, y = self, other
        return LogValue(enclosure=lambda prec: x.ln_enclosure(prec) + y.ln_enclosure(prec))

    __rmul__ = __mul__

    def __truediv__(self, other: "LogValue") -> "LogValue":
        if not isinstance(other, LogValue):
            other = LogValue.of(other)
        return self * other.inverse()

    def inverse(self) -> "LogValue":
        if self._rational is not None:
            return LogValue(rational=1 / self._rational)
        a = self._exact_or_none()
        if a is not None:
            return LogValue(exact=-a)
        x = self
        return LogValue(enclosure=lambda prec: -x.ln_enclosure(prec))

    def __pow__(self, q: Rational) -> "LogValue":
        q = Fraction(q)
        if self._rational is not None and q.denominator == 1 and q != 0:
            r = self._rational
            size = max(r.numerator.bit_length(), r.denominator.bit_length()) * abs(q.numerator)
            if size <= RATIONAL_BIT_LIMIT:
                return LogValue(rational=r ** q.numerator)
        a = self._exact_or_none()
        if a is not None:
            return LogValue(exact=a.scale(q))
        x = self
        return LogValue(enclosure=lambda prec: x.ln_enclosure(prec) * Interval.exact(q, prec))

    def _exact_or_none(self) -> Optional[ExactLog]:
        if self._exact is not None:
            return self._exact
        return self.exact_form

    # comparison ------------------------------------------------------------
    def cmp(self, other: "LogValue") -> int:
        """Return -1, 0 or 1; raises :class:`IndistinguishableError`."""
        if not isinstance(other, LogValue):
            other = LogValue.of(other)
        if self._rational is not None and other._rational is not None:
            return (self._rational > other._rational) - (self._rational < other._rational)
        a = self.ln_enclosure()
        b = other.ln_enclosure()
        if a.certainly_lt(b):
            return -1
        if a.certainly_gt(b):
            return 1
        ea, eb = self._exact_or_none(), other._exact_or_none()
        if ea is not None and eb is not None:
            diff = ea - eb
            if diff.is_zero():
                return 0
            base = diff.magnitude_bits()
            prec = DEFAULT_PREC
            while True:
                s = diff.evaluate(prec + base).sign()
                if s:
                    return s
                if prec >= MAX_PREC:
                    # unreachable for a non-zero form; kept as a guard
                    raise IndistinguishableError("exact forms differ but sign unresolved")
                prec *= 2
        if not (self.is_refinable() and other.is_refinable()):
            raise IndistinguishableError("overlapping enclosures that cannot be refined")
        prec = DEFAULT_PREC * 2
        while prec <= MAX_PREC:
            a = self.ln_enclosure(prec)
            b = other.ln_enclosure(prec)
            if a.certainly_lt(b):
                return -1
            if a.certainly_gt(b):
                return 1
            prec *= 2
        raise IndistinguishableError("values indistinguishable at maximum precision")

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __gt__(self, other):
        return self.cmp(other) > 0

    def __ge__(self, other):
        return self.cmp(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, (LogValue, int, Fraction)):
            return NotImplemented
        return self.cmp(other) == 0

    __hash__ = None  # type: ignore[assignment]

    def identical(self, other: "LogValue") -> bool:
        """Exact identity via rationals or normalised exact forms only."""
        if self.rational is not None and other.rational is not None:
            return self._rational == other._rational
        ea, eb = self._exact_or_none(), other._exact_or_none()
        return ea is not None and eb is not None and ea == eb

    # integer parts -----------------------------------------------------------
    def floor(self) -> int:
        """``floor(v)``, resolved exactly or by escalating precision."""
        if self.rational is not None:
            return math.floor(self._rational)
        prec = DEFAULT_PREC
        mag = self.magnitude_bits()
        # v has about e**ln bits; make sure the enclosure resolves units
        need = int(float(self.ln_enclosure(64).hi) / math.log(2)) + 1 if mag else 0
        prec = max(prec, need + 32)
        limit = max(MAX_PREC, need + MAX_PREC // 4)
        while prec <= limit:
            f = self.value_enclosure(prec).floor()
            if f is not None:
                return f
            prec *= 2
        raise IndistinguishableError("floor unresolved at maximum precision")

    def ceil(self) -> int:
        if self.rational is not None:
            return math.ceil(self._rational)
        f = self.floor()
        # v is irrational here unless the form says otherwise
        form = self._exact_or_none()
        if form is not None and form.is_integer_valued():
            q = form.as_rational_value(bit_limit=1 << 30)
            return math.ceil(q)
        return f + 1

    # misc ------------------------------------------------------------------
    def describe(self, digits: int = 30) -> dict:
        """JSON-ready view: ``{"ln": str, "exact_form": [[p, num, den], ...]}``."""
        iv = self.ln_enclosure()
        out = {"ln": _mid_str(iv, digits)}
        form = self._exact_or_none()
        if form is not None:
            out["exact_form"] = [[p, c.numerator, c.denominator] for p, c in form.terms]
            if form.const != 0:
                out["const"] = [form.const.numerator, form.const.denominator]
        return out

    def __repr__(self) -> str:
        if self._rational is not None and self._rational.numerator.bit_length() < 64:
            return f"LogValue({self._rational})"
        return f"LogValue(ln~{_mid_str(self.ln_enclosure(), 12)})"


def _mid_str(iv: Interval, digits: int) -> str:
    from mpmath.libmp import to_str
    return to_str(iv.mid()._mpf_, digits)


def _log_rational(q: Rational, prec: int) -> Interval:
    q = Fraction(q)
    out = log_int(q.numerator, prec) if q.numerator > 1 else Interval.exact(0, prec)
    if q.denominator > 1:
        out = out - log_int(q.denominator, prec)
    return out


ONE = LogValue.of(1)
