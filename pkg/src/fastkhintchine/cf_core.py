"""Exact continued-fraction machinery.

Gauss-map expansion of rationals, continuants and cylinders with exact
rational endpoints, partial quotients that may be too large to write down,
and Birkhoff sums of ``log a_k`` with certified error.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from .errors import DomainError
from .interval import DEFAULT_PREC, Interval, log_int
from .logvalue import LogValue

#: quotients whose log exceeds this are stored symbolically (4096-bit cap)
EXACT_LOG_THRESHOLD = 4096 * math.log(2)
#: smallest exponent admitted for a symbolic quotient
T_MIN = 1
#: Khintchine's constant K0 = 2.6854...
KHINTCHINE_LOG = math.log(2.6854520010653064)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise DomainError(f"expected an exact rational, got {type(x).__name__}")


# -- Gauss map ---------------------------------------------------------------

def gauss_step(x) -> tuple[int, Fraction]:
    """One application of the Gauss map: ``(floor(1/x), 1/x - floor(1/x))``."""
    x = _as_fraction(x)
    if not 0 < x < 1:
        raise DomainError(f"gauss_step needs 0 < x < 1, got {x}")
    inv = 1 / x
    a = inv.numerator // inv.denominator
    return a, inv - a


def cf_expand(x, max_terms: Optional[int] = None) -> list[int]:
    """Partial quotients of a rational in (0, 1), canonical form.

    The division form of Euclid's algorithm always ends on a quotient >= 2,
    which is the canonical expansion.
    """
    x = _as_fraction(x)
    if not 0 < x < 1:
        raise DomainError(f"cf_expand needs 0 < x < 1, got {x}")
    p, q = x.numerator, x.denominator
    out: list[int] = []
    while p and (max_terms is None or len(out) < max_terms):
        a, r = divmod(q, p)
        out.append(a)
        p, q = r, p
    return out


def euclid_subtractive(p: int, q: int) -> list[int]:
    """Reference expansion of p/q by repeated subtraction only."""
    if not 0 < p < q:
        raise DomainError("need 0 < p < q")
    out = []
    num, den = q, p
    while den:
        a = 0
        while num >= den:
            num -= den
            a += 1
        out.append(a)
        num, den = den, num
    return out


def cf_value(quotients: Sequence[int]) -> Fraction:
    """Fold ``[a1, ..., am]`` back into ``1/(a1 + 1/(a2 + ...))``."""
    if not quotients:
        raise DomainError("empty expansion")
    _, _, p, q = continuants(quotients)
    return Fraction(p, q)


# -- continuants and cylinders -------------------------------------------------

def continuants(word: Sequence[int]) -> tuple[int, int, int, int]:
    """Return ``(p_{n-1}, q_{n-1}, p_n, q_n)`` for the word.

    Uses ``p_n = s_n p_{n-1} + p_{n-2}`` with ``p_0 = 0, q_0 = 1`` and
    ``p_{-1} = 1, q_{-1} = 0``.
    """
    pp, qp = 1, 0
    p, q = 0, 1
    for s in word:
        pp, qp, p, q = p, q, s * p + pp, s * q + qp
    return pp, qp, p, q


@dataclass(frozen=True)
class Cylinder:
    """The order-n cylinder ``I_n(s1, ..., sn)``."""

    word: tuple[int, ...]
    p_prev: int
    q_prev: int
    p_n: int
    q_n: int

    @property
    def n(self) -> int:
        return len(self.word)

    @property
    def endpoints(self) -> tuple[Fraction, Fraction]:
        """``(p_n/q_n, (p_n+p_{n-1})/(q_n+q_{n-1}))``; order alternates with n."""
        return (Fraction(self.p_n, self.q_n),
                Fraction(self.p_n + self.p_prev, self.q_n + self.q_prev))

    @property
    def lower(self) -> Fraction:
        return min(self.endpoints)

    @property
    def upper(self) -> Fraction:
        return max(self.endpoints)

    @property
    def length(self) -> Fraction:
        return Fraction(1, self.q_n * (self.q_n + self.q_prev))

    def contains(self, x: Fraction) -> bool:
        return self.lower <= x <= self.upper


def make_cylinder(word: Iterable[int]) -> Cylinder:
    word = tuple(int(s) for s in word)
    if not word:
        raise DomainError("cylinder word must be non-empty")
    if any(s < 1 for s in word):
        raise DomainError(f"cylinder digits must be >= 1, got {word}")
    pp, qp, p, q = continuants(word)
    return Cylinder(word, pp, qp, p, q)


# -- partial quotients -----------------------------------------------------------

@dataclass(frozen=True)
class PartialQuotient:
    """Either an exact integer or ``floor(e**t)`` kept through ``e**t``.

    For the symbolic kind, ``target`` is the LogValue of ``e**t`` (so its
    log is ``t``) and ``log a`` lies in ``[t - eta(t), t]`` with
    ``eta(t) = -log(1 - e**-t) <= 2 e**-t`` once ``t >= 1``.
    """

    value: Optional[int] = None
    target: Optional[LogValue] = None

    def __post_init__(self):
        if (self.value is None) == (self.target is None):
            raise DomainError("exactly one of value/target must be given")
        if self.value is not None and self.value < 1:
            raise DomainError(f"partial quotient must be >= 1, got {self.value}")
        if self.target is not None and not self.target.ln_enclosure().certainly_ge(T_MIN):
            raise DomainError("symbolic quotient needs t >= 1")

    @classmethod
    def exact(cls, a: int) -> "PartialQuotient":
        return cls(value=int(a))

    @classmethod
    def floor_of(cls, target: LogValue) -> "PartialQuotient":
        """``floor(target)``, materialised when it fits in 4096 bits."""
        t = target.ln_enclosure()
        if t.hi <= EXACT_LOG_THRESHOLD:
            return cls(value=target.floor())
        return cls(target=target)

    @property
    def is_exact(self) -> bool:
        return self.value is not None

    def log_bounds(self, prec: int = DEFAULT_PREC) -> Interval:
        """Enclosure of ``log a``."""
        if self.value is not None:
            if self.value == 1:
                return Interval.exact(0, prec)
            return log_int(self.value, prec)
        t = self.target.ln_enclosure(prec)
        eta = (Interval.exact(0, prec) - Interval.from_mpf(t.lo, t.lo, prec)).exp() * 2
        lo = Interval.from_mpf(t.lo, t.lo, prec) - eta
        return Interval(lo.raw[0], t.raw[1], prec)

    def as_logvalue(self) -> LogValue:
        if self.value is not None:
            return LogValue.of(self.value)
        return LogValue.from_enclosure(self.log_bounds)

    def __repr__(self) -> str:
        if self.value is not None:
            return f"PQ({self.value})" if self.value.bit_length() < 64 else f"PQ(<{self.value.bit_length()} bits>)"
        return f"PQ(floor(e^{self.target.ln_enclosure(64).mid()}))"


QuotientLike = Union[int, PartialQuotient]


def _pq(x: QuotientLike) -> PartialQuotient:
    return x if isinstance(x, PartialQuotient) else PartialQuotient.exact(x)


class CFPoint:
    """A point of (0, 1) given by its partial quotients, materialised lazily."""

    def __init__(self, quotients: Optional[Iterable[QuotientLike]] = None, *,
                 source: tuple = ("constructed", "anonymous"),
                 finite: bool = False):
        self.source = source
        self._finite = finite
        self._gen: Optional[Iterator] = iter(quotients) if quotients is not None else iter(())
        self._prefix: list[PartialQuotient] = []
        self._lock = threading.Lock()

    @classmethod
    def from_rational(cls, x) -> "CFPoint":
        x = _as_fraction(x)
        return cls(cf_expand(x), source=("rational", x), finite=True)

    @classmethod
    def from_quotients(cls, quotients: Iterable[QuotientLike], gen_id: str = "list") -> "CFPoint":
        return cls(list(quotients), source=("constructed", gen_id))

    @classmethod
    def from_generator(cls, gen: Iterator[QuotientLike], gen_id: str) -> "CFPoint":
        return cls(gen, source=("constructed", gen_id))

    def prefix(self, n: int) -> list[PartialQuotient]:
        """The first ``n`` quotients (fewer only for a finished rational)."""
        with self._lock:
            while len(self._prefix) < n and self._gen is not None:
                try:
                    self._prefix.append(_pq(next(self._gen)))
                except StopIteration:
                    self._gen = None
            return self._prefix[:n]

    def quotient(self, n: int) -> PartialQuotient:
        pre = self.prefix(n)
        if len(pre) < n:
            raise DomainError(f"point has only {len(pre)} partial quotients")
        return pre[n - 1]

    def exact_prefix(self, n: int) -> list[int]:
        out = []
        for pq in self.prefix(n):
            if not pq.is_exact:
                raise DomainError("prefix contains a symbolic quotient")
            out.append(pq.value)
        return out

    @property
    def value(self) -> Optional[Fraction]:
        if self.source[0] == "rational":
            return self.source[1]
        return None

    def __repr__(self) -> str:
        head = self.prefix(5)
        return f"CFPoint(source={self.source[0]}, prefix={head})"


# -- Birkhoff sums -------------------------------------------------------------

def birkhoff_series(x: CFPoint, n: int) -> list[LogValue]:
    """``Pi_m = a_1 ... a_m`` as LogValues for ``m = 1..n``."""
    pre = x.prefix(n)
    if len(pre) < n:
        raise DomainError(f"point has only {len(pre)} partial quotients, asked for {n}")
    out: list[LogValue] = []
    prod = 1
    symbolic: list[PartialQuotient] = []
    for pq in pre:
        if pq.is_exact:
            prod *= pq.value
        else:
            symbolic.append(pq)
        if not symbolic:
            out.append(LogValue.of(prod))
        else:
            out.append(_mixed_product(prod, tuple(symbolic)))
    return out


def _mixed_product(prod: int, symbolic: tuple) -> LogValue:
    def enc(prec: int) -> Interval:
        acc = log_int(prod, prec) if prod > 1 else Interval.exact(0, prec)
        for pq in symbolic:
            acc = acc + pq.log_bounds(prec)
        return acc
    return LogValue.from_enclosure(enc)


def birkhoff_log_sum(x: CFPoint, n: int) -> LogValue:
    """``log a_1 + ... + log a_n`` returned as the LogValue of ``Pi_n``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return birkhoff_series(x, n)[-1]


def khintchine_estimate(x: CFPoint, n: int, prec: int = DEFAULT_PREC) -> Interval:
    """Rigorous enclosure of ``(1/n) sum log a_k``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return birkhoff_log_sum(x, n).ln_enclosure(prec) / n


def khintchine_monte_carlo(samples: int, n: int, seed: int = 0) -> tuple[float, float]:
    """Mean and standard error of ``(1/n) sum log a_k`` over uniform seeds.

    The orbits are run in double precision, vectorised across seeds.  Past
    the first ~15 steps the floating orbit is no longer the exact orbit of
    the seed, but its statistics follow the Gauss measure, which is all
    this estimate needs.  An orbit that lands exactly on 0 is restarted
    from a fresh uniform draw.
    """
    rng = np.random.default_rng(seed)
    x = rng.random(samples)
    x[x == 0] = 0.5
    acc = np.zeros(samples)
    for _ in range(n):
        inv = 1.0 / x
        a = np.floor(inv)
        acc += np.log(a)
        x = inv - a
        dead = x <= 0
        if dead.any():
            x[dead] = np.maximum(rng.random(int(dead.sum())), 1e-300)
    means = acc / n
    return float(means.mean()), float(means.std(ddof=1) / math.sqrt(samples))
