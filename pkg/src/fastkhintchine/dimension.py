"""Closed-form dimension values, the covering-sum chain, and set-membership predicates."""

from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .cf_core import CFPoint, birkhoff_series, continuants
from .errors import BudgetError, DomainError, GateError, PreconditionError
from .growth import GrowthFunction, eval_psi
from .interval import DEFAULT_PREC, Interval
from .logvalue import LogValue

Real = Union[int, Fraction, float]
INF = math.inf


# -- closed forms --------------------------------------------------------------

@dataclass
class DimFormulas:
    dim_upper: Fraction       # 1/(b+1)
    dim_lower: Fraction       # 1/(B+1)
    dim_full: Fraction        # 1/(beta+1)
    clamped: list[str] = field(default_factory=list)

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return self.dim_upper, self.dim_lower, self.dim_full


def _recip_plus_one(x) -> Fraction:
    if x == INF:
        return Fraction(0)
    return 1 / (Fraction(x) + 1)


def dim_formulas(b, B, beta, override: bool = False) -> DimFormulas:
    """``(1/(b+1), 1/(B+1), 1/(beta+1))`` with infinity mapped to 0.

    Exponents below 1 are clamped to 1 and reported in ``clamped``.
    """
    vals = {}
    clamped = []
    for name, v in (("b", b), ("B", B), ("beta", beta)):
        if v != INF:
            v = Fraction(v) if not isinstance(v, float) else Fraction(str(v))
            if v < 1:
                clamped.append(name)
                v = Fraction(1)
        vals[name] = v
    order = [vals["b"], vals["B"], vals["beta"]]
    if not override and not (order[0] <= order[1] <= order[2]):
        raise DomainError(f"need b <= B <= beta, got {order}")
    return DimFormulas(*(_recip_plus_one(v) for v in order), clamped=clamped)


@dataclass
class RatioDimEstimate:
    value: Interval
    sup_ratio: Interval
    ratio_series: list[Interval]
    window: tuple[int, int]


def ratio_dim_estimate(ts, depth: int) -> RatioDimEstimate:
    """``(2 + sup_{[depth/2, depth]} log s_{n+1} / sum_{k<=n} log s_k)**-1``."""
    from .constructions import _as_iv
    if depth < 2:
        raise DomainError("depth must be >= 2")
    if not ts.check_divergence(depth):
        raise PreconditionError("(sum log s_k)/n is not increasing at this depth")
    sums = ts.partial_log_sums(depth)
    ratios = []
    for n in range(1, depth + 1):
        denom = _as_iv(sums[n - 1])
        if denom.contains_zero():
            ratios.append(None)
            continue
        ratios.append(ts.log_s(n + 1) / denom)
    lo = max(1, depth // 2)
    window = [r for r in ratios[lo - 1:] if r is not None]
    if not window:
        raise PreconditionError("all partial sums vanish in the tail window")
    from .growth import _max_iv
    sup = _max_iv(window)
    return RatioDimEstimate(Interval.exact(1) / (sup + 2), sup, ratios, (lo, depth))


# -- zeta enclosures and the covering chain ------------------------------------

@lru_cache(maxsize=32)
def zeta_enclosure(sigma: Fraction, J: int = 10_000, prec: int = DEFAULT_PREC) -> Interval:
    """``sum_{j>=1} j**-sigma`` for rational ``sigma > 1``.

    Partial sum to ``J`` plus the integral tail, which lies between the
    integrals from ``J+1`` and from ``J`` of ``t**-sigma``.
    """
    sigma = Fraction(sigma)
    if sigma <= 1:
        raise DomainError("zeta enclosure needs sigma > 1")
    s = Interval.exact(sigma, prec)
    acc = Interval.exact(1, prec)
    for j in range(2, J + 1):
        acc = acc + (Interval.exact(j, prec).log() * (-s)).exp()
    e = sigma - 1
    tail_lo = (Interval.exact(J + 1, prec).log() * Interval.exact(-e, prec)).exp() / Interval.exact(e, prec)
    tail_hi = (Interval.exact(J, prec).log() * Interval.exact(-e, prec)).exp() / Interval.exact(e, prec)
    return Interval((acc + tail_lo).raw[0], (acc + tail_hi).raw[1], prec)


@dataclass
class CoveringParams:
    epsilon: Fraction
    K: Fraction
    J: int = 10_000
    n_start: int = 1
    M_eps: Interval = field(init=False)

    def __post_init__(self):
        self.epsilon = Fraction(self.epsilon)
        self.K = Fraction(self.K)
        if not 0 < self.epsilon < 1:
            raise DomainError("epsilon must lie in (0, 1)")
        if self.K <= 1:
            raise DomainError("K must be > 1")
        self.M_eps = zeta_enclosure(1 + self.epsilon, self.J)

    @property
    def s(self) -> Fraction:
        return Fraction(1, 2) + self.epsilon

    def K_eps(self, prec: int = DEFAULT_PREC) -> Interval:
        return (Interval.exact(self.K, prec).log() * Interval.exact(self.epsilon, prec)).exp()

    @property
    def gate_ok(self) -> bool:
        """``K**eps > 2 M_eps``, certified with the upper end of the M enclosure."""
        return self.K_eps().certainly_gt(self.M_eps * 2)


@dataclass
class CoveringBound:
    bound: Interval                 # sum_{n>=N} (M/K^eps)^n
    coarse: Fraction                # 2^(-N+1)
    ratio: Interval                 # M/K^eps
    terms: list[Interval]           # chain terms for n = N .. N+len-1
    chain_ok: bool
    N: int


def covering_bound(params: CoveringParams, N: int, n_terms: int = 8) -> CoveringBound:
    """Tail of the geometric chain ``term_n <= K**(-eps n) M**n <= 2**-n``."""
    if N < 1:
        raise DomainError("N must be >= 1")
    if not params.gate_ok:
        raise GateError(f"K^eps = {float(params.K_eps().mid()):.6g} does not exceed "
                        f"2 M = {float((params.M_eps * 2).hi):.6g}")
    r = params.M_eps / params.K_eps()
    terms = [_ipow(r, n) for n in range(N, N + n_terms)]
    chain_ok = all(t.certainly_le(Fraction(1, 2 ** n)) for n, t in zip(range(N, N + n_terms), terms))
    bound = _ipow(r, N) / (Interval.exact(1) - r)
    return CoveringBound(bound, Fraction(1, 2 ** (N - 1)), r, terms, chain_ok, N)


def chain_term(params: CoveringParams, n: int) -> Interval:
    return _ipow(params.M_eps / params.K_eps(), n)


def _ipow(x: Interval, n: int) -> Interval:
    out = Interval.exact(1, x.prec)
    for _ in range(n):
        out = out * x
    return out


WORD_BUDGET = 10_000_000


def brute_covering_term(n: int, K: Real, s: Real, sigma_cap: int,
                        budget: int = WORD_BUDGET, last_cap: int = 10_000,
                        exact: bool = False) -> Union[Interval, Fraction]:
    """Enclosure of ``sum |I_n(w)|**s`` over words with ``prod w >= K**n``.

    Prefixes ``w_1..w_{n-1}`` are enumerated up to ``sigma_cap``; for each
    prefix the admissible last digits ``w_n >= m0`` are summed exactly when
    ``s = 1`` (their cylinders tile a single interval) and otherwise summed
    to ``m0 + last_cap`` with a tail bound.  Prefixes with a digit above
    ``sigma_cap`` are covered by a tail bound as well.

    With ``exact=True`` (only for ``n = 1, s = 1``, where nothing is
    truncated) the sum is returned as a rational.
    """
    if exact and not (n == 1 and Fraction(s) == 1):
        raise DomainError("an exact covering term is only available for n = 1, s = 1")
    if not 1 <= n <= 4:
        raise DomainError("brute covering term supports 1 <= n <= 4")
    K, s = Fraction(K), Fraction(s)
    if s <= Fraction(1, 2):
        raise DomainError("s must exceed 1/2")
    if sigma_cap ** (n - 1) > budget:
        raise BudgetError(f"{sigma_cap}^{n - 1} prefixes exceed the budget of {budget}")
    threshold = K ** n
    prec = DEFAULT_PREC
    total_exact = Fraction(0)
    total_iv = Interval.exact(0, prec)
    two_s = 2 * s

    def prefixes(depth):
        if depth == 0:
            yield ()
            return
        for head in prefixes(depth - 1):
            for d in range(1, sigma_cap + 1):
                yield head + (d,)

    for w in prefixes(n - 1):
        P = math.prod(w)
        m0 = max(1, math.ceil(threshold / P))
        pp, qp, p, q = continuants(w)
        if s == 1:
            # union of I_n(w, m) for m >= m0 has length 1/(q (m0 q + q_prev))
            total_exact += Fraction(1, q * (m0 * q + qp))
            continue
        for m in range(m0, m0 + last_cap):
            qn = m * q + qp
            L = Interval.exact(Fraction(1, qn * (qn + q)), prec)
            total_iv = total_iv + (L.log() * Interval.exact(s, prec)).exp()
        # tail: |I| <= (m q)^-2, sum_{m >= M} m^-2s <= M^(1-2s)/(2s-1)
        M = m0 + last_cap
        tail = (Interval.exact(Fraction(M), prec).log() * Interval.exact(1 - two_s, prec)).exp()
        tail = tail / Interval.exact(two_s - 1, prec)
        tail = tail * (Interval.exact(q, prec).log() * Interval.exact(-two_s, prec)).exp()
        total_iv = Interval(total_iv.raw[0], (total_iv + tail).raw[1], prec)
    if exact:
        return total_exact
    total = Interval.exact(total_exact, prec) + total_iv if s == 1 else total_iv
    if n > 1:
        # words with some leading digit above the cap: |I| <= prod w^-2s
        z = zeta_enclosure(two_s, 2_000, prec)
        cap_tail = (Interval.exact(sigma_cap, prec).log() * Interval.exact(1 - two_s, prec)).exp()
        cap_tail = cap_tail / Interval.exact(two_s - 1, prec) * (n - 1) * _ipow(z, n - 1)
        total = Interval(total.raw[0], (total + cap_tail).raw[1], prec)
    return total


# -- membership predicates -------------------------------------------------------

@dataclass
class SetPredicateParams:
    a: Fraction
    c: Fraction
    A: Fraction = Fraction(2)

    def __post_init__(self):
        self.a, self.c, self.A = Fraction(self.a), Fraction(self.c), Fraction(self.A)
        if min(self.a, self.c, self.A) <= 1:
            raise DomainError("a, c and A must all exceed 1")


@dataclass
class DoublyExpReport:
    quotient_flags: list[bool]
    product_flags: list[bool]
    quotient_count: int
    product_count: int


def _doubly_exp(a: Fraction, c: Fraction, n: int) -> LogValue:
    return LogValue.power(a, c ** n)


def membership_doubly_exp(x: CFPoint, params: SetPredicateParams, n_max: int) -> DoublyExpReport:
    """Flags ``a_n >= a**(c**n)`` and ``Pi_n >= a**(c**n)`` for ``n = 1..n_max``."""
    prods = birkhoff_series(x, n_max)
    qf, pf = [], []
    for n in range(1, n_max + 1):
        thr = _doubly_exp(params.a, params.c, n)
        qf.append(x.quotient(n).as_logvalue() >= thr)
        pf.append(prods[n - 1] >= thr)
    return DoublyExpReport(qf, pf, sum(qf), sum(pf))


@dataclass
class InclusionReport:
    applicable: bool
    N: Optional[int]
    holds: bool
    violations: list[int]


def inclusion_check_pac(x: CFPoint, a: Real, c: Real, eps: Real, n_max: int) -> InclusionReport:
    """If ``a_n < a**((c-eps)**n)`` on ``(N, n_max]``, check
    ``Pi_n < Pi_N * a**((c-eps)**(n+1) / (c-eps-1))`` there.

    ``N`` is the last index in ``1..n_max`` where the hypothesis fails
    (``0`` if it never does); with ``N = n_max`` nothing is left to test.
    """
    a, c, eps = Fraction(a), Fraction(c), Fraction(eps)
    if not 0 < eps < c - 1:
        raise DomainError("need 0 < eps < c - 1")
    d = c - eps
    prods = birkhoff_series(x, n_max)
    N = 0
    for n in range(1, n_max + 1):
        if x.quotient(n).as_logvalue() >= LogValue.power(a, d ** n):
            N = n
    if N == n_max:
        return InclusionReport(False, N, True, [])
    base = prods[N - 1] if N > 0 else LogValue.of(1)
    bad = []
    for n in range(N + 1, n_max + 1):
        bound = base * LogValue.power(a, d ** (n + 1) / (d - 1))
        if not prods[n - 1] < bound:
            bad.append(n)
    return InclusionReport(True, N, not bad, bad)


@dataclass
class FastRatioReport:
    ratios: list[Interval]
    tail_sup: Interval
    tail_inf: Interval
    threshold_flags: Optional[list[bool]]


def membership_fast_ratio(x: CFPoint, g: GrowthFunction, n_max: int,
                          A: Optional[Real] = None) -> FastRatioReport:
    """``sum_{k<=n} log a_k / psi(n)`` with tail sup/inf over ``[n_max/2, n_max]``.

    With ``A`` given, also flags ``Pi_n >= A**psi(n)``.
    """
    from .growth import _max_iv, _min_iv
    prods = birkhoff_series(x, n_max)
    ratios = []
    flags = [] if A is not None else None
    for n in range(1, n_max + 1):
        psi = eval_psi(g, n)
        ratios.append(prods[n - 1].ln_enclosure() / psi.value_enclosure())
        if flags is not None:
            flags.append(prods[n - 1] >= LogValue.power(Fraction(A), psi))
    tail = ratios[max(0, n_max // 2 - 1):]
    return FastRatioReport(ratios, _max_iv(tail), _min_iv(tail), flags)
