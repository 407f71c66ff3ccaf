"""Explicit constructions: alpha blocks, witness points, the B_n and T_j sequences,
and the Cantor-type sampler for prescribed partial-quotient sizes.

Every quantity that can be astronomically large (``e**psi(n)``, ``B_n``,
``T_j``) is handled through its logarithm: ``log B_n`` and ``log T_j`` are
stored as :class:`LogValue` objects whose *value* is the logarithm.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

from .cf_core import CFPoint, PartialQuotient, birkhoff_series
from .errors import (AssertionFailure, BudgetError, DomainError, HorizonError,
                     PreconditionError)
from .growth import (MAX_PREFIX, MIN_TAIL, GrowthFunction, envelope, eval_psi,
                     exponents)
from .interval import DEFAULT_PREC, Interval, log_int
from .logvalue import ExactLog, LogValue

UPPER_LIMSUP = "UpperLimsup"
LOWER_LIMINF = "LowerLiminf"

Number = Union[int, Fraction]


# -- traces --------------------------------------------------------------------

@dataclass
class ConstructionTrace:
    """Per-index records of a construction plus its checked properties."""

    kind: str
    params: dict
    records: list[dict] = field(default_factory=list)
    properties: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def check(self, name: str, passed: bool, witness=None, detail: Optional[str] = None) -> bool:
        entry = {"name": name, "passed": bool(passed)}
        if not passed:
            entry["witness"] = witness
        if detail:
            entry["detail"] = detail
        self.properties.append(entry)
        return passed

    @property
    def all_passed(self) -> bool:
        return all(p["passed"] for p in self.properties)

    def failed(self) -> list[dict]:
        return [p for p in self.properties if not p["passed"]]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": self.params, "records": self.records,
                "properties": self.properties, "summary": self.summary}


def _float(iv: Interval) -> float:
    return float(iv.mid())


def _iv_pair(iv: Interval) -> list[str]:
    a, b = iv.to_strings(17)
    return [a, b]


def _real_difference(a: LogValue, b: Optional[LogValue]) -> Optional[Fraction]:
    """``value(a) - value(b)`` when both values are known rationals."""
    ra = a.rational
    if ra is None:
        return None
    if b is None:
        return ra
    rb = b.rational
    return None if rb is None else ra - rb


def _value_iv(v: LogValue, prec: int = DEFAULT_PREC) -> Interval:
    return v.value_enclosure(prec)


# -- alpha plan ----------------------------------------------------------------

@dataclass
class AlphaPlan:
    n_k: list[int]            # n_k[k-1] is n_k for k >= 1
    alpha: list[int]          # alpha[n-1] is alpha_n
    log_alpha_sum: list[Interval]
    ratio_series: list[Interval]
    horizon: int

    def alpha_at(self, n: int) -> int:
        return self.alpha[n - 1]


def build_alpha_plan(g: GrowthFunction, n_max: int, horizon: Optional[int] = None,
                     k_max: Optional[int] = None) -> AlphaPlan:
    """Blocks ``n_k`` with ``psi(n)/n >= k**2`` for all ``n >= n_k`` up to the horizon.

    ``n_k`` is the least index from which the threshold persists through
    ``horizon`` (default ``2*n_max``), pushed up if needed to keep the
    sequence strictly increasing.  ``alpha_n = k+1`` on ``[n_k, n_{k+1})``
    and ``alpha_n = 1`` before ``n_1``.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    H = horizon or 2 * n_max
    if H < n_max:
        raise DomainError("horizon must be >= n_max")
    rate = [eval_psi(g, n) / n for n in range(1, H + 1)]
    suffix = [None] * H
    cur = rate[-1]
    for i in range(H - 1, -1, -1):
        if rate[i] < cur:
            cur = rate[i]
        suffix[i] = cur
    n_k: list[int] = []
    k = 1
    start = 1
    while True:
        target = LogValue.of(k * k)
        found = None
        for n in range(start, n_max + 1):
            if suffix[n - 1] >= target:
                found = n
                break
        if found is None:
            break
        n_k.append(found)
        start = found + 1
        k += 1
    if k_max is not None and len(n_k) < k_max:
        raise HorizonError(f"threshold k^2 for k={len(n_k) + 1} not reached within n_max={n_max}")
    alpha = []
    for n in range(1, n_max + 1):
        # number of thresholds already passed
        kk = sum(1 for m in n_k if m <= n)
        alpha.append(kk + 1)
    sums, ratios = [], []
    acc = Interval.exact(0)
    for n in range(1, n_max + 1):
        if alpha[n - 1] > 1:
            acc = acc + log_int(alpha[n - 1], DEFAULT_PREC)
        sums.append(acc)
        ratios.append(acc / _value_iv(eval_psi(g, n)))
    return AlphaPlan(n_k, alpha, sums, ratios, H)


# -- witness points ------------------------------------------------------------

@dataclass
class WitnessPoint:
    mode: str
    envelope_kind: str
    alpha: list[int]
    phi_hat_increments: list[LogValue]   # e**(phi_hat(n) - phi_hat(n-1))
    point: CFPoint
    ratio_series: list[Interval]
    sandwich: list[tuple[Interval, Interval]]
    touch_indices: list[int]
    tail_sup: Interval
    tail_inf: Interval
    max_width: float
    trace: ConstructionTrace


def build_witness(g: GrowthFunction, mode: str, n_max: int, alpha_mode: str = "plan",
                  horizon: Optional[int] = None) -> WitnessPoint:
    """Point whose Birkhoff sums follow the envelope of ``psi``.

    UpperLimsup uses the MinTail envelope and the alpha plan; LowerLiminf
    uses the MaxPrefix envelope with ``alpha = 1``.  ``alpha_mode="one"``
    forces ``alpha = 1`` in either mode (diagnostic).
    """
    if mode == UPPER_LIMSUP:
        kind = MIN_TAIL
    elif mode == LOWER_LIMINF:
        kind = MAX_PREFIX
    else:
        raise DomainError(f"unknown witness mode {mode!r}")
    env = envelope(g, kind, n_max, horizon=horizon,
                   allow_flagged=horizon is not None)
    if mode == UPPER_LIMSUP and alpha_mode == "plan":
        alpha = build_alpha_plan(g, n_max).alpha
    elif alpha_mode in ("plan", "one"):
        alpha = [1] * n_max
    else:
        raise DomainError(f"unknown alpha mode {alpha_mode!r}")

    trace = ConstructionTrace("witness", {"growth": g.name, "mode": mode, "n_max": n_max,
                                          "alpha_mode": alpha_mode})
    increments: list[LogValue] = []
    quotients: list[PartialQuotient] = []
    prev: Optional[LogValue] = None
    for n in range(1, n_max + 1):
        cur = env.at(n)
        if prev is not None and cur < prev:
            raise AssertionFailure(f"envelope decreased at n={n}")
        d = _real_difference(cur, prev)
        if d is not None:
            form = ExactLog(const=d) + ExactLog.from_bases([(alpha[n - 1], 1)])
            target = LogValue.from_exact(form)
        else:
            target = _closure_increment(cur, prev, alpha[n - 1])
        increments.append(target)
        quotients.append(PartialQuotient.floor_of(target))
        prev = cur
    point = CFPoint.from_quotients(quotients, gen_id=f"witness:{g.name}:{mode}:{alpha_mode}")

    prods = birkhoff_series(point, n_max)
    ratios, sandwich = [], []
    sandwich_bad = None
    loss = Interval.exact(0)
    log_alpha = Interval.exact(0)
    width = 0.0
    for n in range(1, n_max + 1):
        psi_iv = _value_iv(eval_psi(g, n))
        r = prods[n - 1].ln_enclosure() / psi_iv
        ratios.append(r)
        width = max(width, float(r.width()))
        loss = loss + _floor_loss(quotients[n - 1])
        if alpha[n - 1] > 1:
            log_alpha = log_alpha + log_int(alpha[n - 1], DEFAULT_PREC)
        env_iv = _value_iv(env.at(n))
        sandwich.append(((env_iv - loss) / psi_iv, (env_iv + log_alpha) / psi_iv))
        # unnormalised check at enough precision to resolve O(1) terms
        p = DEFAULT_PREC + env.at(n).magnitude_bits() + int(float(env_iv.hi)).bit_length()
        S = prods[n - 1].ln_enclosure(p)
        E = env.at(n).value_enclosure(p)
        if sandwich_bad is None and (S.certainly_lt(E - loss) or S.certainly_gt(E + log_alpha)):
            sandwich_bad = n
        trace.records.append({"n": n, "alpha": alpha[n - 1],
                              "quotient": _describe_pq(quotients[n - 1]),
                              "ratio": _iv_pair(r)})

    tail_lo = max(1, n_max // 2)
    touches = [t for t in env.touch_indices if t >= tail_lo]
    if mode == UPPER_LIMSUP:
        pool = [ratios[t - 1] for t in touches] or ratios[tail_lo - 1:]
    else:
        pool = ratios[tail_lo - 1:]
    tail_sup = _sup(pool)
    tail_inf = _inf(ratios[tail_lo - 1:])

    trace.check("quotients >= 1", all(q.is_exact is False or q.value >= 1 for q in quotients))
    trace.check("ratio within floor-loss/alpha sandwich", sandwich_bad is None, sandwich_bad)
    if alpha_mode == "one" or mode == LOWER_LIMINF:
        # floors only lose mass relative to the envelope
        bad = next((n for n in range(1, n_max + 1)
                    if prods[n - 1].ln_enclosure().certainly_gt(_value_iv(env.at(n)))), None)
        trace.check("Birkhoff sum <= envelope", bad is None, bad)
    trace.summary = {"tail_sup": _iv_pair(tail_sup), "tail_inf": _iv_pair(tail_inf),
                     "max_width": width, "touches_in_tail": len(touches)}
    return WitnessPoint(mode, kind, alpha, increments, point, ratios, sandwich,
                        env.touch_indices, tail_sup, tail_inf, width, trace)


def _closure_increment(cur: LogValue, prev: Optional[LogValue], alpha: int) -> LogValue:
    def enc(prec: int) -> Interval:
        p = prec + 16 + cur.magnitude_bits()
        d = cur.value_enclosure(p)
        if prev is not None:
            d = d - prev.value_enclosure(p)
        if alpha > 1:
            d = d + log_int(alpha, p)
        return d.with_prec(prec)
    return LogValue.from_enclosure(enc)


def _floor_loss(pq: PartialQuotient, prec: int = DEFAULT_PREC) -> Interval:
    """Upper enclosure of ``log(1 + 1/a)``, which bounds ``t - log floor(e**t)``."""
    if pq.is_exact:
        return log_int(pq.value + 1, prec) - log_int(pq.value, prec)
    t = pq.target.ln_enclosure(prec)
    # a >= e**t - 1 >= e**t / 2 once t >= 1, so 1/a <= 2 e**-t
    bound = (Interval.exact(0, prec) - Interval(t.raw[0], t.raw[0], prec)).exp() * 2
    return Interval(Interval.exact(0, prec).raw[0], bound.raw[1], prec)


def _describe_pq(pq: PartialQuotient):
    if pq.is_exact:
        v = pq.value
        return v if v.bit_length() <= 53 else {"ln": str(log_int(v, 64).mid())}
    return {"floor_exp": pq.target.describe(20)}


def _sup(ivs: list[Interval]) -> Interval:
    from .growth import _max_iv
    return _max_iv(ivs)


def _inf(ivs: list[Interval]) -> Interval:
    from .growth import _min_iv
    return _min_iv(ivs)


# -- the B_n sequence ----------------------------------------------------------

def _exponent_for(g: GrowthFunction, which: int, horizon: int) -> tuple[Fraction, bool]:
    """Exact known exponent, or a clamped rational window estimate plus a flag."""
    if g.known_exponents is not None:
        v = g.known_exponents[which]
        if v == math.inf:
            raise PreconditionError("construction needs a finite exponent")
        return Fraction(v), False
    rep = exponents(g, max(16, horizon))
    iv = rep.b_hat if which == 0 else rep.B_hat
    est = Fraction(str(float(iv.mid()))).limit_denominator(1000)
    return (Fraction(1), True) if est < 1 else (est, False)


@dataclass
class SeqB:
    epsilon: Fraction
    b_used: Fraction
    b_flagged: bool
    log_B: list[LogValue]        # log_B[n-1] = log B_n
    log_b: list[Optional[Fraction]]  # log b_n when exact
    touch_indices: list[int]
    first_retouch: Optional[int]
    missing_windows: list[int]
    dim_lower_bound: Interval
    target_bound: Fraction
    trace: ConstructionTrace


def build_seq_B(g: GrowthFunction, epsilon: Number = Fraction(1, 2), n_max: int = 1000,
                b_used: Optional[Number] = None) -> SeqB:
    """``log B_n = min(phi(n), (b+eps) log B_{n-1})`` with ``phi`` the MinTail envelope."""
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise DomainError("epsilon must be > 0")
    flagged = False
    if b_used is None:
        b, flagged = _exponent_for(g, 0, n_max)
    else:
        b = Fraction(b_used)
    if b < 1:
        b, flagged = Fraction(1), True
    q = b + epsilon
    qv = LogValue.of(q)
    env = envelope(g, MIN_TAIL, n_max)
    trace = ConstructionTrace("seq-B", {"growth": g.name, "epsilon": str(epsilon),
                                        "b_used": str(b), "n_max": n_max})
    log_B: list[LogValue] = []
    touches: list[int] = []
    for n in range(1, n_max + 1):
        phi = env.at(n)
        if n == 1:
            v, touch = phi, True
        else:
            cap = log_B[-1] * qv
            touch = phi <= cap
            v = phi if touch else cap
        log_B.append(v)
        if touch:
            touches.append(n)

    log_b: list[Optional[Fraction]] = []
    for n in range(1, n_max + 1):
        log_b.append(_real_difference(log_B[n - 1], log_B[n - 2] if n > 1 else None))

    # (i) monotone and at most a (b+eps)-power step
    bad = next((n for n in range(1, n_max) if not (log_B[n - 1] <= log_B[n] <= log_B[n - 1] * qv)), None)
    trace.check("B_n <= B_{n+1} <= B_n^(b+eps)", bad is None, bad)
    # (ii) below the envelope, which is below psi
    bad = next((n for n in range(1, n_max + 1)
                if not (log_B[n - 1] <= env.at(n) <= eval_psi(g, n))), None)
    trace.check("log B_n <= phi(n) <= psi(n)", bad is None, bad)
    # ratios b_n >= 1 and telescoping
    if all(x is not None for x in log_b):
        bad = next((n for n, x in enumerate(log_b, 1) if x < 0), None)
        trace.check("b_n >= 1", bad is None, bad)
        acc = Fraction(0)
        tele = None
        for n, x in enumerate(log_b, 1):
            acc += x
            if acc != log_B[n - 1].rational:
                tele = n
                break
        trace.check("prod b_k = B_n (exact)", tele is None, tele)
    # (iii) touches recur: every window [m, 2m] past the first re-touch
    retouch = next((t for t in touches if t > 1), None)
    missing: list[int] = []
    if retouch is None:
        trace.check("touch in every window [m, 2m]", False, 1, "no touch after n=1")
    else:
        missing = _windows_without_touch(touches, retouch, n_max)
        trace.check("touch in every window [m, 2m]", not missing,
                    missing[0] if missing else None,
                    f"checked m in [{retouch}, {n_max // 2}]")
    touch_phi_is_psi = all(env.at(t) == eval_psi(g, t) for t in touches if t in set(env.touch_indices))
    trace.check("B_n = e^psi(n) at shared touch indices", touch_phi_is_psi)

    dim = _dimension_value(log_B, n_max)
    target = 1 / (b + 1 + epsilon)
    trace.check("dimension bound >= 1/(b+1+eps)", dim.certainly_ge(target - Fraction(1, 10 ** 9)))
    for n in range(1, n_max + 1):
        rec = {"n": n, "log_B": log_B[n - 1].describe(20), "touch": n in touches}
        trace.records.append(rec)
    trace.summary = {"touch_count": len(touches), "first_retouch": retouch,
                     "dim_lower_bound": _iv_pair(dim), "target": str(target),
                     "b_flagged": flagged}
    return SeqB(epsilon, b, flagged, log_B, log_b, touches, retouch, missing, dim, target, trace)


def _windows_without_touch(touches: list[int], start: int, n_max: int) -> list[int]:
    """All ``m >= start`` with ``2m <= n_max`` and no touch in ``[m, 2m]``."""
    ts = sorted(touches)
    out = []
    j = 0
    for m in range(start, n_max // 2 + 1):
        while j < len(ts) and ts[j] < m:
            j += 1
        if j == len(ts) or ts[j] > 2 * m:
            out.append(m)
    return out


def _dimension_value(logs: list[LogValue], upto: int) -> Interval:
    """``(2 + sup_n (L_{n+1} - L_n)/L_n)**-1`` over ``n < upto`` for log-sizes ``L``."""
    best: Optional[Interval] = None
    for n in range(1, upto):
        d = _real_difference(logs[n], logs[n - 1])
        if d is not None:
            r = Interval.exact(d / logs[n - 1].rational)
        else:
            a, b = _value_iv(logs[n]), _value_iv(logs[n - 1])
            r = (a - b) / b
        best = r if best is None else _sup([best, r])
    if best is None:
        best = Interval.exact(0)
    return Interval.exact(1) / (best + 2)


# -- the T_j sequence ----------------------------------------------------------

@dataclass
class SeqT:
    epsilon: Fraction
    B_used: Fraction
    B_flagged: bool
    log_T: list[LogValue]        # log_T[j-1] = log T_j
    t: list[int]
    log_c: list[Optional[Fraction]]
    ratio_series: list[Interval]
    certificate_start: int
    scan_end: int
    tail_inf: Interval
    dim_lower_bound: Interval
    target_bound: Fraction
    trace: ConstructionTrace


class _Exact:
    """``psi(1..upto)`` as Fractions (scaled to integers) or, failing that, LogValues."""

    def __init__(self, g: GrowthFunction, upto: int):
        self.g = g
        self.vals: list[LogValue] = []
        self.rational = True
        self.psi: list = []
        self.Psi: list[int] = []
        self.D = 1
        self._pows: dict[int, list[int]] = {}
        self.ensure(upto)

    def ensure(self, upto: int) -> None:
        start = len(self.vals)
        if upto <= start:
            return
        new = [eval_psi(self.g, n) for n in range(start + 1, upto + 1)]
        self.vals.extend(new)
        if self.rational:
            rats = [v.rational for v in new]
            if any(x is None for x in rats):
                self.rational = False
                self.psi = self.vals
                return
            D = self.D
            for x in rats:
                D = math.lcm(D, x.denominator)
            if D != self.D:
                self.Psi = [v * (D // self.D) for v in self.Psi]
                self.D = D
            self.psi.extend(rats)
            self.Psi.extend(x.numerator * (D // x.denominator) for x in rats)

    def ipow(self, base: int, e: int) -> int:
        lst = self._pows.setdefault(base, [1])
        while len(lst) <= e:
            lst.append(lst[-1] * base)
        return lst[e]

    def power(self, base: Fraction, e: int):
        if self.rational:
            return Fraction(self.ipow(base.numerator, e), self.ipow(base.denominator, e))
        return LogValue.power(base, e)

    def as_logvalue(self, x) -> LogValue:
        return LogValue.of(x) if self.rational else x

    def below_slow(self, n: int, slow: Fraction) -> bool:
        """``psi(n) <= slow**n``."""
        if self.rational:
            return (self.Psi[n - 1] * self.ipow(slow.denominator, n)
                    <= self.D * self.ipow(slow.numerator, n))
        return self.vals[n - 1] <= LogValue.power(slow, n)

    def tail_below(self, m: int, q: Fraction, r: Fraction, L: int) -> bool:
        """``q**m r**(L+1) < psi(m)``: no ``c_{m,k}`` with ``k > L`` can reach ``c_{m,m}``."""
        if self.rational:
            lhs = self.D * self.ipow(q.numerator, m) * self.ipow(r.numerator, L + 1)
            rhs = self.Psi[m - 1] * self.ipow(q.denominator, m) * self.ipow(r.denominator, L + 1)
            return lhs < rhs
        return LogValue.power(q, m) * LogValue.power(r, L + 1) < self.vals[m - 1]


def build_seq_T(g: GrowthFunction, epsilon: Number = Fraction(1, 2), j_max: int = 1000,
                B_used: Optional[Number] = None, max_scan: int = 200_000) -> SeqT:
    """``log T_j = max_k log c_{j,k}`` with ``log c_{j,k} = psi(k) (B+eps)**(j-k)`` for ``k > j``.

    The supremum over ``k > j`` is cut using a verified tail bound
    ``psi(n) <= (B+eps/2)**n`` for ``n >= n*``, so every ``T_j`` is a maximum
    over a finite, recorded range.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise DomainError("epsilon must be > 0")
    flagged = False
    if B_used is None:
        B, flagged = _exponent_for(g, 1, j_max)
    else:
        B = Fraction(B_used)
    if B < 1:
        B, flagged = Fraction(1), True
    q = B + epsilon
    slow = B + epsilon / 2
    r = slow / q

    # scan end: beyond K, q**j r**k < psi(j) for every j <= j_max + 1
    K = _scan_end_estimate(g, q, r, j_max + 1)
    ar: Optional[_Exact] = None
    while True:
        if K > max_scan:
            raise BudgetError(f"T_j scan would exceed {max_scan} indices")
        if ar is None:
            ar = _Exact(g, K + 1)
        ar.ensure(K + 1)
        n_star = _certificate_start(ar, slow, K + 1)
        if n_star is not None and n_star <= K and _cut_is_valid(ar, q, r, K, j_max + 1):
            break
        K = int(K * 1.25) + 10
    psi = ar.psi

    # u_k = psi(k) / q**k; T_j = max(prefix max of psi, q**j * max_{j<k<=K} u_k)
    u = [psi[k - 1] / ar.power(q, k) for k in range(1, K + 1)]
    suf_val = [None] * (K + 2)
    suf_arg = [0] * (K + 2)
    for k in range(K, 0, -1):
        nxt = suf_val[k + 1]
        if nxt is None or u[k - 1] >= nxt:
            suf_val[k], suf_arg[k] = u[k - 1], k
        else:
            suf_val[k], suf_arg[k] = nxt, suf_arg[k + 1]

    J = j_max + 1
    log_T, t = [], []
    pre_val, pre_arg = None, 0
    for j in range(1, J + 1):
        if pre_val is None or psi[j - 1] > pre_val:
            pre_val, pre_arg = psi[j - 1], j
        cand = suf_val[j + 1]
        if cand is not None:
            tail = cand * ar.power(q, j)
            if tail > pre_val:
                log_T.append(tail)
                t.append(suf_arg[j + 1])
                continue
        log_T.append(pre_val)
        t.append(pre_arg)
    logT_lv = [ar.as_logvalue(x) for x in log_T]

    trace = ConstructionTrace("seq-T", {"growth": g.name, "epsilon": str(epsilon),
                                        "B_used": str(B), "j_max": j_max})
    trace.check("supremum attained at finite t_j", all(1 <= x <= K for x in t))
    bad = next((j for j in range(1, j_max) if t[j] < t[j - 1]), None)
    trace.check("t_j non-decreasing", bad is None, bad)
    qv = LogValue.of(q)
    bad = next((j for j in range(1, j_max + 1)
                if not (logT_lv[j - 1] <= logT_lv[j] <= logT_lv[j - 1] * qv)), None)
    trace.check("T_j <= T_{j+1} <= T_j^(B+eps)", bad is None, bad)

    # T_{t_j} = e^{psi(t_j)}, recomputed from scratch for every distinct t_j
    oracle: dict[int, object] = {}
    bad = None
    for j in range(1, j_max + 1):
        m = t[j - 1]
        if m not in oracle:
            oracle[m] = T_at(ar, q, r, m, n_star)
        if oracle[m] != psi[m - 1]:
            bad = j
            break
    trace.check("T_{t_j} = e^psi(t_j)", bad is None, bad)

    log_c = [_real_difference(logT_lv[j - 1], logT_lv[j - 2] if j > 1 else None)
             for j in range(1, J + 1)]
    if all(x is not None for x in log_c):
        bad = next((j for j, x in enumerate(log_c, 1) if x < 0), None)
        trace.check("c_n >= 1", bad is None, bad)
        acc, tele = Fraction(0), None
        for j, x in enumerate(log_c, 1):
            acc += x
            if acc != logT_lv[j - 1].rational:
                tele = j
                break
        trace.check("prod c_k = T_n (exact)", tele is None, tele)

    ratio = [_value_iv(logT_lv[j - 1]) / _value_iv(eval_psi(g, j)) for j in range(1, j_max + 1)]
    tail_inf = _inf(ratio[max(0, j_max // 2 - 1):])
    worst = Fraction(0)
    worst_at = None
    if all(x is not None for x in log_c):
        acc = Fraction(0)
        for n in range(1, J):
            acc += log_c[n - 1]
            v = log_c[n] / acc
            if v > worst:
                worst, worst_at = v, n
        trace.check("log c_{n+1} / sum log c_k <= B+eps-1", worst <= q - 1, worst_at)
    dim = _dimension_value(logT_lv, J)
    target = 1 / (B + 1 + epsilon)
    trace.check("dimension bound >= 1/(B+1+eps)", dim.certainly_ge(target - Fraction(1, 10 ** 9)))
    for j in range(1, j_max + 1):
        trace.records.append({"j": j, "t": t[j - 1], "log_T": logT_lv[j - 1].describe(20),
                              "ratio": _iv_pair(ratio[j - 1])})
    trace.summary = {"certificate_start": n_star, "scan_end": K, "tail_inf": _iv_pair(tail_inf),
                     "dim_lower_bound": _iv_pair(dim), "target": str(target),
                     "B_flagged": flagged}
    return SeqT(epsilon, B, flagged, logT_lv[:j_max], t[:j_max], log_c[:j_max], ratio,
                n_star, K, tail_inf, dim, target, trace)


def _scan_end_estimate(g: GrowthFunction, q: Fraction, r: Fraction, J: int) -> int:
    lq, lr = math.log(q), math.log(r)
    K = J + 1
    for j in range(1, J + 1):
        lpsi = float(eval_psi(g, j).ln_enclosure(64).mid())
        K = max(K, math.ceil((j * lq - lpsi) / -lr) + 2)
    return K


def _certificate_start(ar: _Exact, slow: Fraction, upto: int) -> Optional[int]:
    """Least ``n*`` with ``psi(n) <= slow**n`` on ``[n*, upto]``."""
    n_star = 1
    for n in range(1, upto + 1):
        if not ar.below_slow(n, slow):
            n_star = n + 1
    return n_star if n_star <= upto else None


def _cut_is_valid(ar: _Exact, q: Fraction, r: Fraction, K: int, J: int) -> bool:
    return all(ar.tail_below(j, q, r, K) for j in range(1, J + 1))


def T_at(ar: _Exact, q: Fraction, r: Fraction, m: int, n_star: int):
    """``log T_m`` by a direct scan of ``log c_{m,k}``, independent of the fast path.

    The scan stops at the first ``L >= max(m, n*)`` past which the
    certified bound ``q**m r**k`` is below ``c_{m,m}``.
    """
    L = max(m, n_star)
    guess = math.ceil((m * math.log(q) - float(ar.vals[m - 1].ln_enclosure(64).mid())) / -math.log(r)) - 2
    L = max(L, guess)
    ar.ensure(L + 1)
    while not ar.tail_below(m, q, r, L):
        L += 1
        ar.ensure(L + 1)
    if ar.rational:
        a, b = q.numerator, q.denominator
        # scale every c_{m,k} by D * a**(L-m) to stay in integers
        best = None
        for k in range(1, L + 1):
            if k <= m:
                c = ar.Psi[k - 1] * ar.ipow(a, L - m)
            else:
                c = ar.Psi[k - 1] * ar.ipow(b, k - m) * ar.ipow(a, L - k)
            if best is None or c > best:
                best = c
        return Fraction(best, ar.D * ar.ipow(a, L - m))
    best = None
    for k in range(1, L + 1):
        c = ar.vals[k - 1] if k <= m else ar.vals[k - 1] / LogValue.power(q, k - m)
        if best is None or c > best:
            best = c
    return best


# -- target sequences and the sampler -----------------------------------------

@dataclass
class TargetSequence:
    """Sizes ``s_n >= 1`` given through ``n -> s_n`` as a LogValue."""

    s: Callable[[int], LogValue]
    name: str = "custom"
    _cache: dict = field(default_factory=dict, repr=False)

    def s_at(self, n: int) -> LogValue:
        if n not in self._cache:
            v = self.s(n)
            if v < LogValue.of(1):
                raise DomainError(f"s_n must be >= 1 (n={n})")
            self._cache[n] = v
        return self._cache[n]

    @classmethod
    def from_log(cls, log_s: Callable[[int], Number], name: str = "log-s") -> "TargetSequence":
        """``log s_n`` given as an exact rational."""
        return cls(lambda n: LogValue.exp_of(Fraction(log_s(n))), name)

    @classmethod
    def from_values(cls, s: Callable[[int], Number], name: str = "s") -> "TargetSequence":
        return cls(lambda n: LogValue.of(s(n)), name)

    @classmethod
    def matched_to(cls, g: GrowthFunction) -> "TargetSequence":
        """``log s_n = psi(n) - psi(n-1)`` for a non-decreasing ``psi`` with ``psi(0) = 0``."""
        def s(n: int) -> LogValue:
            cur = eval_psi(g, n)
            prev = eval_psi(g, n - 1) if n > 1 else None
            d = _real_difference(cur, prev)
            if d is None:
                return _closure_increment(cur, prev, 1)
            if d < 0:
                raise PreconditionError("matched sequence needs a non-decreasing psi")
            return LogValue.exp_of(d)
        return cls(s, f"matched:{g.name}")

    def log_s(self, n: int, prec: int = DEFAULT_PREC) -> Interval:
        return self.s_at(n).ln_enclosure(prec)

    def partial_log_sums(self, depth: int, prec: int = DEFAULT_PREC) -> list:
        """``sum_{k<=n} log s_k`` for ``n = 1..depth``: ExactLog forms when available."""
        forms = [self.s_at(n).exact_form for n in range(1, depth + 1)]
        out = []
        if all(f is not None for f in forms):
            acc = ExactLog()
            for f in forms:
                acc = acc + f
                out.append(acc)
            return out
        acc = Interval.exact(0, prec)
        for n in range(1, depth + 1):
            acc = acc + self.log_s(n, prec)
            out.append(acc)
        return out

    def divergence_series(self, depth: int) -> list[Interval]:
        return [_as_iv(s) / n for n, s in enumerate(self.partial_log_sums(depth), 1)]

    def dim_formula_series(self, depth: int) -> list[Interval]:
        sums = self.partial_log_sums(depth + 1)
        out = []
        for n in range(1, depth + 1):
            denom = _as_iv(sums[n - 1])
            if denom.contains_zero():
                out.append(Interval.exact(Fraction(1, 2)))
                continue
            out.append(Interval.exact(1) / (self.log_s(n + 1) / denom + 2))
        return out

    def check_divergence(self, depth: int) -> bool:
        """Strict increase of ``(sum log s_k)/n`` over ``[depth/2, depth]``."""
        sums = self.partial_log_sums(depth)
        lo = max(1, depth // 2)
        for n in range(lo, depth):
            a, b = sums[n - 1], sums[n]
            if isinstance(a, ExactLog):
                diff = b.scale(Fraction(1, n + 1)) - a.scale(Fraction(1, n))
                if diff.is_zero():
                    return False
                prec = DEFAULT_PREC
                sign = None
                while prec <= 16384 and sign is None:
                    sign = diff.evaluate(prec + diff.magnitude_bits()).sign()
                    prec *= 2
                if sign != 1:
                    return False
            elif not (a / n).certainly_lt(b / (n + 1)):
                return False
        return True


def _as_iv(x, prec: int = DEFAULT_PREC) -> Interval:
    return x.evaluate(prec + x.magnitude_bits()) if isinstance(x, ExactLog) else x


@dataclass
class SampleReport:
    points: list[CFPoint]
    quotients: list[list[int]]
    depth: int
    dimension: Interval
    membership_ok: bool
    first_violation: Optional[tuple[int, int]]


SAMPLE_BIT_LIMIT = 4096


def sample_E_set(ts: TargetSequence, depth: int, count: int, seed: int = 0) -> SampleReport:
    """``count`` points with ``a_n`` uniform on ``[ceil(s_n), floor(2 s_n)]``."""
    from .dimension import ratio_dim_estimate
    if depth < 1 or count < 0:
        raise DomainError("depth >= 1 and count >= 0 required")
    if not ts.check_divergence(max(depth, 2)):
        raise PreconditionError("(sum log s_k)/n is not increasing at this depth")
    bounds = []
    for n in range(1, depth + 1):
        s = ts.s_at(n)
        if s.ln_enclosure(64).hi > SAMPLE_BIT_LIMIT * math.log(2):
            raise BudgetError(f"s_{n} exceeds {SAMPLE_BIT_LIMIT} bits; sampling is exact-only")
        lo, hi = s.ceil(), (s * LogValue.of(2)).floor()
        if lo > hi:
            raise AssertionFailure(f"empty range at n={n}")
        bounds.append((lo, hi))
    rng = random.Random(seed)
    quotients = [[rng.randint(lo, hi) for lo, hi in bounds] for _ in range(count)]
    points = [CFPoint.from_quotients(w, gen_id=f"sample:{ts.name}:{seed}:{i}")
              for i, w in enumerate(quotients)]
    violation = None
    two = LogValue.of(2)
    lims = [(ts.s_at(n), ts.s_at(n) * two) for n in range(1, depth + 1)]
    for i, w in enumerate(quotients):
        for n, a in enumerate(w, 1):
            lo, hi = lims[n - 1]
            av = LogValue.of(a)
            if not (lo <= av and av <= hi):
                violation = (i, n)
                break
        if violation:
            break
    dim = ratio_dim_estimate(ts, depth).value
    return SampleReport(points, quotients, depth, dim, violation is None, violation)
