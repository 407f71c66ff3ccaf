"""Growth functions, their exponents, monotone envelopes and equivalence checks.

A growth function maps ``n >= 1`` to a positive real ``psi(n)``.  Values are
returned as :class:`LogValue` instances, so ``psi(n)`` can be astronomically
large (the factorial-block family reaches ``4**n``) without losing
exactness.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Union

from .errors import DomainError, HorizonError, KhintchineError
from .interval import DEFAULT_PREC, Interval
from .logvalue import ExactLog, LogValue

Exponent = Union[Fraction, float]  # float only for math.inf

MIN_TAIL = "MinTail"
MAX_PREFIX = "MaxPrefix"


# -- factorial blocks --------------------------------------------------------

_FACT_SUMS: list[int] = [0]  # _FACT_SUMS[k] = 1! + ... + k!


def block_index(k: int) -> int:
    """``n_k = 1! + 2! + ... + k!`` with ``n_0 = 0``."""
    while len(_FACT_SUMS) <= k:
        m = len(_FACT_SUMS)
        _FACT_SUMS.append(_FACT_SUMS[-1] + math.factorial(m))
    return _FACT_SUMS[k]


def factorial_block_powers(n: int) -> tuple[int, int, int]:
    """Powers ``(i, j, k)`` with ``psi(n) = 3**i * 4**j * 5**k``.

    On ``n_{2k-1} < n <= n_{2k}`` the odd factorials are spent on 3 and the
    remainder on 4, with ``k-1`` factors of 5; on ``n_{2k} < n <= n_{2k+1}``
    the even factorials go to 4, the remainder to 3, with ``k`` fives.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    m = 0
    while block_index(m + 1) < n:
        m += 1
    top = m + 1  # n lies in (n_m, n_top]
    if top % 2 == 0:
        k = top // 2
        odd = sum(math.factorial(i) for i in range(1, 2 * k, 2))
        return odd, n - odd, k - 1
    k = m // 2
    even = sum(math.factorial(i) for i in range(2, 2 * k + 1, 2))
    return n - even, even, k


# -- growth functions --------------------------------------------------------

@dataclass(eq=False)
class GrowthFunction:
    """``psi: N -> R+`` with optional exactly-known exponents ``(b, B, beta)``."""

    family: str
    params: dict
    evaluator: Callable[[int], LogValue]
    monotone_tail_hint: Optional[int] = None
    known_exponents: Optional[tuple[Exponent, Exponent, Exponent]] = None
    divergence_certificate: Optional[dict] = None
    length: Optional[int] = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, n: int) -> LogValue:
        return eval_psi(self, n)

    @property
    def name(self) -> str:
        if not self.params:
            return self.family
        args = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.family}:{args}"


def power(p: Union[int, Fraction, str]) -> GrowthFunction:
    """``psi(n) = n**p`` for rational ``p > 1``."""
    p = Fraction(p)
    if p <= 1:
        raise DomainError("power family needs p > 1")

    def ev(n: int) -> LogValue:
        if n == 1:
            return LogValue.of(1)
        return LogValue.power(n, p)
    one = Fraction(1)
    return GrowthFunction("power", {"p": str(p)}, ev, monotone_tail_hint=1,
                          known_exponents=(one, one, one))


def exponential(c: Union[int, Fraction, str], scale: Union[int, Fraction, str] = 1) -> GrowthFunction:
    """``psi(n) = scale * c**n`` for rational ``c > 1`` and ``scale > 0``."""
    c, scale = Fraction(c), Fraction(scale)
    if c <= 1 or scale <= 0:
        raise DomainError("exp family needs c > 1 and scale > 0")
    lc, ls = ExactLog.of_rational(c), ExactLog.of_rational(scale)

    def ev(n: int) -> LogValue:
        if lc is not None and ls is not None:
            return LogValue.from_exact(ls + lc.scale(n))
        return LogValue.of(scale) * LogValue.power(c, n)
    return GrowthFunction("exp", {"c": str(c), "scale": str(scale)}, ev,
                          monotone_tail_hint=1, known_exponents=(c, c, c))


def factorial_blocks() -> GrowthFunction:
    """The block example with exponents ``(3, 4, 15)``."""
    def ev(n: int) -> LogValue:
        i, j, k = factorial_block_powers(n)
        return LogValue.from_exact(ExactLog.from_bases([(3, i), (4, j), (5, k)]))
    return GrowthFunction("factorial-blocks", {}, ev, monotone_tail_hint=1,
                          known_exponents=(Fraction(3), Fraction(4), Fraction(15)))


def table(ln_values: list, monotone_tail_hint: Optional[int] = None) -> GrowthFunction:
    """Tabulated ``ln psi(1), ln psi(2), ...`` given as rationals or decimal strings."""
    vals = [Fraction(v) for v in ln_values]
    if not vals:
        raise DomainError("empty growth table")

    def ev(n: int) -> LogValue:
        return LogValue.exp_of(vals[n - 1])
    return GrowthFunction("table", {"length": len(vals)}, ev,
                          monotone_tail_hint=monotone_tail_hint, length=len(vals))


def table_of_values(values: list, monotone_tail_hint: Optional[int] = None) -> GrowthFunction:
    """Tabulated ``psi(n)`` given directly as positive rationals."""
    vals = [LogValue.of(v) for v in values]

    def ev(n: int) -> LogValue:
        return vals[n - 1]
    return GrowthFunction("table", {"length": len(vals)}, ev,
                          monotone_tail_hint=monotone_tail_hint, length=len(vals))


def read_table_csv(path: Union[str, Path], monotone_tail_hint: Optional[int] = None) -> GrowthFunction:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["n", "ln_psi"]:
        raise DomainError(f"{path}: expected header 'n,ln_psi'")
    vals = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        n, ln = int(row[0]), row[1].strip()
        if n != len(vals) + 1:
            raise DomainError(f"{path}:{lineno}: rows must be n = 1, 2, 3, ...")
        vals.append(Fraction(ln))
    return table(vals, monotone_tail_hint)


def custom(fn: Callable[[int], object], name: str = "custom",
           monotone_tail_hint: Optional[int] = None,
           known_exponents=None) -> GrowthFunction:
    """Wrap a Python callable returning a LogValue or a positive rational."""
    def ev(n: int) -> LogValue:
        v = fn(n)
        return v if isinstance(v, LogValue) else LogValue.of(v)
    return GrowthFunction("custom", {"name": name}, ev,
                          monotone_tail_hint=monotone_tail_hint,
                          known_exponents=known_exponents)


def parse_growth(text: str) -> GrowthFunction:
    """Parse ``power:p=..``, ``exp:c=..,scale=..``, ``factorial-blocks`` or ``table:<path>``."""
    text = text.strip()
    head, _, rest = text.partition(":")
    head = head.strip().lower()
    if head == "factorial-blocks" and not rest:
        return factorial_blocks()
    if head == "table":
        if not rest:
            raise DomainError("table growth needs a path: table:<path>")
        return read_table_csv(rest)
    if head == "custom":
        raise DomainError("custom growth functions can only be built from Python")
    kv = {}
    for part in filter(None, (s.strip() for s in rest.split(","))):
        k, eq, v = part.partition("=")
        if not eq:
            raise DomainError(f"malformed growth parameter {part!r}")
        try:
            kv[k.strip()] = Fraction(v.strip())
        except ValueError as exc:
            raise DomainError(f"parameter {k!r} is not a rational: {v!r}") from exc
    if head == "power":
        if set(kv) != {"p"}:
            raise DomainError("power growth takes exactly p=<rational>")
        return power(kv["p"])
    if head == "exp":
        if "c" not in kv or set(kv) - {"c", "scale"}:
            raise DomainError("exp growth takes c=<rational>[,scale=<rational>]")
        return exponential(kv["c"], kv.get("scale", 1))
    raise DomainError(f"unknown growth family {head!r}")


def eval_psi(g: GrowthFunction, n: int) -> LogValue:
    """``psi(n)`` as a LogValue (memoised per growth function)."""
    if n < 1:
        raise DomainError(f"psi is defined for n >= 1, got {n}")
    if g.length is not None and n > g.length:
        raise HorizonError(f"table has {g.length} entries, asked for n={n}")
    hit = g._cache.get(n)
    if hit is not None:
        return hit
    try:
        v = g.evaluator(n)
    except KhintchineError:
        raise
    except Exception as exc:
        raise KhintchineError(f"growth evaluator failed at n={n}: {exc}") from exc
    if len(g._cache) < 200_000:
        g._cache[n] = v
    return v


# -- exponents ---------------------------------------------------------------

@dataclass
class ExponentReport:
    b_hat: Interval
    B_hat: Interval
    beta_hat: Interval
    beta_window_raw: Interval
    horizon: int
    tail_series: list[dict]
    beta_projected: bool

    def as_floats(self) -> tuple[float, float, float]:
        return float(self.b_hat), float(self.B_hat), float(self.beta_hat)


def _min_iv(ivs: list[Interval]) -> Interval:
    lo = min(ivs, key=lambda iv: iv.lo).raw[0]
    hi = min(ivs, key=lambda iv: iv.hi).raw[1]
    return Interval(lo, hi, ivs[0].prec)


def _max_iv(ivs: list[Interval]) -> Interval:
    lo = max(ivs, key=lambda iv: iv.lo).raw[0]
    hi = max(ivs, key=lambda iv: iv.hi).raw[1]
    return Interval(lo, hi, ivs[0].prec)


def log_rate(g: GrowthFunction, n: int, prec: int = DEFAULT_PREC) -> Interval:
    """Enclosure of ``log psi(n) / n``."""
    return eval_psi(g, n).ln_enclosure(prec) / n


def step_ratio(g: GrowthFunction, n: int, prec: int = DEFAULT_PREC) -> Interval:
    """Enclosure of ``psi(n+1) / psi(n)``."""
    r = eval_psi(g, n + 1) / eval_psi(g, n)
    return r.ln_enclosure(prec).exp()


def exponents(g: GrowthFunction, horizon: int, prec: int = 64) -> ExponentReport:
    """Window estimates of ``b``, ``B`` and ``beta`` over ``[horizon/2, horizon]``.

    ``beta`` is taken over the same tail window; the full prefix sup is
    dominated by start-up effects (``4`` for ``n**2``).  The window ratio
    is then raised to at least ``B_hat`` so that ``b <= B <= beta`` holds at
    every horizon; ``beta_window_raw`` keeps the unprojected value.
    """
    if horizon < 16:
        raise DomainError("exponents need horizon >= 16")
    lo = (horizon + 1) // 2
    rate_memo: dict[int, Interval] = {}
    ratio_memo: dict[int, Interval] = {}

    def rate(n: int) -> Interval:
        if n not in rate_memo:
            rate_memo[n] = log_rate(g, n, prec)
        return rate_memo[n]

    def ratio(n: int) -> Interval:
        if n not in ratio_memo:
            ratio_memo[n] = step_ratio(g, n, prec)
        return ratio_memo[n]

    rates = [rate(n) for n in range(lo, horizon + 1)]
    ratios = [ratio(n) for n in range(lo, horizon)]
    log_b, log_B = _min_iv(rates), _max_iv(rates)
    b_hat, B_hat = log_b.exp(), log_B.exp()
    beta_raw = _max_iv(ratios)
    projected = B_hat.lo > beta_raw.lo
    beta_hat = Interval(max(beta_raw.raw[0], B_hat.raw[0], key=_K),
                        max(beta_raw.raw[1], B_hat.raw[1], key=_K), prec)

    series = []
    j = 0
    while (1 << j) <= horizon:
        a, b = 1 << j, min(horizon, 1 << (j + 1))
        rs = [rate(n) for n in range(a, b + 1)]
        qs = [ratio(n) for n in range(a, b)] or [ratio(max(1, a - 1))]
        series.append({
            "window": [a, b],
            "log_rate_inf": float(_min_iv(rs).lo),
            "log_rate_sup": float(_max_iv(rs).hi),
            "step_ratio_inf": float(_min_iv(qs).lo),
            "step_ratio_sup": float(_max_iv(qs).hi),
        })
        j += 1
    return ExponentReport(b_hat, B_hat, beta_hat, beta_raw, horizon, series, projected)


class _K:
    __slots__ = ("raw",)

    def __init__(self, raw):
        self.raw = raw

    def __lt__(self, other):
        from mpmath.libmp import mpf_cmp
        return mpf_cmp(self.raw, other.raw) < 0


# -- envelopes ---------------------------------------------------------------

@dataclass
class Envelope:
    kind: str
    values: list[LogValue]  # values[n-1] is the envelope at n
    psi: list[LogValue]
    touch_indices: list[int]
    horizon_used: int
    flagged: bool = False

    def at(self, n: int) -> LogValue:
        return self.values[n - 1]

    @property
    def n_max(self) -> int:
        return len(self.values)

    def touches_in(self, lo: int, hi: int) -> list[int]:
        i = bisect_left(self.touch_indices, lo)
        out = []
        while i < len(self.touch_indices) and self.touch_indices[i] <= hi:
            out.append(self.touch_indices[i])
            i += 1
        return out


def envelope(g: GrowthFunction, kind: str, n_max: int, horizon: Optional[int] = None,
             allow_flagged: bool = False) -> Envelope:
    """Monotone envelope of ``psi`` on ``1..n_max``.

    MinTail takes ``min_{k >= n} psi(k)``; the tail is cut at
    ``max(n_max, monotone_tail_hint)``, beyond which ``psi`` does not
    decrease.  Without a hint the caller must pass ``horizon >= n_max``
    and ``allow_flagged=True``; the result is then flagged as a finite-
    horizon approximation.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    if kind == MAX_PREFIX:
        psi = [eval_psi(g, n) for n in range(1, n_max + 1)]
        vals, touches = [], []
        cur = None
        for n, v in enumerate(psi, start=1):
            if cur is None or v >= cur:
                cur = v
                touches.append(n)
            vals.append(cur)
        env = Envelope(kind, vals, psi, touches, n_max)
        _check_observation(env)
        return env
    if kind != MIN_TAIL:
        raise DomainError(f"unknown envelope kind {kind!r}")
    flagged = False
    if g.monotone_tail_hint is not None and (horizon is None or g.monotone_tail_hint <= max(horizon, n_max)):
        end = max(n_max, g.monotone_tail_hint)
    elif horizon is not None and horizon >= n_max and allow_flagged:
        end, flagged = horizon, True
    else:
        raise HorizonError("MinTail needs a monotone tail hint, or horizon >= n_max with allow_flagged")
    if g.length is not None:
        end = min(end, g.length)
        if end < n_max:
            raise HorizonError(f"table too short for n_max={n_max}")
    psi_all = [eval_psi(g, n) for n in range(1, end + 1)]
    suffix: list[LogValue] = [None] * end  # type: ignore[list-item]
    cur = psi_all[-1]
    for k in range(end - 1, -1, -1):
        if psi_all[k] <= cur:
            cur = psi_all[k]
        suffix[k] = cur
    touches = [n for n in range(1, n_max + 1) if suffix[n - 1] is psi_all[n - 1] or suffix[n - 1] == psi_all[n - 1]]
    env = Envelope(kind, suffix[:n_max], psi_all[:n_max], touches, end, flagged)
    env._full = suffix  # type: ignore[attr-defined]
    env._full_psi = psi_all  # type: ignore[attr-defined]
    _check_observation(env)
    return env


def _check_observation(env: Envelope) -> None:
    """Between touches the envelope is flat; fail loudly if not."""
    touched = set(env.touch_indices)
    if env.kind == MIN_TAIL:
        full = getattr(env, "_full", env.values)
        for n in range(1, len(full)):
            if n not in touched and n <= env.n_max and not full[n - 1].identical(full[n]) and full[n - 1] != full[n]:
                raise AssertionError(f"MinTail not flat off-touch at n={n}")
    else:
        for n in range(2, env.n_max + 1):
            if n not in touched and env.values[n - 1] != env.values[n - 2]:
                raise AssertionError(f"MaxPrefix not flat off-touch at n={n}")


@dataclass
class EquivReport:
    kind: str
    ratios: list[Interval]
    running: list[Interval]
    touch_count: int
    touches_recur: bool
    bounded_by_one: bool
    verdict: str


def equiv_check(g: GrowthFunction, env: Envelope, n_max: Optional[int] = None) -> EquivReport:
    """Ratios ``env(n)/psi(n)`` with their running sup (MinTail) or inf (MaxPrefix)."""
    n_max = n_max or env.n_max
    ratios, running = [], []
    acc: Optional[Interval] = None
    bounded = True
    for n in range(1, n_max + 1):
        r = env.at(n) / eval_psi(g, n)
        iv = r.ln_enclosure().exp()
        ratios.append(iv)
        c = r.cmp(LogValue.of(1))
        if env.kind == MIN_TAIL:
            bounded &= c <= 0
            acc = iv if acc is None else _max_iv([acc, iv])
        else:
            bounded &= c >= 0
            acc = iv if acc is None else _min_iv([acc, iv])
        running.append(acc)
    touches = env.touches_in(1, n_max)
    recur = bool(env.touches_in(max(1, n_max // 2), n_max))
    if bounded and recur:
        verdict = "limsup-equivalent evidence" if env.kind == MIN_TAIL else "liminf-equivalent evidence"
    else:
        verdict = "no evidence"
    return EquivReport(env.kind, ratios, running, len(touches), recur, bounded, verdict)


# -- divergence --------------------------------------------------------------

@dataclass
class DivergenceReport:
    windows: list[dict]
    divergent: bool
    horizon: int


def divergence_check(g: GrowthFunction, horizon: int) -> DivergenceReport:
    """Minima of ``psi(n)/n`` over dyadic windows ``[2**j, 2**(j+1))``.

    The certificate is that the window minima strictly increase over the
    second half of the windows.
    """
    if horizon < 16:
        raise DomainError("divergence check needs horizon >= 16")
    windows = []
    j = 0
    while (1 << j) <= horizon:
        a, b = 1 << j, min(horizon, (1 << (j + 1)) - 1)
        best, arg = None, a
        for n in range(a, b + 1):
            v = eval_psi(g, n) / n
            if best is None or v < best:
                best, arg = v, n
        windows.append({"window": [a, b], "argmin": arg, "min": best})
        j += 1
    half = windows[len(windows) // 2:]
    divergent = len(half) >= 2 and all(x["min"] < y["min"] for x, y in zip(half, half[1:]))
    return DivergenceReport(windows, divergent, horizon)
