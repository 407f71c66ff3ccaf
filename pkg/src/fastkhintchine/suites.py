"""Bundled check suites: the factorial-block example and the verify-all profiles."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from math import factorial

from . import cf_core
from .constructions import (LOWER_LIMINF, UPPER_LIMSUP, TargetSequence, build_seq_B, build_seq_T,
                            build_witness, sample_E_set)
from .dimension import (CoveringParams, SetPredicateParams, brute_covering_term, chain_term,
                        covering_bound, dim_formulas, ratio_dim_estimate, membership_doubly_exp)
from .growth import (MAX_PREFIX, MIN_TAIL, block_index, envelope, equiv_check, eval_psi,
                     exponential, exponents, factorial_blocks, log_rate, power, table_of_values)
from .logvalue import LogValue
from .reports import Report

PROFILES = {
    "small": {"euclid": 1000, "words": 1000, "mc_samples": 200, "mc_n": 2000,
              "witness_n": 80, "seq_b_n": 200, "seq_t_j": 150, "ratio_depth": 200,
              "sample_depth": 30, "sample_count": 100},
    "standard": {"euclid": 1000, "words": 1000, "mc_samples": 10_000, "mc_n": 10_000,
                 "witness_n": 200, "seq_b_n": 1000, "seq_t_j": 1000, "ratio_depth": 1000,
                 "sample_depth": 60, "sample_count": 1000},
}

LOG3, LOG4 = math.log(3), math.log(4)


# -- factorial-block example ----------------------------------------------------

def _strictly_decreasing(xs: list[float]) -> int | None:
    """First k (1-based) at which the sequence fails to decrease, else None."""
    for i in range(1, len(xs)):
        if not xs[i] < xs[i - 1]:
            return i + 1
    return None


def even_index_ratio(k: int) -> Fraction:
    """``sum_{j<=k} (2j)! / sum_{j<=2k} j!``."""
    return Fraction(sum(factorial(2 * j) for j in range(1, k + 1)),
                    sum(factorial(j) for j in range(1, 2 * k + 1)))


def odd_index_ratio(k: int) -> Fraction:
    """``sum_{j<=k+1} (2j-1)! / sum_{j<=2k+1} j!``."""
    return Fraction(sum(factorial(2 * j - 1) for j in range(1, k + 2)),
                    sum(factorial(j) for j in range(1, 2 * k + 2)))


def block_endpoint_rates(k_max: int = 6) -> dict:
    """``log psi(n)/n`` at the block ends ``n_{2k}`` (growth by 4) and ``n_{2k+1}`` (growth by 3).

    On the dyadic window holding a block end, that end is where the rate
    peaks (even blocks) or bottoms out (odd blocks), so these are the
    window estimates.
    """
    g = factorial_blocks()
    even, odd = [], []
    for k in range(1, k_max + 1):
        for idx, target, out in ((2 * k, LOG4, even), (2 * k + 1, LOG3, odd)):
            n = block_index(idx)
            rate = log_rate(g, n, 128)
            out.append({"k": k, "n": n, "rate": rate, "error": abs(float(rate.mid()) - target)})
    return {"even": even, "odd": odd}


def paper_example_suite(k_max: int = 6) -> Report:
    rep = Report("paper-example", {"k_max": k_max})
    g = factorial_blocks()
    fifteen = LogValue.of(15)
    for k in range(1, k_max + 1):
        n = block_index(2 * k)
        ratio = eval_psi(g, n + 1) / eval_psi(g, n)
        rep.check(f"step ratio 15 at n_{2 * k}", ratio.identical(fifteen), n,
                  detail=str(ratio.describe(12)))

    rates = block_endpoint_rates(k_max)
    rows = []
    for parity, target, label in (("even", LOG4, "log 4"), ("odd", LOG3, "log 3")):
        errs = [r["error"] for r in rates[parity]]
        rep.check(f"{parity} block rate within 0.2 of {label} at k={k_max}", errs[-1] < 0.2, k_max,
                  detail=f"error {errs[-1]:.6f}")
        bad = _strictly_decreasing(errs)
        rep.check(f"{parity} block rate error decreasing in k", bad is None, bad,
                  detail=", ".join(f"{e:.6f}" for e in errs))
        for r in rates[parity]:
            rows.append((r["k"], parity, r))
    rep.summary["even_block_rates"] = [{"k": r["k"], "n": r["n"], "rate": r["rate"],
                                        "error": round(r["error"], 12)} for r in rates["even"]]
    rep.summary["odd_block_rates"] = [{"k": r["k"], "n": r["n"], "rate": r["rate"],
                                       "error": round(r["error"], 12)} for r in rates["odd"]]

    ev = [even_index_ratio(k) for k in range(1, k_max + 1)]
    od = [odd_index_ratio(k) for k in range(1, k_max + 1)]
    rep.check("even index ratio increasing", all(a < b for a, b in zip(ev, ev[1:])))
    rep.check("odd index ratio increasing", all(a < b for a, b in zip(od, od[1:])))
    rep.check("index ratios below 1", all(r < 1 for r in ev + od))
    rep.summary["even_index_ratios"] = ev
    rep.summary["odd_index_ratios"] = od

    dims = dim_formulas(*g.known_exponents)
    rep.check("dims are (1/4, 1/5, 1/16)",
              dims.as_tuple() == (Fraction(1, 4), Fraction(1, 5), Fraction(1, 16)),
              detail=str([str(d) for d in dims.as_tuple()]))
    rep.summary["dims"] = list(dims.as_tuple())
    for k in range(1, k_max + 1):
        rep.series.append({"n": k, "even_rate": rates["even"][k - 1]["rate"],
                           "odd_rate": rates["odd"][k - 1]["rate"],
                           "even_index_ratio": ev[k - 1], "odd_index_ratio": od[k - 1]})
    return rep


# -- property suites ------------------------------------------------------------

def euclid_suite(rep: Report, count: int, seed: int = 1) -> None:
    rng = random.Random(seed)
    bad = None
    for i in range(count):
        q = rng.randint(2, 10 ** 6)
        p = rng.randint(1, q - 1)
        if cf_core.cf_expand(Fraction(p, q)) != cf_core.euclid_subtractive(p, q):
            bad = (p, q)
            break
    rep.check("cf_expand matches subtractive Euclid", bad is None, bad)


def _fold(word) -> Fraction:
    x = Fraction(0)
    for s in reversed(word):
        x = 1 / (s + x)
    return x


def cylinder_suite(rep: Report, count: int, seed: int = 2) -> None:
    """Cylinder data against endpoints folded directly from the word."""
    rng = random.Random(seed)
    length_bad = product_bad = endpoint_bad = None
    for _ in range(count):
        n = rng.randint(1, 20)
        word = [rng.randint(1, 50) for _ in range(n)]
        cyl = cf_core.make_cylinder(word)
        a = _fold(word)
        b = _fold(word[:-1] + [word[-1] + 1])
        if endpoint_bad is None and {a, b} != set(cyl.endpoints):
            endpoint_bad = word
        if length_bad is None and not (cyl.length == abs(a - b) == Fraction(1, cyl.q_n * (cyl.q_n + cyl.q_prev))
                                       and a.denominator == cyl.q_n):
            length_bad = word
        if product_bad is None and cyl.length * math.prod(word) ** 2 > 1:
            product_bad = word
    rep.check("cylinder endpoints match direct folding", endpoint_bad is None, endpoint_bad)
    rep.check("cylinder length is 1/(q_n(q_n+q_{n-1}))", length_bad is None, length_bad)
    rep.check("cylinder length times squared digit product <= 1", product_bad is None, product_bad)


def khintchine_suite(rep: Report, samples: int, n: int, seed: int = 3) -> None:
    mean, se = cf_core.khintchine_monte_carlo(samples, n, seed)
    rep.summary["khintchine_mean"] = round(mean, 10)
    rep.check("Monte Carlo log-mean within 0.02 of log K0", abs(mean - cf_core.KHINTCHINE_LOG) < 0.02,
              detail=f"mean {mean:.6f}")


def growth_suite(rep: Report) -> None:
    e = exponents(exponential(3), 256)
    rep.check("exponents of 3^n are (3, 3, 3)",
              all(iv.contains(3) for iv in (e.b_hat, e.B_hat, e.beta_hat)))
    p = exponents(power(2), 1024)
    rep.check("exponents of n^2 are near 1", all(abs(float(iv.mid()) - 1) < 0.05
                                                 for iv in (p.b_hat, p.B_hat, p.beta_hat)))
    g = table_of_values([5, 3, 4, 6, 7, 8, 9, 10], monotone_tail_hint=4)
    lo = envelope(g, MIN_TAIL, 6)
    hi = envelope(g, MAX_PREFIX, 6)
    rep.check("MinTail of (5,3,4,6,...) is (3,3,4,6,7,8)",
              [v.rational for v in lo.values] == [3, 3, 4, 6, 7, 8])
    rep.check("MaxPrefix of (5,3,4,6,...) is (5,5,5,6,7,8)",
              [v.rational for v in hi.values] == [5, 5, 5, 6, 7, 8])
    eq = equiv_check(power(2), envelope(power(2), MIN_TAIL, 64), 64)
    rep.check("n^2 is limsup-equivalent to its MinTail", eq.verdict == "limsup-equivalent evidence")


def witness_suite(rep: Report, n_max: int) -> None:
    for g in (exponential(2), factorial_blocks()):
        for mode in (UPPER_LIMSUP, LOWER_LIMINF):
            w = build_witness(g, mode, n_max)
            tag = f"witness {g.name} {mode}"
            rep.absorb(w.trace.properties, tag + ": ", {"command": "witness", "growth": g.name,
                                                         "mode": mode, "n_max": n_max})
            edge = w.tail_sup if mode == UPPER_LIMSUP else w.tail_inf
            rep.check(f"{tag}: tail ratio within 0.01 of 1",
                      edge.certainly_gt(Fraction(99, 100)) and edge.certainly_lt(Fraction(101, 100)))


def seq_b_suite(rep: Report, n_max: int) -> None:
    for g in (exponential(2), power(2), power(3)):
        sb = build_seq_B(g, Fraction(1, 2), n_max)
        rep.absorb(sb.trace.properties, f"seq-b {g.name}: ",
                   {"command": "seq-b", "growth": g.name, "n_max": n_max})


def seq_t_suite(rep: Report, j_max: int) -> None:
    for g in (exponential(2), power(2)):
        st = build_seq_T(g, Fraction(1, 2), j_max)
        rep.absorb(st.trace.properties, f"seq-t {g.name}: ",
                   {"command": "seq-t", "growth": g.name, "j_max": j_max})
        rep.check(f"seq-t {g.name}: tail inf within 0.05 of 1",
                  abs(float(st.tail_inf.mid()) - 1) < 0.05)


def dimension_suite(rep: Report, depth: int) -> None:
    cases = ((lambda n: 2 ** n, Fraction(1, 3), "2^n"),
             (lambda n: 3 ** n, Fraction(1, 4), "3^n"),
             (lambda n: 5 * n, Fraction(1, 2), "5n"))
    for log_s, target, label in cases:
        ts = TargetSequence.from_log(log_s, label)
        v = ratio_dim_estimate(ts, depth).value
        tol = Fraction(1, 1000) if depth >= 1000 else Fraction(1, 200)
        rep.check(f"ratio estimate for log s_n={label} near {target}",
                  abs(Fraction(str(float(v.mid()))) - target) < tol, detail=str(float(v.mid())))
    params = CoveringParams(Fraction(1, 2), 30)
    rep.check("zeta(3/2) enclosure narrower than 1e-3", params.M_eps.width() < 1e-3)
    rep.check("gate K^eps > 2M holds for K=30", params.gate_ok)
    cb = covering_bound(params, 10)
    rep.check("covering bound at N=10 <= 2^-9", cb.bound.certainly_le(Fraction(1, 512)))
    rep.check("chain terms <= 2^-n", cb.chain_ok)
    one = brute_covering_term(1, 30, 1, 10 ** 6, exact=True)
    rep.check("brute term n=1, K=30, s=1 is 1/30", one == Fraction(1, 30), detail=str(one))
    for n in (1, 2):
        t = brute_covering_term(n, 30, 1, 200)
        rep.check(f"brute term n={n} below chain term", t.certainly_le(chain_term(params, n)))
    d = dim_formulas(3, 4, 15)
    rep.check("dim_formulas(3,4,15) = (1/4,1/5,1/16)",
              d.as_tuple() == (Fraction(1, 4), Fraction(1, 5), Fraction(1, 16)))


def predicate_suite(rep: Report) -> None:
    q = [2 ** (2 ** n) if n % 2 == 0 else 1 for n in range(1, 9)]
    x = cf_core.CFPoint.from_quotients(q)
    r = membership_doubly_exp(x, SetPredicateParams(2, 2), 8)
    rep.check("quotient flag true exactly on even n",
              r.quotient_flags == [n % 2 == 0 for n in range(1, 9)])
    rep.check("product flag true on even n",
              all(r.product_flags[n - 1] for n in range(2, 9, 2)))


def sampler_suite(rep: Report, depth: int, count: int, seed: int = 4) -> None:
    ts = TargetSequence.matched_to(power(2))
    sr = sample_E_set(ts, depth, count, seed)
    rep.check("sampled quotients satisfy s_n <= a_n <= 2 s_n", sr.membership_ok, sr.first_violation)


def verify_all(profile: str = "small") -> Report:
    cfg = PROFILES[profile]
    rep = Report("verify-all", {"profile": profile, **cfg})
    euclid_suite(rep, cfg["euclid"])
    cylinder_suite(rep, cfg["words"])
    khintchine_suite(rep, cfg["mc_samples"], cfg["mc_n"])
    growth_suite(rep)
    witness_suite(rep, cfg["witness_n"])
    seq_b_suite(rep, cfg["seq_b_n"])
    seq_t_suite(rep, cfg["seq_t_j"])
    dimension_suite(rep, cfg["ratio_depth"])
    predicate_suite(rep)
    sampler_suite(rep, cfg["sample_depth"], cfg["sample_count"])
    rep.summary["passed"] = sum(a["passed"] for a in rep.assertions)
    rep.summary["failed"] = sum(not a["passed"] for a in rep.assertions)
    return rep
