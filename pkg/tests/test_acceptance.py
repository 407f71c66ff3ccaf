"""The eleven acceptance criteria, each at its stated tolerance and time budget."""

import math
import random
import time
from fractions import Fraction

import mpmath

from fastkhintchine import cf_core
from fastkhintchine.cf_core import cf_expand, euclid_subtractive, make_cylinder
from fastkhintchine.constructions import (LOWER_LIMINF, UPPER_LIMSUP, TargetSequence, build_seq_B,
                                          build_seq_T, build_witness, sample_E_set)
from fastkhintchine.dimension import (CoveringParams, brute_covering_term, chain_term, covering_bound,
                                      dim_formulas, ratio_dim_estimate)
from fastkhintchine.growth import exponential, factorial_blocks, power
from fastkhintchine.reports import dumps
from fastkhintchine.suites import paper_example_suite, verify_all

GROWTHS = [("2^n", exponential(2)), ("n^2", power(2)), ("n^3", power(3)),
           ("factorial-blocks", factorial_blocks())]


def _finish(record, number, title, checks, elapsed, budget):
    """checks: list of (label, ok). Records one line and asserts everything held."""
    checks = checks + [(f"time {elapsed:.1f}s < {budget}s", elapsed < budget)]
    failed = [label for label, ok in checks if not ok]
    record(number, title, not failed, "failed: " + "; ".join(failed) if failed else f"{elapsed:.1f}s")
    assert not failed, failed


def test_criterion_01_euclid_equivalence(acceptance_line):
    rng = random.Random(20240101)
    cases = []
    for _ in range(1000):
        q = rng.randint(2, 10 ** 6)
        cases.append((rng.randint(1, q - 1), q))
    t0 = time.perf_counter()
    mismatches = [(p, q) for p, q in cases if cf_expand(Fraction(p, q)) != euclid_subtractive(p, q)]
    elapsed = time.perf_counter() - t0
    _finish(acceptance_line, 1, "cf_expand agrees with Euclid on 1000 rationals",
            [(f"{len(mismatches)} mismatches", not mismatches)], elapsed, 1)


def test_criterion_02_cylinder_identities(acceptance_line):
    rng = random.Random(20240102)
    words = [[rng.randint(1, 50) for _ in range(rng.randint(1, 20))] for _ in range(1000)]
    t0 = time.perf_counter()
    bad_length, bad_product, bad_fold = [], [], []
    for w in words:
        c = make_cylinder(w)
        if c.length != Fraction(1, c.q_n * (c.q_n + c.q_prev)):
            bad_length.append(w)
        if c.length * math.prod(w) ** 2 > 1:
            bad_product.append(w)
        # second route: endpoints by folding the word from the back
        x, y = Fraction(0), Fraction(0)
        for s in reversed(w):
            x = 1 / (s + x)
        for s in reversed(w[:-1] + [w[-1] + 1]):
            y = 1 / (s + y)
        if abs(x - y) != c.length:
            bad_fold.append(w)
    elapsed = time.perf_counter() - t0
    _finish(acceptance_line, 2, "cylinder length and product identities on 1000 words",
            [("length formula", not bad_length), ("length times product squared <= 1", not bad_product),
             ("length equals folded endpoint gap", not bad_fold)], elapsed, 5)


def test_criterion_03_khintchine_constant(acceptance_line):
    t0 = time.perf_counter()
    mean, se = cf_core.khintchine_monte_carlo(10_000, 10_000, seed=2024)
    elapsed = time.perf_counter() - t0
    _finish(acceptance_line, 3, f"Monte Carlo log-mean {mean:.5f} vs 0.98782",
            [(f"|{mean:.5f} - 0.98782| < 0.02", abs(mean - 0.98782) < 0.02)], elapsed, 60)


def test_criterion_04_factorial_block_example(acceptance_line):
    t0 = time.perf_counter()
    rep = paper_example_suite(6)
    elapsed = time.perf_counter() - t0
    checks = [(a["name"] + (f" [{a['detail']}]" if not a["passed"] and "detail" in a else ""),
               a["passed"]) for a in rep.assertions]
    _finish(acceptance_line, 4, "factorial-block example (ratio 15, block rates, dims)",
            checks, elapsed, 10)


def test_criterion_05_seq_b(acceptance_line):
    t0 = time.perf_counter()
    checks = []
    for label, g in GROWTHS:
        sb = build_seq_B(g, Fraction(1, 2), 1000)
        for p in sb.trace.properties:
            checks.append((f"{label}: {p['name']}" + ("" if p["passed"] else f" (first at {p.get('witness')})"),
                           p["passed"]))
        checks.append((f"{label}: bound >= 1/(b+1+eps) - 1e-9",
                       sb.dim_lower_bound.certainly_ge(1 / (sb.b_used + 1 + Fraction(1, 2)) - Fraction(1, 10 ** 9))))
    elapsed = time.perf_counter() - t0
    _finish(acceptance_line, 5, "B_n sequence properties up to n = 1000", checks, elapsed, 30)


def test_criterion_06_seq_t(acceptance_line):
    t0 = time.perf_counter()
    checks = []
    for label, g in GROWTHS:
        st = build_seq_T(g, Fraction(1, 2), 1000)
        for p in st.trace.properties:
            checks.append((f"{label}: {p['name']}", p["passed"]))
        checks.append((f"{label}: tail inf within 0.05 of 1",
                       st.tail_inf.certainly_gt(Fraction(95, 100)) and st.tail_inf.certainly_lt(Fraction(105, 100))))
        checks.append((f"{label}: bound >= 1/(B+1+eps) - 1e-9",
                       st.dim_lower_bound.certainly_ge(1 / (st.B_used + 1 + Fraction(1, 2)) - Fraction(1, 10 ** 9))))
    elapsed = time.perf_counter() - t0
    _finish(acceptance_line, 6, "T_j sequence properties up to j = 1000", checks, elapsed, 120)


def test_criterion_07_witness_ratio(acceptance_line):
    t0 = time.perf_counter()
    checks = []
    for label, g in (("factorial-blocks", factorial_blocks()), ("2^n", exponential(2))):
        for mode in (UPPER_LIMSUP, LOWER_LIMINF):
            w = build_witness(g, mode, 200)
            edge = w.tail_sup if mode == UPPER_LIMSUP else w.tail_inf
            checks.append((f"{label} {mode}: tail within 0.01 of 1",
                           edge.certainly_gt(Fraction(99, 100)) and edge.certainly_lt(Fraction(101, 100))))
            checks.append((f"{label} {mode}: interval width {w.max_width:.1e} < 1e-6", w.max_width < 1e-6))
            checks.append((f"{label} {mode}: construction checks", w.trace.all_passed))
    elapsed = time.perf_counter() - t0
    _finish(acceptance_line, 7, "witness ratio tails at n_max = 200", checks, elapsed, 30)


def test_criterion_08_covering_chain(acceptance_line):
    t0 = time.perf_counter()
    p = CoveringParams(Fraction(1, 2), 30)
    cb = covering_bound(p, 10)
    with mpmath.workdps(30):
        z = mpmath.zeta(mpmath.mpf(3) / 2)
    checks = [
        ("M enclosure width < 1e-3", p.M_eps.width() < 1e-3),
        ("M enclosure contains zeta(3/2)", p.M_eps.lo <= z <= p.M_eps.hi),
        ("gate K^eps > 2M", p.gate_ok),
        ("covering_bound(N=10) <= 2^-9", cb.bound.certainly_le(Fraction(1, 512))),
        ("brute n=1 equals 1/30 exactly", brute_covering_term(1, 30, 1, 10 ** 6, exact=True) == Fraction(1, 30)),
    ]
    for n in (1, 2, 3):
        checks.append((f"brute term n={n} <= chain term",
                       brute_covering_term(n, 30, 1, 200).certainly_le(chain_term(p, n))))
    elapsed = time.perf_counter() - t0
    _finish(acceptance_line, 8, "covering chain with eps = 1/2, K = 30", checks, elapsed, 30)


def test_criterion_09_formula_cross_validation(acceptance_line):
    t0 = time.perf_counter()
    checks = []
    for label, log_s, target in (("2^n", lambda n: 2 ** n, Fraction(1, 3)),
                                 ("3^n", lambda n: 3 ** n, Fraction(1, 4)),
                                 ("5n", lambda n: 5 * n, Fraction(1, 2))):
        v = ratio_dim_estimate(TargetSequence.from_log(log_s, label), 1000).value
        checks.append((f"log s_n = {label}: {float(v.mid()):.6f} within 1e-3 of {target}",
                       abs(Fraction(str(float(v.mid()))) - target) < Fraction(1, 1000)))
    # matched correspondence: log s_n = psi(n) - psi(n-1) for psi with closed-form exponents
    for label, g in (("2^n", exponential(2)), ("3^n", exponential(3)), ("n^2", power(2))):
        d = dim_formulas(*g.known_exponents)
        v = ratio_dim_estimate(TargetSequence.matched_to(g), 1000).value
        checks.append((f"matched {label}: ratio estimate vs 1/(B+1) = {d.dim_lower}",
                       abs(Fraction(str(float(v.mid()))) - d.dim_lower) < Fraction(1, 1000)))
        checks.append((f"matched {label}: ordering", d.dim_full <= d.dim_lower <= d.dim_upper))
    elapsed = time.perf_counter() - t0
    _finish(acceptance_line, 9, "dimension estimator vs closed forms at depth 1000", checks, elapsed, 5)


def test_criterion_10_sampler_membership(acceptance_line):
    depth = 60
    ts = TargetSequence.matched_to(power(2))     # s_n = e^(2n - 1)
    t0 = time.perf_counter()
    rep = sample_E_set(ts, depth, 1000, seed=99)
    elapsed = time.perf_counter() - t0
    # second route: compare ln a_n against 2n - 1 with mpmath at 80 digits
    bad = []
    with mpmath.workdps(80):
        for i, q in enumerate(rep.quotients):
            for n, a in enumerate(q, start=1):
                la = mpmath.log(a)
                if not (la >= 2 * n - 1 and la <= 2 * n - 1 + mpmath.log(2)):
                    bad.append((i, n))
    _finish(acceptance_line, 10, "1000 sampled points satisfy s_n <= a_n <= 2 s_n",
            [("library membership check", rep.membership_ok), (f"{len(bad)} mpmath violations", not bad),
             ("1000 points of full depth", len(rep.quotients) == 1000 and all(len(q) == depth for q in rep.quotients))],
            elapsed, 10)


def test_criterion_11_determinism(acceptance_line):
    t0 = time.perf_counter()
    first = dumps(verify_all("small"))
    second = dumps(verify_all("small"))
    elapsed = time.perf_counter() - t0
    _finish(acceptance_line, 11, "verify-all small is byte-identical across runs",
            [("identical bytes", first == second), ("all small-profile checks pass", '"status": "ok"' in first)],
            elapsed, 300)
