from fractions import Fraction

import mpmath
import pytest

from fastkhintchine.constructions import (LOWER_LIMINF, UPPER_LIMSUP, TargetSequence,
                                          build_alpha_plan, build_seq_B, build_seq_T,
                                          build_witness, sample_E_set)
from fastkhintchine.errors import BudgetError, PreconditionError
from fastkhintchine.growth import exponential, factorial_blocks, power
from fastkhintchine.interval import Interval, log_int
from fastkhintchine.logvalue import LogValue


def plan_oracle(psi, n_max, horizon):
    """Least n with psi(m)/m >= k^2 for every m in [n, horizon], by direct scan."""
    out, k = [], 1
    while True:
        cands = [n for n in range(1, horizon + 1)
                 if all(Fraction(psi(m), m) >= k * k for m in range(n, horizon + 1))]
        if not cands or cands[0] > n_max:
            return out
        n = max(cands[0], out[-1] + 1 if out else 1)
        out.append(n)
        k += 1


def test_alpha_plan_exponential_two():
    plan = build_alpha_plan(exponential(2), 8, horizon=64)
    assert plan.n_k == plan_oracle(lambda m: 2 ** m, 8, 64) == [1, 4, 6, 7, 8]
    assert plan.alpha[:8] == [2, 2, 2, 3, 3, 4, 5, 6]


def test_alpha_plan_squares():
    plan = build_alpha_plan(power(2), 100)
    assert plan.n_k == [k * k for k in range(1, 11)]
    assert all(a <= b for a, b in zip(plan.alpha, plan.alpha[1:]))


def test_alpha_ratio_bound():
    g = power(2)
    n = 100
    plan = build_alpha_plan(g, n)
    bound = log_int(plan.alpha[n - 1], 256) * Interval.exact(Fraction(n, n * n))
    assert not plan.ratio_series[n - 1].certainly_gt(bound)


def test_witness_prefix_matches_floor_oracle():
    w = build_witness(exponential(2), UPPER_LIMSUP, 3)
    with mpmath.workdps(40):
        ref = [int(mpmath.floor(a * mpmath.exp(2 ** n - (2 ** (n - 1) if n > 1 else 0))))
               for n, a in zip((1, 2, 3), w.alpha)]
    assert w.point.exact_prefix(3) == ref == [14, 14, 109]


@pytest.mark.parametrize("mode", [UPPER_LIMSUP, LOWER_LIMINF])
def test_witness_properties_hold(mode):
    w = build_witness(exponential(2), mode, 60)
    assert w.trace.all_passed, w.trace.failed()
    edge = w.tail_sup if mode == UPPER_LIMSUP else w.tail_inf
    assert abs(float(edge.mid()) - 1) < 0.01
    assert w.max_width < 1e-6


def test_witness_with_unit_alpha_stays_below_envelope():
    w = build_witness(power(2), LOWER_LIMINF, 40, alpha_mode="one")
    assert w.trace.all_passed, w.trace.failed()


def seq_b_oracle(psi, b, eps, n_max):
    out = [Fraction(psi(1))]
    for n in range(2, n_max + 1):
        out.append(min(Fraction(psi(n)), (b + eps) * out[-1]))
    return out


def test_seq_b_exponential_touches_everywhere():
    sb = build_seq_B(exponential(2), Fraction(1, 2), 200)
    assert [v.rational for v in sb.log_B] == [2 ** n for n in range(1, 201)]
    assert sb.touch_indices == list(range(1, 201))
    assert sb.trace.all_passed


def test_seq_b_squares_against_recursion_oracle():
    sb = build_seq_B(power(2), Fraction(1, 2), 300)
    ref = seq_b_oracle(lambda n: n * n, 1, Fraction(1, 2), 300)
    assert [v.rational for v in sb.log_B] == ref
    # the min branch is active until 1.5^(n-1) catches n^2, at n = 15
    assert sb.first_retouch == 15
    assert sb.touch_indices[1:] == list(range(15, 301))
    assert sb.trace.all_passed
    assert sb.dim_lower_bound.contains(Fraction(2, 5))


def test_seq_b_factorial_blocks_misses_windows():
    # fives only arrive at block ends, so (b + eps)-growth stalls inside
    # long blocks and windows [m, 2m] without a touch appear
    sb = build_seq_B(factorial_blocks(), Fraction(1, 2), 1000)
    assert sb.missing_windows and sb.missing_windows[0] == 154
    names = {p["name"] for p in sb.trace.failed()}
    assert names == {"touch in every window [m, 2m]"}


def seq_t_oracle(psi, q, j, reach=400):
    best = max(Fraction(psi(k)) for k in range(1, j + 1))
    for k in range(j + 1, j + reach):
        best = max(best, Fraction(psi(k)) * q ** j / q ** k)
    return best


def test_seq_t_exponential_peaks_on_diagonal():
    st = build_seq_T(exponential(2), Fraction(1, 2), 100)
    assert st.t == list(range(1, 101))
    assert [v.rational for v in st.log_T] == [2 ** j for j in range(1, 101)]
    assert st.trace.all_passed


def test_seq_t_squares_against_scan_oracle():
    st = build_seq_T(power(2), Fraction(1, 2), 120)
    for j in (1, 2, 5, 17, 60, 120):
        assert st.log_T[j - 1].rational == seq_t_oracle(lambda n: n * n, Fraction(3, 2), j)
    assert all(a <= b for a, b in zip(st.t, st.t[1:]))
    assert st.trace.all_passed


def test_target_sequence_and_sampler():
    ts = TargetSequence.matched_to(power(2))
    assert ts.s_at(5).identical(LogValue.exp_of(25 - 16))
    rep = sample_E_set(ts, 30, 50, seed=3)
    assert rep.membership_ok
    for q in rep.quotients:
        for n, a in enumerate(q, start=1):
            s = ts.s_at(n)
            assert s <= LogValue.of(a) <= s * LogValue.of(2)
    again = sample_E_set(ts, 30, 50, seed=3)
    assert again.quotients == rep.quotients


def test_sampler_preconditions():
    with pytest.raises(PreconditionError):
        sample_E_set(TargetSequence.from_values(lambda n: 2), 20, 5)
    with pytest.raises(BudgetError):
        sample_E_set(TargetSequence.from_log(lambda n: 2 ** n), 20, 5)
