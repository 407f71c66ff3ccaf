from fractions import Fraction

import mpmath
import pytest

from fastkhintchine.cf_core import CFPoint
from fastkhintchine.constructions import TargetSequence, UPPER_LIMSUP, build_witness
from fastkhintchine.dimension import (INF, CoveringParams, SetPredicateParams, brute_covering_term,
                                      chain_term, covering_bound, dim_formulas, inclusion_check_pac,
                                      ratio_dim_estimate, membership_doubly_exp, membership_fast_ratio,
                                      zeta_enclosure)
from fastkhintchine.errors import DomainError, GateError, PreconditionError
from fastkhintchine.growth import custom, exponential, factorial_blocks
from fastkhintchine.interval import Interval, log_int
from fastkhintchine.logvalue import LogValue


def test_dim_formulas_examples():
    assert dim_formulas(3, 4, 15).as_tuple() == (Fraction(1, 4), Fraction(1, 5), Fraction(1, 16))
    assert dim_formulas(1, 1, 1).as_tuple() == (Fraction(1, 2),) * 3
    assert dim_formulas(INF, INF, INF).as_tuple() == (0, 0, 0)


def test_dim_formulas_clamps_and_orders():
    d = dim_formulas(Fraction(1, 2), 1, 2)
    assert d.clamped == ["b"] and d.dim_upper == Fraction(1, 2)
    with pytest.raises(DomainError):
        dim_formulas(4, 3, 15)
    assert dim_formulas(4, 3, 15, override=True).dim_upper == Fraction(1, 5)


@pytest.mark.parametrize("log_s, target", [(lambda n: 2 ** n, Fraction(1, 3)),
                                           (lambda n: 3 ** n, Fraction(1, 4)),
                                           (lambda n: 7 * n, Fraction(1, 2))])
def test_ratio_dim_estimate_estimates(log_s, target):
    r = ratio_dim_estimate(TargetSequence.from_log(log_s), 400)
    assert abs(float(r.value.mid()) - float(target)) < 0.003


def test_ratio_dim_estimate_matches_closed_form_for_geometric_logs():
    # sup over the window of 2^(n+1) / (2^(n+1) - 2) is attained at its left end
    depth = 64
    r = ratio_dim_estimate(TargetSequence.from_log(lambda n: 2 ** n), depth)
    m = depth // 2
    ratio = Fraction(2 ** (m + 1), 2 ** (m + 1) - 2)
    assert r.sup_ratio.contains(ratio)
    assert r.value.contains(1 / (2 + ratio))


def test_ratio_dim_estimate_identity_sequence_slowly_approaches_half():
    r = ratio_dim_estimate(TargetSequence.from_values(lambda n: n), 1000)
    assert 0.49 < float(r.value.mid()) < 0.5


def test_ratio_dim_estimate_rejects_bounded_logs():
    with pytest.raises(PreconditionError):
        ratio_dim_estimate(TargetSequence.from_values(lambda n: 2), 100)


def test_ratio_dim_estimate_agrees_with_dim_formula_on_matched_sequence():
    r = ratio_dim_estimate(TargetSequence.matched_to(exponential(3)), 300)
    assert abs(float(r.value.mid()) - float(dim_formulas(3, 3, 3).dim_lower)) < 1e-3


def test_zeta_enclosure_contains_mpmath_value():
    iv = zeta_enclosure(Fraction(3, 2))
    with mpmath.workdps(40):
        ref = mpmath.zeta(mpmath.mpf(3) / 2)
    assert iv.lo <= ref <= iv.hi
    assert iv.width() < 1e-3


def test_covering_chain_and_gate():
    p = CoveringParams(Fraction(1, 2), 30)
    assert p.gate_ok
    cb = covering_bound(p, 10)
    assert cb.chain_ok
    assert cb.bound.certainly_le(Fraction(1, 512))
    with mpmath.workdps(30):
        r = mpmath.zeta(1.5) / mpmath.sqrt(30)
        ref = r ** 10 / (1 - r)
    assert cb.bound.lo <= ref <= cb.bound.hi
    assert covering_bound(p, 11).bound.certainly_lt(cb.bound)
    with pytest.raises(GateError):
        covering_bound(CoveringParams(Fraction(1, 2), 25), 10)


def test_brute_covering_telescopes_to_one_over_k():
    assert brute_covering_term(1, 30, 1, 10 ** 6, exact=True) == Fraction(1, 30)
    assert brute_covering_term(1, 30, Fraction(1, 2) + Fraction(1, 2), 10 ** 6).contains(Fraction(1, 30))
    direct = sum(Fraction(1, s * (s + 1)) for s in range(30, 2000)) + Fraction(1, 2000)
    assert direct == Fraction(1, 30)


def test_brute_terms_below_chain_terms():
    p = CoveringParams(Fraction(1, 2), 30)
    for n in (1, 2):
        assert brute_covering_term(n, 30, 1, 200).certainly_le(chain_term(p, n))
    small = CoveringParams(Fraction(1, 2), 4)
    assert brute_covering_term(2, 4, 1, 1000).certainly_le(chain_term(small, 2))


def test_doubly_exponential_flags():
    a, c = 2, 2
    ceil_q = [int(LogValue.power(a, c ** n).ceil()) for n in range(1, 7)]
    r = membership_doubly_exp(CFPoint.from_quotients(ceil_q), SetPredicateParams(a, c), 6)
    assert all(r.quotient_flags) and all(r.product_flags)
    r1 = membership_doubly_exp(CFPoint.from_quotients([1] * 6), SetPredicateParams(a, c), 6)
    assert not any(r1.quotient_flags) and not any(r1.product_flags)
    q = [2 ** (2 ** n) if n % 2 == 0 else 1 for n in range(1, 9)]
    r2 = membership_doubly_exp(CFPoint.from_quotients(q), SetPredicateParams(2, 2), 8)
    assert r2.quotient_flags == [n % 2 == 0 for n in range(1, 9)]
    assert all(r2.product_flags[n - 1] for n in (2, 4, 6, 8))


def test_inclusion_check_examples():
    r = inclusion_check_pac(CFPoint.from_quotients([1] * 10), 2, 2, Fraction(1, 2), 10)
    assert r.applicable and r.N == 0 and r.holds
    below = [max(1, int(LogValue.power(2, Fraction(3, 2) ** n).floor()) - 1) for n in range(1, 12)]
    r2 = inclusion_check_pac(CFPoint.from_quotients(below), 2, 2, Fraction(1, 2), 11)
    assert r2.applicable and r2.holds
    above = [int(LogValue.power(2, 2 ** n).ceil()) for n in range(1, 8)]
    r3 = inclusion_check_pac(CFPoint.from_quotients(above), 2, 2, Fraction(1, 2), 7)
    assert not r3.applicable


def test_fast_ratio_on_witness_and_constant_point():
    w = build_witness(factorial_blocks(), UPPER_LIMSUP, 120)
    r = membership_fast_ratio(w.point, factorial_blocks(), 120)
    assert abs(float(r.tail_sup.mid()) - 1) < 0.01
    flat = membership_fast_ratio(CFPoint.from_quotients([2] * 40), exponential(2), 40)
    assert float(flat.tail_sup.hi) < 1e-4
    assert float(flat.tail_inf.hi) < 1e-9


@pytest.mark.parametrize("a, c, A", [(3, 2, 2), (2, 3, 5), (5, Fraction(3, 2), 3)])
def test_product_flag_matches_threshold_flag(a, c, A):
    # with psi(n) = c^n log a / log A, Pi_n >= a^(c^n) is the same event as Pi_n >= A^psi(n)
    q = [int(LogValue.power(a, Fraction(c) ** n).ceil()) + 1 if n % 3 else 1 for n in range(1, 8)]
    x = CFPoint.from_quotients(q)
    de = membership_doubly_exp(x, SetPredicateParams(a, c, A), 7)

    def psi(n):
        return LogValue.from_enclosure(
            lambda p: (Interval.exact(Fraction(c) ** n, p) * log_int(a, p) / log_int(A, p)).log())
    g = custom(psi, "scaled doubly exponential")
    fr = membership_fast_ratio(x, g, 7, A=A)
    assert fr.threshold_flags == de.product_flags
    assert any(de.product_flags)
