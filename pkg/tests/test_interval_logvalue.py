from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from fastkhintchine.errors import IndistinguishableError
from fastkhintchine.interval import Interval, log_int
from fastkhintchine.logvalue import ExactLog, LogValue

fractions = st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=10 ** 6)


def _ref(x, dps=120):
    with mpmath.workdps(dps):
        return mpmath.mpf(x.numerator) / x.denominator


@settings(max_examples=200, deadline=None)
@given(fractions, fractions)
def test_interval_ops_enclose_high_precision_reference(a, b):
    ia, ib = Interval.exact(a, 64), Interval.exact(b, 64)
    with mpmath.workdps(120):
        ra, rb = _ref(a), _ref(b)
        cases = [(ia + ib, ra + rb), (ia - ib, ra - rb), (ia * ib, ra * rb),
                 (ia / ib, ra / rb), (ia.log(), mpmath.log(ra)), (ib.exp(), mpmath.exp(rb))]
        for iv, ref in cases:
            assert iv.lo <= ref <= iv.hi


@settings(max_examples=100, deadline=None)
@given(fractions)
def test_exact_interval_contains_its_rational(q):
    iv = Interval.exact(q)
    assert iv.contains(q)
    assert iv.width() <= 2 ** -200 * max(1, abs(q))


def test_log_int_is_tight():
    iv = log_int(10 ** 30, 256)
    with mpmath.workdps(100):
        assert iv.lo <= mpmath.log(mpmath.mpf(10) ** 30) <= iv.hi
    assert iv.width() < 2 ** -240


def test_floor_of_interval():
    assert Interval.exact(Fraction(7, 2)).floor() == 3
    assert Interval(Interval.exact(Fraction(99, 100)).raw[0], Interval.exact(Fraction(101, 100)).raw[1]).floor() is None


def test_exact_log_arithmetic_cancels():
    a = ExactLog.from_bases([(12, 1)])
    b = ExactLog.from_bases([(2, 2), (3, 1)])
    assert (a - b).is_zero()
    assert a.as_rational_value() == 12


def test_logvalue_identity_via_exact_forms():
    assert (LogValue.of(3) * LogValue.of(5)).identical(LogValue.of(15))
    assert LogValue.power(2, 10).rational == 1024
    assert not LogValue.of(2).identical(LogValue.of(3))


def test_logvalue_huge_comparison_resolves_by_escalation():
    # e^(2^100) against 3^(2^100 / log 3 rounded): differ far below double precision
    big = LogValue.exp_of(2 ** 100)
    other = LogValue.exp_of(2 ** 100 + Fraction(1, 10 ** 40))
    assert big < other
    assert other > big


def test_equal_values_without_exact_forms_are_indistinguishable():
    a = LogValue.from_enclosure(lambda p: log_int(2, p))
    b = LogValue.from_enclosure(lambda p: log_int(2, p))
    with pytest.raises(IndistinguishableError):
        a.cmp(b)


def test_floor_and_ceil_of_exp():
    v = LogValue.exp_of(10)
    with mpmath.workdps(60):
        ref = int(mpmath.floor(mpmath.exp(10)))
    assert v.floor() == ref
    assert v.ceil() == ref + 1
    assert LogValue.of(Fraction(7, 2)).floor() == 3


def test_describe_keeps_exact_form():
    d = (LogValue.of(3) * LogValue.exp_of(Fraction(1, 2))).describe(10)
    assert d["exact_form"] == [[3, 1, 1]]
    assert d["const"] == [1, 2]
    with mpmath.workdps(30):
        assert abs(mpmath.mpf(d["ln"]) - (mpmath.log(3) + mpmath.mpf(1) / 2)) < 1e-9


def test_describe_mid_uses_full_precision():
    d = (LogValue.of(7) * LogValue.exp_of(4320)).describe(30)
    with mpmath.workdps(50):
        assert abs(mpmath.mpf(d["ln"]) - (4320 + mpmath.log(7))) < mpmath.mpf(10) ** -25
