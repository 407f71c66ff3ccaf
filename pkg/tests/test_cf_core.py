import math
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from fastkhintchine import cf_core
from fastkhintchine.cf_core import (CFPoint, PartialQuotient, birkhoff_log_sum, cf_expand, cf_value,
                                    euclid_subtractive, gauss_step, khintchine_estimate,
                                    khintchine_monte_carlo, make_cylinder)
from fastkhintchine.errors import DomainError
from fastkhintchine.logvalue import LogValue


@pytest.mark.parametrize("x, expected", [("1/2", [2]), ("2/5", [2, 2]), ("113/355", [3, 7, 16])])
def test_expand_examples(x, expected):
    assert cf_expand(Fraction(x)) == expected


@pytest.mark.parametrize("x, expected", [("1/3", (3, 0)), ("2/5", (2, Fraction(1, 2))),
                                         ("113/355", (3, Fraction(16, 113)))])
def test_gauss_step_examples(x, expected):
    assert gauss_step(Fraction(x)) == expected


@pytest.mark.parametrize("bad", [0, 1, Fraction(3, 2), Fraction(-1, 2)])
def test_expand_rejects_outside_unit_interval(bad):
    with pytest.raises(DomainError):
        cf_expand(bad)


@settings(max_examples=300, deadline=None)
@given(st.integers(2, 10 ** 6).flatmap(lambda q: st.tuples(st.integers(1, q - 1), st.just(q))))
def test_expand_matches_sympy_and_subtractive_euclid(pq):
    p, q = pq
    x = Fraction(p, q)
    ref = [int(t) for t in sympy.continued_fraction(sympy.Rational(p, q))][1:]
    assert cf_expand(x) == ref
    assert euclid_subtractive(p, q) == ref
    assert cf_value(ref) == x


def test_max_terms_truncates():
    assert cf_expand(Fraction(113, 355), max_terms=2) == [3, 7]


@pytest.mark.parametrize("word, ends, length", [
    ((2,), {Fraction(1, 2), Fraction(1, 3)}, Fraction(1, 6)),
    ((1, 2), {Fraction(2, 3), Fraction(3, 4)}, Fraction(1, 12)),
])
def test_cylinder_examples(word, ends, length):
    c = make_cylinder(word)
    assert set(c.endpoints) == ends
    assert c.length == length


def test_all_ones_word_gives_fibonacci_continuant():
    assert make_cylinder((1, 1, 1, 1)).q_n == 5


def _fold(word):
    x = Fraction(0)
    for s in reversed(word):
        x = 1 / (s + x)
    return x


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 50), min_size=1, max_size=20))
def test_cylinder_matches_direct_fold_and_contains_its_points(word):
    c = make_cylinder(word)
    a, b = _fold(word), _fold(word[:-1] + [word[-1] + 1])
    assert {a, b} == set(c.endpoints)
    assert c.length == abs(a - b)
    assert c.length * math.prod(word) ** 2 <= 1
    # an interior point expands to a word starting with ``word``
    mid = (a + b) / 2
    assert cf_expand(mid)[:len(word)] == list(word)


def test_partial_quotient_floor_materialises_small_targets():
    pq = PartialQuotient.floor_of(LogValue.exp_of(10))
    with mpmath.workdps(40):
        assert pq.value == int(mpmath.floor(mpmath.exp(10)))


def test_symbolic_quotient_log_bounds():
    t = 2 ** 20
    pq = PartialQuotient.floor_of(LogValue.exp_of(t))
    assert not pq.is_exact
    lb = pq.log_bounds()
    assert lb.hi == t and lb.lo < t and t - lb.lo < 1e-60


def test_birkhoff_examples():
    ones = CFPoint.from_quotients([1] * 10)
    assert birkhoff_log_sum(ones, 10).rational == 1
    two = birkhoff_log_sum(CFPoint.from_quotients([2, 2]), 2)
    assert abs(float(two.ln_enclosure().mid()) - 1.386294) < 1e-6
    assert khintchine_estimate(CFPoint.from_quotients([3] * 7), 7).contains(0) is False
    assert abs(float(khintchine_estimate(CFPoint.from_quotients([3] * 7), 7).mid()) - math.log(3)) < 1e-15


def test_birkhoff_of_doubly_exponential_prefix_tracks_psi():
    def gen():
        k = 1
        while True:
            yield PartialQuotient.floor_of(LogValue.exp_of(2 ** k - 2 ** (k - 1)))
            k += 1
    x = CFPoint.from_generator(gen(), "doubling")
    s = birkhoff_log_sum(x, 20).ln_enclosure()
    # oracle: sum of log floor(e^(2^(k-1))) for k <= 20 at 60 digits in mpmath
    ref = "1048574.627719897103528223450088624540863724"
    with mpmath.workdps(50):
        assert abs(s.mid() - mpmath.mpf(ref)) < mpmath.mpf(10) ** -30
    psi = 2 ** 20
    # the floor losses plus the missing psi(0) = 1 leave a relative gap of 1.31e-6
    assert s.certainly_ge(Fraction(psi) * (1 - Fraction(2, 10 ** 6)))
    assert s.certainly_le(psi)


def test_rational_point_runs_out_of_quotients():
    x = CFPoint.from_rational(Fraction(2, 5))
    assert x.exact_prefix(5) == [2, 2]
    with pytest.raises(DomainError):
        x.quotient(3)


def test_monte_carlo_is_seeded():
    assert khintchine_monte_carlo(50, 200, seed=7) == khintchine_monte_carlo(50, 200, seed=7)


def test_monte_carlo_near_khintchine_log():
    mean, se = khintchine_monte_carlo(500, 2000, seed=11)
    assert abs(mean - cf_core.KHINTCHINE_LOG) < 0.02
    assert se < 0.02
