import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fewnomial.errors import DomainError, InputError, NonPositiveBase
from fewnomial.fewnomial_builder import base_m3
from fewnomial.numeric_core import (
    DyadicInterval,
    GemSum,
    GemTerm,
    PowerCoeff,
    eval_gem,
    eval_gem_derivative,
    interval_pow,
    rational_enclosure,
    to_rational,
)


def _mp_gem(f, x):
    """Independent mpmath evaluation of a GemSum at a rational point."""
    with mpmath.workdps(60):
        x = mpmath.mpf(x.numerator) / x.denominator
        total = mpmath.mpf(0)
        for t in f.terms:
            c = t.coeff
            if isinstance(c, PowerCoeff):
                cv = c.sign * mpmath.power(mpmath.mpf(c.base.numerator) / c.base.denominator,
                                           mpmath.mpf(c.exponent.numerator) / c.exponent.denominator)
            else:
                cv = mpmath.mpf(c.numerator) / c.denominator
            a = mpmath.mpf(t.a.numerator) / t.a.denominator
            b = mpmath.mpf(t.b.numerator) / t.b.denominator
            total += cv * x**a * (1 - x) ** b
        return total


def test_to_rational_accepts_strings_and_ints():
    assert to_rational("3/4") == Fraction(3, 4)
    assert to_rational(5) == Fraction(5)


def test_interval_pow_unit_base():
    r = interval_pow(DyadicInterval(1, 1, 64), Fraction(35, 12))
    assert r.contains(1)


def test_interval_pow_square_root():
    r = interval_pow(DyadicInterval(Fraction(1, 4), Fraction(1, 4), 64), Fraction(1, 2))
    assert r.contains(Fraction(1, 2))
    assert r.width < Fraction(1, 2**50)


def test_interval_pow_against_mpmath():
    r = interval_pow(rational_enclosure(Fraction(31, 44), 128), Fraction(35, 12))
    with mpmath.workdps(80):
        ref = mpmath.power(mpmath.mpf(31) / 44, mpmath.mpf(35) / 12)
        assert mpmath.mpf(r.lo.numerator) / r.lo.denominator <= ref <= mpmath.mpf(r.hi.numerator) / r.hi.denominator


def test_interval_pow_rejects_nonpositive_base():
    with pytest.raises(NonPositiveBase):
        interval_pow(DyadicInterval(0, 1, 64), Fraction(1, 2))


def test_empty_interval_rejected():
    with pytest.raises(InputError):
        DyadicInterval(2, 1)


def test_eval_constant_sum():
    f = GemSum.from_terms([])
    assert eval_gem(f, DyadicInterval(Fraction(1, 3), Fraction(1, 3))).contains(1)


def test_eval_linear():
    f = GemSum.from_terms([GemTerm(Fraction(-1), Fraction(1), Fraction(0))])
    assert eval_gem(f, DyadicInterval(Fraction(1, 2), Fraction(1, 2))).contains(Fraction(1, 2))


def test_eval_base_case_sign_definite():
    f = base_m3()
    v = eval_gem(f, DyadicInterval(Fraction(1, 2), Fraction(1, 2), 128))
    ref = _mp_gem(f, Fraction(1, 2))
    assert v.sign() != 0
    assert v.sign() == (1 if ref > 0 else -1)
    assert v.lo_float() <= float(ref) <= v.hi_float()


def test_eval_domain_error():
    f = base_m3()
    with pytest.raises(DomainError):
        eval_gem(f, DyadicInterval(0, Fraction(1, 2)))
    with pytest.raises(DomainError):
        eval_gem(f, DyadicInterval(Fraction(1, 2), 1))


def test_derivative_simple_cases():
    f = GemSum.from_terms([GemTerm(Fraction(-1), Fraction(1), Fraction(0))])
    assert eval_gem_derivative(f, DyadicInterval(Fraction(1, 5), Fraction(1, 5))).contains(-1)
    g = GemSum.from_terms([GemTerm(Fraction(-1), Fraction(2), Fraction(0))])
    assert eval_gem_derivative(g, DyadicInterval(Fraction(1, 2), Fraction(1, 2))).contains(-1)


def test_derivative_base_case_finite_difference():
    f = base_m3()
    x = Fraction(1, 2)
    h = Fraction(1, 2**40)
    d = eval_gem_derivative(f, DyadicInterval(x, x, 128))
    with mpmath.workdps(60):
        fd = (_mp_gem(f, x + h) - _mp_gem(f, x - h)) / (2 * mpmath.mpf(h.numerator) / h.denominator)
    assert d.sign() != 0
    assert abs(d.mid_float() - float(fd)) < 1e-9 + d.width


def _random_integer_gem(rng):
    terms = []
    seen = set()
    for _ in range(rng.randint(1, 4)):
        a, b = rng.randint(0, 6), rng.randint(0, 6)
        if (a, b) in seen or (a, b) == (0, 0):
            continue
        seen.add((a, b))
        terms.append(GemTerm(Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 5)), Fraction(a), Fraction(b)))
    return GemSum.from_terms(terms)


def _exact(f, x):
    return sum(t.coeff * x ** int(t.a) * (1 - x) ** int(t.b) for t in f.terms)


def test_enclosure_soundness_integer_exponents():
    rng = random.Random(7)
    for _ in range(2000):
        f = _random_integer_gem(rng)
        x = Fraction(rng.randint(1, 999), 1000)
        exact = _exact(f, x)
        for prec in (32, 64, 128):
            assert eval_gem(f, DyadicInterval(x, x, prec)).contains(exact)


def test_monotone_refinement():
    rng = random.Random(11)
    f = base_m3()
    for _ in range(200):
        x = Fraction(rng.randint(1, 999), 1000)
        w1 = eval_gem(f, DyadicInterval(x, x, 64)).width
        w2 = eval_gem(f, DyadicInterval(x, x, 128)).width
        assert w2 <= w1


def test_power_coeff_and_json_round_trip():
    f = base_m3()
    assert GemSum.from_json(f.to_json()) == f
    c = f.terms[1].coeff
    assert isinstance(c, PowerCoeff)
    # stored with the base normalized above 1
    assert c.sign == -1
    assert float(c) == pytest.approx(-((31 / 44) ** (35 / 12)), rel=1e-14)


rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6)


@settings(max_examples=300, deadline=None)
@given(rationals, rationals, rationals, rationals)
def test_interval_arithmetic_encloses_exact_results(a, b, c, d):
    x = DyadicInterval(min(a, b), max(a, b), 64)
    y = DyadicInterval(min(c, d), max(c, d), 64)
    for p in (a, b):
        for q in (c, d):
            assert (x + y).contains(p + q)
            assert (x - y).contains(p - q)
            assert (x * y).contains(p * q)
            if not y.contains_zero():
                assert (x / y).contains(p / q)
