import random
from fractions import Fraction

import mpmath
import pytest

from fewnomial.errors import EndpointRoot, NoSignChange
from fewnomial.fewnomial_builder import base_m3, landmarks
from fewnomial.numeric_core import DyadicInterval, GemSum, GemTerm, eval_gem
from fewnomial.univariate_roots import (
    ExactPolynomial,
    IsolatingInterval,
    RootKind,
    critical_points,
    gem_to_polynomial,
    isolate_gem_roots,
    isolate_real_roots,
    solve_level,
    sturm_count,
)


def poly(*coeffs):
    return ExactPolynomial(coeffs)


def gem(*terms):
    return GemSum.from_terms([GemTerm(Fraction(c), Fraction(a), Fraction(b)) for c, a, b in terms])


def test_sturm_three_roots():
    assert sturm_count(ExactPolynomial.from_roots([1, 2, 3]), 0, 4) == 3


def test_sturm_no_real_roots():
    assert sturm_count(poly(1, 0, 1), -10, 10) == 0


def test_sturm_against_sign_scan():
    p = poly(1, -3, 0, 1)  # x^3 - 3x + 1
    scan = 0
    prev = p(Fraction(0))
    for i in range(1, 20001):
        cur = p(Fraction(i, 10000))
        if cur == 0 or (prev < 0) != (cur < 0):
            scan += 1
        prev = cur
    assert scan == 2
    assert sturm_count(p, 0, 2) == scan


def test_sturm_endpoint_root():
    with pytest.raises(EndpointRoot):
        sturm_count(ExactPolynomial.from_roots([1]), 1, 2)


def test_isolate_real_roots_disjoint_and_sorted():
    p = ExactPolynomial.from_roots([Fraction(-3, 2), Fraction(1, 3), Fraction(1, 2), 7])
    iv = isolate_real_roots(p)
    assert len(iv) == 4
    for (a, b), (c, d) in zip(iv, iv[1:]):
        assert b <= c


def test_isolate_linear_gem():
    roots = isolate_gem_roots(gem((-2, 1, 0)))
    assert len(roots) == 1
    assert roots[0].lo < Fraction(1, 2) < roots[0].hi


def test_isolate_no_roots():
    assert isolate_gem_roots(gem((1, 1, 0))) == []


def test_base_case_five_roots():
    roots = isolate_gem_roots(base_m3())
    assert len(roots) == 5
    assert all(r.certified_unique and r.kind == RootKind.SIMPLE_ROOT for r in roots)
    for a, b in zip(roots, roots[1:]):
        assert a.hi < b.lo


def test_gem_integer_oracle_equivalence():
    rng = random.Random(5)
    checked = 0
    while checked < 500:
        terms, seen = [], set()
        for _ in range(rng.randint(1, 4)):
            a, b = rng.randint(0, 20), rng.randint(0, 20)
            if (a, b) in seen or (a, b) == (0, 0):
                continue
            seen.add((a, b))
            terms.append((Fraction(rng.choice([-1, 1]) * rng.randint(1, 40), rng.randint(1, 4)), a, b))
        f = gem(*terms)
        p = gem_to_polynomial(f)
        if p(Fraction(0)) == 0 or p(Fraction(1)) == 0:
            continue
        # the isolator certifies simple roots only
        if p.degree >= 1 and not _squarefree_on_01(p):
            continue
        assert len(isolate_gem_roots(f)) == sturm_count(p, 0, 1)
        checked += 1


def _squarefree_on_01(p):
    """No repeated root in [0, 1]: gcd(p, p') has no roots there."""
    dp = ExactPolynomial([i * c for i, c in enumerate(p.coefficients)][1:])
    a, b = p, dp
    while not b.is_zero():
        a, b = b, a % b
    if a.degree == 0:
        return True
    return sturm_count(a, 0, 1) == 0 if a(Fraction(0)) and a(Fraction(1)) else False


def test_solve_level_linear():
    iv = solve_level(gem((-1, 1, 0)), Fraction(1, 2), (0, 1))
    assert iv.lo < Fraction(1, 2) < iv.hi
    assert iv.kind == RootKind.LEVEL_CROSSING and iv.certified_unique


def test_solve_level_no_sign_change():
    # 1 - x^2 never reaches 0 on (1/2, 1)
    with pytest.raises(NoSignChange):
        solve_level(gem((-1, 2, 0)), 0, (Fraction(1, 2), 2))


def test_solve_level_base_case_matches_bisection():
    f = base_m3()
    L = landmarks(f)
    iv = solve_level(f, Fraction(1, 2), (L.y2m.hi, 1))
    v = eval_gem(f, DyadicInterval(iv.lo, iv.hi, 128)) - Fraction(1, 2)
    assert v.contains_zero()

    def g(x):
        with mpmath.workdps(50):
            return (-(mpmath.mpf(31) / 44) ** (mpmath.mpf(35) / 12) * x ** (-mpmath.mpf(1) / 6) * (1 - x) ** (mpmath.mpf(35) / 12)
                    - (mpmath.mpf(44) / 31) ** (mpmath.mpf(5) / 6) * x ** (mpmath.mpf(1) / 3) * (1 - x) ** (mpmath.mpf(1) / 6)
                    + mpmath.mpf(1) / 2)

    with mpmath.workdps(50):
        lo, hi = mpmath.mpf(L.y2m.hi.numerator) / L.y2m.hi.denominator, mpmath.mpf(1) - mpmath.mpf(10) ** -30
        for _ in range(200):
            mid = (lo + hi) / 2
            if (g(mid) > 0) == (g(lo) > 0):
                lo = mid
            else:
                hi = mid
        ref = float((lo + hi) / 2)
    assert float(iv.lo) - 1e-12 <= ref <= float(iv.hi) + 1e-12


def test_critical_points_parabola():
    f = gem((-3, 1, 0), (2, 2, 0))  # 1 - 3x + 2x^2, roots 1/2 and 1
    left = IsolatingInterval(Fraction(1, 4), Fraction(5, 8))
    right = IsolatingInterval(Fraction(7, 8), Fraction(1))
    cps = critical_points(f, [left, right])
    assert len(cps) == 1
    assert cps[0].lo <= Fraction(3, 4) <= cps[0].hi


def test_critical_points_base_case():
    f = base_m3()
    roots = isolate_gem_roots(f)
    cps = critical_points(f, roots)
    assert len(cps) == 4
    for cp, a, b in zip(cps, roots, roots[1:]):
        assert a.hi <= cp.lo and cp.hi <= b.lo


def test_critical_points_single_root():
    assert critical_points(base_m3(), [IsolatingInterval(Fraction(1, 4), Fraction(1, 2))]) == []
