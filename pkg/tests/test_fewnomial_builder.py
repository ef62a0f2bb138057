import random
from fractions import Fraction

import pytest

from fewnomial.bivariate_certifier import count_positive_reduction
from fewnomial.errors import CertificationError, DegenerateLandmark, InputError
from fewnomial.fewnomial_builder import base_m3, grow_chain, grow_once, landmarks, lift_to_bivariate
from fewnomial.numeric_core import DyadicInterval, GemSum, GemTerm, eval_gem, rational_enclosure
from fewnomial.univariate_roots import isolate_gem_roots


@pytest.fixture(scope="module")
def chain5():
    return grow_chain(5)


def test_base_has_three_terms():
    f = base_m3()
    assert f.m == 3
    assert [(t.a, t.b) for t in f.terms] == [(0, 0), (Fraction(-1, 6), Fraction(35, 12)), (Fraction(1, 3), Fraction(1, 6))]


def test_base_has_five_roots():
    assert len(isolate_gem_roots(base_m3())) == 5


def test_base_positive_near_one():
    x = 1 - Fraction(1, 2**20)
    assert eval_gem(base_m3(), DyadicInterval(x, x, 128)).sign() == 1


def test_landmarks_base():
    L = landmarks(base_m3())
    assert len(L.roots) == 5
    assert len(L.interior_crit) == 4
    assert L.alpha.sign() == 1
    assert L.y1.hi <= L.roots[0].lo
    assert L.roots[-1].hi <= L.y2m.lo
    assert L.y2m.hi <= L.y2m1.lo and L.y2m1.hi < 1
    for y, (a, b) in zip(L.interior_crit, zip(L.roots, L.roots[1:])):
        assert a.hi <= y.lo and y.hi <= b.lo


def test_landmarks_even_root_count():
    # 1 - 5x + 5x^2 has the two roots (5 +- sqrt 5)/10
    f = GemSum.from_terms([GemTerm(Fraction(-5), Fraction(1), Fraction(0)), GemTerm(Fraction(5), Fraction(2), Fraction(0))])
    assert len(isolate_gem_roots(f)) == 2
    with pytest.raises(DegenerateLandmark):
        landmarks(f)


def test_grow_once_from_base():
    f = base_m3()
    g, cert = grow_once(f, landmarks(f))
    assert g.m == 4
    assert len(isolate_gem_roots(g)) >= 7
    assert cert.verified_root_count >= 7
    assert cert.a > max(t.a for t in f.terms)
    assert cert.threshold_a.hi < cert.a
    prec = cert.lower_bound_c.precision_bits
    c = rational_enclosure(cert.c, prec)
    assert cert.lower_bound_c.less_than(c) and c.less_than(cert.upper_bound_c)
    assert cert.inequalities_hold()
    new = g.terms[-1]
    assert new.a == cert.a and new.b == 7 and new.coeff == -cert.c


def test_grow_once_rejects_even_b():
    f = base_m3()
    with pytest.raises(InputError):
        grow_once(f, landmarks(f), b_new=8)


def test_grow_chain_three():
    chain = grow_chain(3)
    assert len(chain) == 1
    assert chain[0][1] is None


def test_grow_chain_counts(chain5):
    assert [len(isolate_gem_roots(f)) for f, _ in chain5] == [5, 7, 9]
    for _, cert in chain5[1:]:
        assert cert.inequalities_hold()


def test_threshold_log_denominator_positive(chain5):
    f = chain5[1][0]
    L = landmarks(f)
    ratio = L.y2m1.as_interval(128) / L.y2m.as_interval(128)
    assert ratio.log().sign() == 1


def test_grow_chain_below_base():
    with pytest.raises(InputError):
        grow_chain(2)


def test_lift_linear():
    f = GemSum.from_terms([GemTerm(Fraction(-2), Fraction(1), Fraction(0))])
    S = lift_to_bivariate(f)
    assert len(S.F) == 3 and len(S.G) == 2
    assert count_positive_reduction(S).count == 1


def test_lift_f4(chain5):
    f4 = chain5[1][0]
    S = lift_to_bivariate(f4)
    assert len(S.G) == f4.m
    assert all(isinstance(e, int) for t in S.F + S.G for e in t.exp)
    assert count_positive_reduction(S).count == 7


def test_lift_round_trip_random():
    rng = random.Random(3)
    done = 0
    while done < 100:
        terms, seen = [], set()
        for _ in range(rng.randint(1, 3)):
            a = Fraction(rng.randint(-3, 6), rng.choice([1, 2, 3]))
            b = Fraction(rng.randint(0, 6), rng.choice([1, 2, 3]))
            if (a, b) in seen or (a, b) == (0, 0):
                continue
            seen.add((a, b))
            terms.append(GemTerm(Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 3)), a, b))
        f = GemSum.from_terms(terms)
        try:
            n = len(isolate_gem_roots(f))
        except CertificationError:
            continue
        S = lift_to_bivariate(f, verify=False)
        assert len(S.G) == f.m
        assert count_positive_reduction(S).count == n
        done += 1
