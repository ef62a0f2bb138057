from fractions import Fraction

import pytest

from fewnomial.bivariate_certifier import (
    SparseSystem,
    SparseTerm,
    certify_example,
    count_positive_reduction,
    count_positive_resultant,
    count_positive_subdivision,
    seven_root_system,
    reduce_to_univariate,
)
from fewnomial.errors import InputError, NoPositiveBranch
from fewnomial.univariate_roots import isolate_gem_roots


def system(F, G):
    return SparseSystem(tuple(SparseTerm(c, e) for c, e in F), tuple(SparseTerm(c, e) for c, e in G))


LINE = [(1, (1, 0)), (1, (0, 1)), (-1, (0, 0))]


def test_reduce_line_and_difference():
    g, _ = reduce_to_univariate(system(LINE, [(1, (1, 0)), (-1, (0, 1))]))
    roots = isolate_gem_roots(g)
    assert len(roots) == 1
    assert roots[0].lo < Fraction(1, 2) < roots[0].hi


def test_reduce_line_and_hyperbola():
    # 5 s (1 - s) = 1 has two roots in (0, 1) since 1 - 4/5 > 0
    g, _ = reduce_to_univariate(system(LINE, [(5, (1, 1)), (-1, (0, 0))]))
    assert len(isolate_gem_roots(g)) == 2


def test_reduce_same_sign_trinomial():
    S = system([(1, (1, 0)), (1, (0, 1)), (1, (0, 0))], [(1, (1, 0)), (-1, (0, 1))])
    with pytest.raises(NoPositiveBranch):
        reduce_to_univariate(S)


def test_sparse_system_validation():
    with pytest.raises(InputError):
        system(LINE[:2], [(1, (1, 0))])
    with pytest.raises(InputError):
        SparseTerm(0, (1, 0))


def test_sparse_system_json_round_trip():
    S = seven_root_system(1936500)
    assert SparseSystem.from_json(S.to_json()) == S


def test_seven_root_system_reduction():
    S = seven_root_system(1936500)
    g, _ = reduce_to_univariate(S)
    assert g.m == 4
    assert count_positive_reduction(S).count == 7


def test_subdivision_unit_point():
    # x + y - 2 = 0, x - y = 0 meet only at (1, 1)
    S = system([(1, (1, 0)), (1, (0, 1)), (-2, (0, 0))], [(1, (1, 0)), (-1, (0, 1))])
    r = count_positive_subdivision(S, ((Fraction(1, 64), 4), (Fraction(1, 64), 4)))
    assert r.count == 1
    (xl, xh), (yl, yh) = r.witnesses[0]
    assert xl <= 1 <= xh and yl <= 1 <= yh


def test_subdivision_circle_diagonal():
    S = system([(1, (2, 0)), (1, (0, 2)), (-2, (0, 0))], [(1, (1, 0)), (-1, (0, 1))])
    r = count_positive_subdivision(S, ((Fraction(1, 64), 4), (Fraction(1, 64), 4)))
    assert r.count == 1


def test_subdivision_rejects_nonpositive_box():
    S = system(LINE, [(1, (1, 0)), (-1, (0, 1))])
    with pytest.raises(InputError):
        count_positive_subdivision(S, ((0, 1), (Fraction(1, 2), 1)))


def test_seven_root_system_subdivision():
    assert count_positive_subdivision(seven_root_system(1936500)).count == 7


def test_methods_agree_and_scaling_invariance():
    S = system(LINE, [(5, (1, 1)), (-1, (0, 0))])
    red = count_positive_reduction(S)
    sub = count_positive_subdivision(S)
    res = count_positive_resultant(S)
    assert red.count == sub.count == res.count == 2
    assert count_positive_reduction(S.scaled(kg=Fraction(7, 3))).count == 2
    assert count_positive_subdivision(S.scaled(kf=Fraction(5), kg=Fraction(1, 9))).count == 2


def test_certify_example_endpoints():
    rep = certify_example(stride=584, find_extent=False)
    assert [e["alpha"] for e in rep["scan"]] == [1936254, 1936838]
    for e in rep["scan"]:
        assert "reduction" in e and "subdivision" in e
    assert rep["printed_endpoints"]["empty_as_printed"] is True
    ref = rep["alpha_zero_reference"]
    assert ref["alpha"] == 0 and ref["reduction"] is not None


def test_alpha_zero_drops_a_term():
    assert seven_root_system(0).m == 3
