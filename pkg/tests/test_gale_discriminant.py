import random
from fractions import Fraction
from itertools import combinations

import pytest
import sympy

from fewnomial.errors import NotAffinelyGenerating, OnArrangement, ZeroU
from fewnomial.gale_discriminant import (
    Support,
    affine_generation_check,
    find_odd_cell,
    gale_dual,
    gale_frame,
    gamma_reduce,
    genericity_check,
    horn_kapranov_witness,
    psi,
    singular_residuals,
)

SQUARE = [(0, 0), (1, 0), (0, 1), (1, 1)]


def pts(*xs):
    return [(x,) for x in xs]


def test_affine_generation():
    assert affine_generation_check(pts(0, 1))
    assert not affine_generation_check(pts(0, 2, 4))
    assert affine_generation_check(SQUARE)


def test_support_translates_to_origin():
    S = Support([(3, 1), (4, 1), (3, 2)])
    assert S.points[0] == (0, 0)
    assert Support.from_json(S.to_json()) == S


def test_genericity_examples():
    assert genericity_check(pts(0, 1, 2, 3))
    assert not genericity_check([(0, 0), (1, 0), (2, 0), (0, 1), (1, 1)])


def test_genericity_brute_force():
    rng = random.Random(2)
    for _ in range(200):
        P = set()
        while len(P) < 5:
            P.add((rng.randint(0, 10), rng.randint(0, 10)))
        P = sorted(P)
        brute = all(
            (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) != 0
            for a, b, c in combinations(P, 3)
        )
        assert genericity_check(P) == brute


def _kernel_check(A, B):
    S = Support(A)
    for j in range(len(B[0])):
        assert sum(B[i][j] for i in range(S.m)) == 0
        for d in range(S.n):
            assert sum(B[i][j] * S.points[i][d] for i in range(S.m)) == 0


def test_gale_dual_three_points():
    B = gale_dual(pts(0, 1, 2))
    assert [r[0] for r in B] in ([1, -2, 1], [-1, 2, -1])


def test_gale_dual_four_points_same_lattice():
    B = sympy.Matrix(gale_dual(pts(0, 1, 2, 3)))
    _kernel_check(pts(0, 1, 2, 3), B.tolist())
    ref = sympy.Matrix([[1, 0], [-2, 1], [1, -2], [0, 1]])
    # the two integer bases differ by a unimodular change of basis
    sol = (ref.T * ref).inv() * ref.T * B
    assert all(v.is_integer for v in sol) and abs(sol.det()) == 1
    assert ref * sol == B


def test_gale_dual_random_kernel_identity():
    rng = random.Random(4)
    for _ in range(50):
        n = rng.randint(1, 3)
        m = rng.randint(n + 2, n + 4)
        P = set()
        while len(P) < m:
            P.add(tuple(rng.randint(-4, 4) for _ in range(n)))
        A = sorted(P)
        if not affine_generation_check(A) or sympy.Matrix([[1, *p] for p in A]).rank() < n + 1:
            continue
        _kernel_check(A, gale_dual(A))


def test_odd_cell_examples():
    assert find_odd_cell(SQUARE) == (1, 2)
    assert find_odd_cell(pts(0, 2, 3, 5)) in ((2,), (3,))
    with pytest.raises(NotAffinelyGenerating):
        find_odd_cell(pts(0, 2, 4))


def test_odd_cell_parity_independent():
    rng = random.Random(8)
    for _ in range(50):
        P = set()
        while len(P) < 5:
            P.add((rng.randint(-5, 5), rng.randint(-5, 5)))
        S = Support(sorted(P))
        if not affine_generation_check(S):
            continue
        C = find_odd_cell(S)
        M = sympy.Matrix([[S.points[c][i] for c in C] for i in range(2)])
        assert M.det() % 2 == 1


def test_gamma_all_ones():
    frame = gale_frame(pts(0, 1, 2, 3))
    r = gamma_reduce([1, 1, 1, 1], frame)
    assert r.exact == (1, 1)


def test_gamma_scale_and_torus_invariance():
    frame = gale_frame(pts(0, 1, 3, 4))
    delta = [Fraction(2), Fraction(-3, 5), Fraction(7, 2), Fraction(-1, 9)]
    base = gamma_reduce(delta, frame)
    assert gamma_reduce([7 * d for d in delta], frame).exact == base.exact
    t = Fraction(-5, 3)
    moved = [d * t**a for d, (a,) in zip(delta, frame.support.points)]
    assert gamma_reduce(moved, frame).exact == base.exact


def test_gamma_fractional_exponents_overlap():
    A = [(0, 0), (2, 1), (1, 3), (3, 3), (1, 1)]
    frame = gale_frame(A)
    assert any(w.denominator != 1 for row in frame.W for w in row)
    delta = [Fraction(3, 2), Fraction(-2), Fraction(5, 7), Fraction(1, 3), Fraction(-4)]
    base = gamma_reduce(delta, frame, 96)
    t = (Fraction(3), Fraction(-2, 5))
    moved = [Fraction(-11, 4) * d * t[0] ** p[0] * t[1] ** p[1] for d, p in zip(delta, frame.support.points)]
    other = gamma_reduce(moved, frame, 96)
    assert base.overlaps(other)
    assert all(c.width < Fraction(1, 2**40) for c in base.coords + other.coords)


def test_horn_kapranov_square():
    frame = gale_frame(pts(0, 1, 2))
    lam = (Fraction(1),) if frame.B[0][0] == 1 else (Fraction(-1),)
    coeffs, x = horn_kapranov_witness(frame, lam, [3])
    assert coeffs == (1, -6, 9)  # (3x - 1)^2
    assert x == (Fraction(1, 3),)
    assert singular_residuals(frame.support, coeffs, x) == (0, 0)


def test_horn_kapranov_random_residuals():
    rng = random.Random(6)
    frame = gale_frame([(0, 0), (1, 0), (0, 1), (2, 1), (1, 3)])
    for _ in range(100):
        lam = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(frame.k - 1)]
        if any(u == 0 for u in frame.forms_at(lam)):
            continue
        u = frame.forms_at(lam)
        assert sum(u) == 0
        assert all(sum(ui * p[d] for ui, p in zip(u, frame.support.points)) == 0 for d in range(2))
        t = [Fraction(rng.randint(1, 7), rng.randint(1, 7)) * rng.choice([-1, 1]) for _ in range(2)]
        coeffs, x = horn_kapranov_witness(frame, lam, t)
        assert all(r == 0 for r in singular_residuals(frame.support, coeffs, x))


def test_horn_kapranov_zero_u():
    frame = gale_frame(pts(0, 1, 2, 3))
    lam = next(
        (Fraction(p), Fraction(q))
        for p in range(-3, 4)
        for q in range(-3, 4)
        if (p, q) != (0, 0) and any(u == 0 for u in frame.forms_at((p, q)))
    )
    with pytest.raises(ZeroU):
        horn_kapranov_witness(frame, lam, [1])


def test_psi_matches_gamma_and_lifts():
    frame = gale_frame(pts(0, 1, 3, 4))
    rng = random.Random(1)
    for _ in range(50):
        lam = [Fraction(rng.randint(-20, 20), rng.randint(1, 6))]
        if any(u == 0 for u in frame.forms_at(lam)):
            continue
        p = psi(frame, lam, debug=True)
        assert p.exact == gamma_reduce(frame.forms_at(lam), frame).exact
        coeffs, x = horn_kapranov_witness(frame, lam, [Fraction(2, 3)])
        assert gamma_reduce(coeffs, frame).exact == p.exact
        assert all(r == 0 for r in singular_residuals(frame.support, coeffs, x))


def test_psi_on_arrangement():
    frame = gale_frame(pts(0, 1, 3, 4))
    row = frame.B[0]
    # the chart coordinate is fixed to 1; solve row . (l, 1) = 0 when possible
    if row[0] != 0:
        lam = [Fraction(-row[1], row[0])]
    else:
        row = frame.B[1]
        lam = [Fraction(-row[1], row[0])]
    with pytest.raises(OnArrangement):
        psi(frame, lam)
