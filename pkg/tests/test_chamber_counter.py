import math
import random
from dataclasses import replace
from fractions import Fraction

import pytest

from fewnomial.chamber_counter import (
    ChamberConfig,
    RootSignature,
    count_chambers_n3,
    count_chambers_n4,
    critical_values,
    critical_x1_system,
    diffeotopy_bound,
    nodal_witnesses,
    signature_classes,
    signature_oracle,
)
from fewnomial.errors import DegenerateFrame, InputError, NonGenericSupport
from fewnomial.gale_discriminant import gale_frame, genericity_check, horn_kapranov_witness, singular_residuals


def pts(*xs):
    return [(x,) for x in xs]


QUINTIC = pts(0, 1, 2, 3, 4)


@pytest.fixture(scope="module")
def quintic_frame():
    return gale_frame(QUINTIC)


@pytest.fixture(scope="module")
def quintic_report():
    return count_chambers_n4(QUINTIC, ChamberConfig(mc_samples=2000))


def test_signature_examples():
    assert signature_oracle(pts(0, 2), [-1, 1]) == RootSignature(1, 1)
    assert signature_oracle(pts(0, 2), [1, 1]) == RootSignature(0, 0)
    # x^3 - 3x + 1 has roots near -1.88, 0.35, 1.53
    assert signature_oracle(pts(0, 1, 3), [1, -3, 1]) == RootSignature(2, 1)


def test_signature_rejects_zero_coefficient():
    with pytest.raises(InputError):
        signature_oracle(pts(0, 1), [1, 0])


def _scan_count(p, lo, hi, steps=4000):
    """Sign changes of p on a geometric grid from lo to hi (both positive)."""
    ratio = (hi / lo) ** (1 / steps)
    grid = [Fraction(lo * ratio**i).limit_denominator(2**40) for i in range(steps + 1)]
    vals = [p(x) for x in grid]
    return sum(1 for a, b in zip(vals, vals[1:]) if (a < 0) != (b < 0))


def test_signature_against_sign_scan():
    rng = random.Random(11)
    for _ in range(60):
        c = [Fraction(rng.randint(1, 30), rng.randint(1, 5)) * rng.choice([-1, 1]) for _ in range(4)]
        # roots lie in [1 / (1 + max|c_i / c_0|), 1 + max|c_i / c_4|]
        hi = 1 + float(max(abs(v / c[3]) for v in c))
        lo = 1 / (1 + float(max(abs(v / c[0]) for v in c)))
        pos = _scan_count(lambda x: c[0] + c[1] * x + c[2] * x**3 + c[3] * x**4, lo / 2, 2 * hi)
        neg = _scan_count(lambda x: c[0] - c[1] * x - c[2] * x**3 + c[3] * x**4, lo / 2, 2 * hi)
        sig = signature_oracle(pts(0, 1, 3, 4), c)
        # a scan can only miss pairs of roots inside one step
        assert sig.pos >= pos and sig.neg >= neg
        assert (sig.pos - pos) % 2 == 0 and (sig.neg - neg) % 2 == 0


def test_signature_classes_deterministic():
    a = signature_classes(pts(0, 1, 2, 3), samples=500, seed=3)
    b = signature_classes(pts(0, 1, 2, 3), samples=500, seed=3)
    assert a == b and sum(a.values()) == 500


def test_diffeotopy_bound_components():
    comps, total = diffeotopy_bound(1)
    assert comps["crit"] == 16
    assert comps["nodal"] == math.ceil((math.e**2 + 3) * 10 * 11 / 2 * 1)
    assert comps["sheets"] == 15
    assert total == (comps["slabs"] + 1) * comps["per_slab"]
    comps2, _ = diffeotopy_bound(2)
    assert comps2["nodal"] == math.ceil(78 * (math.e**2 + 3) * 16)
    with pytest.raises(InputError):
        diffeotopy_bound(0)


def test_diffeotopy_bound_monotone():
    totals = [diffeotopy_bound(n)[1] for n in range(1, 8)]
    assert totals == sorted(totals) and len(set(totals)) == len(totals)


@pytest.mark.parametrize("support", [pts(0, 1, 2, 3), pts(0, 1, 3, 4)])
def test_n3_count_dominates_signature_classes(support):
    rep = count_chambers_n3(support)
    assert rep.case_dim == "n_plus_3"
    assert rep.chamber_count >= 2
    # every realized signature lives in at least one chamber
    assert rep.chamber_count >= len(signature_classes(support, samples=5000))
    quads = rep.details["quadrants"]
    assert sum(q["chambers"] for q in quads.values()) == rep.chamber_count


def test_n3_deterministic():
    a = count_chambers_n3(pts(0, 1, 3, 4)).to_json()
    b = count_chambers_n3(pts(0, 1, 3, 4)).to_json()
    assert a == b


def test_n3_input_checks():
    with pytest.raises(InputError):
        count_chambers_n3(QUINTIC)
    with pytest.raises(NonGenericSupport):
        count_chambers_n3([(0, 0), (1, 0), (2, 0), (0, 1), (1, 1)])


def test_n4_input_checks():
    with pytest.raises(InputError):
        count_chambers_n4(pts(0, 1, 2, 3))
    with pytest.raises(NonGenericSupport):
        count_chambers_n4([(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (1, 1)])


def test_critical_system_degree_random():
    rng = random.Random(13)
    checked = 0
    while checked < 15:
        n = rng.randint(1, 2)
        P = set()
        while len(P) < n + 4:
            P.add(tuple(rng.randint(0, 5) for _ in range(n)))
        A = sorted(P)
        if not genericity_check(A):
            continue
        try:
            frame = gale_frame(A)
        except Exception:
            continue
        try:
            P1, P2 = critical_x1_system(frame)
        except DegenerateFrame:
            continue
        for P in (P1, P2):
            assert P.is_zero or P.total_degree() <= n + 3
        checked += 1


def test_critical_system_degenerate_frame(quintic_frame):
    # all three exponent rows equal: psi_1 = psi_2 = psi_3, so every minor vanishes
    W = tuple((r[0], r[0], r[0]) for r in quintic_frame.W)
    with pytest.raises(DegenerateFrame):
        critical_x1_system(replace(quintic_frame, W=W))


def _log_jacobian(frame, lam):
    h = frame.homogenize(lam)
    idx = [i for i in range(frame.k) if i != frame.chart]
    forms = [float(sum(b * v for b, v in zip(row, h))) for row in frame.B]
    b = frame.exponents()
    return [[sum(float(b[j][q]) * float(frame.B[q][i]) / forms[q] for q in range(frame.m)) for i in idx]
            for j in range(frame.k)], forms


def test_critical_values_residuals(quintic_frame):
    crit = critical_values(quintic_frame)
    assert 1 <= len(crit) <= 25
    for cv in crit:
        lam = [float(c.mid) for c in cv.lam]
        J, forms = _log_jacobian(quintic_frame, lam)
        scale = max(abs(v) for row in J for v in row) ** 2
        for r, s in ((0, 1), (0, 2)):
            minor = J[r][0] * J[s][1] - J[s][0] * J[r][1]
            assert abs(minor) <= 1e-6 * scale
        b = quintic_frame.exponents()
        x1 = math.prod(abs(f) ** float(e) for f, e in zip(forms, b[0]))
        x1 *= math.prod(-1 if f < 0 and e.numerator % 2 else 1 for f, e in zip(forms, b[0]))
        assert float(cv.value.lo) - 1e-9 <= x1 <= float(cv.value.hi) + 1e-9


def test_nodal_witnesses_tiny_box_empty(quintic_frame):
    tiny = Fraction(1, 1024)
    box4 = (((Fraction(1, 3), Fraction(1, 3) + tiny), (0, tiny)), ((Fraction(1, 3), Fraction(1, 3) + tiny), (0, tiny)))
    assert nodal_witnesses(quintic_frame, box4) == []


def test_n4_report(quintic_report):
    rep = quintic_report
    assert rep.case_dim == "n_plus_4" and rep.chamber_count is None
    comps = rep.bound_components
    assert rep.slab_count == len(rep.critical_values) + len(rep.nodal_witnesses) + 1
    assert comps["observed_sheets"] <= comps["sheet_ceiling"] == 15
    assert rep.chamber_estimate["value"] >= len(signature_classes(QUINTIC, samples=2000, seed=rep.chamber_estimate["seed"]))


def test_n4_nodal_witness_pairs_separated(quintic_report):
    for w in quintic_report.nodal_witnesses:
        X = [(Fraction(lo), Fraction(hi)) for lo, hi in w["lambda"]]
        Xp = [(Fraction(lo), Fraction(hi)) for lo, hi in w["lambda_prime"]]
        # pairs closer than the diagonal margin are never kept
        assert max(max(a[1] - b[0], b[1] - a[0]) for a, b in zip(X, Xp)) >= 1


def test_psi_samples_lift_to_singular_polynomials(quintic_frame):
    rng = random.Random(17)
    done = 0
    while done < 30:
        lam = [Fraction(rng.randint(-30, 30), rng.randint(1, 7)) for _ in range(2)]
        if any(u == 0 for u in quintic_frame.forms_at(lam)):
            continue
        coeffs, x = horn_kapranov_witness(quintic_frame, lam, [Fraction(rng.randint(1, 9), rng.randint(1, 9))])
        assert all(r == 0 for r in singular_residuals(quintic_frame.support, coeffs, x))
        done += 1
