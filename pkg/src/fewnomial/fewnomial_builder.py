"""Inductive construction of univariate sums with 2m-1 roots in (0, 1).

Starting from the three-term base case, each step subtracts a bump
``c x**a (1 - x)**7`` whose exponent ``a`` and coefficient ``c`` are chosen
from certified landmark enclosures so that two new roots appear near 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (
    CertificationError,
    CertificationFailed,
    DegenerateLandmark,
    EmptyCInterval,
    InputError,
    LiftFailed,
)
from .numeric_core import (
    DyadicInterval,
    GemExpr,
    GemSum,
    GemTerm,
    PowerCoeff,
    interval_pow,
    multiply_coefficients,
    rational_enclosure,
)
from .univariate_roots import (
    IsolatingInterval,
    IsolationConfig,
    critical_points,
    isolate_gem_roots,
    refine_zero,
    solve_level,
)


def base_m3() -> GemSum:
    """1 - (31/44)^(35/12) x^(-1/6) (1-x)^(35/12) - (44/31)^(5/6) x^(1/3) (1-x)^(1/6)."""
    c2 = PowerCoeff.make(Fraction(31, 44), Fraction(35, 12), -1)
    c3 = PowerCoeff.make(Fraction(44, 31), Fraction(5, 6), -1)
    return GemSum.from_terms(
        [
            GemTerm(c2, Fraction(-1, 6), Fraction(35, 12)),
            GemTerm(c3, Fraction(1, 3), Fraction(1, 6)),
        ]
    )


@dataclass(frozen=True)
class Landmarks:
    roots: tuple
    y1: IsolatingInterval
    interior_crit: tuple
    y2m: IsolatingInterval
    y2m1: IsolatingInterval
    alpha: DyadicInterval

    def to_json(self):
        return {
            "roots": [r.to_json() for r in self.roots],
            "y1": self.y1.to_json(),
            "interior_crit": [r.to_json() for r in self.interior_crit],
            "y2m": self.y2m.to_json(),
            "y2m1": self.y2m1.to_json(),
            "alpha": self.alpha.to_json(),
        }


@dataclass(frozen=True)
class GrowthCertificate:
    a: int
    b: int
    c: Fraction
    lower_bound_c: DyadicInterval
    upper_bound_c: DyadicInterval
    threshold_a: DyadicInterval
    verified_root_count: int
    small_side: DyadicInterval  # c * y2m^a (1 - y2m)^b, certified < alpha
    large_side: DyadicInterval  # c * y2m1^a (1 - y2m1)^b, certified > 1/2
    alpha: DyadicInterval

    def inequalities_hold(self) -> bool:
        return self.small_side.less_than(self.alpha) and rational_enclosure(
            Fraction(1, 2), self.large_side.precision_bits
        ).less_than(self.large_side)

    def to_json(self):
        return {
            "a": self.a,
            "b": self.b,
            "c": str(self.c),
            "lower_bound_c": self.lower_bound_c.to_json(),
            "upper_bound_c": self.upper_bound_c.to_json(),
            "threshold_a": self.threshold_a.to_json(),
            "verified_root_count": self.verified_root_count,
            "small_side": self.small_side.to_json(),
            "large_side": self.large_side.to_json(),
            "alpha": self.alpha.to_json(),
        }


def _refine(expr: GemExpr, iv: IsolatingInterval, width: Fraction, config) -> IsolatingInterval:
    lo, hi = refine_zero(expr, iv.lo, iv.hi, width, config)
    return IsolatingInterval(lo, hi, iv.kind, iv.certified_unique)


def landmarks(f: GemSum, config: IsolationConfig | None = None) -> Landmarks:
    """Certified roots z_i, landmark points y_i and alpha for f."""
    config = config or IsolationConfig()
    try:
        if f.expr.limit_sign(0) >= 0 or f.expr.limit_sign(1) <= 0:
            raise DegenerateLandmark("f must be negative near 0 and positive near 1")
        roots = isolate_gem_roots(f, config)
        if len(roots) % 2 == 0:
            raise DegenerateLandmark(f"even root count {len(roots)}")
        y1 = solve_level(f, Fraction(-1, 4), (Fraction(0), roots[0].lo), config)
        crit = critical_points(f, roots, config)
        y2m = solve_level(f, Fraction(1, 4), (roots[-1].hi, Fraction(1)), config)
        y2m1 = solve_level(f, Fraction(1, 2), (y2m.hi, Fraction(1)), config)
    except CertificationError as exc:
        raise DegenerateLandmark(str(exc)) from exc
    for name, iv in (("y1", y1), ("y2m", y2m), ("y2m1", y2m1)):
        if not iv.certified_unique:
            raise DegenerateLandmark(f"{name} is not unique")
    if not crit:
        raise DegenerateLandmark("a single root leaves no interior critical point")
    alpha = _alpha(f, crit, config.precision_bits)
    if alpha.sign() <= 0:
        raise DegenerateLandmark("alpha is not certified positive")
    return Landmarks(tuple(roots), y1, tuple(crit), y2m, y2m1, alpha)


def _alpha(f: GemSum, crit: Sequence[IsolatingInterval], prec: int) -> DyadicInterval:
    vals = [abs(f.expr.enclose(c.as_interval(prec))) for c in crit]
    lo = min(vals, key=lambda v: v.lo).lo
    hi = min(v.hi for v in vals)
    return DyadicInterval(lo, hi, prec)


def _shortest_dyadic(lo: Fraction, hi: Fraction) -> Fraction:
    """Dyadic with the fewest significant bits within the middle half of (lo, hi)."""
    mid = (lo + hi) / 2
    quarter = (hi - lo) / 4
    top = math.floor(math.log2(mid))
    for bits in range(1, 100000):
        e = top - bits + 1
        scale = Fraction(2) ** e
        cand = round(mid / scale) * scale
        if abs(cand - mid) <= quarter and lo < cand < hi:
            return cand
    raise EmptyCInterval("no dyadic found in the admissible c interval")


def _bump(y: DyadicInterval, a: int, b: int) -> DyadicInterval:
    return interval_pow(y, a) * interval_pow(1 - y, b)


def _growth_numbers(f: GemSum, L: Landmarks, b_new: int, prec: int):
    y0 = L.y2m.as_interval(prec)
    y1 = L.y2m1.as_interval(prec)
    alpha = _alpha(f, L.interior_crit, prec)
    ratio = (1 - y0) / (1 - y1)
    num = (rational_enclosure(1, prec) / (2 * alpha) * interval_pow(ratio, b_new)).log(16)
    den = (y1 / y0).log(16)
    if den.sign() <= 0:
        raise EmptyCInterval("log(y2m1/y2m) is not certified positive")
    threshold = num / den
    existing = max(t.a for t in f.terms)
    a = max(math.floor(threshold.hi) + 1, math.floor(existing) + 1)
    lower = rational_enclosure(1, prec) / (2 * _bump(y1, a, b_new))
    upper = alpha / _bump(y0, a, b_new)
    return alpha, threshold, a, lower, upper, y0, y1


def grow_once(
    f: GemSum,
    L: Landmarks,
    b_new: int = 7,
    config: IsolationConfig | None = None,
) -> tuple[GemSum, GrowthCertificate]:
    """Append -c x^a (1-x)^b_new so that the root count rises by two."""
    config = config or IsolationConfig()
    if b_new < 7 or b_new % 2 == 0:
        raise InputError("b_new must be odd and at least 7")
    prec = max(config.precision_bits, 128)
    landmarks_ = L
    while True:
        width = Fraction(1, 2 ** (prec - 16))
        try:
            refined = _refine_landmarks(f, landmarks_, width, config, prec)
        except CertificationError as exc:
            raise EmptyCInterval(f"landmark refinement failed: {exc}") from exc
        alpha, threshold, a, lower, upper, y0, y1 = _growth_numbers(f, refined, b_new, prec)
        if lower.less_than(upper):
            break
        prec *= 2
        if prec > config.max_precision_bits:
            raise EmptyCInterval("certified c bounds overlap at the precision cap")
    c = _shortest_dyadic(lower.hi, upper.lo)
    small = _bump(y0, a, b_new) * c
    large = _bump(y1, a, b_new) * c
    g = f.append(GemTerm(-c, Fraction(a), Fraction(b_new)))
    try:
        count = len(isolate_gem_roots(g, config))
    except CertificationError as exc:
        raise CertificationFailed(f"root isolation of the grown sum failed: {exc}") from exc
    needed = len(L.roots) + 2
    if count < needed:
        raise CertificationFailed(f"grown sum has {count} certified roots, need {needed}")
    cert = GrowthCertificate(a, b_new, c, lower, upper, threshold, count, small, large, alpha)
    if not cert.inequalities_hold():
        raise CertificationFailed("sufficient inequalities are not certified")
    return g, cert


def _refine_landmarks(f: GemSum, L: Landmarks, width: Fraction, config, prec: int) -> Landmarks:
    cfg = IsolationConfig(
        precision_bits=max(config.precision_bits, prec),
        max_precision_bits=max(config.max_precision_bits, prec),
        max_depth=config.max_depth,
        max_boxes=config.max_boxes,
    )
    dexpr = f.expr.derivative()
    crit = tuple(_refine(dexpr, c, width, cfg) for c in L.interior_crit)
    y2m = _refine(GemExpr.from_gem(f, shift=Fraction(1, 4)), L.y2m, width, cfg)
    y2m1 = _refine(GemExpr.from_gem(f, shift=Fraction(1, 2)), L.y2m1, width, cfg)
    return Landmarks(L.roots, L.y1, crit, y2m, y2m1, _alpha(f, crit, prec))


def grow_chain(
    m_target: int,
    b_new: int = 7,
    config: IsolationConfig | None = None,
) -> list[tuple[GemSum, GrowthCertificate | None]]:
    """[(f_3, None), (f_4, cert_4), ..., (f_m_target, cert)]; the base has no certificate."""
    if m_target < 3:
        raise InputError("the construction starts at m = 3")
    config = config or IsolationConfig()
    f = base_m3()
    base_roots = isolate_gem_roots(f, config)
    if len(base_roots) != 5:
        raise CertificationFailed(f"base case has {len(base_roots)} roots, expected 5")
    chain: list[tuple[GemSum, GrowthCertificate | None]] = [(f, None)]
    while f.m < m_target:
        L = landmarks(f, config)
        f, cert = grow_once(f, L, b_new, config)
        chain.append((f, cert))
    return chain


# ---------------------------------------------------------------------------
# lifting to a bivariate system


def _prime_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _valuation(q: Fraction, p: int) -> int:
    v = 0
    n, d = q.numerator, q.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def _rescaling(f: GemSum) -> tuple[Fraction, Fraction]:
    """Positive rationals k1, k2 making every c_i k1^a_i k2^b_i rational."""
    powers = [(t.coeff, t.a, t.b) for t in f.terms if isinstance(t.coeff, PowerCoeff)]
    if not powers:
        return Fraction(1), Fraction(1)
    primes = sorted({p for c, _, _ in powers for n in (c.base.numerator, c.base.denominator) for p in _prime_factors(n)})
    period = _lcm(t.a.denominator for t in f.terms) * _lcm(t.b.denominator for t in f.terms)
    k1 = Fraction(1)
    k2 = Fraction(1)
    for p in primes:
        # need e_i v_p(kappa_i) + a_i u + b_i v integral for every power term
        targets = [
            ((t.coeff.exponent * _valuation(t.coeff.base, p)) if isinstance(t.coeff, PowerCoeff) else 0, t.a, t.b)
            for t in f.terms
        ]
        best = None
        amax = max(abs(t.a) for t in f.terms)
        bmax = max(abs(t.b) for t in f.terms)
        span = range(-period, period + 1)
        for u in span:
            for v in span:
                if all((e + a * u + b * v).denominator == 1 for e, a, b in targets):
                    key = (abs(u) * amax + abs(v) * bmax, abs(u) + abs(v), u, v)
                    if best is None or key < best:
                        best = key
        if best is None:
            raise LiftFailed(f"no rational rescaling clears the radicals at prime {p}")
        k1 *= Fraction(p) ** best[2]
        k2 *= Fraction(p) ** best[3]
    return k1, k2


def lift_to_bivariate(f: GemSum, exponent_budget: int = 10**9, verify: bool = True, config=None):
    """A trinomial/m-nomial system whose positive roots match the roots of f in (0, 1).

    F = k1 x^D + k2 y^D - 1 parametrizes its positive zero set by
    s = k1 x^D, 1 - s = k2 y^D; G is f rewritten in x, y.  With ``verify``
    the system is reduced back and its certified root count compared.
    """
    from .bivariate_certifier import SparseSystem, SparseTerm, reduce_to_univariate

    D = _lcm([t.a.denominator for t in f.terms] + [t.b.denominator for t in f.terms])
    k1, k2 = _rescaling(f)
    exps = [(int(D * t.a), int(D * t.b)) for t in f.terms]
    if max(abs(e) for pair in exps for e in pair) > exponent_budget:
        raise LiftFailed("cleared exponents exceed the budget")
    shift_x = -min(e[0] for e in exps)
    shift_y = -min(e[1] for e in exps)
    coeffs = []
    for t in f.terms:
        c = multiply_coefficients([t.coeff, (k1, t.a), (k2, t.b)])
        if isinstance(c, PowerCoeff):
            raise LiftFailed("coefficient stayed irrational after rescaling")
        coeffs.append(c)
    den = _lcm(c.denominator for c in coeffs)
    G = [
        SparseTerm(c * den, (ex + shift_x, ey + shift_y))
        for c, (ex, ey) in zip(coeffs, exps)
    ]
    F = [
        SparseTerm(k1, (D, 0)),
        SparseTerm(k2, (0, D)),
        SparseTerm(Fraction(-1), (0, 0)),
    ]
    system = SparseSystem(tuple(F), tuple(G))
    if verify:
        config = config or IsolationConfig()
        g, _ = reduce_to_univariate(system)
        n_lift = len(isolate_gem_roots(g, config))
        n_orig = len(isolate_gem_roots(f, config))
        if n_lift != n_orig:
            raise LiftFailed(f"round trip changed the root count ({n_orig} -> {n_lift})")
    return system

