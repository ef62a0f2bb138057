"""Certified real-root isolation.

Exact polynomials are handled with Sturm sequences over Fractions.  GemSums
on (0, 1) are handled by subdivision with an interval exclusion test and an
interval Newton uniqueness test, with per-box precision escalation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import DomainError, EndpointRoot, InputError, NoSignChange, UnresolvedBox
from .numeric_core import (
    MAX_PRECISION,
    DyadicInterval,
    GemExpr,
    GemSum,
    default_precision,
    rational_enclosure,
    to_rational,
)

# ---------------------------------------------------------------------------
# exact polynomials


class ExactPolynomial:
    """Dense univariate polynomial with Fraction coefficients, lowest degree first."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable):
        coeffs = [to_rational(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coefficients = tuple(coeffs)

    @classmethod
    def from_roots(cls, roots: Iterable) -> "ExactPolynomial":
        p = cls([1])
        for r in roots:
            p = p * cls([-to_rational(r), 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def leading(self) -> Fraction:
        return self.coefficients[-1]

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def sign_at(self, x) -> int:
        v = self(x)
        return (v > 0) - (v < 0)

    def sign_at_infinity(self, direction: int) -> int:
        if self.is_zero():
            return 0
        s = 1 if self.leading > 0 else -1
        if direction < 0 and self.degree % 2:
            s = -s
        return s

    def derivative(self) -> "ExactPolynomial":
        return ExactPolynomial(i * c for i, c in enumerate(self.coefficients) if i)

    def reflect(self) -> "ExactPolynomial":
        """p(-x)."""
        return ExactPolynomial(c if i % 2 == 0 else -c for i, c in enumerate(self.coefficients))

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (Fraction(0),) * (n - len(self.coefficients))
        b = other.coefficients + (Fraction(0),) * (n - len(other.coefficients))
        return ExactPolynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return ExactPolynomial(-c for c in self.coefficients)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return ExactPolynomial([])
        out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if a:
                for j, b in enumerate(other.coefficients):
                    out[i + j] += a * b
        return ExactPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = ExactPolynomial([1])
        for _ in range(k):
            out = out * self
        return out

    def divmod(self, other: "ExactPolynomial"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coefficients)
        dq = other.degree
        lead = other.leading
        if len(rem) - 1 < dq:
            return ExactPolynomial([]), self
        quo = [Fraction(0)] * (len(rem) - dq)
        for k in range(len(rem) - 1 - dq, -1, -1):
            coef = rem[k + dq] / lead
            quo[k] = coef
            if coef:
                for j, b in enumerate(other.coefficients):
                    rem[k + j] -= coef * b
        return ExactPolynomial(quo), ExactPolynomial(rem[:dq])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def primitive(self) -> "ExactPolynomial":
        """Positive rational multiple with coprime integer coefficients."""
        if self.is_zero():
            return self
        den = 1
        for c in self.coefficients:
            den = den * c.denominator // math.gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coefficients]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        return ExactPolynomial(Fraction(v, g) for v in ints)

    def monic(self) -> "ExactPolynomial":
        return ExactPolynomial(c / self.leading for c in self.coefficients)

    def gcd(self, other: "ExactPolynomial") -> "ExactPolynomial":
        a, b = self, other
        while not b.is_zero():
            a, b = b, (a % b).primitive()
        return a.monic() if not a.is_zero() else a

    def squarefree(self) -> "ExactPolynomial":
        if self.degree < 1:
            return self
        g = self.gcd(self.derivative())
        return (self // g).primitive() if g.degree > 0 else self.primitive()

    def __eq__(self, other):
        return isinstance(other, ExactPolynomial) and self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return f"ExactPolynomial({[str(c) for c in self.coefficients]})"


def _as_poly(x) -> ExactPolynomial:
    if isinstance(x, ExactPolynomial):
        return x
    return ExactPolynomial([x])


def sturm_sequence(p: ExactPolynomial) -> list[ExactPolynomial]:
    """Signed remainder sequence, each entry scaled to a primitive integer polynomial."""
    if p.is_zero():
        raise InputError("Sturm sequence of the zero polynomial")
    seq = [p.primitive()]
    d = p.derivative()
    if d.is_zero():
        return seq
    seq.append(d.primitive())
    while True:
        r = seq[-2] % seq[-1]
        if r.is_zero():
            break
        seq.append((-r).primitive())
    return seq


def _variations(signs: Iterable[int]) -> int:
    count = 0
    last = 0
    for s in signs:
        if s == 0:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


def _variations_at(seq: Sequence[ExactPolynomial], x) -> int:
    if x == math.inf:
        return _variations(q.sign_at_infinity(1) for q in seq)
    if x == -math.inf:
        return _variations(q.sign_at_infinity(-1) for q in seq)
    return _variations(q.sign_at(x) for q in seq)


def sturm_count(p: ExactPolynomial, lo, hi) -> int:
    """Number of distinct real roots of p in the open interval (lo, hi).

    ``lo``/``hi`` may be ``-math.inf``/``math.inf``.
    """
    finite = [v for v in (lo, hi) if v not in (math.inf, -math.inf)]
    finite = [to_rational(v) for v in finite]
    if lo not in (math.inf, -math.inf):
        lo = to_rational(lo)
    if hi not in (math.inf, -math.inf):
        hi = to_rational(hi)
    if not lo < hi:
        raise InputError("sturm_count needs lo < hi")
    if p.is_zero():
        raise InputError("the zero polynomial has infinitely many roots")
    for v in finite:
        if p(v) == 0:
            raise EndpointRoot(f"polynomial vanishes at endpoint {v}")
    seq = sturm_sequence(p)
    return _variations_at(seq, lo) - _variations_at(seq, hi)


def deflate_at(p: ExactPolynomial, r: Fraction) -> ExactPolynomial:
    """Divide out every factor (x - r)."""
    lin = ExactPolynomial([-r, 1])
    while p.degree >= 1 and p(r) == 0:
        p = p // lin
    return p


def count_roots_open(p: ExactPolynomial, lo, hi) -> int:
    """Like sturm_count, but endpoint roots are divided out instead of raising."""
    for v in (lo, hi):
        if v not in (math.inf, -math.inf):
            p = deflate_at(p, to_rational(v))
    return sturm_count(p, lo, hi)


def cauchy_bound(p: ExactPolynomial) -> Fraction:
    lead = abs(p.leading)
    return 1 + max((abs(c) / lead for c in p.coefficients[:-1]), default=Fraction(0))


def isolate_real_roots(p: ExactPolynomial, lo=None, hi=None) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals, each holding exactly one distinct real root.

    Roots are taken in the open interval (lo, hi) (default: all of R).  A
    rational root found at a split point is returned as ``(r, r)``; all other
    intervals are open with p nonzero at both ends.
    """
    if p.is_zero():
        raise InputError("cannot isolate roots of the zero polynomial")
    q = p.squarefree()
    if q.degree < 1:
        return []
    bound = cauchy_bound(q)
    lo = -bound if lo is None else max(to_rational(lo), -bound - 1)
    hi = bound if hi is None else min(to_rational(hi), bound + 1)
    if lo >= hi:
        return []
    exact: list[Fraction] = []
    for v in (lo, hi):
        if q(v) == 0:
            q = deflate_at(q, v)
    while True:
        restart = False
        seq = sturm_sequence(q)
        out = []
        stack = [(lo, hi)]
        while stack:
            a, b = stack.pop()
            n = _variations_at(seq, a) - _variations_at(seq, b)
            if n == 0:
                continue
            if n == 1:
                out.append((a, b))
                continue
            m = _dyadic_between(a, b)
            if q(m) == 0:
                exact.append(m)
                q = deflate_at(q, m)
                restart = True
                break
            stack.append((m, b))
            stack.append((a, m))
        if not restart:
            break
    if exact:
        seq = sturm_sequence(q)
        out = [_avoid_points(seq, a, b, exact) for a, b in out]
    out.extend((r, r) for r in exact)
    out.sort()
    return out


def _avoid_points(seq, a: Fraction, b: Fraction, points: list[Fraction]) -> tuple[Fraction, Fraction]:
    """Shrink (a, b), which holds one root of seq[0], until no given point lies in [a, b]."""
    while any(a <= r <= b for r in points):
        m = _dyadic_between(a, b)
        if seq[0](m) == 0:
            return m, m
        if _variations_at(seq, a) - _variations_at(seq, m) == 1:
            b = m
        else:
            a = m
    return a, b


def _dyadic_between(a: Fraction, b: Fraction) -> Fraction:
    """A short dyadic near a + (b - a) * 61/128, strictly inside (a, b)."""
    target = a + (b - a) * Fraction(61, 128)
    w = b - a
    k = max(0, -math.floor(math.log2(w)) + 6) if w < 1 else 0
    scale = 1 << k
    cand = Fraction(math.floor(target * scale), scale)
    if not a < cand < b:
        cand = target
    return cand


def refine_poly_root(p: ExactPolynomial, lo: Fraction, hi: Fraction, width) -> tuple[Fraction, Fraction]:
    """Bisect an isolating interval of a squarefree p down to the given width."""
    width = to_rational(width)
    if lo == hi:
        return lo, hi
    slo = p.sign_at(lo)
    while hi - lo > width:
        m = _dyadic_between(lo, hi)
        s = p.sign_at(m)
        if s == 0:
            return m, m
        if s == slo:
            lo = m
        else:
            hi = m
    return lo, hi


# ---------------------------------------------------------------------------
# GemSum isolation


class RootKind(str, enum.Enum):
    SIMPLE_ROOT = "SimpleRoot"
    CRITICAL_POINT = "CriticalPoint"
    LEVEL_CROSSING = "LevelCrossing"


@dataclass(frozen=True)
class IsolatingInterval:
    lo: Fraction
    hi: Fraction
    kind: RootKind = RootKind.SIMPLE_ROOT
    certified_unique: bool = True

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def as_interval(self, prec: int | None = None) -> DyadicInterval:
        return DyadicInterval(self.lo, self.hi, prec or default_precision())

    def to_json(self):
        return {
            "lo": str(self.lo),
            "hi": str(self.hi),
            "kind": self.kind.value,
            "certified_unique": self.certified_unique,
        }


@dataclass(frozen=True)
class IsolationConfig:
    precision_bits: int = field(default_factory=default_precision)
    max_precision_bits: int = MAX_PRECISION
    max_depth: int = 400
    max_boxes: int = 500_000
    endpoint_eps_exponents: tuple = (16, 32, 64, 128, 256, 512, 1024)

    def __post_init__(self):
        if self.precision_bits > self.max_precision_bits:
            raise InputError("precision_bits exceeds max_precision_bits")
        if self.precision_bits < 16:
            raise InputError("precision_bits must be at least 16")


def _needed_precision(width: Fraction, base: int, cap: int) -> int:
    p = base
    while width < Fraction(1, 2 ** (p // 2)):
        p *= 2
        if p > cap:
            raise UnresolvedBox(f"precision cap {cap} reached on a box of width {float(width):.3g}")
    return p


def _box(a: Fraction, b: Fraction, prec: int) -> DyadicInterval:
    return DyadicInterval(a, b, prec)


def _sign_of(F, q: Fraction, config: IsolationConfig) -> int:
    """Certified sign of F at a rational point, escalating precision (0 if undecided)."""
    p = config.precision_bits
    while p <= config.max_precision_bits:
        s = F(DyadicInterval(q, q, p)).sign()
        if s:
            return s
        p *= 2
    return 0


def point_sign(expr: GemExpr, q: Fraction, config: IsolationConfig) -> int:
    """Certified sign of expr at a rational point, escalating precision."""
    return _sign_of(expr.enclose, q, config)


def isolate_interval_zeros(
    F: Callable[[DyadicInterval], DyadicInterval],
    DF: Callable[[DyadicInterval], DyadicInterval],
    lo: Fraction,
    hi: Fraction,
    config: IsolationConfig,
    stop_width: Callable[[Fraction, Fraction], Fraction],
    split: Callable[[Fraction, Fraction], Fraction] | None = None,
) -> list[tuple[Fraction, Fraction]]:
    """Certified isolating boxes for all zeros of F in [lo, hi].

    F and DF map a closed interval to enclosures of the function and its
    derivative.  A box is discarded when the naive or the centred enclosure
    excludes 0.  A box on which DF is sign-definite holds at most one zero;
    it is accepted when the end values have certified opposite signs, and
    then contracted until its width is below stop_width(a, b).
    """
    split = split or _dyadic_between
    found: list[tuple[Fraction, Fraction]] = []
    signs: dict[Fraction, int] = {}

    def sign_at(q: Fraction) -> int:
        s = signs.get(q)
        if s is None:
            s = signs[q] = _sign_of(F, q, config)
        return s

    stack = [(lo, hi, 0)]
    boxes = 0
    while stack:
        a, b, depth = stack.pop()
        boxes += 1
        if boxes > config.max_boxes:
            raise UnresolvedBox("box budget exhausted")
        if depth > config.max_depth:
            raise UnresolvedBox(f"depth cap hit near [{float(a)}, {float(b)}]")
        prec = _needed_precision(b - a, config.precision_bits, config.max_precision_bits)
        X = _box(a, b, prec)
        if F(X).sign():
            continue
        D = DF(X)
        m = split(a, b)
        if D.sign():
            sa, sb = sign_at(a), sign_at(b)
            if sa and sb:
                if sa == sb:
                    continue
                found.append(_contract(F, DF, a, b, prec, sa, stop_width, split))
                continue
        else:
            fm = F(DyadicInterval(m, m, prec))
            centred = fm + D * (X - m)
            if centred.sign():
                continue
        stack.append((m, b, depth + 1))
        stack.append((a, m, depth + 1))
    found.sort()
    return found


def _contract(F, DF, a: Fraction, b: Fraction, prec: int, sa: int, stop_width, split=None):
    """Shrink a monotone box with a sign change, keeping a certified bracket.

    Interval Newton steps are tried first; bisection takes over whenever a
    Newton step fails to contract.
    """
    config = IsolationConfig(precision_bits=prec, max_precision_bits=max(prec, MAX_PRECISION))
    target = stop_width(a, b)
    for _ in range(400):
        if b - a <= target:
            break
        p = _needed_precision(b - a, prec, config.max_precision_bits)
        X = _box(a, b, p)
        m = (split or _dyadic_between)(a, b)
        D = DF(X)
        fm = F(DyadicInterval(m, m, p))
        N = rational_enclosure(m, p) - fm / D
        inter = N.intersect(X) if N.is_finite else None
        if inter is not None and inter.width * 4 <= (b - a):
            na, nb = inter.lo, inter.hi
            if _sign_of(F, na, config) == sa and _sign_of(F, nb, config) == -sa:
                a, b = na, nb
                continue
        s = _sign_of(F, m, config)
        if s == 0:
            break
        if s == sa:
            a = m
        else:
            b = m
    return a, b


def _isolate_closed(
    expr: GemExpr,
    dexpr: GemExpr,
    lo: Fraction,
    hi: Fraction,
    config: IsolationConfig,
) -> list[tuple[Fraction, Fraction]]:
    """Isolate the zeros of expr in [lo, hi] inside (0, 1), to width 2^-48 relative to the ends."""
    if not 0 < lo < hi < 1:
        raise DomainError("isolation range must lie inside (0, 1)")
    return isolate_interval_zeros(
        expr.enclose, dexpr.enclose, lo, hi, config, lambda a, b: min(a, 1 - b) / 2**48
    )


def _endpoint_cut(expr: GemExpr, side: int, limit: Fraction, config: IsolationConfig) -> Fraction:
    """Largest tried eps with no zero of expr in (0, eps] (side 0) or [1-eps, 1) (side 1)."""
    for k in config.endpoint_eps_exponents:
        eps = Fraction(1, 2**k)
        if eps >= limit:
            continue
        prec = max(config.precision_bits, 2 * k + 32)
        if prec > config.max_precision_bits:
            break
        if side == 0:
            enc = expr.enclose_near_zero(eps, prec)
        else:
            enc = expr.enclose_near_one(1 - eps, prec)
        if enc.sign():
            return eps
    raise UnresolvedBox(f"could not exclude a neighbourhood of {side}")


def isolate_expr_zeros(
    expr: GemExpr,
    lo: Fraction = Fraction(0),
    hi: Fraction = Fraction(1),
    config: IsolationConfig | None = None,
) -> list[tuple[Fraction, Fraction]]:
    """Isolate the zeros of expr in [lo, hi]; an end at 0 or 1 is treated as open."""
    config = config or IsolationConfig()
    lo, hi = to_rational(lo), to_rational(hi)
    if not 0 <= lo < hi <= 1:
        raise DomainError("search range must lie in [0, 1]")
    dexpr = expr.derivative()
    a, b = lo, hi
    if lo == 0:
        a = _endpoint_cut(expr, 0, (hi - lo) / 2, config)
    if hi == 1:
        b = 1 - _endpoint_cut(expr, 1, (hi - lo) / 2, config)
    if a >= b:
        return []
    return _isolate_closed(expr, dexpr, a, b, config)


def isolate_gem_roots(f: GemSum, config: IsolationConfig | None = None) -> list[IsolatingInterval]:
    """Certified isolating intervals for every root of f in (0, 1)."""
    config = config or IsolationConfig()
    boxes = isolate_expr_zeros(f.expr, Fraction(0), Fraction(1), config)
    return [IsolatingInterval(*bracket(f.expr, a, b, config), RootKind.SIMPLE_ROOT, True) for a, b in boxes]


def _side_sign(expr: GemExpr, q: Fraction, side: int, config: IsolationConfig) -> int:
    if q == 0:
        return expr.limit_sign(0)
    if q == 1:
        return expr.limit_sign(1)
    return point_sign(expr, q, config)


def refine_zero(
    expr: GemExpr,
    lo: Fraction,
    hi: Fraction,
    width,
    config: IsolationConfig | None = None,
) -> tuple[Fraction, Fraction]:
    """Shrink a sign-change bracket of expr to the requested width by bisection.

    The bracket must already be certified to contain exactly one zero.
    """
    config = config or IsolationConfig()
    width = to_rational(width)
    slo = point_sign(expr, lo, config)
    shi = point_sign(expr, hi, config)
    if slo == 0 or shi == 0 or slo == shi:
        # endpoints too close to the zero: tighten with a Newton box first
        raise UnresolvedBox("refinement bracket has no certified sign change")
    while hi - lo > width:
        m = _dyadic_between(lo, hi)
        s = point_sign(expr, m, config)
        if s == 0:
            raise UnresolvedBox("cannot certify the sign at a bisection point")
        if s == slo:
            lo = m
        else:
            hi = m
    return lo, hi


def bracket(expr: GemExpr, lo: Fraction, hi: Fraction, config: IsolationConfig | None = None):
    """Check that a Newton-certified box has certified opposite signs at its ends."""
    config = config or IsolationConfig()
    sa = point_sign(expr, lo, config)
    sb = point_sign(expr, hi, config)
    if sa and sb and sa != sb:
        return lo, hi
    raise UnresolvedBox("could not certify the end signs of an isolating box")


def solve_level(
    f: GemSum,
    v,
    search: tuple,
    config: IsolationConfig | None = None,
) -> IsolatingInterval:
    """Isolate a solution of f(x) = v with x in the open search interval.

    Every solution in the search range is isolated; the leftmost one is
    returned, flagged ``certified_unique`` when it is the only one.
    """
    config = config or IsolationConfig()
    v = to_rational(v)
    lo, hi = to_rational(search[0]), to_rational(search[1])
    lo, hi = max(lo, Fraction(0)), min(hi, Fraction(1))
    if not lo < hi:
        raise NoSignChange("empty search interval")
    expr = GemExpr.from_gem(f, shift=v)
    slo = _side_sign(expr, lo, 0, config)
    shi = _side_sign(expr, hi, 1, config)
    if slo == 0 or shi == 0 or slo == shi:
        raise NoSignChange(f"f - {v} has no certified sign change on ({lo}, {hi})")
    # open ends away from 0/1 are treated as closed; the sign there is nonzero
    boxes = isolate_expr_zeros(expr, lo, hi, config)
    if not boxes:
        raise UnresolvedBox("sign change found but no zero isolated")
    a, b = bracket(expr, *boxes[0], config)
    return IsolatingInterval(a, b, RootKind.LEVEL_CROSSING, len(boxes) == 1)


def critical_points(
    f: GemSum,
    between: Sequence[IsolatingInterval],
    config: IsolationConfig | None = None,
) -> list[IsolatingInterval]:
    """One certified zero of f' between each pair of consecutive root intervals.

    When a gap holds several critical points the one with the largest |f| is
    returned (any of them satisfies Rolle's theorem).
    """
    config = config or IsolationConfig()
    dexpr = f.expr.derivative()
    out = []
    for left, right in zip(between, between[1:]):
        if not left.hi < right.lo:
            raise InputError("root intervals must be disjoint and increasing")
        boxes = isolate_expr_zeros(dexpr, left.hi, right.lo, config)
        if not boxes:
            raise UnresolvedBox("no critical point isolated between consecutive roots")
        best = boxes[0]
        if len(boxes) > 1:
            best = max(boxes, key=lambda bx: abs(f.expr.float_value(float((bx[0] + bx[1]) / 2))))
        a, b = bracket(dexpr, *best, config)
        out.append(IsolatingInterval(a, b, RootKind.CRITICAL_POINT, len(boxes) == 1))
    return out


def gem_to_polynomial(f: GemSum) -> ExactPolynomial:
    """x^s (1-x)^t f(x) as an exact polynomial, for integer exponents and rational coefficients."""
    if not f.is_integral():
        raise InputError("GemSum has non-integer exponents or irrational coefficients")
    sa = -min(min(t.a for t in f.terms), 0)
    sb = -min(min(t.b for t in f.terms), 0)
    total = ExactPolynomial([])
    one_minus = ExactPolynomial([1, -1])
    x = ExactPolynomial([0, 1])
    for t in f.terms:
        total = total + ExactPolynomial([t.coeff]) * x ** int(t.a + sa) * one_minus ** int(t.b + sb)
    return total
