"""Exact rationals, dyadic interval arithmetic and generalized-exponent sums.

Intervals are pairs of mpmath binary floats (dyadic rationals) manipulated
through ``mpmath.libmp.libmpi``, which rounds every endpoint outward.  All
objects here are immutable; every precision is passed explicitly, so nothing
depends on mpmath's global context.
"""

from __future__ import annotations

import math
import numbers
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from mpmath.libmp import (
    fzero,
    from_int,
    from_man_exp,
    from_rational,
    libmpi,
    mpf_cmp,
    mpf_sign,
    round_ceiling,
    round_floor,
)
from mpmath.libmp import to_float as mpf_to_float

from .errors import DomainError, InputError, NonPositiveBase

Rational = Fraction

DEFAULT_PRECISION = 64
MAX_PRECISION = 4096


def default_precision() -> int:
    """Working precision in bits; ``FEWNOMIAL_PRECISION`` overrides the default."""
    raw = os.environ.get("FEWNOMIAL_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION
    try:
        bits = int(raw)
    except ValueError as exc:
        raise InputError(f"FEWNOMIAL_PRECISION must be an integer, got {raw!r}") from exc
    if bits < 16:
        raise InputError("FEWNOMIAL_PRECISION must be at least 16")
    return bits


def to_rational(value) -> Fraction:
    """Parse ints, Fractions, floats (exactly) and ``"p/q"`` strings."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError("booleans are not rationals")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, numbers.Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InputError(f"non-finite float {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse rational {value!r}") from exc
    raise InputError(f"cannot interpret {value!r} as a rational")


def is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


# ---------------------------------------------------------------------------
# raw mpf helpers

_FINF = libmpi.finf if hasattr(libmpi, "finf") else None


def _is_special(v) -> bool:
    return v[1] == 0 and v != fzero


def _mpf_from_fraction(q: Fraction, prec: int, rnd):
    if q.denominator == 1:
        return from_int(q.numerator, prec, rnd)
    return from_rational(q.numerator, q.denominator, prec, rnd)


def _mpf_exact(q: Fraction):
    """Exact mpf for a dyadic rational (no rounding)."""
    d = q.denominator
    if d & (d - 1):
        raise InputError(f"{q} is not dyadic")
    return from_man_exp(q.numerator, -(d.bit_length() - 1))


def _mpf_to_fraction(v) -> Fraction:
    if _is_special(v):
        raise ValueError("infinite endpoint has no rational value")
    sign, man, exp, _ = v
    man = int(man)
    val = Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)
    return -val if sign else val


def _mpf_str(v) -> str:
    if _is_special(v):
        return "inf" if v[0] == 0 else "-inf"
    return str(_mpf_to_fraction(v))


def _rational_interval(q: Fraction, prec: int):
    if is_dyadic(q):
        x = _mpf_exact(q)
        return (x, x)
    return (_mpf_from_fraction(q, prec, round_floor), _mpf_from_fraction(q, prec, round_ceiling))


class DyadicInterval:
    """Closed interval ``[lo, hi]`` with dyadic endpoints.

    Endpoints may be infinite after operations on unbounded inputs (for
    example the logarithm of an interval touching zero).
    """

    __slots__ = ("_v", "precision_bits")

    def __init__(self, lo, hi=None, precision_bits: int | None = None):
        prec = precision_bits or default_precision()
        lo_q = to_rational(lo)
        hi_q = lo_q if hi is None else to_rational(hi)
        if lo_q > hi_q:
            raise InputError(f"empty interval [{lo_q}, {hi_q}]")
        a = _rational_interval(lo_q, prec)[0]
        b = _rational_interval(hi_q, prec)[1]
        self._v = (a, b)
        self.precision_bits = prec

    @classmethod
    def _raw(cls, v, prec: int) -> "DyadicInterval":
        obj = cls.__new__(cls)
        obj._v = v
        obj.precision_bits = prec
        return obj

    @classmethod
    def point(cls, q, precision_bits: int | None = None) -> "DyadicInterval":
        return cls(q, q, precision_bits)

    @classmethod
    def hull_of(cls, items: Sequence["DyadicInterval"]) -> "DyadicInterval":
        out = items[0]
        for it in items[1:]:
            out = out.hull(it)
        return out

    # -- endpoint access -------------------------------------------------
    @property
    def lo(self) -> Fraction:
        return _mpf_to_fraction(self._v[0])

    @property
    def hi(self) -> Fraction:
        return _mpf_to_fraction(self._v[1])

    @property
    def is_finite(self) -> bool:
        return not (_is_special(self._v[0]) or _is_special(self._v[1]))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def lo_float(self) -> float:
        return _to_float(self._v[0])

    def hi_float(self) -> float:
        return _to_float(self._v[1])

    def mid_float(self) -> float:
        return (self.lo_float() + self.hi_float()) / 2

    # -- predicates ----------------------------------------------------------
    def sign(self) -> int:
        """+1 or -1 when the interval is sign-definite, else 0."""
        if mpf_sign(self._v[0]) > 0:
            return 1
        if mpf_sign(self._v[1]) < 0:
            return -1
        return 0

    def contains(self, q) -> bool:
        x = _rational_interval(to_rational(q), self.precision_bits + 64)
        return mpf_cmp(self._v[0], x[0]) <= 0 and mpf_cmp(x[1], self._v[1]) <= 0

    def contains_zero(self) -> bool:
        return self.sign() == 0

    def overlaps(self, other: "DyadicInterval") -> bool:
        return mpf_cmp(self._v[0], other._v[1]) <= 0 and mpf_cmp(other._v[0], self._v[1]) <= 0

    def strictly_inside(self, other: "DyadicInterval") -> bool:
        """True if self lies in the interior of other."""
        return mpf_cmp(other._v[0], self._v[0]) < 0 and mpf_cmp(self._v[1], other._v[1]) < 0

    def less_than(self, other: "DyadicInterval") -> bool:
        """Certified ``x < y`` for every x in self and y in other."""
        return mpf_cmp(self._v[1], other._v[0]) < 0

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> "DyadicInterval":
        if isinstance(other, DyadicInterval):
            return other
        return DyadicInterval(to_rational(other), None, self.precision_bits)

    def __add__(self, other):
        o = self._coerce(other)
        p = max(self.precision_bits, o.precision_bits)
        return DyadicInterval._raw(libmpi.mpi_add(self._v, o._v, p), p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        p = max(self.precision_bits, o.precision_bits)
        return DyadicInterval._raw(libmpi.mpi_sub(self._v, o._v, p), p)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        p = max(self.precision_bits, o.precision_bits)
        return DyadicInterval._raw(libmpi.mpi_mul(self._v, o._v, p), p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        p = max(self.precision_bits, o.precision_bits)
        return DyadicInterval._raw(libmpi.mpi_div(self._v, o._v, p), p)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __neg__(self):
        return DyadicInterval._raw(libmpi.mpi_neg(self._v), self.precision_bits)

    def __abs__(self):
        return DyadicInterval._raw(libmpi.mpi_abs(self._v), self.precision_bits)

    def exp(self, extra_bits: int = 0) -> "DyadicInterval":
        p = self.precision_bits + extra_bits
        return DyadicInterval._raw(libmpi.mpi_exp(self._v, p), self.precision_bits)

    def log(self, extra_bits: int = 0) -> "DyadicInterval":
        if mpf_sign(self._v[0]) < 0:
            raise NonPositiveBase("logarithm of an interval containing negative numbers")
        p = self.precision_bits + extra_bits
        return DyadicInterval._raw(libmpi.mpi_log(self._v, p), self.precision_bits)

    def pow_int(self, k: int) -> "DyadicInterval":
        return DyadicInterval._raw(libmpi.mpi_pow_int(self._v, k, self.precision_bits), self.precision_bits)

    # -- set operations ------------------------------------------------------
    def hull(self, other: "DyadicInterval") -> "DyadicInterval":
        a = self._v[0] if mpf_cmp(self._v[0], other._v[0]) <= 0 else other._v[0]
        b = self._v[1] if mpf_cmp(self._v[1], other._v[1]) >= 0 else other._v[1]
        return DyadicInterval._raw((a, b), max(self.precision_bits, other.precision_bits))

    def intersect(self, other: "DyadicInterval") -> "DyadicInterval | None":
        a = self._v[0] if mpf_cmp(self._v[0], other._v[0]) >= 0 else other._v[0]
        b = self._v[1] if mpf_cmp(self._v[1], other._v[1]) <= 0 else other._v[1]
        if mpf_cmp(a, b) > 0:
            return None
        return DyadicInterval._raw((a, b), max(self.precision_bits, other.precision_bits))

    def with_precision(self, bits: int) -> "DyadicInterval":
        return DyadicInterval._raw(self._v, bits)

    def to_json(self) -> list[str]:
        return [_mpf_str(self._v[0]), _mpf_str(self._v[1])]

    def __repr__(self) -> str:
        return f"DyadicInterval([{_to_float(self._v[0]):.17g}, {_to_float(self._v[1]):.17g}], prec={self.precision_bits})"

    def __eq__(self, other) -> bool:
        return isinstance(other, DyadicInterval) and self._v == other._v

    def __hash__(self) -> int:
        return hash(self._v)


def _to_float(v) -> float:
    return mpf_to_float(v)


def rational_enclosure(q, prec: int) -> DyadicInterval:
    return DyadicInterval._raw(_rational_interval(to_rational(q), prec), prec)


def interval_pow(x: DyadicInterval, e) -> DyadicInterval:
    """Enclosure of ``{t**e : t in x}`` for ``x.lo > 0`` and rational ``e``."""
    e = to_rational(e)
    if x.sign() <= 0:
        raise NonPositiveBase(f"interval_pow needs a positive base, got {x!r}")
    if e == 0:
        return rational_enclosure(1, x.precision_bits)
    if e.denominator == 1 and abs(e.numerator) <= 64:
        return x.pow_int(e.numerator)
    prec = x.precision_bits
    # guard bits cover the magnitude of e*log(x) so exp keeps ~prec relative bits
    guard = 12 + max(e.numerator.bit_length() - e.denominator.bit_length(), 0)
    ex = DyadicInterval._raw(x._v, prec + guard)
    lg = ex.log(8)
    y = (lg * rational_enclosure(e, prec + guard)).exp(8)
    return y.with_precision(prec)


def pow_from_zero(h: Fraction, e: Fraction, prec: int) -> DyadicInterval:
    """Enclosure of ``{t**e : t in [0, h]}`` for ``e > 0``."""
    top = interval_pow(rational_enclosure(h, prec), e)
    return DyadicInterval._raw((fzero, top._v[1]), prec)


# ---------------------------------------------------------------------------
# exact power coefficients


def _integer_root(n: int, k: int) -> int | None:
    if n < 0:
        return None
    r = round(n ** (1.0 / k)) if n < 2**1000 else _iroot(n, k)
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    r = _iroot(n, k)
    return r if r**k == n else None


def _iroot(n: int, k: int) -> int:
    lo, hi = 0, 1 << (n.bit_length() // k + 1)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**k <= n:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _perfect_power_degree(q: Fraction) -> int:
    from sympy import perfect_power

    ks = []
    for n in (q.numerator, q.denominator):
        if n == 1:
            continue
        pp = perfect_power(n)
        ks.append(int(pp[1]) if pp else 1)
    out = 0
    for k in ks:
        out = math.gcd(out, k)
    return max(out, 1)


def _rational_root(q: Fraction, k: int) -> Fraction:
    return Fraction(_iroot(q.numerator, k), _iroot(q.denominator, k))


@dataclass(frozen=True)
class PowerCoeff:
    """The real number ``sign * base**exponent`` with rational base > 0."""

    base: Fraction
    exponent: Fraction
    sign: int = 1

    def __post_init__(self):
        if self.base <= 0:
            raise NonPositiveBase("power coefficient base must be positive")
        if self.sign not in (1, -1):
            raise InputError("sign must be +1 or -1")

    @staticmethod
    def make(base, exponent, sign: int = 1) -> "Coefficient":
        """Canonical form; collapses to a Fraction whenever the value is rational."""
        base, exponent = to_rational(base), to_rational(exponent)
        if base <= 0:
            raise NonPositiveBase("power coefficient base must be positive")
        if exponent == 0 or base == 1:
            return Fraction(sign)
        p, q = exponent.numerator, exponent.denominator
        # pull out the largest d | q with base a perfect d-th power
        for d in sorted((d for d in range(q, 1, -1) if q % d == 0), reverse=True):
            rn = _integer_root(base.numerator, d)
            rd = _integer_root(base.denominator, d)
            if rn is not None and rd is not None:
                base = Fraction(rn, rd)
                exponent = Fraction(p, q // d)
                p, q = exponent.numerator, exponent.denominator
                break
        if q == 1:
            return sign * base**p
        # write base = r^k with k maximal so equal values share one representation
        k = _perfect_power_degree(base)
        if k > 1:
            base = _rational_root(base, k)
            exponent = exponent * k
            if exponent.denominator == 1:
                return sign * base ** exponent.numerator
        if base < 1:
            base, exponent = 1 / base, -exponent
        return PowerCoeff(base, exponent, sign)

    def enclose(self, prec: int) -> DyadicInterval:
        v = interval_pow(rational_enclosure(self.base, prec + 16), self.exponent).with_precision(prec)
        return -v if self.sign < 0 else v

    def __neg__(self) -> "PowerCoeff":
        return PowerCoeff(self.base, self.exponent, -self.sign)

    def __float__(self) -> float:
        return self.sign * math.exp(float(self.exponent) * math.log(self.base))

    def to_json(self):
        out = {"base": str(self.base), "pow": str(self.exponent)}
        if self.sign < 0:
            out["sign"] = -1
        return out


Coefficient = Union[Fraction, PowerCoeff]


def coeff_sign(c: Coefficient) -> int:
    if isinstance(c, PowerCoeff):
        return c.sign
    return (c > 0) - (c < 0)


def coeff_enclosure(c: Coefficient, prec: int) -> DyadicInterval:
    if isinstance(c, PowerCoeff):
        return c.enclose(prec)
    return rational_enclosure(c, prec)


def coeff_float(c: Coefficient) -> float:
    return float(c)


def multiply_coefficients(factors: Iterable[tuple]) -> Coefficient:
    """Exact product of ``base**exponent`` factors (and plain rationals).

    ``factors`` holds Coefficients or ``(base, exponent)`` pairs; the
    result is a single ``PowerCoeff`` over a common root index.
    """
    sign = 1
    rational = Fraction(1)
    powers: list[tuple[Fraction, Fraction]] = []
    for f in factors:
        if isinstance(f, tuple):
            b, e = to_rational(f[0]), to_rational(f[1])
            if b <= 0:
                raise NonPositiveBase("base must be positive")
            powers.append((b, e))
        elif isinstance(f, PowerCoeff):
            sign *= f.sign
            powers.append((f.base, f.exponent))
        else:
            f = to_rational(f)
            if f == 0:
                return Fraction(0)
            rational *= f
    if rational < 0:
        sign, rational = -sign, -rational
    q = 1
    for _, e in powers:
        q = q * e.denominator // math.gcd(q, e.denominator)
    base = Fraction(1)
    for b, e in powers:
        base *= b ** int(e * q)
    base *= rational**q
    return PowerCoeff.make(base, Fraction(1, q), sign)


def coeff_from_json(obj) -> Coefficient:
    if isinstance(obj, dict):
        try:
            return PowerCoeff.make(obj["base"], obj["pow"], int(obj.get("sign", 1)))
        except KeyError as exc:
            raise InputError(f"power coefficient needs 'base' and 'pow': {obj!r}") from exc
    return to_rational(obj)


def coeff_to_json(c: Coefficient):
    if isinstance(c, PowerCoeff):
        return c.to_json()
    return str(c)


# ---------------------------------------------------------------------------
# generalized-exponent sums


@dataclass(frozen=True)
class GemTerm:
    """``coeff * x**a * (1 - x)**b``."""

    coeff: Coefficient
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", to_rational(self.a))
        object.__setattr__(self, "b", to_rational(self.b))
        c = self.coeff
        if not isinstance(c, PowerCoeff):
            c = to_rational(c)
            object.__setattr__(self, "coeff", c)
        if coeff_sign(c) == 0:
            raise InputError("GemTerm coefficient must be nonzero")

    def to_json(self):
        return {"coeff": coeff_to_json(self.coeff), "a": str(self.a), "b": str(self.b)}


ONE_TERM = GemTerm(Fraction(1), Fraction(0), Fraction(0))


class GemSum:
    """``1 + sum_i c_i x**a_i (1 - x)**b_i`` on the open interval (0, 1)."""

    __slots__ = ("terms", "_expr")

    def __init__(self, terms: Sequence[GemTerm]):
        terms = tuple(terms)
        if not terms or terms[0] != ONE_TERM:
            raise InputError("the first GemSum term must be the constant 1")
        seen = set()
        for t in terms:
            key = (t.a, t.b)
            if key in seen:
                raise InputError(f"duplicate exponent pair {key}")
            seen.add(key)
        self.terms = terms
        self._expr = None

    @classmethod
    def from_terms(cls, extra: Iterable[GemTerm]) -> "GemSum":
        return cls((ONE_TERM, *extra))

    @property
    def m(self) -> int:
        return len(self.terms)

    def append(self, term: GemTerm) -> "GemSum":
        return GemSum(self.terms + (term,))

    @property
    def expr(self) -> "GemExpr":
        if self._expr is None:
            self._expr = GemExpr.from_gem(self)
        return self._expr

    def is_integral(self) -> bool:
        return all(
            t.a.denominator == 1 and t.b.denominator == 1 and not isinstance(t.coeff, PowerCoeff)
            for t in self.terms
        )

    def to_json(self):
        return {"terms": [t.to_json() for t in self.terms]}

    @classmethod
    def from_json(cls, obj) -> "GemSum":
        try:
            raw = obj["terms"]
        except (KeyError, TypeError) as exc:
            raise InputError("GemSum JSON needs a 'terms' list") from exc
        terms = []
        for t in raw:
            try:
                terms.append(GemTerm(coeff_from_json(t["coeff"]), to_rational(t["a"]), to_rational(t["b"])))
            except KeyError as exc:
                raise InputError(f"GemSum term missing field: {t!r}") from exc
        return cls(terms)

    def __eq__(self, other):
        return isinstance(other, GemSum) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        parts = []
        for t in self.terms[1:]:
            parts.append(f"{_coeff_repr(t.coeff)}*x^{t.a}*(1-x)^{t.b}")
        return "GemSum(1 + " + " + ".join(parts) + ")" if parts else "GemSum(1)"


def _coeff_repr(c: Coefficient) -> str:
    if isinstance(c, PowerCoeff):
        s = "-" if c.sign < 0 else ""
        return f"{s}({c.base})^({c.exponent})"
    return f"({c})"


def _poly_eval_interval(poly: tuple, x: DyadicInterval) -> DyadicInterval:
    acc = rational_enclosure(poly[-1], x.precision_bits)
    for c in reversed(poly[:-1]):
        acc = acc * x + c
    return acc


def _poly_mul_linear(poly, c0, c1):
    out = [Fraction(0)] * (len(poly) + 1)
    for i, p in enumerate(poly):
        out[i] += p * c0
        out[i + 1] += p * c1
    return out


def _poly_trim(poly):
    poly = list(poly)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


@dataclass(frozen=True)
class _ExprTerm:
    coeff: Coefficient
    a: Fraction
    b: Fraction
    poly: tuple  # ascending coefficients of a polynomial factor in x


class GemExpr:
    """Sum of ``c x**a (1-x)**b P(x)``; closed under differentiation.

    The domain is (0, 1).  ``enclose_near_zero``/``enclose_near_one`` return
    enclosures of the sum multiplied by a positive power of x (resp. 1-x),
    which have the same sign and are continuous up to the endpoint.
    """

    __slots__ = ("terms", "_coeff_cache")

    def __init__(self, terms: Sequence[_ExprTerm]):
        self.terms = tuple(terms)
        self._coeff_cache: dict[int, list[DyadicInterval]] = {}

    @classmethod
    def from_gem(cls, f: GemSum, shift=0) -> "GemExpr":
        shift = to_rational(shift)
        terms = []
        for t in f.terms:
            c = t.coeff
            if t.a == 0 and t.b == 0 and shift:
                c = to_rational(c) - shift
                if c == 0:
                    continue
            terms.append(_ExprTerm(c, t.a, t.b, (Fraction(1),)))
        return cls(terms)

    def derivative(self) -> "GemExpr":
        out = []
        for t in self.terms:
            p = list(t.poly)
            dp = [i * p[i] for i in range(1, len(p))] or [Fraction(0)]
            # a(1-x)P - b x P + x(1-x) P'
            q1 = [t.a * v for v in _poly_mul_linear(p, 1, -1)]
            q2 = [-t.b * v for v in _poly_mul_linear(p, 0, 1)]
            q3 = _poly_mul_linear(_poly_mul_linear(dp, 0, 1), 1, -1)
            n = max(len(q1), len(q2), len(q3))
            q = [Fraction(0)] * n
            for src in (q1, q2, q3):
                for i, v in enumerate(src):
                    q[i] += v
            q = list(_poly_trim(q))
            if all(v == 0 for v in q):
                continue
            a, b = t.a - 1, t.b - 1
            while len(q) > 1 and q[0] == 0:
                q.pop(0)
                a += 1
            while len(q) > 1 and sum(q) == 0:
                q = _divide_by_one_minus_x(q)
                b += 1
            out.append(_ExprTerm(t.coeff, a, b, tuple(q)))
        return GemExpr(out)

    def _coeffs(self, prec: int) -> list[DyadicInterval]:
        cached = self._coeff_cache.get(prec)
        if cached is None:
            cached = [coeff_enclosure(t.coeff, prec) for t in self.terms]
            self._coeff_cache[prec] = cached
        return cached

    def enclose(self, x: DyadicInterval) -> DyadicInterval:
        if x.sign() <= 0 or (1 - x).sign() <= 0:
            raise DomainError("evaluation interval must lie inside (0, 1)")
        prec = x.precision_bits
        one_minus = 1 - x
        total = rational_enclosure(0, prec)
        for t, c in zip(self.terms, self._coeffs(prec)):
            v = c
            if t.a != 0:
                v = v * interval_pow(x, t.a)
            if t.b != 0:
                v = v * interval_pow(one_minus, t.b)
            if len(t.poly) > 1 or t.poly[0] != 1:
                v = v * _poly_eval_interval(t.poly, x)
            total = total + v
        return total

    def enclose_near_zero(self, h: Fraction, prec: int) -> DyadicInterval:
        """Sign-equivalent enclosure of the sum on (0, h]."""
        if not 0 < h < 1:
            raise DomainError("need 0 < h < 1")
        if not self.terms:
            return rational_enclosure(0, prec)
        shift = min(Fraction(0), min(t.a for t in self.terms))
        x = DyadicInterval._raw((fzero, rational_enclosure(h, prec)._v[1]), prec)
        one_minus = 1 - x
        total = rational_enclosure(0, prec)
        for t, c in zip(self.terms, self._coeffs(prec)):
            v = c
            e = t.a - shift
            if e > 0:
                v = v * pow_from_zero(h, e, prec)
            if t.b != 0:
                v = v * interval_pow(one_minus, t.b)
            if len(t.poly) > 1 or t.poly[0] != 1:
                v = v * _poly_eval_interval(t.poly, x)
            total = total + v
        return total

    def enclose_near_one(self, l: Fraction, prec: int) -> DyadicInterval:
        """Sign-equivalent enclosure of the sum on [l, 1)."""
        if not 0 < l < 1:
            raise DomainError("need 0 < l < 1")
        if not self.terms:
            return rational_enclosure(0, prec)
        shift = min(Fraction(0), min(t.b for t in self.terms))
        lo = rational_enclosure(l, prec)
        x = DyadicInterval._raw((lo._v[0], from_int(1)), prec)
        h = 1 - l
        total = rational_enclosure(0, prec)
        for t, c in zip(self.terms, self._coeffs(prec)):
            v = c
            if t.a != 0:
                v = v * interval_pow(x, t.a)
            e = t.b - shift
            if e > 0:
                v = v * pow_from_zero(h, e, prec)
            if len(t.poly) > 1 or t.poly[0] != 1:
                v = v * _poly_eval_interval(t.poly, x)
            total = total + v
        return total

    def limit_sign(self, side: int) -> int:
        """Sign of the sum as x -> 0+ (side 0) or x -> 1- (side 1); 0 if it vanishes."""
        if not self.terms:
            return 0
        key = (lambda t: t.a) if side == 0 else (lambda t: t.b)
        extreme = min(Fraction(0), min(key(t) for t in self.terms))
        dominant = [t for t in self.terms if key(t) == extreme]
        # at the endpoint the other factor is 1 and P is evaluated at 0 or 1
        point = Fraction(side)
        total_prec = 128
        acc = rational_enclosure(0, total_prec)
        exact = Fraction(0)
        all_exact = True
        for t in dominant:
            pv = sum(c * point**i for i, c in enumerate(t.poly))
            if isinstance(t.coeff, PowerCoeff):
                all_exact = False
                acc = acc + t.coeff.enclose(total_prec) * pv
            else:
                exact += t.coeff * pv
        if all_exact:
            return (exact > 0) - (exact < 0)
        acc = acc + exact
        s = acc.sign()
        if s == 0:
            raise DomainError("cannot decide the endpoint sign")
        return s

    def exact_value(self, x: Fraction) -> Fraction | None:
        """Exact value at a rational point when every exponent is an integer."""
        total = Fraction(0)
        for t in self.terms:
            if isinstance(t.coeff, PowerCoeff) or t.a.denominator != 1 or t.b.denominator != 1:
                return None
            pv = sum(c * x**i for i, c in enumerate(t.poly))
            total += t.coeff * x ** int(t.a) * (1 - x) ** int(t.b) * pv
        return total

    def float_value(self, x: float) -> float:
        total = 0.0
        for t in self.terms:
            pv = sum(float(c) * x**i for i, c in enumerate(t.poly))
            total += float(t.coeff) * x ** float(t.a) * (1 - x) ** float(t.b) * pv
        return total


def _divide_by_one_minus_x(q):
    # synthetic division of sum q_i x^i by (1 - x); caller checks q(1) == 0
    n = len(q) - 1
    out = [Fraction(0)] * n
    carry = Fraction(0)
    for i in range(n, 0, -1):
        carry = carry + q[i]
        out[i - 1] = -carry
    return out


def _check_domain(x: DyadicInterval):
    if x.sign() <= 0 or (1 - x).sign() <= 0:
        raise DomainError("x must lie strictly inside (0, 1)")


def eval_gem(f: GemSum, x: DyadicInterval) -> DyadicInterval:
    """Enclosure of the range of ``f`` over ``x``."""
    _check_domain(x)
    if x.lo == x.hi and f.is_integral():
        return rational_enclosure(f.expr.exact_value(x.lo), x.precision_bits)
    return f.expr.enclose(x)


def eval_gem_derivative(f: GemSum, x: DyadicInterval) -> DyadicInterval:
    """Enclosure of ``f'`` over ``x`` (term-wise formula)."""
    _check_domain(x)
    d = f.expr.derivative()
    if x.lo == x.hi and f.is_integral():
        return rational_enclosure(d.exact_value(x.lo), x.precision_bits)
    return d.enclose(x)
