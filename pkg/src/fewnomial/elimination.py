"""Real solutions of bivariate polynomial systems by elimination.

The resultant in y is isolated with Sturm sequences; each real root x0 is
lifted to y0 = -s0(x0)/s1(x0) through the degree-one subresultant.  Inputs
that violate generic position (shared x-coordinates, vanishing leading
coefficients, common factors) raise ``DegenerateSystem``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import sympy

from .errors import FewnomialError
from .numeric_core import DyadicInterval
from .univariate_roots import ExactPolynomial, isolate_real_roots, refine_poly_root

X, Y = sympy.symbols("x y")


class DegenerateSystem(FewnomialError):
    """The system is not in generic position for the elimination oracle."""


@dataclass(frozen=True)
class RealSolution:
    x: tuple  # (lo, hi) Fractions; lo == hi for a rational root
    y: DyadicInterval
    y_sign: int


def to_sympy(terms: dict) -> sympy.Poly:
    """{(i, j): coeff} with i, j >= 0 to a Poly in x, y over QQ."""
    expr = sum(sympy.Rational(c.numerator, c.denominator) * X**i * Y**j for (i, j), c in terms.items())
    return sympy.Poly(expr, X, Y, domain="QQ")


def _univariate(p: sympy.Poly) -> ExactPolynomial:
    """Poly in x only (as a bivariate Poly or expression) to ExactPolynomial."""
    q = sympy.Poly(p.as_expr(), X, domain="QQ")
    coeffs = q.all_coeffs()[::-1]
    return ExactPolynomial(Fraction(int(c.p), int(c.q)) for c in coeffs)


def _y_coeffs(p: sympy.Poly) -> list[ExactPolynomial]:
    """Coefficients of p as a polynomial in y, lowest first."""
    q = sympy.Poly(p.as_expr(), Y)
    out = []
    for c in q.all_coeffs()[::-1]:
        out.append(_univariate(sympy.Poly(c, X, Y, domain="QQ")) if c != 0 else ExactPolynomial([]))
    return out


def _coprime(a: ExactPolynomial, b: ExactPolynomial) -> bool:
    if b.is_zero():
        return False
    return a.gcd(b).degree == 0


def real_solutions(P: sympy.Poly, Q: sympy.Poly, width_bits: int = 60) -> list[RealSolution]:
    """All real solutions of P = Q = 0 (generic position required)."""
    if P.degree(Y) < 1 or Q.degree(Y) < 1:
        raise DegenerateSystem("both polynomials must involve y")
    R = _univariate(sympy.Poly(sympy.resultant(P.as_expr(), Q.as_expr(), Y), X, domain="QQ"))
    if R.is_zero():
        raise DegenerateSystem("common factor")
    if R.degree < 1:
        return []
    Rs = R.squarefree()
    lcP = _y_coeffs(P)[-1]
    lcQ = _y_coeffs(Q)[-1]
    if not (_coprime(Rs, lcP) and _coprime(Rs, lcQ)):
        raise DegenerateSystem("leading coefficient in y vanishes at a resultant root")
    subs = sympy.subresultants(P.as_expr(), Q.as_expr(), Y)
    s1 = None
    for s in subs:
        if sympy.Poly(s, Y).degree() == 1:
            s1 = s
    if s1 is None:
        raise DegenerateSystem("no degree-one subresultant")
    c = _y_coeffs(sympy.Poly(s1, X, Y, domain="QQ"))
    s0, s1c = c[0], c[1]
    if not _coprime(Rs, s1c):
        raise DegenerateSystem("two solutions share an x-coordinate")
    zero_y = Rs.gcd(s0) if not s0.is_zero() else Rs
    out = []
    for lo, hi in isolate_real_roots(Rs):
        y_zero = zero_y.degree >= 1 and _root_of(zero_y, lo, hi, Rs)
        if y_zero:
            out.append(RealSolution((lo, hi), DyadicInterval(0), 0))
            continue
        bits = width_bits
        while True:
            a, b = refine_poly_root(Rs, lo, hi, Fraction(1, 2**bits))
            xi = DyadicInterval(a, b, bits + 64)
            den = _eval_interval(s1c, xi)
            num = _eval_interval(s0, xi)
            if den.sign():
                y = -num / den
                if y.sign():
                    out.append(RealSolution((a, b), y, y.sign()))
                    break
            bits *= 2
            if bits > 8192:
                raise DegenerateSystem("could not separate y from zero")
    return out


def _root_of(g: ExactPolynomial, lo: Fraction, hi: Fraction, R: ExactPolynomial) -> bool:
    """Whether the unique root of R in the isolating interval is a root of g (g | R)."""
    if lo == hi:
        return g(lo) == 0
    sa, sb = g.sign_at(lo), g.sign_at(hi)
    return sa != 0 and sb != 0 and sa != sb


def _eval_interval(p: ExactPolynomial, x: DyadicInterval) -> DyadicInterval:
    if p.is_zero():
        return DyadicInterval(0, 0, x.precision_bits)
    acc = DyadicInterval(p.coefficients[-1], None, x.precision_bits)
    for c in reversed(p.coefficients[:-1]):
        acc = acc * x + c
    return acc
