"""Chambers of the complement of reduced discriminants.

For #A = n + 3 the reduced discriminant is the plane curve Psi(P^1) inside
(R*)^2.  In log coordinates every arc of the curve between two zeros of the
linear forms is a proper curve going to infinity at both ends, so a
quadrant holding a arcs with x transversal crossings splits into
1 + a + x chambers.  Crossings between two arcs are the roots of a 2 x 2
sheared system in the two arc parameters; self-crossings use the same
system on the triangle u < v, with the diagonal removed by a divided
difference enclosure.

For #A = n + 4 only bound components and a sampling estimate are produced.
"""

from __future__ import annotations

import bisect
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import sympy

from . import elimination
from .errors import DegenerateFrame, InputError, NonGenericSupport, UnresolvedBox
from .gale_discriminant import GaleFrame, Support, gale_frame, genericity_check
from .numeric_core import DyadicInterval, default_precision, rational_enclosure, to_rational
from .sheared_systems import (
    ShearedConfig,
    ShearedSystem,
    _g_2d,
    _krawczyk,
    floor_of,
    published_bound,
    solve_box,
)
from .univariate_roots import (
    ExactPolynomial,
    cauchy_bound,
    count_roots_open,
    deflate_at,
    isolate_real_roots,
    refine_poly_root,
)

DEFAULT_MC_SAMPLES = 100_000
DEFAULT_SEED = 20240611
LOG_RANGE = 12.0


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True, order=True)
class RootSignature:
    """(positive roots, negative roots) of a univariate polynomial on R*."""

    pos: int
    neg: int

    def __post_init__(self):
        if self.pos < 0 or self.neg < 0:
            raise InputError("root counts are non-negative")

    def to_json(self):
        return [self.pos, self.neg]


def _as_support(A) -> Support:
    return A if isinstance(A, Support) else Support(A)


def _univariate_poly(A: Support, delta) -> ExactPolynomial:
    exps = [p[0] for p in A.points]
    low = min(exps)
    coeffs = [Fraction(0)] * (max(exps) - low + 1)
    for e, d in zip(exps, delta):
        coeffs[e - low] += to_rational(d)
    return ExactPolynomial(coeffs)


def _positive_roots(p: ExactPolynomial) -> int:
    signs = [1 if c > 0 else -1 for c in p.coefficients if c != 0]
    changes = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
    if changes <= 1:  # Descartes' rule is exact here
        return changes
    return count_roots_open(p, 0, cauchy_bound(p) + 1)


def signature_oracle(A, delta) -> RootSignature:
    """Positive and negative real root counts of sum delta_i x^{a_i}."""
    A = _as_support(A)
    if A.n != 1:
        raise InputError("signature_oracle needs a univariate support")
    if len(delta) != A.m:
        raise InputError("delta needs one coefficient per support point")
    if any(to_rational(d) == 0 for d in delta):
        raise InputError("coefficients must be nonzero")
    p = _univariate_poly(A, delta)
    return RootSignature(_positive_roots(p), _positive_roots(p.reflect()))


def _sample_reduced(rng: random.Random, k: int) -> list[Fraction]:
    out = []
    for _ in range(k):
        mag = math.exp(rng.uniform(-LOG_RANGE, LOG_RANGE))
        q = Fraction(max(1, round(mag * 2**32)), 2**32)
        out.append(q if rng.random() < 0.5 else -q)
    return out


def sample_coefficients(rng: random.Random, m: int) -> list[Fraction]:
    """Random signs and log-uniform magnitudes."""
    return _sample_reduced(rng, m)


def signature_classes(A, samples: int = DEFAULT_MC_SAMPLES, seed: int = DEFAULT_SEED) -> dict:
    """Monte-Carlo oracle: {RootSignature: hits} over seeded coefficient samples."""
    A = _as_support(A)
    rng = random.Random(seed)
    hist: dict[RootSignature, int] = {}
    for _ in range(samples):
        sig = signature_oracle(A, sample_coefficients(rng, A.m))
        hist[sig] = hist.get(sig, 0) + 1
    return dict(sorted(hist.items()))


# ---------------------------------------------------------------------------
# reports


@dataclass
class ChamberReport:
    support: Support
    case_dim: str
    critical_values: list
    nodal_witnesses: list
    slab_count: int
    chamber_count: int | None = None
    chamber_estimate: dict | None = None
    bound_components: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "support": self.support.to_json(),
            "case_dim": self.case_dim,
            "critical_values": self.critical_values,
            "nodal_witnesses": self.nodal_witnesses,
            "slab_count": self.slab_count,
            "chamber_count": self.chamber_count,
            "chamber_estimate": self.chamber_estimate,
            "bound_components": self.bound_components,
            "details": self.details,
        }


def _box_json(box) -> list:
    return [[str(lo), str(hi)] for lo, hi in box]


# ---------------------------------------------------------------------------
# the bound chain


def diffeotopy_bound(n: int) -> tuple[dict, int]:
    """Explicit counting chain behind the diffeotopy-type bound for #A = n + 4."""
    if n < 1:
        raise InputError("n must be positive")
    prec = 128
    e23 = rational_enclosure(2, prec).exp() + 3
    crit = (n + 3) ** 2
    nodal_iv = e23 * Fraction((2 * n + 8) * (2 * n + 9), 2) * n**4
    nodal = -floor_of(-nodal_iv)
    slabs = crit + nodal
    sheets = (n + 4) * (n + 5) // 2
    per_sheet = floor_of(published_bound(2, n + 2, prec))
    per_slab = sheets * per_sheet + 1
    total = (slabs + 1) * per_slab
    comps = {
        "n": n,
        "crit": crit,
        "nodal": nodal,
        "slabs": slabs,
        "sheets": sheets,
        "per_sheet": per_sheet,
        "per_slab": per_slab,
        "per_slab_order_composed": 4,
        "per_slab_order_stated": 5,
        "total": total,
        "e2_plus_3": e23.to_json(),
        "nodal_exact": nodal_iv.to_json(),
    }
    return comps, total


# ---------------------------------------------------------------------------
# n + 3: the plane curve case


@dataclass(frozen=True)
class _Arc:
    index: int
    lo: Fraction
    hi: Fraction
    forms: tuple  # (c0, c1) per relevant form: l_i(u) = c0 + c1 u
    quadrant: tuple
    P: tuple
    Q: tuple


def _cross(a, b) -> Fraction:
    return a[0] * b[1] - a[1] * b[0]


def _form_at(row, lam) -> Fraction:
    return row[0] * lam[0] + row[1] * lam[1]


def _psi_sign(frame: GaleFrame, rows, lam) -> tuple:
    out = []
    for j in range(frame.k):
        s = 1
        for i in rows:
            if _form_at(frame.B[i], lam) < 0 and frame.W[i][j].numerator % 2:
                s = -s
        out.append(s)
    return tuple(out)


def _relevant(frame: GaleFrame) -> list[int]:
    return [i for i in range(frame.m) if any(frame.W[i])]


def plane_arcs(frame: GaleFrame) -> list[_Arc]:
    """Arcs of Psi on P^1, each with a chart lambda(u) = u P + Q bounding it."""
    if frame.k != 2:
        raise InputError("plane arcs need #A = n + 3")
    rel = _relevant(frame)
    finite, infinite = [], False
    for i in rel:
        b0, b1 = (Fraction(v) for v in frame.B[i])
        if b0 == 0:
            if infinite:
                raise DegenerateFrame("two Gale rows are proportional")
            infinite = True
        else:
            finite.append(-b1 / b0)
    if len(set(finite)) != len(finite):
        raise DegenerateFrame("two Gale rows are proportional")
    finite.sort()
    points = [(t, Fraction(1)) for t in finite] + ([(Fraction(1), Fraction(0))] if infinite else [])
    r = len(points)
    if r < 2:
        raise DegenerateFrame("the curve has fewer than two branch points")
    inner = []
    for k in range(r):
        if k + 1 < len(finite):
            inner.append(((finite[k] + finite[k + 1]) / 2, Fraction(1)))
        elif k + 1 == len(finite):  # from the last finite point towards +inf
            inner.append((finite[-1] + 1, Fraction(1)) if infinite else (Fraction(1), Fraction(0)))
        else:  # from infinity to the first finite point
            inner.append((finite[0] - 1, Fraction(1)))
    arcs = []
    for k in range(r):
        Q, P = inner[k], inner[(k + 1) % r]
        ends = [-_cross(Q, z) / _cross(P, z) for z in (points[k], points[(k + 1) % r])]
        lo, hi = min(ends), max(ends)
        if not lo < 0 < hi:
            raise AssertionError("arc chart does not contain its base point")
        forms = tuple((_form_at(frame.B[i], Q), _form_at(frame.B[i], P)) for i in rel)
        arcs.append(_Arc(k, lo, hi, forms, _psi_sign(frame, rel, Q), P, Q))
    return arcs


def _pair_system(frame: GaleFrame, a: _Arc, b: _Arc) -> ShearedSystem:
    rel = _relevant(frame)
    forms = [(c0, c1, 0) for c0, c1 in a.forms] + [(c0, 0, c1) for c0, c1 in b.forms]
    rows = [[frame.W[i][j] for i in rel] + [-frame.W[i][j] for i in rel] for j in range(2)]
    return ShearedSystem.make(forms, rows)


def _self_system(frame: GaleFrame, arc: _Arc) -> tuple:
    """Symmetric polynomials Q_j with psi_j(u) = psi_j(v) iff (u - v) Q_j(u, v) = 0 on the arc.

    The common denominator L of the exponents is odd, so equal L-th powers
    of equal-signed reals are equal.
    """
    X, Y = elimination.X, elimination.Y
    rel = _relevant(frame)
    L = 1
    for i in rel:
        for w in frame.W[i]:
            L = L * w.denominator // math.gcd(L, w.denominator)
    lu = [sympy.Rational(c0.numerator, c0.denominator) + sympy.Rational(c1.numerator, c1.denominator) * X
          for c0, c1 in arc.forms]
    lv = [e.subs(X, Y) for e in lu]
    out = []
    for j in range(2):
        left = right = sympy.Integer(1)
        for t, i in enumerate(rel):
            e = L * frame.W[i][j]
            if e > 0:
                left *= lu[t] ** int(e)
                right *= lv[t] ** int(e)
            elif e < 0:
                left *= lv[t] ** int(-e)
                right *= lu[t] ** int(-e)
        P = sympy.Poly(sympy.expand(left - right), X, Y, domain="QQ")
        Q, rem = sympy.div(P, sympy.Poly(X - Y, X, Y, domain="QQ"))
        if not rem.is_zero:
            raise AssertionError("crossing polynomial does not vanish on the diagonal")
        out.append(Q)
    return tuple(out)


def _self_crossings(frame: GaleFrame, arc: _Arc, config: ShearedConfig) -> list[tuple]:
    """Pairs u < v on one arc with Psi(u) = Psi(v), each certified by Krawczyk.

    Q_j is symmetric, so both coordinates of a crossing are real roots of the
    resultant R(x) = res_y(Q_1, Q_2); every pair of such roots is decided.
    """
    Q1, Q2 = _self_system(frame, arc)
    X, Y = elimination.X, elimination.Y
    if Q1.is_zero or Q2.is_zero:
        raise DegenerateFrame("a coordinate of Psi is constant")
    R = sympy.Poly(sympy.resultant(Q1.as_expr(), Q2.as_expr(), Y), X, domain="QQ")
    if R.is_zero:
        raise DegenerateFrame("the curve has a repeated component")
    Rx = ExactPolynomial(Fraction(int(c.p), int(c.q)) for c in R.all_coeffs()[::-1])
    if Rx.degree < 1:
        return []
    Rs = deflate_at(deflate_at(Rx.squarefree(), arc.lo), arc.hi)
    roots = isolate_real_roots(Rs, arc.lo, arc.hi) if Rs.degree >= 1 else []
    S = _pair_system(frame, arc, arc)
    out = []
    for i, k in combinations(range(len(roots)), 2):
        ri, rk = roots[i], roots[k]
        width = Fraction(1, 2**20)
        for _ in range(8):
            box = (ri, rk)
            if ri[0] == ri[1] or rk[0] == rk[1]:
                pad = width / 4
                box = tuple((lo - pad, hi + pad) if lo == hi else (lo, hi) for lo, hi in box)
            res = _krawczyk(S, box, config.precision_bits or default_precision())
            if res == "none" or any(g.sign() for g in _g_2d(S, [DyadicInterval(lo, hi) for lo, hi in box])):
                break
            if isinstance(res, tuple):
                out.append((arc.index, arc.index, res[1]))
                break
            width = width / 2**16
            ri = refine_poly_root(Rs, *ri, width) if ri[0] < ri[1] else ri
            rk = refine_poly_root(Rs, *rk, width) if rk[0] < rk[1] else rk
        else:
            raise UnresolvedBox("could not decide a self-crossing candidate")
    return out


def _crossings(frame: GaleFrame, arcs: list[_Arc], config: ShearedConfig) -> list[tuple]:
    out = []
    for a, b in combinations(arcs, 2):
        if a.quadrant != b.quadrant:
            continue
        S = _pair_system(frame, a, b)
        for r in solve_box(S, ((a.lo, a.hi), (b.lo, b.hi)), config):
            out.append((a.index, b.index, r.box))
    for a in arcs:
        out.extend(_self_crossings(frame, a, config))
    out.sort(key=lambda t: (t[0], t[1], t[2]))
    return out


def _psi_interval(frame: GaleFrame, arc: _Arc, lo: Fraction, hi: Fraction, prec: int) -> list[DyadicInterval]:
    rel = _relevant(frame)
    logs = []
    for c0, c1 in arc.forms:
        a, b = sorted((c0 + c1 * lo, c0 + c1 * hi))
        if a <= 0 <= b:
            raise UnresolvedBox("critical point too close to a zero of a form")
        logs.append(DyadicInterval(abs(a), abs(b), prec).log() if a > 0 else DyadicInterval(-b, -a, prec).log())
    out = []
    for j in range(2):
        acc = rational_enclosure(0, prec)
        for i, lg in zip(rel, logs):
            if frame.W[i][j]:
                acc = acc + lg * frame.W[i][j]
        v = acc.exp()
        out.append(v if arc.quadrant[j] > 0 else -v)
    return out


def _fold_points(frame: GaleFrame, arc: _Arc, coord: int, prec: int) -> list[dict]:
    """Zeros of d(log|psi_coord|)/du on the arc, cleared of denominators."""
    rel = _relevant(frame)
    lin = [ExactPolynomial([c0, c1]) for c0, c1 in arc.forms]
    D = ExactPolynomial([])
    for t, i in enumerate(rel):
        w = frame.W[i][coord]
        if not w:
            continue
        term = ExactPolynomial([w * arc.forms[t][1]])
        for s, p in enumerate(lin):
            if s != t:
                term = term * p
        D = D + term
    if D.is_zero():
        return []
    D = deflate_at(deflate_at(D.squarefree(), arc.lo), arc.hi)
    if D.degree < 1:
        return []
    out = []
    for lo, hi in isolate_real_roots(D, arc.lo, arc.hi):
        if lo < hi:
            lo, hi = refine_poly_root(D, lo, hi, Fraction(1, 2**48))
        vals = _psi_interval(frame, arc, lo, hi, prec)
        out.append({"arc": arc.index, "axis": coord, "u": [str(lo), str(hi)], "value": vals[coord].to_json(),
                    "other": vals[1 - coord].to_json(), "_mid": vals[coord].mid})
    return out


def count_chambers_n3(A, config: ShearedConfig | None = None) -> ChamberReport:
    """Exact number of connected components of (R*)^2 minus the reduced discriminant."""
    A = _as_support(A)
    if A.m != A.n + 3:
        raise InputError("count_chambers_n3 needs #A = n + 3")
    if not genericity_check(A):
        raise NonGenericSupport("support is not in general position")
    config = config or ShearedConfig()
    frame = gale_frame(A)
    arcs = plane_arcs(frame)
    crossings = _crossings(frame, arcs, config)
    prec = config.precision_bits or default_precision()
    crit = []
    for arc in arcs:
        crit.extend(_fold_points(frame, arc, 0, prec))
    crit.sort(key=lambda c: (c.pop("_mid"), c["arc"]))
    per_quadrant: dict[tuple, list] = {}
    for arc in arcs:
        per_quadrant.setdefault(arc.quadrant, [0, 0])[0] += 1
    for a, _, _ in crossings:
        per_quadrant[arcs[a].quadrant][1] += 1
    count = 4 + len(arcs) + len(crossings)
    quadrants = {}
    for q in [(1, 1), (-1, 1), (-1, -1), (1, -1)]:
        na, nx = per_quadrant.get(q, [0, 0])
        quadrants["".join("+" if s > 0 else "-" for s in q)] = {"arcs": na, "crossings": nx, "chambers": 1 + na + nx}
    return ChamberReport(
        support=A,
        case_dim="n_plus_3",
        critical_values=crit,
        nodal_witnesses=[{"arcs": [a, b], "box": _box_json(box)} for a, b, box in crossings],
        slab_count=len(crit) + len(crossings) + 1,
        chamber_count=count,
        bound_components={},
        details={"frame": frame.to_json(), "quadrants": quadrants, "arcs": len(arcs)},
    )


# ---------------------------------------------------------------------------
# n + 4: critical values, nodal witnesses, slabs


@dataclass(frozen=True)
class CriticalValue:
    lam: tuple  # DyadicInterval per affine coordinate of lambda
    value: DyadicInterval  # psi_1, the projection axis
    other: DyadicInterval  # psi_3, recorded alongside

    def to_json(self):
        return {"lambda": [c.to_json() for c in self.lam], "x1": self.value.to_json(), "x3": self.other.to_json()}


@dataclass
class ChamberConfig:
    mc_samples: int = DEFAULT_MC_SAMPLES
    rng_seed: int = DEFAULT_SEED
    precision_bits: int | None = None
    box_half_width: Fraction = Fraction(4097, 2048)
    nodal_margin: Fraction = Fraction(1)
    nodal_min_width: Fraction = Fraction(1, 2)
    nodal_max_boxes: int = 400_000


def _check_n4(frame: GaleFrame) -> None:
    A = frame.support
    if A.m != A.n + 4:
        raise InputError("this operation needs #A = n + 4")
    if not genericity_check(A):
        raise NonGenericSupport("support is not in general position")


def _sym(q: Fraction):
    q = Fraction(q)
    return sympy.Rational(q.numerator, q.denominator)


def critical_x1_system(frame: GaleFrame) -> tuple:
    """The two cleared minors of the Jacobian of Psi, as polynomials in (lambda_1, lambda_2).

    With D_ij = sum_k b_ik a_kj / l_k the minor for rows (r, s) is
    D_r1 D_s2 - D_s1 D_r2; the k = l terms cancel, so after multiplying by
    prod l_k only the pairs k < l survive.
    """
    _check_n4(frame)
    X, Y = elimination.X, elimination.Y
    b = frame.exponents()
    forms = [_sym(r[0]) * X + _sym(r[1]) * Y + _sym(r[2]) for r in frame.B]
    out = []
    for r, s in ((0, 1), (0, 2)):
        expr = sympy.Integer(0)
        for k, l in combinations(range(frame.m), 2):
            cb = b[r][k] * b[s][l] - b[r][l] * b[s][k]
            ca = frame.B[k][0] * frame.B[l][1] - frame.B[k][1] * frame.B[l][0]
            if cb == 0 or ca == 0:
                continue
            term = _sym(cb * ca)
            for q in range(frame.m):
                if q not in (k, l):
                    term *= forms[q]
            expr += term
        P = sympy.Poly(sympy.expand(expr), X, Y, domain="QQ")
        if not P.is_zero and P.total_degree() > frame.support.n + 3:
            raise AssertionError("critical minor exceeds degree n + 3")
        out.append(P)
    if all(P.is_zero for P in out):
        raise DegenerateFrame("both critical minors vanish identically")
    return tuple(out)


def _psi_box(frame: GaleFrame, lam: tuple, prec: int) -> list[DyadicInterval] | None:
    """Psi over a box of lambda, or None when a form may vanish there."""
    logs, signs = [], []
    for row in frame.B:
        v = lam[0] * row[0] + lam[1] * row[1] + row[2]
        s = v.sign()
        if s == 0:
            return None
        signs.append(s)
        logs.append((v if s > 0 else -v).log())
    out = []
    for j in range(frame.k):
        acc = rational_enclosure(0, prec)
        sign = 1
        for i, (lg, s) in enumerate(zip(logs, signs)):
            w = frame.W[i][j]
            if w:
                acc = acc + lg * w
                if s < 0 and w.numerator % 2:
                    sign = -sign
        v = acc.exp()
        out.append(v if sign > 0 else -v)
    return out


SHEARS = (Fraction(0), Fraction(1, 3), Fraction(-2, 7), Fraction(3, 5), Fraction(-5, 11))


def _solve_pair(P1, P2, prec: int) -> list[tuple]:
    """Real solutions as (lambda_1, lambda_2) enclosures, retrying in sheared coordinates."""
    X, Y = elimination.X, elimination.Y
    for c in SHEARS:
        Q1 = sympy.Poly(P1.as_expr().subs(X, X + _sym(c) * Y), X, Y, domain="QQ")
        Q2 = sympy.Poly(P2.as_expr().subs(X, X + _sym(c) * Y), X, Y, domain="QQ")
        try:
            sols = elimination.real_solutions(Q1, Q2)
        except elimination.DegenerateSystem:
            continue
        out = []
        for s in sols:
            y = s.y.with_precision(prec)
            out.append((DyadicInterval(s.x[0], s.x[1], prec) + y * c, y))
        return out
    raise DegenerateFrame("critical system is not in generic position in any tried coordinates")


def _is_form_line(frame: GaleFrame, h) -> bool:
    X, Y = elimination.X, elimination.Y
    if h.total_degree() != 1:
        return False
    cx, cy, c0 = (Fraction(str(h.coeff_monomial(m))) for m in (X, Y, 1))
    return any(cx * r[1] == cy * r[0] and cx * r[2] == c0 * r[0] and cy * r[2] == c0 * r[1] for r in frame.B)


def _edge_tangency(frame: GaleFrame, h):
    """Cleared d psi_1 along the curve h = 0: grad psi_1 . (-h_y, h_x)."""
    X, Y = elimination.X, elimination.Y
    b = frame.exponents()
    forms = [_sym(r[0]) * X + _sym(r[1]) * Y + _sym(r[2]) for r in frame.B]
    hx, hy = h.diff(X).as_expr(), h.diff(Y).as_expr()
    expr = sympy.Integer(0)
    for k in range(frame.m):
        if not b[0][k]:
            continue
        term = _sym(b[0][k]) * (_sym(frame.B[k][0]) * -hy + _sym(frame.B[k][1]) * hx)
        for q in range(frame.m):
            if q != k:
                term *= forms[q]
        expr += term
    return sympy.Poly(sympy.expand(expr), X, Y, domain="QQ")


def critical_values(frame: GaleFrame, precision_bits: int | None = None) -> list[CriticalValue]:
    """psi_1 (and psi_3) at the real solutions of the critical system off the arrangement.

    When the two minors share a factor (a curve along which the Jacobian of
    Psi has rank one, e.g. a cuspidal edge), the shared factor is removed and
    the critical points of psi_1 along each such curve are added.
    """
    prec = precision_bits or default_precision()
    P1, P2 = critical_x1_system(frame)
    if P1.is_zero or P2.is_zero:
        raise DegenerateFrame("a critical minor vanishes identically")
    g = sympy.gcd(P1, P2)
    points = []
    if g.total_degree() > 0:
        P1, P2 = sympy.div(P1, g)[0], sympy.div(P2, g)[0]
        for h, _ in g.factor_list()[1]:
            if h.total_degree() > 0 and not _is_form_line(frame, h):
                T = _edge_tangency(frame, h)
                if not T.is_zero:
                    points.extend(_solve_pair(h, T, prec))
    if P1.total_degree() > 0 and P2.total_degree() > 0:
        points.extend(_solve_pair(P1, P2, prec))
    out = []
    for lam in points:
        vals = _psi_box(frame, lam, prec)
        if vals is None:
            continue  # on the arrangement, or too close to decide
        out.append(CriticalValue(lam, vals[0], vals[2]))
    n = frame.support.n
    if len(out) > (n + 3) ** 2:
        raise AssertionError("more critical values than the Bezout count")
    out.sort(key=lambda cv: cv.value.mid)
    return out


def _form_range(row, box) -> tuple[Fraction, Fraction]:
    vals = [row[0] * x + row[1] * y + row[2] for x in box[0] for y in box[1]]
    return min(vals), max(vals)


def _box_width(box) -> Fraction:
    return max(hi - lo for lo, hi in box)


class _Node:
    """Quadtree node over lambda space with cached form data."""

    __slots__ = ("box", "ranges", "straddles", "signs", "logs", "_kids", "frame", "prec")

    def __init__(self, frame: GaleFrame, box, prec: int):
        self.frame, self.box, self.prec = frame, box, prec
        self.ranges = [_form_range(row, box) for row in frame.B]
        self.straddles = any(lo < 0 < hi for lo, hi in self.ranges)
        self.signs = None
        self.logs = None
        if not self.straddles and not any(lo == 0 == hi for lo, hi in self.ranges):
            self.signs = _psi_sign_ranges(frame, self.ranges)
            self.logs = [_float_log_range(lo, hi) for lo, hi in self.ranges]
        self._kids = None

    @property
    def width(self) -> Fraction:
        return _box_width(self.box)

    def children(self) -> list["_Node"]:
        if self._kids is None:
            (x0, x1), (y0, y1) = self.box
            xm, ym = (x0 + x1) / 2, (y0 + y1) / 2
            self._kids = [_Node(self.frame, b, self.prec) for b in
                          (((x0, xm), (y0, ym)), ((xm, x1), (y0, ym)), ((x0, xm), (ym, y1)), ((xm, x1), (ym, y1)))]
        return self._kids


def nodal_witnesses(frame: GaleFrame, box4=None, config: ChamberConfig | None = None) -> list[tuple]:
    """Witness boxes for Psi(lambda) = Psi(lambda') with lambda != lambda'.

    Paired quadtree subdivision of box4 = (lambda box, lambda' box).  A pair
    is dropped when the Psi orthants differ, a log difference is
    sign-definite, or every pair of points lies within the diagonal margin.
    Surviving leaf pairs off the arrangement are validated by overlap of the
    Psi enclosures, merged into connected clusters and returned as hulls,
    ordered so that the lambda box precedes the lambda' box.
    """
    _check_n4(frame)
    config = config or ChamberConfig()
    prec = config.precision_bits or default_precision()
    h = config.box_half_width
    if box4 is None:
        box4 = (((-h, h), (-h, h)), ((-h, h), (-h, h)))
    box4 = tuple(tuple((to_rational(lo), to_rational(hi)) for lo, hi in half) for half in box4)
    b = frame.exponents()
    r1 = _Node(frame, box4[0], prec)
    r2 = r1 if box4[0] == box4[1] else _Node(frame, box4[1], prec)
    leaves = []
    stack = [(r1, r2)]
    seen = 0
    while stack:
        n1, n2 = stack.pop()
        seen += 1
        if seen > config.nodal_max_boxes:
            raise UnresolvedBox("nodal subdivision budget exhausted")
        X, Xp = n1.box, n2.box
        if all(max(X[c][1] - Xp[c][0], Xp[c][1] - X[c][0]) < config.nodal_margin for c in range(2)):
            continue
        small = max(n1.width, n2.width) <= config.nodal_min_width
        if n1.logs is not None and n2.logs is not None:
            if n1.signs != n2.signs:
                continue
            if _pair_excluded(b, n1.logs, n2.logs):
                continue
            if small:
                if _psi_overlap(frame, n1, n2, prec):
                    leaves.append(tuple(sorted((X, Xp))))
                continue
        elif small:
            continue
        if n1 is n2:
            kids = n1.children()
            stack.extend((kids[i], kids[j]) for i in range(4) for j in range(i, 4))
        elif n1.width >= n2.width:
            stack.extend((c, n2) for c in n1.children())
        else:
            stack.extend((n1, c) for c in n2.children())
    leaves = sorted(set(leaves))
    out = []
    for group in _clusters(leaves):
        out.append(tuple(
            tuple((min(g[half][c][0] for g in group), max(g[half][c][1] for g in group)) for c in range(2))
            for half in range(2)
        ))
    return sorted(set(out))


def _float_log_range(lo: Fraction, hi: Fraction) -> tuple[float, float]:
    a, b = (lo, hi) if lo >= 0 else (-hi, -lo)
    pad = 1e-9
    return (math.log(a) - pad if a > 0 else -math.inf, math.log(b) + pad)


def _pair_excluded(b, logs1, logs2) -> bool:
    """Float screening of sum_i w_i (log|l_i(lambda)| - log|l_i(lambda')|); only used to prune."""
    for row in b:
        lo = hi = 0.0
        for w, (a1, b1), (a2, b2) in zip(row, logs1, logs2):
            if w:
                d_lo, d_hi = a1 - b2, b1 - a2
                wf = float(w)
                if wf > 0:
                    lo, hi = lo + wf * d_lo, hi + wf * d_hi
                else:
                    lo, hi = lo + wf * d_hi, hi + wf * d_lo
        if lo > 1e-6 or hi < -1e-6:
            return True
    return False


def _psi_overlap(frame: GaleFrame, n1: _Node, n2: _Node, prec: int) -> bool:
    p1 = _psi_box(frame, tuple(DyadicInterval(lo, hi, prec) for lo, hi in n1.box), prec)
    p2 = _psi_box(frame, tuple(DyadicInterval(lo, hi, prec) for lo, hi in n2.box), prec)
    return p1 is not None and p2 is not None and all(a.overlaps(c) for a, c in zip(p1, p2))


def _psi_sign_ranges(frame: GaleFrame, ranges) -> tuple:
    out = []
    for j in range(frame.k):
        s = 1
        for (lo, hi), row in zip(ranges, frame.W):
            if hi <= 0 and row[j].numerator % 2:
                s = -s
        out.append(s)
    return tuple(out)


def _log_range(lo: Fraction, hi: Fraction, prec: int) -> DyadicInterval:
    return DyadicInterval(lo, hi, prec).log() if lo >= 0 else DyadicInterval(-hi, -lo, prec).log()


def _clusters(leaves: list) -> list[list]:
    """Connected groups of closed boxes; neighbours are found on the leaf grid."""
    if not leaves:
        return []
    origin = [leaves[0][h][c][0] for h in range(2) for c in range(2)]
    size = [leaves[0][h][c][1] - leaves[0][h][c][0] for h in range(2) for c in range(2)]

    def key(leaf):
        lows = [leaf[h][c][0] for h in range(2) for c in range(2)]
        return tuple(math.floor((v - o) / s + Fraction(1, 2)) for v, o, s in zip(lows, origin, size))

    index = {key(leaf): i for i, leaf in enumerate(leaves)}
    parent = list(range(len(leaves)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    offsets = [(a, b, c, d) for a in (-1, 0, 1) for b in (-1, 0, 1) for c in (-1, 0, 1) for d in (-1, 0, 1)]
    for kk, i in index.items():
        for off in offsets:
            j = index.get(tuple(x + o for x, o in zip(kk, off)))
            if j is not None:
                parent[find(i)] = find(j)
    groups: dict[int, list] = {}
    for i, leaf in enumerate(leaves):
        groups.setdefault(find(i), []).append(leaf)
    return [sorted(g) for _, g in sorted(groups.items(), key=lambda kv: min(kv[1]))]


def _projective_regions(frame: GaleFrame) -> int:
    """Regions of the real projective arrangement of the forms: 1 + sum_p (mult_p - 1)."""
    rows = [tuple(Fraction(v) for v in r) for r in frame.B]
    points = set()
    for a, c in combinations(rows, 2):
        p = (a[1] * c[2] - a[2] * c[1], a[2] * c[0] - a[0] * c[2], a[0] * c[1] - a[1] * c[0])
        if not any(p):
            raise DegenerateFrame("two Gale rows are proportional")
        lead = next(v for v in p if v != 0)
        points.add(tuple(v / lead for v in p))
    total = 1
    for p in points:
        mult = sum(1 for r in rows if sum(x * y for x, y in zip(r, p)) == 0)
        total += mult - 1
    return total


def _reduced_float(frame: GaleFrame, delta) -> tuple:
    out = []
    for j in range(frame.k):
        acc, sign = 0.0, 1
        for i, d in enumerate(delta):
            w = frame.W[i][j]
            if w:
                acc += float(w) * math.log(abs(float(d)))
                if d < 0 and w.numerator % 2:
                    sign = -sign
        out.append((sign, acc))
    return tuple(out)


def count_chambers_n4(A, config: ChamberConfig | None = None) -> ChamberReport:
    """Slab decomposition, bound components and a sampling estimate of the chamber count."""
    A = _as_support(A)
    config = config or ChamberConfig()
    if A.m != A.n + 4:
        raise InputError("count_chambers_n4 needs #A = n + 4")
    if not genericity_check(A):
        raise NonGenericSupport("support is not in general position")
    frame = gale_frame(A)
    crit = critical_values(frame, config.precision_bits)
    nodal = nodal_witnesses(frame, None, config)
    prec = config.precision_bits or default_precision()
    nodal_values = []
    for X, Xp in nodal:
        vals = _psi_box(frame, tuple(DyadicInterval(lo, hi, prec) for lo, hi in X), prec)
        nodal_values.append(vals[0] if vals is not None else None)
    boundaries = sorted([cv.value.mid for cv in crit] + [v.mid for v in nodal_values if v is not None])
    slab_count = len(crit) + len(nodal) + 1
    if slab_count != len(boundaries) + 1 + sum(v is None for v in nodal_values):
        raise AssertionError("slab bookkeeping mismatch")
    cuts = [float(v) for v in boundaries]
    rng = random.Random(config.rng_seed)
    keys: dict[tuple, int] = {}
    per_slab: dict[int, set] = {}
    for _ in range(config.mc_samples):
        delta = sample_coefficients(rng, A.m)
        red = _reduced_float(frame, delta)
        x1 = red[0][0] * math.exp(red[0][1]) if red[0][1] < 700 else red[0][0] * math.inf
        slab = bisect.bisect(cuts, x1)
        orthant = tuple(s for s, _ in red)
        sig = signature_oracle(A, delta).to_json() if A.n == 1 else None
        key = (slab, orthant, tuple(sig) if sig else None)
        keys[key] = keys.get(key, 0) + 1
        per_slab.setdefault(slab, set()).add(key)
    sheets = _projective_regions(frame)
    ceiling = (A.n + 4) * (A.n + 5) // 2
    if sheets > ceiling:
        raise AssertionError("more parametrization sheets than the disk ceiling")
    comps, _ = diffeotopy_bound(A.n)
    comps = dict(comps)
    comps.update({
        "observed_critical": len(crit),
        "observed_nodal": len(nodal),
        "observed_slabs": slab_count,
        "observed_sheets": sheets,
        "sheet_ceiling": ceiling,
    })
    return ChamberReport(
        support=A,
        case_dim="n_plus_4",
        critical_values=[cv.to_json() for cv in crit],
        nodal_witnesses=[
            {"lambda": _box_json(X), "lambda_prime": _box_json(Xp), "x1": v.to_json() if v is not None else None}
            for (X, Xp), v in zip(nodal, nodal_values)
        ],
        slab_count=slab_count,
        chamber_count=None,
        chamber_estimate={"value": len(keys), "samples": config.mc_samples, "seed": config.rng_seed},
        bound_components=comps,
        details={
            "frame": frame.to_json(),
            "slab_boundaries": [str(v) for v in boundaries],
            "per_slab_classes": {str(k): len(v) for k, v in sorted(per_slab.items())},
        },
    )
