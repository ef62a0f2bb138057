"""Certified positive-quadrant root counts for trinomial/m-nomial systems.

Two independent methods are provided:

* reduction: the positive zero set of the trinomial is parametrized by
  s in (0, 1); the second equation becomes a univariate sum whose roots are
  isolated with ``isolate_gem_roots``.
* subdivision: boxes in (x, y) are excluded with interval enclosures or
  certified with a Krawczyk test.  A region guaranteed to hold every
  positive root is obtained from dominant-term ("tropical") bounds.

A resultant/Sturm count is available as a third check for small degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    BudgetExceeded,
    CertificationError,
    InputError,
    NoPositiveBranch,
    UnresolvedBox,
)
from .numeric_core import (
    MAX_PRECISION,
    DyadicInterval,
    GemSum,
    GemTerm,
    PowerCoeff,
    default_precision,
    interval_pow,
    multiply_coefficients,
    rational_enclosure,
    to_rational,
)
from .univariate_roots import IsolationConfig, isolate_gem_roots

PRINTED_ALPHA_RANGE = (1936838, 1936254)


@dataclass(frozen=True)
class SparseTerm:
    coeff: Fraction
    exp: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeff", to_rational(self.coeff))
        if self.coeff == 0:
            raise InputError("zero coefficient in a sparse term")
        e = tuple(int(v) for v in self.exp)
        if len(e) != 2:
            raise InputError("exponent vectors must have two entries")
        object.__setattr__(self, "exp", e)

    def to_json(self):
        return {"coeff": str(self.coeff), "exp": list(self.exp)}


@dataclass(frozen=True)
class SparseSystem:
    """F (three terms) and G (m terms) in two variables with integer exponents."""

    F: tuple
    G: tuple

    def __post_init__(self):
        F = tuple(t if isinstance(t, SparseTerm) else SparseTerm(*t) for t in self.F)
        G = tuple(t if isinstance(t, SparseTerm) else SparseTerm(*t) for t in self.G)
        if len(F) != 3:
            raise InputError("F must be a trinomial")
        if len(G) < 1:
            raise InputError("G needs at least one term")
        for poly in (F, G):
            if len({t.exp for t in poly}) != len(poly):
                raise InputError("exponent vectors within a polynomial must be distinct")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "G", G)

    @property
    def m(self) -> int:
        return len(self.G)

    def scaled(self, kf: Fraction = Fraction(1), kg: Fraction = Fraction(1)) -> "SparseSystem":
        return SparseSystem(
            tuple(SparseTerm(t.coeff * kf, t.exp) for t in self.F),
            tuple(SparseTerm(t.coeff * kg, t.exp) for t in self.G),
        )

    def total_degree(self) -> int:
        out = 0
        for poly in (self.F, self.G):
            sx = -min(0, min(t.exp[0] for t in poly))
            sy = -min(0, min(t.exp[1] for t in poly))
            out = max(out, max(t.exp[0] + sx + t.exp[1] + sy for t in poly))
        return out

    def to_json(self):
        return {"F": [t.to_json() for t in self.F], "G": [t.to_json() for t in self.G]}

    @classmethod
    def from_json(cls, obj) -> "SparseSystem":
        try:
            F = [SparseTerm(t["coeff"], t["exp"]) for t in obj["F"]]
            G = [SparseTerm(t["coeff"], t["exp"]) for t in obj["G"]]
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed SparseSystem JSON: {exc}") from exc
        return cls(tuple(F), tuple(G))


def seven_root_system(alpha) -> SparseSystem:
    """x^6 + (44/31) y^3 - y = 0, y^14 + (44/31) x^3 y^8 - x y^8 + alpha x^133 = 0."""
    k = Fraction(44, 31)
    F = (SparseTerm(1, (6, 0)), SparseTerm(k, (0, 3)), SparseTerm(-1, (0, 1)))
    G = [SparseTerm(1, (0, 14)), SparseTerm(k, (3, 8)), SparseTerm(-1, (1, 8))]
    alpha = to_rational(alpha)
    if alpha != 0:
        G.append(SparseTerm(alpha, (133, 0)))
    return SparseSystem(F, tuple(G))


# ---------------------------------------------------------------------------
# reduction


@dataclass(frozen=True)
class MonomialMap:
    """s -> (x, y) with log x = r11 log(s/k1) + r12 log((1-s)/k2), likewise y."""

    k1: Fraction
    k2: Fraction
    r: tuple  # ((r11, r12), (r21, r22))

    def image(self, s: DyadicInterval) -> tuple[DyadicInterval, DyadicInterval]:
        prec = s.precision_bits
        p = s / self.k1
        q = (1 - s) / self.k2
        out = []
        for row in self.r:
            v = rational_enclosure(1, prec)
            if row[0]:
                v = v * interval_pow(p, row[0])
            if row[1]:
                v = v * interval_pow(q, row[1])
            out.append(v)
        return out[0], out[1]

    def to_json(self):
        return {
            "k1": str(self.k1),
            "k2": str(self.k2),
            "exponents": [[str(v) for v in row] for row in self.r],
        }


def _inverse2(m):
    (a, b), (c, d) = m
    det = a * d - b * c
    if det == 0:
        raise NoPositiveBranch("the trinomial's exponent differences are collinear")
    return ((Fraction(d, det), Fraction(-b, det)), (Fraction(-c, det), Fraction(a, det)))


def _default_pivot(G: Sequence[SparseTerm]) -> int:
    pos = [i for i, t in enumerate(G) if t.coeff > 0]
    neg = [i for i, t in enumerate(G) if t.coeff < 0]
    if len(pos) == 1 and len(neg) != 1:
        return pos[0]
    if len(neg) == 1 and len(pos) != 1:
        return neg[0]
    return 0


def reduce_to_univariate(S: SparseSystem, pivot: int | None = None) -> tuple[GemSum, MonomialMap]:
    """Restrict G to the positive zero curve of F, parametrized by s in (0, 1)."""
    signs = [1 if t.coeff > 0 else -1 for t in S.F]
    if len(set(signs)) == 1:
        raise NoPositiveBranch("all coefficients of F have the same sign")
    iso = next(i for i in range(3) if signs.count(signs[i]) == 1)
    base = S.F[iso]
    others = [t for i, t in enumerate(S.F) if i != iso]
    # F / base = 1 - M1 - M2 with M_j = kappa_j x^q_j, kappa_j > 0
    kappas = [-t.coeff / base.coeff for t in others]
    qs = [(t.exp[0] - base.exp[0], t.exp[1] - base.exp[1]) for t in others]
    r = _inverse2(qs)
    k1, k2 = kappas
    if pivot is None:
        pivot = _default_pivot(S.G)
    if not 0 <= pivot < len(S.G):
        raise InputError("pivot index out of range")
    raw = []
    for t in S.G:
        c, d = t.exp
        es = c * r[0][0] + d * r[1][0]
        et = c * r[0][1] + d * r[1][1]
        coeff = multiply_coefficients([t.coeff, (k1, -es), (k2, -et)])
        raw.append((coeff, es, et))
    pc, pa, pb = raw[pivot]
    terms = [GemTerm(Fraction(1), Fraction(0), Fraction(0))]
    for i, (c, a, b) in enumerate(raw):
        if i == pivot:
            continue
        coeff = _divide(c, pc)
        terms.append(GemTerm(coeff, a - pa, b - pb))
    return GemSum(terms), MonomialMap(k1, k2, r)


def _divide(c, d):
    if isinstance(d, PowerCoeff):
        inv = PowerCoeff.make(d.base, -d.exponent, d.sign)
    else:
        inv = 1 / d
    return multiply_coefficients([c, inv])


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class PositiveRootCount:
    count: int
    witnesses: tuple  # ((x lo, x hi), (y lo, y hi)) as Fractions
    method: str

    def to_json(self):
        return {
            "count": self.count,
            "method": self.method,
            "witnesses": [[[str(v) for v in bx[0]], [str(v) for v in bx[1]]] for bx in self.witnesses],
        }


def count_positive_reduction(S: SparseSystem, config: IsolationConfig | None = None) -> PositiveRootCount:
    config = config or IsolationConfig()
    g, mm = reduce_to_univariate(S)
    roots = isolate_gem_roots(g, config)
    prec = max(config.precision_bits, 128)
    boxes = []
    for r in roots:
        x, y = mm.image(DyadicInterval(r.lo, r.hi, prec))
        boxes.append(((x.lo, x.hi), (y.lo, y.hi)))
    return PositiveRootCount(len(roots), tuple(boxes), "Reduction")


# ---------------------------------------------------------------------------
# subdivision


@dataclass(frozen=True)
class SubdivisionConfig:
    precision_bits: int = field(default_factory=default_precision)
    max_precision_bits: int = MAX_PRECISION
    max_depth: int = 200
    max_boxes: int = 400_000


class _Poly2:
    """Sum of c x^a y^b evaluated on positive boxes."""

    def __init__(self, terms: Sequence[SparseTerm]):
        self.terms = tuple(terms)
        self._coeffs: dict[int, list] = {}

    def coeffs(self, prec):
        out = self._coeffs.get(prec)
        if out is None:
            out = self._coeffs[prec] = [rational_enclosure(t.coeff, prec) for t in self.terms]
        return out

    def value_and_grad(self, X: DyadicInterval, Y: DyadicInterval, want_grad: bool = True):
        prec = max(X.precision_bits, Y.precision_bits)
        val = rational_enclosure(0, prec)
        gx = rational_enclosure(0, prec)
        gy = rational_enclosure(0, prec)
        for t, c in zip(self.terms, self.coeffs(prec)):
            a, b = t.exp
            xa = _ipow(X, a)
            yb = _ipow(Y, b)
            val = val + c * xa * yb
            if want_grad:
                if a:
                    gx = gx + c * a * _ipow(X, a - 1) * yb
                if b:
                    gy = gy + c * b * xa * _ipow(Y, b - 1)
        return val, gx, gy


def _ipow(x: DyadicInterval, k: int) -> DyadicInterval:
    if k == 0:
        return rational_enclosure(1, x.precision_bits)
    if k == 1:
        return x
    if k > 0:
        return x.pow_int(k)
    return rational_enclosure(1, x.precision_bits) / x.pow_int(-k)


def _split_point(lo: Fraction, hi: Fraction) -> Fraction:
    """Geometric split for boxes spanning several binades, arithmetic otherwise."""
    if hi > 4 * lo:
        target = Fraction(math.sqrt(lo * hi)) if lo > 0 else hi / 8
        target = min(max(target, lo + (hi - lo) / 64), hi - (hi - lo) / 64)
    else:
        target = lo + (hi - lo) * Fraction(61, 128)
    # a fine dyadic with odd numerator, so simple rational roots never sit on a cut
    w = hi - lo
    k = max(0, 8 - math.floor(math.log2(w))) + 24
    num = math.floor(target * (1 << k)) | 1
    cand = Fraction(num, 1 << k)
    if not lo < cand < hi:
        cand = target
    return cand


def _box_prec(box, base: int, cap: int) -> int:
    p = base
    for lo, hi in box:
        rel = (hi - lo) / hi
        while rel < Fraction(1, 2 ** (p // 2)):
            p *= 2
            if p > cap:
                raise UnresolvedBox("precision cap reached in subdivision")
    return p


def _binade(q: Fraction) -> int:
    return abs(q.numerator).bit_length() - q.denominator.bit_length()


def _preconditioner(J):
    """Approximate inverse of the midpoint Jacobian as exact dyadics.

    Rows are scaled by powers of two first so huge or tiny entries stay
    within float range.
    """
    if not all(v.is_finite for row in J for v in row):
        return None
    mids = [[v.mid for v in row] for row in J]
    exps = []
    for row in mids:
        nz = [_binade(v) for v in row if v]
        if not nz:
            return None
        exps.append(max(nz))
    Js = [[float(v / Fraction(2) ** e) for v in row] for row, e in zip(mids, exps)]
    (a, b), (c, d) = Js
    det = a * d - b * c
    if det == 0 or not math.isfinite(det):
        return None
    inv = ((d / det, -b / det), (-c / det, a / det))
    return [[Fraction(inv[i][j]) / Fraction(2) ** exps[j] for j in range(2)] for i in range(2)]


def count_positive_subdivision(
    S: SparseSystem,
    box=None,
    config: SubdivisionConfig | None = None,
) -> PositiveRootCount:
    """Certified count of roots of S in a closed positive box.

    ``box`` is ((x_lo, x_hi), (y_lo, y_hi)); by default a box containing
    every positive root is derived from dominant-term bounds.
    """
    config = config or SubdivisionConfig()
    if box is None:
        box = positive_root_box(S)
    box = tuple((to_rational(lo), to_rational(hi)) for lo, hi in box)
    for lo, hi in box:
        if not 0 < lo < hi:
            raise InputError("box must lie in the open positive quadrant")
    P = _Poly2(S.F)
    Q = _Poly2(S.G)
    found = []
    stack = [(box, 0)]
    n_boxes = 0
    while stack:
        bx, depth = stack.pop()
        n_boxes += 1
        if n_boxes > config.max_boxes:
            raise BudgetExceeded("subdivision box budget exhausted")
        if depth > config.max_depth:
            raise UnresolvedBox(f"depth cap reached near {[(float(a), float(b)) for a, b in bx]}")
        prec = _box_prec(bx, config.precision_bits, config.max_precision_bits)
        verdict = _process_box(P, Q, bx, prec)
        if verdict is None:
            continue
        if verdict[0] == "root":
            found.append(verdict[1])
            continue
        if verdict[0] == "shrink":
            stack.append((verdict[1], depth + 1))
            continue
        # split the side with the larger relative width
        (x0, x1), (y0, y1) = bx
        if (x1 - x0) / x1 >= (y1 - y0) / y1:
            m = _split_point(x0, x1)
            stack.append((((m, x1), (y0, y1)), depth + 1))
            stack.append((((x0, m), (y0, y1)), depth + 1))
        else:
            m = _split_point(y0, y1)
            stack.append((((x0, x1), (m, y1)), depth + 1))
            stack.append((((x0, x1), (y0, m)), depth + 1))
    found.sort()
    return PositiveRootCount(len(found), tuple(found), "Subdivision")


def _process_box(P: _Poly2, Q: _Poly2, bx, prec):
    (x0, x1), (y0, y1) = bx
    X = DyadicInterval(x0, x1, prec)
    Y = DyadicInterval(y0, y1, prec)
    fv, fx, fy = P.value_and_grad(X, Y)
    if fv.sign():
        return None
    gv, gx, gy = Q.value_and_grad(X, Y)
    if gv.sign():
        return None
    mx = _split_point(x0, x1) if x1 > 4 * x0 else (x0 + x1) / 2
    my = _split_point(y0, y1) if y1 > 4 * y0 else (y0 + y1) / 2
    MX = DyadicInterval(mx, mx, prec)
    MY = DyadicInterval(my, my, prec)
    fm, _, _ = P.value_and_grad(MX, MY, False)
    gm, _, _ = Q.value_and_grad(MX, MY, False)
    dX = X - mx
    dY = Y - my
    if (fm + fx * dX + fy * dY).sign() or (gm + gx * dX + gy * dY).sign():
        return None
    C = _preconditioner(((fx, fy), (gx, gy)))
    if C is None:
        return ("split",)
    # Krawczyk operator K = m - C F(m) + (I - C J(X)) (X - m)
    k = []
    for i in range(2):
        c0, c1 = C[i]
        lin = rational_enclosure(mx if i == 0 else my, prec) - (fm * c0 + gm * c1)
        a0 = (1 if i == 0 else 0) - (fx * c0 + gx * c1)
        a1 = (1 if i == 1 else 0) - (fy * c0 + gy * c1)
        k.append(lin + a0 * dX + a1 * dY)
    KX, KY = k
    if not (KX.is_finite and KY.is_finite):
        return ("split",)
    if KX.strictly_inside(X) and KY.strictly_inside(Y):
        return ("root", ((KX.lo, KX.hi), (KY.lo, KY.hi)))
    ix = KX.intersect(X)
    iy = KY.intersect(Y)
    if ix is None or iy is None:
        return None
    if ix.lo <= 0 or iy.lo <= 0:
        return ("split",)
    if (ix.width * 2 < X.width and iy.width <= Y.width) or (iy.width * 2 < Y.width and ix.width <= X.width):
        return ("shrink", ((ix.lo, ix.hi), (iy.lo, iy.hi)))
    return ("split",)


# ---------------------------------------------------------------------------
# dominant-term bounds for the positive roots


def _log_bounds(c: Fraction) -> tuple[Fraction, Fraction]:
    v = rational_enclosure(abs(c), 80).log(16)
    return v.lo, v.hi


def _pieces(terms: Sequence[SparseTerm]):
    """Polyhedra in (u, v) = (log x, log y) covering the zeros of sum c_i x^a_i y^b_i.

    At a zero the largest term i is matched by some term j of the opposite
    sign within a factor n_opp.  Each piece is a list of (a1, a2, b) meaning
    a1 u + a2 v <= b.
    """
    logs = [_log_bounds(t.coeff) for t in terms]
    out = []
    for i, ti in enumerate(terms):
        opp = [j for j, tj in enumerate(terms) if (tj.coeff > 0) != (ti.coeff > 0)]
        if not opp:
            continue
        delta = rational_enclosure(len(opp), 64).log(8).hi if len(opp) > 1 else Fraction(0)
        base = []
        for l, tl in enumerate(terms):
            if l == i:
                continue
            a = (tl.exp[0] - ti.exp[0], tl.exp[1] - ti.exp[1])
            base.append((Fraction(a[0]), Fraction(a[1]), logs[i][1] - logs[l][0]))
        for j in opp:
            tj = terms[j]
            a = (ti.exp[0] - tj.exp[0], ti.exp[1] - tj.exp[1])
            out.append(base + [(Fraction(a[0]), Fraction(a[1]), delta + logs[j][1] - logs[i][0])])
    return out


def _project(cons, keep: int):
    """Exact range of coordinate ``keep`` over {a.w <= b} by Fourier-Motzkin; None if empty."""
    other = 1 - keep
    lower, upper, free = [], [], []
    for c in cons:
        a_o = c[other]
        if a_o > 0:
            upper.append(c)
        elif a_o < 0:
            lower.append(c)
        else:
            free.append((c[keep], c[2]))
    for p in upper:
        for q in lower:
            # eliminate: multiply to cancel the other coordinate
            sp, sq = -q[other], p[other]
            free.append((p[keep] * sp + q[keep] * sq, p[2] * sp + q[2] * sq))
    lo, hi = -math.inf, math.inf
    for a, b in free:
        if a > 0:
            hi = min(hi, b / a)
        elif a < 0:
            lo = max(lo, b / a)
        elif b < 0:
            return None
    if lo > hi:
        return None
    return lo, hi


def positive_root_box(S: SparseSystem, pad: Fraction = Fraction(1, 16)):
    """A closed box ((x_lo, x_hi), (y_lo, y_hi)) whose interior holds every positive root."""
    Fp = _pieces(S.F)
    Gp = _pieces(S.G)
    if not Fp or not Gp:
        raise NoPositiveBranch("one equation has no sign change")
    ulo = vlo = math.inf
    uhi = vhi = -math.inf
    for pf in Fp:
        for pg in Gp:
            cons = pf + pg
            ru = _project(cons, 0)
            if ru is None:
                continue
            rv = _project(cons, 1)
            if rv is None:
                continue
            if math.inf in (ru[1], rv[1]) or -math.inf in (ru[0], rv[0]):
                raise UnresolvedBox("positive roots are not confined to a bounded region")
            ulo, uhi = min(ulo, ru[0]), max(uhi, ru[1])
            vlo, vhi = min(vlo, rv[0]), max(vhi, rv[1])
    if ulo == math.inf:
        raise NoPositiveBranch("dominant-term bounds exclude every positive point")
    return (_exp_box(ulo - pad, uhi + pad), _exp_box(vlo - pad, vhi + pad))


def _exp_box(lo: Fraction, hi: Fraction):
    a = rational_enclosure(lo, 64).exp(8).lo
    b = rational_enclosure(hi, 64).exp(8).hi
    return _dyadic_down(a), _dyadic_up(b)


def _dyadic_down(q: Fraction) -> Fraction:
    e = math.floor(math.log2(q)) - 8
    s = Fraction(2) ** e
    return math.floor(q / s) * s


def _dyadic_up(q: Fraction) -> Fraction:
    e = math.floor(math.log2(q)) - 8
    s = Fraction(2) ** e
    return math.ceil(q / s) * s


# ---------------------------------------------------------------------------
# resultant cross-check


def count_positive_resultant(S: SparseSystem, max_degree: int = 40) -> PositiveRootCount:
    from .elimination import real_solutions, to_sympy

    if S.total_degree() > max_degree:
        raise BudgetExceeded(f"total degree {S.total_degree()} exceeds {max_degree}")
    polys = []
    for poly in (S.F, S.G):
        sx = -min(0, min(t.exp[0] for t in poly))
        sy = -min(0, min(t.exp[1] for t in poly))
        polys.append(to_sympy({(t.exp[0] + sx, t.exp[1] + sy): t.coeff for t in poly}))
    sols = real_solutions(*polys)
    boxes = []
    for s in sols:
        lo, hi = s.x
        if lo >= 0 and (lo > 0 or hi > 0) and s.y_sign > 0:
            if lo == 0:
                continue
            boxes.append(((lo, hi), (s.y.lo, s.y.hi)))
    return PositiveRootCount(len(boxes), tuple(boxes), "Resultant")


# ---------------------------------------------------------------------------
# the explicit seven-root example


def _safe(fn):
    try:
        return fn(), None
    except CertificationError as exc:
        return None, f"{type(exc).__name__}: {exc}"


def certify_alpha(alpha: int, subdivision: bool = True, iso_config=None, sub_config=None) -> dict:
    S = seven_root_system(alpha)
    red, red_err = _safe(lambda: count_positive_reduction(S, iso_config))
    entry = {"alpha": alpha, "reduction": red.count if red else None}
    if red_err:
        entry["reduction_error"] = red_err
    if subdivision:
        sub, sub_err = _safe(lambda: count_positive_subdivision(S, None, sub_config))
        entry["subdivision"] = sub.count if sub else None
        if sub_err:
            entry["subdivision_error"] = sub_err
        if red and sub:
            entry["agree"] = red.count == sub.count
            entry["pushforward_ok"] = _pushforward_ok(red, sub)
    return entry


def _pushforward_ok(red: PositiveRootCount, sub: PositiveRootCount) -> bool:
    """Every reduction witness overlaps exactly one subdivision witness."""
    for rb in red.witnesses:
        hits = 0
        for sb in sub.witnesses:
            if all(r[0] <= s[1] and s[0] <= r[1] for r, s in zip(rb, sb)):
                hits += 1
        if hits != 1:
            return False
    return True


def certify_example(
    alpha_lo: int = 1936254,
    alpha_hi: int = 1936838,
    stride: int = 73,
    subdivision: bool = True,
    find_extent: bool = True,
    iso_config=None,
    sub_config=None,
) -> dict:
    """Scan alpha over [alpha_lo, alpha_hi] and certify the positive root counts."""
    if stride < 1 or alpha_lo > alpha_hi:
        raise InputError("need stride >= 1 and alpha_lo <= alpha_hi")
    alphas = list(range(alpha_lo, alpha_hi + 1, stride))
    if alphas[-1] != alpha_hi:
        alphas.append(alpha_hi)
    scan = [certify_alpha(a, subdivision, iso_config, sub_config) for a in alphas]

    def seven(e):
        ok = e["reduction"] == 7
        if subdivision:
            ok = ok and e.get("subdivision") == 7
        return ok

    good = [e["alpha"] for e in scan if seven(e)]
    report = {
        "scan": scan,
        "stride": stride,
        "certified_alphas": good,
        "certified_subrange": [min(good), max(good)] if good else None,
        "methods_agree": all(e.get("agree", True) for e in scan),
        "printed_endpoints": {
            "as_printed": list(PRINTED_ALPHA_RANGE),
            "empty_as_printed": PRINTED_ALPHA_RANGE[0] > PRINTED_ALPHA_RANGE[1],
            "transposed": [PRINTED_ALPHA_RANGE[1], PRINTED_ALPHA_RANGE[0]],
            "transposed_endpoints_certified": alpha_lo in good and alpha_hi in good,
        },
        "alpha_zero_reference": certify_alpha(0, subdivision, iso_config, sub_config),
    }
    if find_extent and good:
        report["reduction_extent"] = _reduction_extent(min(good), max(good), iso_config)
    return report


def _reduction_count(alpha: int, iso_config) -> int | None:
    try:
        return count_positive_reduction(seven_root_system(alpha), iso_config).count
    except CertificationError:
        return None


def _reduction_extent(lo: int, hi: int, iso_config, reach: int = 4096) -> dict:
    """Integer bisection (reduction method only) for the edges of the 7-root alpha range.

    Assumes the count is 7 on a single interval of alpha; the edges found are
    reported, not asserted.
    """
    out = {}
    for side, start, direction in (("lower", lo, -1), ("upper", hi, 1)):
        inside, step = start, 1
        outside = None
        while step <= reach:
            probe = start + direction * step
            if _reduction_count(probe, iso_config) == 7:
                inside = probe
                step *= 2
            else:
                outside = probe
                break
        if outside is None:
            out[side] = {"last_seven": inside, "first_other": None}
            continue
        a, b = inside, outside
        while abs(b - a) > 1:
            mid = (a + b) // 2
            if _reduction_count(mid, iso_config) == 7:
                a = mid
            else:
                b = mid
        out[side] = {"last_seven": a, "first_other": b}
    return out
