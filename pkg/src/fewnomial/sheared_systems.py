"""Sheared binomial systems 1 - prod_i l_i(lambda)^{b_{r,i}} = 0 (r = 1..k).

Solving is restricted to k <= 2.  The search box is cut exactly along every
line l_i = 0, so each cell has a fixed sign vector.  Inside a cell an
equation can only vanish when its sign product is +1, and it is then
equivalent to g_r = sum_i b_{r,i} log|l_i| = 0, which is what the
subdivision works with.  Near a cell edge the divergent logarithms are
collected into one term per line, and combinations of the equations that
cancel or isolate that term are used for exclusion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy

from .elimination import DegenerateSystem, real_solutions
from .errors import DomainError, EndpointRoot, InputError, SignAmbiguous, UnresolvedBox
from .numeric_core import DyadicInterval, default_precision, interval_pow, rational_enclosure, to_rational
from .univariate_roots import (
    ExactPolynomial,
    IsolationConfig,
    MAX_PRECISION,
    count_roots_open,
    deflate_at,
    isolate_interval_zeros,
)


def _rank(rows: Sequence[Sequence[Fraction]]) -> int:
    A = [list(r) for r in rows]
    rank = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for i in range(len(A)):
            if i != rank and A[i][c] != 0:
                f = A[i][c] / A[rank][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class ShearedSystem:
    """forms[i] = (c0, c1, ..., ck) encodes l_i = c0 + c1 lambda_1 + ... + ck lambda_k."""

    k: int
    j: int
    forms: tuple
    exponents: tuple  # k rows of j Fractions

    def __post_init__(self):
        if self.k < 1:
            raise InputError("k must be positive")
        if self.j < self.k:
            raise InputError("need at least k factors")
        if len(self.forms) != self.j or any(len(f) != self.k + 1 for f in self.forms):
            raise InputError("forms must be j vectors of length k + 1")
        if len(self.exponents) != self.k or any(len(r) != self.j for r in self.exponents):
            raise InputError("exponents must be a k x j matrix")
        if any(all(c == 0 for c in f[1:]) for f in self.forms):
            raise InputError("every form must be non-constant")
        if _rank(self.exponents) != self.k:
            raise InputError("exponent rows must be linearly independent")

    @classmethod
    def make(cls, forms: Sequence[Sequence], exponents: Sequence[Sequence]) -> "ShearedSystem":
        forms = tuple(tuple(to_rational(c) for c in f) for f in forms)
        exps = tuple(tuple(to_rational(c) for c in r) for r in exponents)
        k = len(exps)
        return cls(k, len(forms), forms, exps)

    @property
    def integral(self) -> bool:
        return all(b.denominator == 1 for r in self.exponents for b in r)

    def form_value(self, i: int, lam: Sequence[Fraction]) -> Fraction:
        f = self.forms[i]
        return f[0] + sum(c * x for c, x in zip(f[1:], lam))

    def to_json(self):
        return {
            "k": self.k,
            "j": self.j,
            "forms": [[str(c) for c in f] for f in self.forms],
            "exponents": [[str(b) for b in r] for r in self.exponents],
        }

    @classmethod
    def from_json(cls, obj) -> "ShearedSystem":
        try:
            return cls.make(obj["forms"], obj["exponents"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed ShearedSystem JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# evaluation


def _as_interval(x, prec: int) -> DyadicInterval:
    if isinstance(x, DyadicInterval):
        return x.with_precision(max(prec, x.precision_bits))
    return rational_enclosure(to_rational(x), prec)


def _signed_pow(v: DyadicInterval, b: Fraction) -> DyadicInterval:
    s = v.sign()
    if b.denominator % 2 == 0 and s < 0:
        raise DomainError("even root of a negative factor")
    mag = interval_pow(abs(v) if s < 0 else v, b)
    return -mag if s < 0 and b.numerator % 2 else mag


def evaluate(S: ShearedSystem, lam: Sequence, precision_bits: int | None = None) -> list[DyadicInterval]:
    """Enclosures of 1 - prod_i l_i^{b_{r,i}} for r = 1..k."""
    prec = precision_bits or default_precision()
    if len(lam) != S.k:
        raise InputError(f"lambda needs {S.k} entries")
    if S.integral and not any(isinstance(x, DyadicInterval) for x in lam):
        return [rational_enclosure(v, prec) for v in evaluate_exact(S, lam)]
    X = [_as_interval(x, prec) for x in lam]
    vals = []
    for i, f in enumerate(S.forms):
        v = rational_enclosure(f[0], prec)
        for c, x in zip(f[1:], X):
            if c:
                v = v + x * c
        if not v.sign():
            raise SignAmbiguous(f"form {i} is not sign-definite on the input")
        vals.append(v)
    out = []
    for row in S.exponents:
        p = rational_enclosure(1, prec)
        for v, b in zip(vals, row):
            if b:
                p = p * _signed_pow(v, b)
        out.append(1 - p)
    return out


def evaluate_exact(S: ShearedSystem, lam: Sequence) -> list[Fraction]:
    """Exact values for integer exponents at a rational point."""
    if not S.integral:
        raise InputError("exact evaluation needs integer exponents")
    lam = [to_rational(x) for x in lam]
    vals = [S.form_value(i, lam) for i in range(S.j)]
    for i, v in enumerate(vals):
        if v == 0:
            raise SignAmbiguous(f"form {i} vanishes at the input")
    out = []
    for row in S.exponents:
        p = Fraction(1)
        for v, b in zip(vals, row):
            p *= v ** int(b)
        out.append(1 - p)
    return out


# ---------------------------------------------------------------------------
# cells


def _clip(poly: list, f: tuple, sign: int) -> list:
    """Part of a convex polygon where sign * l >= 0 (Sutherland-Hodgman)."""
    def val(p):
        return sign * (f[0] + f[1] * p[0] + f[2] * p[1])

    out = []
    n = len(poly)
    for idx in range(n):
        p, q = poly[idx], poly[(idx + 1) % n]
        vp, vq = val(p), val(q)
        if vp >= 0:
            out.append(p)
        if (vp > 0 and vq < 0) or (vp < 0 and vq > 0):
            t = vp / (vp - vq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    dedup = []
    for p in out:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def _area2(poly: list) -> Fraction:
    n = len(poly)
    return sum(poly[i][0] * poly[(i + 1) % n][1] - poly[(i + 1) % n][0] * poly[i][1] for i in range(n))


def _cells_2d(S: ShearedSystem, box) -> list[tuple[tuple, list]]:
    (x0, x1), (y0, y1) = box
    cells = [((), [(x0, y0), (x1, y0), (x1, y1), (x0, y1)])]
    for f in S.forms:
        nxt = []
        for sig, poly in cells:
            for s in (1, -1):
                part = _clip(poly, f, s)
                if len(part) >= 3 and _area2(part) != 0:
                    nxt.append((sig + (s,), part))
        cells = nxt
    return cells


def _cells_1d(S: ShearedSystem, box) -> list[tuple[tuple, Fraction, Fraction, bool, bool]]:
    (lo, hi), = box
    zeros = sorted({-f[0] / f[1] for f in S.forms if lo < -f[0] / f[1] < hi})
    pts = [lo, *zeros, hi]
    out = []
    for a, b in zip(pts, pts[1:]):
        mid = (a + b) / 2
        sig = tuple(1 if S.form_value(i, [mid]) > 0 else -1 for i in range(S.j))
        out.append((sig, a, b, a != lo, b != hi))
    return out


def _chamber_admissible(S: ShearedSystem, sig: tuple) -> bool:
    """Whether every equation can vanish on a cell with this sign vector."""
    for row in S.exponents:
        s = 1
        for si, b in zip(sig, row):
            if si < 0 and b:
                if b.denominator % 2 == 0:
                    return False
                if b.numerator % 2:
                    s = -s
        if s < 0:
            return False
    return True


# ---------------------------------------------------------------------------
# log-form enclosures over a convex region


def _line_key(f: tuple) -> tuple[tuple, Fraction]:
    """Normalised line and the factor c with f = c * line."""
    c = next(v for v in f[1:] if v != 0)
    return tuple(v / c for v in f), c


def _range_over(f: tuple, verts: list) -> tuple[Fraction, Fraction]:
    vals = [f[0] + sum(c * x for c, x in zip(f[1:], p)) for p in verts]
    return min(vals), max(vals)


def _log_abs(lo: Fraction, hi: Fraction, prec: int) -> DyadicInterval:
    """log|t| over a sign-definite closed range [lo, hi] (one end may be 0)."""
    a, b = (lo, hi) if lo >= 0 else (-hi, -lo)
    return DyadicInterval(a, b, prec).log()


class _Region:
    """Form ranges over a convex region inside the closure of one cell."""

    def __init__(self, S: ShearedSystem, verts: list, prec: int):
        self.S = S
        self.prec = prec
        self.ranges = [_range_over(f, verts) for f in S.forms]
        self.touching = [i for i, (lo, hi) in enumerate(self.ranges) if lo == 0 or hi == 0]
        groups: dict[tuple, list] = {}
        for i in self.touching:
            key, c = _line_key(S.forms[i])
            groups.setdefault(key, []).append((i, c))
        self.groups = groups
        self._logs: dict[int, DyadicInterval] = {}

    def log_form(self, i: int) -> DyadicInterval:
        v = self._logs.get(i)
        if v is None:
            v = self._logs[i] = _log_abs(*self.ranges[i], self.prec)
        return v

    def combined(self, w: Sequence[Fraction]) -> DyadicInterval:
        """Enclosure of sum_r w_r g_r with divergent terms merged per line."""
        S, prec = self.S, self.prec
        beta = [sum(wr * row[i] for wr, row in zip(w, S.exponents)) for i in range(S.j)]
        acc = rational_enclosure(0, prec)
        grouped = set()
        for key, members in self.groups.items():
            kappa = Fraction(0)
            for i, c in members:
                grouped.add(i)
                if beta[i]:
                    kappa += beta[i]
                    acc = acc + DyadicInterval(abs(c), abs(c), prec).log() * beta[i]
            if kappa:
                lo, hi = self._key_range(key, members)
                acc = acc + _log_abs(lo, hi, prec) * kappa
        for i in range(S.j):
            if i in grouped or not beta[i]:
                continue
            acc = acc + self.log_form(i) * beta[i]
        return acc

    def _key_range(self, key, members):
        i, c = members[0]
        lo, hi = self.ranges[i]
        return (lo / c, hi / c) if c > 0 else (hi / c, lo / c)

    def preconditioners(self) -> list[tuple]:
        S = self.S
        k = S.k
        rows = [tuple(Fraction(int(r == s)) for s in range(k)) for r in range(k)]
        cols = []
        for members in self.groups.values():
            cols.append([sum(S.exponents[r][i] for i, _ in members) for r in range(k)])
        if k == 2 and len(cols) == 1 and any(cols[0]):
            s1, s2 = cols[0]
            rows += [(s1, s2), (-s2, s1)]
        elif k == 2 and len(cols) == 2:
            (a, c), (b, d) = cols
            det = a * d - b * c
            if det:
                rows += [(d / det, -b / det), (-c / det, a / det)]
            else:
                for col in cols:
                    if any(col):
                        rows += [(col[0], col[1]), (-col[1], col[0])]
                        break
        return rows

    def excluded(self) -> bool:
        return any(self.combined(w).sign() for w in self.preconditioners())


# ---------------------------------------------------------------------------
# solving


@dataclass(frozen=True)
class RootBox:
    box: tuple  # k pairs (lo, hi) of Fractions
    positive_chamber: tuple  # sign vector of the j forms on the box
    certified_unique: bool

    def to_json(self):
        return {
            "box": [[str(a), str(b)] for a, b in self.box],
            "positive_chamber": list(self.positive_chamber),
            "certified_unique": self.certified_unique,
        }


@dataclass(frozen=True)
class ShearedConfig:
    precision_bits: int = field(default_factory=default_precision)
    max_precision_bits: int = MAX_PRECISION
    max_depth: int = 200
    max_boxes: int = 200_000
    target_width_bits: int = 40


def _odd_split(a: Fraction, b: Fraction) -> Fraction:
    """A point near a + (b - a) * 61/128 whose denominator is a large power of 2.

    Rational roots of low height never land on such a point, so no box
    end is an exact zero.
    """
    w = b - a
    e = max(48, 12 - math.floor(math.log2(w)))
    scale = 1 << e
    t = a + w * Fraction(61, 128)
    return Fraction(2 * math.floor(t * scale / 2) + 1, scale)


def _precision_for(width: Fraction, config: ShearedConfig) -> int:
    p = config.precision_bits
    while width < Fraction(1, 2 ** (p // 2)):
        p *= 2
        if p > config.max_precision_bits:
            raise UnresolvedBox("precision cap reached")
    return p


def _g_1d(S: ShearedSystem):
    row = S.exponents[0]

    def F(X: DyadicInterval) -> DyadicInterval:
        acc = rational_enclosure(0, X.precision_bits)
        for f, b in zip(S.forms, row):
            if b:
                v = X * f[1] + f[0]
                acc = acc + abs(v).log() * b
        return acc

    def DF(X: DyadicInterval) -> DyadicInterval:
        acc = rational_enclosure(0, X.precision_bits)
        for f, b in zip(S.forms, row):
            if b:
                v = X * f[1] + f[0]
                acc = acc + (1 / v) * (f[1] * b)
        return acc

    return F, DF


def _exact_zero_at(S: ShearedSystem, z: Fraction, vanishing: set) -> bool:
    """Whether g vanishes exactly at an arrangement point where the divergent terms cancel.

    With L the common exponent denominator, g(z) = 0 iff the product of
    |c_i|^{L b_i} over the vanishing forms (l_i = c_i * line) and of
    |l_i(z)|^{L b_i} over the others equals 1.
    """
    row = S.exponents[0]
    L = math.lcm(*(b.denominator for b in row))
    p = Fraction(1)
    for i, (f, b) in enumerate(zip(S.forms, row)):
        if not b:
            continue
        v = f[1] if i in vanishing else S.form_value(i, [z])
        p *= abs(v) ** int(L * b)
    return p == 1


def _endpoint_cut_1d(S, z: Fraction, inward: int, limit: Fraction, config: ShearedConfig) -> Fraction:
    """Distance eps such that no zero of g lies strictly between z and z + inward*eps."""
    vanishing = {i for i, f in enumerate(S.forms) if S.form_value(i, [z]) == 0}
    regular = sum(S.exponents[0][i] for i in vanishing) == 0 and _exact_zero_at(S, z, vanishing)
    eps = limit
    for _ in range(config.max_depth):
        a, b = (z, z + eps) if inward > 0 else (z - eps, z)
        prec = _precision_for(eps, config)
        if regular:
            # g(z) = 0 exactly and g is smooth at z: a monotone piece holds no other zero
            X = DyadicInterval(a, b, prec)
            d = rational_enclosure(0, prec)
            for i, (f, bi) in enumerate(zip(S.forms, S.exponents[0])):
                if bi and i not in vanishing:
                    d = d + (1 / (X * f[1] + f[0])) * (f[1] * bi)
            if d.sign():
                return eps
        elif _Region(S, [(a,), (b,)], prec).excluded():
            return eps
        eps /= 16
    raise UnresolvedBox(f"could not exclude a neighbourhood of the arrangement point {z}")


def _solve_1d(S: ShearedSystem, box, config: ShearedConfig) -> list[RootBox]:
    out = []
    F, DF = _g_1d(S)
    iso = IsolationConfig(
        precision_bits=config.precision_bits,
        max_precision_bits=config.max_precision_bits,
        max_depth=config.max_depth,
        max_boxes=config.max_boxes,
    )
    target = Fraction(1, 2**config.target_width_bits)
    for sig, a, b, open_a, open_b in _cells_1d(S, box):
        if not _chamber_admissible(S, sig):
            continue
        quarter = (b - a) / 4
        lo = a + _endpoint_cut_1d(S, a, 1, quarter, config) if open_a else a
        hi = b - _endpoint_cut_1d(S, b, -1, quarter, config) if open_b else b
        for r_lo, r_hi in isolate_interval_zeros(F, DF, lo, hi, iso, lambda u, v: target, split=_odd_split):
            out.append(RootBox(((r_lo, r_hi),), sig, True))
    return out


def _jacobian(S: ShearedSystem, X: list[DyadicInterval]):
    vals = []
    for f in S.forms:
        v = X[0] * f[1] + X[1] * f[2] + f[0]
        vals.append(v)
    J = []
    for row in S.exponents:
        J.append([
            sum(((1 / v) * (f[s + 1] * b) for v, f, b in zip(vals, S.forms, row) if b and f[s + 1]),
                rational_enclosure(0, X[0].precision_bits))
            for s in range(2)
        ])
    return J


def _g_2d(S: ShearedSystem, P: list[DyadicInterval]) -> list[DyadicInterval]:
    out = []
    for row in S.exponents:
        acc = rational_enclosure(0, P[0].precision_bits)
        for f, b in zip(S.forms, row):
            if b:
                v = P[0] * f[1] + P[1] * f[2] + f[0]
                acc = acc + abs(v).log() * b
        out.append(acc)
    return out


def _krawczyk(S: ShearedSystem, box, prec: int):
    """'none' (no root), ('unique', K box) or None (undecided)."""
    X = [DyadicInterval(lo, hi, prec) for lo, hi in box]
    m = [(lo + hi) / 2 for lo, hi in box]
    M = [rational_enclosure(v, prec) for v in m]
    J = _jacobian(S, X)
    Jm = _jacobian(S, M)
    a, b = Jm[0][0].mid_float(), Jm[0][1].mid_float()
    c, d = Jm[1][0].mid_float(), Jm[1][1].mid_float()
    det = a * d - b * c
    if not math.isfinite(det) or det == 0:
        return None
    Y = [[Fraction(d / det), Fraction(-b / det)], [Fraction(-c / det), Fraction(a / det)]]
    gm = _g_2d(S, M)
    K = []
    for r in range(2):
        acc = M[r] - (gm[0] * Y[r][0] + gm[1] * Y[r][1])
        for s in range(2):
            coef = rational_enclosure(int(r == s), prec) - (J[0][s] * Y[r][0] + J[1][s] * Y[r][1])
            acc = acc + coef * (X[s] - m[s])
        K.append(acc)
    if any(not k.is_finite for k in K):
        return None
    for k, (lo, hi) in zip(K, box):
        if k.hi < lo or k.lo > hi:
            return "none"
    if all(lo < k.lo and k.hi < hi for k, (lo, hi) in zip(K, box)):
        return ("unique", tuple((k.lo, k.hi) for k in K))
    return None


def _rect_inside_cell(S: ShearedSystem, box, sig: tuple) -> bool:
    corners = [(x, y) for x in box[0] for y in box[1]]
    for f, s in zip(S.forms, sig):
        lo, hi = _range_over(f, corners)
        if (s > 0 and lo <= 0) or (s < 0 and hi >= 0):
            return False
    return True


def _tighten(S: ShearedSystem, box, config: ShearedConfig):
    target = Fraction(1, 2**config.target_width_bits)
    for _ in range(60):
        if max(hi - lo for lo, hi in box) <= target:
            break
        prec = _precision_for(min(hi - lo for lo, hi in box), config)
        res = _krawczyk(S, box, prec)
        if not isinstance(res, tuple):
            break
        new = res[1]
        if max(hi - lo for lo, hi in new) * 2 > max(hi - lo for lo, hi in box):
            box = new
            break
        box = new
    return box


_CORNERS = ((Fraction(1), Fraction(1)), (Fraction(-1), Fraction(1)), (Fraction(-1), Fraction(-1)), (Fraction(1), Fraction(-1)))


def _cross(a, b) -> Fraction:
    return a[0] * b[1] - a[1] * b[0]


def _sup_norm(d) -> Fraction:
    return max(abs(d[0]), abs(d[1]))


def _common_point(R: _Region):
    """Point shared by all touching lines, when there are at least two distinct ones."""
    keys = list(R.groups)
    if len(keys) < 2:
        return None
    f, g = keys[0], keys[1]
    det = f[1] * g[2] - f[2] * g[1]
    if det == 0:
        return None
    v = ((f[2] * g[0] - f[0] * g[2]) / det, (f[0] * g[1] - f[1] * g[0]) / det)
    if any(h[0] + h[1] * v[0] + h[2] * v[1] != 0 for h in keys[2:]):
        return None
    return v


def _contains(poly: list, v) -> bool:
    n = len(poly)
    signs = set()
    for idx in range(n):
        p, q = poly[idx], poly[(idx + 1) % n]
        c = _cross((q[0] - p[0], q[1] - p[1]), (v[0] - p[0], v[1] - p[1]))
        if c:
            signs.add(c > 0)
    return len(signs) <= 1


def _cone(poly: list, v):
    """Extreme unit (sup-norm) directions of a polygon seen from its vertex v."""
    us = []
    for p in poly:
        if p != v:
            d = (p[0] - v[0], p[1] - v[1])
            n = _sup_norm(d)
            us.append((d[0] / n, d[1] / n))
    e1 = next((u for u in us if all(_cross(u, w) >= 0 for w in us)), None)
    e2 = next((u for u in us if all(_cross(w, u) >= 0 for w in us)), None)
    return e1, e2


def _polar_excluded(S: ShearedSystem, R: _Region, poly: list, v) -> bool:
    """Exclusion near an arrangement vertex v that is a vertex of poly.

    Every touching line vanishes at v, so l_i = c_i * rho * (n_q . u) with
    rho the sup-norm distance to v and u the unit direction.  The
    logarithms split into a common log(rho) term and angular terms that
    only diverge along lines bounding the cone of poly at v.
    """
    e1, e2 = _cone(poly, v)
    if e1 is None or e2 is None:
        return False
    arc = [e1, e2] + [c for c in _CORNERS if _cross(e1, c) > 0 and _cross(c, e2) > 0]
    prec = R.prec
    rho_hi = max(_sup_norm((p[0] - v[0], p[1] - v[1])) for p in poly)
    log_rho = DyadicInterval(0, rho_hi, prec).log()
    k = S.k
    cols, angular, bounding = {}, {}, []
    for key, members in R.groups.items():
        cols[key] = [sum(S.exponents[r][i] for i, _ in members) for r in range(k)]
        vals = [key[1] * u[0] + key[2] * u[1] for u in arc]
        lo, hi = min(vals), max(vals)
        if lo < 0 < hi:
            return False
        angular[key] = (lo, hi)
        if lo == 0 or hi == 0:
            bounding.append(key)
    total = [sum(c[r] for c in cols.values()) for r in range(k)]
    rows = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]
    if any(total):
        rows += [tuple(total), (-total[1], total[0])]
    for key in bounding:
        a, c = total
        b, d = cols[key]
        det = a * d - b * c
        if det:
            rows += [(d / det, -b / det), (-c / det, a / det)]
        elif any(cols[key]):
            rows += [tuple(cols[key]), (-cols[key][1], cols[key][0])]
    grouped = {i for members in R.groups.values() for i, _ in members}
    for w in rows:
        beta = [sum(wr * S.exponents[r][i] for r, wr in enumerate(w)) for i in range(S.j)]
        acc = rational_enclosure(0, prec)
        kappa_total = Fraction(0)
        for key, members in R.groups.items():
            kappa = sum(beta[i] for i, _ in members)
            for i, c in members:
                if beta[i]:
                    acc = acc + DyadicInterval(abs(c), abs(c), prec).log() * beta[i]
            if kappa:
                kappa_total += kappa
                acc = acc + _log_abs(*angular[key], prec) * kappa
        if kappa_total:
            acc = acc + log_rho * kappa_total
        for i in range(S.j):
            if i not in grouped and beta[i]:
                acc = acc + R.log_form(i) * beta[i]
        if acc.sign():
            return True
    return False


def _split_polygon(poly: list, cuts: list) -> list:
    """Pieces of poly cut by each line in turn; zero-area pieces dropped."""
    pieces = [poly]
    for f in cuts:
        nxt = []
        for p in pieces:
            for s in (1, -1):
                q = _clip(p, f, s)
                if len(q) >= 3 and _area2(q) != 0:
                    nxt.append(q)
        pieces = nxt
    return pieces


def _line_through(v, d) -> tuple:
    """Form vanishing on the line through v with direction d."""
    return (d[1] * v[0] - d[0] * v[1], -d[1], d[0])


def _radial_pieces(poly: list, v, r: Fraction) -> list:
    """poly split by the square of sup-radius r around v (convex pieces)."""
    vx, vy = v
    right = (-vx - r, Fraction(1), Fraction(0))  # x - vx - r
    left = (vx - r, Fraction(-1), Fraction(0))  # vx - x - r
    top = (-vy - r, Fraction(0), Fraction(1))
    bottom = (vy - r, Fraction(0), Fraction(-1))
    out = []
    for f in (right, left):
        q = _clip(poly, f, 1)
        if len(q) >= 3 and _area2(q) != 0:
            out.append(q)
    middle = _clip(_clip(poly, right, -1), left, -1)
    if len(middle) >= 3:
        for f in (top, bottom):
            q = _clip(middle, f, 1)
            if len(q) >= 3 and _area2(q) != 0:
                out.append(q)
        inner = _clip(_clip(middle, top, -1), bottom, -1)
        if len(inner) >= 3 and _area2(inner) != 0:
            out.append(inner)
    return out


def _box_position(poly: list, box) -> int:
    """1 if box lies in the interior of the convex polygon, -1 if outside it, 0 otherwise."""
    corners = [(x, y) for x in box[0] for y in box[1]]
    n = len(poly)
    orient = 1 if _area2(poly) > 0 else -1
    inside = True
    for idx in range(n):
        p, q = poly[idx], poly[(idx + 1) % n]
        e = (q[0] - p[0], q[1] - p[1])
        cs = [orient * _cross(e, (c[0] - p[0], c[1] - p[1])) for c in corners]
        if all(c < 0 for c in cs):
            return -1
        if not all(c > 0 for c in cs):
            inside = False
    return 1 if inside else 0


def _reduced_equations(S: ShearedSystem, max_degree: int = 40) -> list | None:
    """Cleared equations N - D with every arrangement form divided out (integer exponents only).

    Inside a cell the forms do not vanish, so g_r = 0 iff the reduced factor
    vanishes; this catches equations whose zero curve runs along a cell edge.
    """
    if not S.integral or S.k != 2:
        return None
    x, y = sympy.symbols("x y")
    out = []
    for r in range(2):
        N, D = _cleared_sides(S, r)
        if sum(e for _, e in N) > max_degree or sum(e for _, e in D) > max_degree:
            return None
        P = sympy.Poly(sympy.expand(_sympy_side(N) - _sympy_side(D)), x, y, domain="QQ")
        if P.is_zero:
            return None
        for f in S.forms:
            L = sympy.Poly(_sq(f[0]) + _sq(f[1]) * x + _sq(f[2]) * y, x, y, domain="QQ")
            while P.total_degree() >= 1:
                q, rem = P.div(L)
                if not rem.is_zero:
                    break
                P = q
        out.append(P)
    return out


def _reduced_excluded(reduced: list | None, box, prec: int) -> bool:
    if not reduced:
        return False
    X = DyadicInterval(box[0][0], box[0][1], prec)
    Y = DyadicInterval(box[1][0], box[1][1], prec)
    return any(_poly_interval(P, X, Y).sign() for P in reduced)


def _no_roots_off_arrangement(S: ShearedSystem, reduced: list) -> bool:
    """Exact check that the reduced equations share no zero off every form (Rabinowitsch trick)."""
    x, y = reduced[0].gens
    t = sympy.Symbol("t")
    prod = sympy.Integer(1)
    for f in S.forms:
        prod *= _sq(f[0]) + _sq(f[1]) * x + _sq(f[2]) * y
    G = sympy.groebner([P.as_expr() for P in reduced] + [sympy.expand(t * prod - 1)], t, x, y, order="grevlex")
    return list(G.exprs) == [1]


def _solve_cell_2d(
    S: ShearedSystem, sig: tuple, poly: list, config: ShearedConfig, budget: list, reduced: list | None = None
) -> list[RootBox]:
    stack = [(poly, 0)]
    out = []
    while stack:
        P, depth = stack.pop()
        budget[0] += 1
        if budget[0] > config.max_boxes:
            raise UnresolvedBox("box budget exhausted")
        xs = [p[0] for p in P]
        ys = [p[1] for p in P]
        box = ((min(xs), max(xs)), (min(ys), max(ys)))
        if depth > config.max_depth:
            raise UnresolvedBox(f"depth cap hit near {[(float(a), float(b)) for a, b in box]}")
        (x0, x1), (y0, y1) = box
        prec = _precision_for(min(x1 - x0, y1 - y0), config)
        R = _Region(S, P, prec)
        if R.excluded() or _reduced_excluded(reduced, box, prec):
            continue
        v = _common_point(R)
        if v is not None and not _contains(P, v):
            v = None
        if v is not None and v in P and _polar_excluded(S, R, P, v):
            continue
        if not R.touching and _rect_inside_cell(S, box, sig):
            res = _krawczyk(S, box, prec)
            if res == "none":
                continue
            if isinstance(res, tuple):
                tight = _tighten(S, res[1], config)
                pos = _box_position(P, tight)
                if pos == 0:
                    tight = _tighten(S, tight, ShearedConfig(config.precision_bits, config.max_precision_bits,
                                                            target_width_bits=4 * config.target_width_bits))
                    pos = _box_position(P, tight)
                if pos == 0:
                    raise UnresolvedBox("root on a subdivision cut")
                if pos > 0:
                    out.append(RootBox(tight, sig, True))
                continue
        if v is not None and v not in P:
            # two cuts through v, slightly tilted so that they avoid low-height points
            t = _odd_split(Fraction(0), Fraction(1, 64))
            pieces = _split_polygon(P, [_line_through(v, (Fraction(1), t)), _line_through(v, (-t, Fraction(1)))])
        elif v is not None and depth % 2 == 0:
            e1, e2 = _cone(P, v)
            t = _odd_split(Fraction(0), Fraction(1))
            dm = (e1[0] + t * (e2[0] - e1[0]), e1[1] + t * (e2[1] - e1[1]))
            pieces = _split_polygon(P, [_line_through(v, dm)])
        elif v is not None:
            rho = max(_sup_norm((p[0] - v[0], p[1] - v[1])) for p in P)
            pieces = _radial_pieces(P, v, _odd_split(Fraction(0), rho))
        elif x1 - x0 >= y1 - y0:
            pieces = _split_polygon(P, [(-_odd_split(x0, x1), Fraction(1), Fraction(0))])
        else:
            pieces = _split_polygon(P, [(-_odd_split(y0, y1), Fraction(0), Fraction(1))])
        for piece in reversed(pieces):
            stack.append((piece, depth + 1))
    return out


def _normalise_box(S: ShearedSystem, box) -> tuple | None:
    if len(box) != S.k:
        raise InputError(f"box needs {S.k} intervals")
    out = []
    for lo, hi in box:
        lo, hi = to_rational(lo), to_rational(hi)
        if lo >= hi:
            return None
        out.append((lo, hi))
    return tuple(out)


def solve_box(S: ShearedSystem, box, config: ShearedConfig | None = None) -> list[RootBox]:
    """Certified list of the nondegenerate roots in box off the arrangement (k <= 2)."""
    config = config or ShearedConfig()
    if S.k > 2:
        raise InputError("solving is implemented for k <= 2 only")
    nbox = _normalise_box(S, box)
    if nbox is None:
        return []
    if S.k == 1:
        out = _solve_1d(S, nbox, config)
    else:
        out = []
        budget = [0]
        reduced = _reduced_equations(S)
        if reduced and any(P.total_degree() < 1 for P in reduced):
            return []
        # near-tangent curves can defeat subdivision; an empty variety settles it exactly
        if reduced and _no_roots_off_arrangement(S, reduced):
            return []
        for sig, poly in _cells_2d(S, nbox):
            if _chamber_admissible(S, sig):
                out.extend(_solve_cell_2d(S, sig, poly, config, budget, reduced))
    out.sort(key=lambda r: r.box)
    return out


def count_nondegenerate(S: ShearedSystem, box, config: ShearedConfig | None = None) -> tuple[int, dict]:
    """(total, {sign vector: count})."""
    roots = solve_box(S, box, config)
    hist: dict[tuple, int] = {}
    for r in roots:
        hist[r.positive_chamber] = hist.get(r.positive_chamber, 0) + 1
    return len(roots), dict(sorted(hist.items()))


# ---------------------------------------------------------------------------
# bounds


def _e2_plus_3(prec: int) -> DyadicInterval:
    return rational_enclosure(2, prec).exp() + 3


def printed_bound(k: int, n: int, precision_bits: int | None = None) -> DyadicInterval:
    """(e^2 + 3) 2^{(k-4)(k+1)/2} n^k."""
    if k < 1 or n < 1:
        raise InputError("k and n must be positive")
    prec = precision_bits or default_precision()
    e = Fraction((k - 4) * (k + 1), 2)
    two = Fraction(2) ** int(e) if e.denominator == 1 else None
    scale = rational_enclosure(two, prec) if two is not None else interval_pow(rational_enclosure(2, prec), e)
    return _e2_plus_3(prec) * scale * n**k


def published_bound(k: int, n: int, precision_bits: int | None = None) -> DyadicInterval:
    """(e^2 + 3)/4 * 2^{k(k-1)/2} n^k."""
    if k < 1 or n < 1:
        raise InputError("k and n must be positive")
    prec = precision_bits or default_precision()
    return _e2_plus_3(prec) * Fraction(2 ** (k * (k - 1) // 2) * n**k, 4)


def floor_of(x: DyadicInterval) -> int:
    """floor of a real known through an enclosure that does not straddle an integer."""
    lo, hi = math.floor(x.lo), math.floor(x.hi)
    if lo != hi:
        raise UnresolvedBox("enclosure straddles an integer")
    return lo


# ---------------------------------------------------------------------------
# dense oracle for integer exponents


def _cleared_sides(S: ShearedSystem, r: int):
    """(N, D) with N = prod_{b>0} l^b and D = prod_{b<0} l^{-b}, as lists of (form, power)."""
    N, D = [], []
    for f, b in zip(S.forms, S.exponents[r]):
        if b > 0:
            N.append((f, int(b)))
        elif b < 0:
            D.append((f, int(-b)))
    return N, D


def _dense_1d(S: ShearedSystem, box) -> int:
    (lo, hi), = box
    N, D = _cleared_sides(S, 0)

    def prod(side):
        p = ExactPolynomial([1])
        for f, e in side:
            p = p * ExactPolynomial([f[0], f[1]]) ** e
        return p

    P = prod(N) - prod(D)
    if P.is_zero():
        raise DegenerateSystem("the cleared equation vanishes identically")
    for f in S.forms:
        z = -f[0] / f[1]
        while P.degree >= 1 and P(z) == 0:
            P = deflate_at(P, z)
    if P.degree < 1:
        return 0
    multiple = P.gcd(P.derivative())
    try:
        if multiple.degree >= 1 and count_roots_open(multiple, lo, hi):
            raise DegenerateSystem("a root in the box is not simple")
        return count_roots_open(P, lo, hi)
    except EndpointRoot as exc:
        raise DegenerateSystem("root on the box boundary") from exc


def _sympy_side(side):
    x, y = sympy.symbols("x y")
    p = sympy.Integer(1)
    for f, e in side:
        p *= (_sq(f[0]) + _sq(f[1]) * x + _sq(f[2]) * y) ** e
    return p


def _sq(q: Fraction):
    return sympy.Rational(q.numerator, q.denominator)


def _poly_interval(P: sympy.Poly, X: DyadicInterval, Y: DyadicInterval) -> DyadicInterval:
    acc = rational_enclosure(0, X.precision_bits)
    for (i, j), c in P.terms():
        acc = acc + X.pow_int(i) * Y.pow_int(j) * Fraction(int(c.p), int(c.q))
    return acc


def _on_line_test(P1: sympy.Poly, P2: sympy.Poly, f: tuple):
    """Predicate telling whether a solution (given its isolating x-range) lies on l = 0."""
    x, y = sympy.symbols("x y")
    if f[2] != 0:
        sub = {y: -(_sq(f[0]) + _sq(f[1]) * x) / _sq(f[2])}
        g = sympy.gcd(sympy.expand(P1.as_expr().subs(sub)), sympy.expand(P2.as_expr().subs(sub)))
        if g == 0:
            raise DegenerateSystem("a cleared equation vanishes on a whole line")
        G = ExactPolynomial(Fraction(int(c.p), int(c.q)) for c in sympy.Poly(g, x).all_coeffs()[::-1])

        def test(xl, xh):
            if G.degree < 1:
                return False
            if xl == xh:
                return G(xl) == 0
            if G(xl) == 0 or G(xh) == 0:
                return True
            return count_roots_open(G, xl, xh) > 0

        return test
    xc = -f[0] / f[1]
    R = ExactPolynomial(
        Fraction(int(c.p), int(c.q))
        for c in sympy.Poly(sympy.resultant(P1.as_expr(), P2.as_expr(), y), x).all_coeffs()[::-1]
    )
    return lambda xl, xh: xl <= xc <= xh and R(xc) == 0


def _dense_2d(S: ShearedSystem, box) -> int:
    x, y = sympy.symbols("x y")
    polys = []
    for r in range(2):
        N, D = _cleared_sides(S, r)
        polys.append(sympy.Poly(sympy.expand(_sympy_side(N) - _sympy_side(D)), x, y, domain="QQ"))
    P1, P2 = polys
    if P1.is_zero or P2.is_zero:
        raise DegenerateSystem("a cleared equation vanishes identically")
    sols = real_solutions(P1, P2)
    tests = [_on_line_test(P1, P2, f) for f in S.forms]
    J = [[P1.diff(x), P1.diff(y)], [P2.diff(x), P2.diff(y)]]
    (x0, x1), (y0, y1) = box
    count = 0
    for s in sols:
        xl, xh = s.x
        if s.y_sign == 0:
            yl = yh = Fraction(0)
        else:
            yl, yh = s.y.lo, s.y.hi
        if xh < x0 or xl > x1 or yh < y0 or yl > y1:
            continue
        if not (x0 < xl and xh < x1 and y0 < yl and yh < y1):
            raise DegenerateSystem("solution too close to the box boundary")
        through = [i for i, t in enumerate(tests) if t(xl, xh)]
        if through:
            cols: dict[tuple, list] = {}
            for i in through:
                if not any(row[i] for row in S.exponents):
                    raise DegenerateSystem("solution on the line of a form absent from the equations")
                key, _ = _line_key(S.forms[i])
                col = cols.setdefault(key, [Fraction(0), Fraction(0)])
                for r in range(2):
                    col[r] += S.exponents[r][i]
            M = list(cols.values())
            if len(M) < 2 or _rank([[c[r] for c in M] for r in range(2)]) < 2:
                raise DegenerateSystem("arrangement vertex with a rank-deficient divergence matrix")
            continue
        X = DyadicInterval(xl, xh, 128)
        Y = DyadicInterval(yl, yh, 128)
        det = _poly_interval(J[0][0], X, Y) * _poly_interval(J[1][1], X, Y) - _poly_interval(
            J[0][1], X, Y
        ) * _poly_interval(J[1][0], X, Y)
        if not det.sign():
            raise DegenerateSystem("solution with a singular Jacobian")
        count += 1
    return count


def dense_oracle_count(S: ShearedSystem, box) -> int:
    """Root count by clearing denominators and solving with resultants and Sturm sequences.

    Roots of prod_{b>0} l^b = prod_{b<0} l^{-b} lying on the arrangement are
    discarded.  Raises DegenerateSystem whenever the input is not in the
    generic position this oracle relies on.
    """
    if not S.integral:
        raise InputError("the dense oracle needs integer exponents")
    nbox = _normalise_box(S, box)
    if nbox is None:
        return 0
    if S.k == 1:
        return _dense_1d(S, nbox)
    if S.k == 2:
        return _dense_2d(S, nbox)
    raise InputError("the dense oracle handles k <= 2")


DEFAULT_HALF_WIDTH = Fraction(4097, 1024)


def default_box(k: int) -> tuple:
    return tuple((-DEFAULT_HALF_WIDTH, DEFAULT_HALF_WIDTH) for _ in range(k))


def random_system(rng, k: int, max_extra: int = 2, coeff_range: int = 3, exp_range: int = 2) -> ShearedSystem:
    """Random integer-exponent system with small integer forms (rng: random.Random)."""
    while True:
        j = k + rng.randint(0, max_extra)
        forms = []
        for _ in range(j):
            f = [rng.randint(-coeff_range, coeff_range) for _ in range(k + 1)]
            if all(c == 0 for c in f[1:]):
                f[1 + rng.randrange(k)] = rng.choice([-1, 1])
            forms.append(f)
        exps = [[rng.randint(-exp_range, exp_range) for _ in range(j)] for _ in range(k)]
        try:
            return ShearedSystem.make(forms, exps)
        except InputError:
            continue
