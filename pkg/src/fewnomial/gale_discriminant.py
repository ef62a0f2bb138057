"""Supports, Gale duals, odd cells and the reduction map to the reduced discriminant.

Indices are 0-based throughout: the translated origin is point 0 and an odd
cell is a set of n indices taken from 1..m-1.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import (
    InputError,
    NotAffinelyGenerating,
    OnArrangement,
    RankDeficient,
    ZeroCoordinate,
    ZeroU,
)
from .numeric_core import DyadicInterval, default_precision, interval_pow, rational_enclosure, to_rational

# ---------------------------------------------------------------------------
# integer linear algebra


def _hnf_rows(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form; zero rows dropped, pivots positive."""
    A = [list(map(int, r)) for r in rows]
    if not A:
        return []
    ncols = len(A[0])
    pr = 0
    for col in range(ncols):
        if pr >= len(A):
            break
        while True:
            nz = [i for i in range(pr, len(A)) if A[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(A[i][col]))
            A[pr], A[piv] = A[piv], A[pr]
            done = True
            for i in range(pr + 1, len(A)):
                if A[i][col]:
                    q = A[i][col] // A[pr][col]
                    A[i] = [a - q * b for a, b in zip(A[i], A[pr])]
                    if A[i][col]:
                        done = False
            if done:
                break
        if pr < len(A) and A[pr][col] != 0:
            if A[pr][col] < 0:
                A[pr] = [-a for a in A[pr]]
            p = A[pr][col]
            for j in range(pr):
                q = A[j][col] // p
                if q:
                    A[j] = [a - q * b for a, b in zip(A[j], A[pr])]
            pr += 1
    return [r for r in A if any(r)]


def _integer_kernel(M: Sequence[Sequence[int]], m: int) -> list[list[int]]:
    """Lattice basis of {u in Z^m : M u = 0} (rows of the result)."""
    r = len(M)
    aug = [[M[i][j] for i in range(r)] + [1 if k == j else 0 for k in range(m)] for j in range(m)]
    pr = 0
    for col in range(r):
        while True:
            nz = [i for i in range(pr, m) if aug[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(aug[i][col]))
            aug[pr], aug[piv] = aug[piv], aug[pr]
            done = True
            for i in range(pr + 1, m):
                if aug[i][col]:
                    q = aug[i][col] // aug[pr][col]
                    aug[i] = [a - q * b for a, b in zip(aug[i], aug[pr])]
                    if aug[i][col]:
                        done = False
            if done:
                break
        if pr < m and aug[pr][col] != 0:
            pr += 1
    return [row[r:] for row in aug[pr:]]


def _det(M: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    A = [[Fraction(v) for v in row] for row in M]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if A[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if sw is None:
                return Fraction(0)
            A[k], A[sw] = A[sw], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def _det_mod2(M: Sequence[Sequence[int]]) -> int:
    """Determinant parity by elimination over GF(2)."""
    A = [[v & 1 for v in row] for row in M]
    n = len(A)
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c]), None)
        if piv is None:
            return 0
        A[c], A[piv] = A[piv], A[c]
        for i in range(c + 1, n):
            if A[i][c]:
                A[i] = [a ^ b for a, b in zip(A[i], A[c])]
    return 1


def _solve(M: Sequence[Sequence[Fraction]], rhs: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """M X = rhs over Q for square nonsingular M (Gauss-Jordan)."""
    n = len(M)
    A = [[Fraction(v) for v in M[i]] + [Fraction(v) for v in rhs[i]] for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if A[i][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        p = A[c][c]
        A[c] = [v / p for v in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return [row[n:] for row in A]


# ---------------------------------------------------------------------------
# supports


@dataclass(frozen=True)
class Support:
    """m distinct points of Z^n, translated so that the first one is the origin."""

    n: int
    points: tuple

    def __init__(self, points: Sequence[Sequence[int]], n: int | None = None):
        pts = [tuple(int(v) for v in p) for p in points]
        if not pts:
            raise InputError("empty support")
        dim = len(pts[0]) if n is None else int(n)
        if any(len(p) != dim for p in pts):
            raise InputError("all points must have n coordinates")
        if dim < 1:
            raise InputError("n must be positive")
        if len(set(pts)) != len(pts):
            raise InputError("support points must be distinct")
        origin = pts[0]
        pts = tuple(tuple(a - b for a, b in zip(p, origin)) for p in pts)
        object.__setattr__(self, "n", dim)
        object.__setattr__(self, "points", pts)

    @property
    def m(self) -> int:
        return len(self.points)

    def to_json(self):
        return {"n": self.n, "points": [list(p) for p in self.points]}

    @classmethod
    def from_json(cls, obj) -> "Support":
        try:
            return cls(obj["points"], obj.get("n"))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed Support JSON: {exc}") from exc


def _as_support(A) -> Support:
    return A if isinstance(A, Support) else Support(A)


def affine_generation_check(A) -> bool:
    """Whether the differences of the points span Z^n as a lattice."""
    A = _as_support(A)
    diffs = [list(p) for p in A.points[1:]]
    if not diffs:
        return False
    H = _hnf_rows(diffs)
    return len(H) == A.n and all(H[i][j] == (1 if i == j else 0) for i in range(A.n) for j in range(A.n))


def genericity_check(A) -> bool:
    """Whether every (n+1)-subset spans a simplex of positive volume."""
    A = _as_support(A)
    for sub in combinations(A.points, A.n + 1):
        M = [[1, *p] for p in sub]
        if _det(M) == 0:
            return False
    return True


def gale_dual(A) -> list[list[int]]:
    """Integer m x (m-n-1) matrix whose columns span {u : sum u = 0, A u = 0} over Z.

    Columns are the rows of the Hermite normal form of the kernel lattice.
    """
    A = _as_support(A)
    M = [[1] * A.m] + [[p[i] for p in A.points] for i in range(A.n)]
    ker = _hnf_rows(_integer_kernel(M, A.m))
    k = A.m - A.n - 1
    if k < 1 or len(ker) != k:
        raise RankDeficient(f"kernel has rank {len(ker)}, expected m - n - 1 = {k} >= 1")
    B = [[ker[j][i] for j in range(k)] for i in range(A.m)]
    for row in M:
        for j in range(k):
            if sum(row[i] * B[i][j] for i in range(A.m)) != 0:
                raise AssertionError("Gale dual fails the kernel identity")
    return B


def find_odd_cell(A) -> tuple[int, ...]:
    """Lexicographically first n-subset C of 1..m-1 with det A_C odd."""
    A = _as_support(A)
    if not affine_generation_check(A):
        raise NotAffinelyGenerating("support does not affinely generate Z^n")
    for C in combinations(range(1, A.m), A.n):
        cols = [[A.points[c][i] for c in C] for i in range(A.n)]
        if _det_mod2(cols):
            if _det(cols).numerator % 2 == 0:
                raise AssertionError("parity check disagrees with the exact determinant")
            return C
    raise NotAffinelyGenerating("no odd cell found")


# ---------------------------------------------------------------------------
# frames and the reduction map


@dataclass(frozen=True)
class GaleFrame:
    support: Support
    B: tuple  # m rows, k columns
    odd_cell: tuple
    complement: tuple  # C', the indices outside {0} and C, in increasing order
    W: tuple  # m x k rational exponent matrix of the reduction map
    chart: int  # homogeneous coordinate of lambda fixed to 1

    @property
    def k(self) -> int:
        return len(self.B[0])

    @property
    def m(self) -> int:
        return len(self.B)

    def form(self, i: int) -> tuple:
        """Coefficient vector of the linear form l_i(lambda) = (B lambda)_i."""
        return self.B[i]

    def exponents(self) -> tuple:
        """k x m matrix b with psi_j = prod_i l_i ** b[j][i]."""
        return tuple(tuple(self.W[i][j] for i in range(self.m)) for j in range(self.k))

    def homogenize(self, lam: Sequence) -> tuple:
        lam = tuple(to_rational(v) for v in lam)
        if len(lam) == self.k:
            return lam
        if len(lam) == self.k - 1:
            return lam[: self.chart] + (Fraction(1),) + lam[self.chart :]
        raise InputError(f"lambda needs {self.k - 1} (affine) or {self.k} (homogeneous) entries")

    def forms_at(self, lam: Sequence) -> tuple:
        lam = self.homogenize(lam)
        return tuple(sum(b * l for b, l in zip(row, lam)) for row in self.B)

    def to_json(self):
        return {
            "support": self.support.to_json(),
            "B": [list(r) for r in self.B],
            "odd_cell": list(self.odd_cell),
            "complement": list(self.complement),
            "W": [[str(v) for v in r] for r in self.W],
            "chart": self.chart,
        }


def gale_frame(A) -> GaleFrame:
    A = _as_support(A)
    B = gale_dual(A)
    C = find_odd_cell(A)
    Cp = tuple(i for i in range(1, A.m) if i not in C)
    AC = [[A.points[c][i] for c in C] for i in range(A.n)]
    ACp = [[A.points[c][i] for c in Cp] for i in range(A.n)]
    E = [[-v for v in row] for row in _solve(AC, ACp)]  # n x k
    k = len(Cp)
    W = [[Fraction(0)] * k for _ in range(A.m)]
    for j, c in enumerate(Cp):
        W[c][j] = Fraction(1)
        for r, ci in enumerate(C):
            W[ci][j] = E[r][j]
        W[0][j] = -1 - sum(E[r][j] for r in range(A.n))
    for j in range(k):
        for v in (W[i][j] for i in range(A.m)):
            if v.denominator % 2 == 0:
                raise AssertionError("odd cell produced an even denominator")
    return GaleFrame(A, tuple(tuple(r) for r in B), C, Cp, tuple(tuple(r) for r in W), chart=k - 1)


@dataclass(frozen=True)
class ReducedPoint:
    coords: tuple  # DyadicInterval per coordinate
    exact: tuple | None = None  # Fractions when every exponent is an integer

    def to_json(self):
        out = {"coords": [c.to_json() for c in self.coords]}
        if self.exact is not None:
            out["exact"] = [str(v) for v in self.exact]
        return out

    def overlaps(self, other: "ReducedPoint") -> bool:
        return all(a.overlaps(b) for a, b in zip(self.coords, other.coords))


def signed_power(y: Fraction, e: Fraction, prec: int) -> DyadicInterval:
    """Real y**e for an exponent with odd denominator: sign(y)**num * |y|**e."""
    if y == 0:
        raise ZeroCoordinate("zero coordinate")
    if e.denominator % 2 == 0 and y < 0:
        raise InputError("even root of a negative number")
    mag = interval_pow(rational_enclosure(abs(y), prec + 8), e).with_precision(prec)
    if y < 0 and e.numerator % 2:
        return -mag
    return mag


def _reduce(values: Sequence[Fraction], W, k: int, prec: int, zero_error) -> ReducedPoint:
    for v in values:
        if v == 0:
            raise zero_error("a coordinate vanishes")
    integral = all(w.denominator == 1 for row in W for w in row)
    coords = []
    exact = [] if integral else None
    for j in range(k):
        acc = rational_enclosure(1, prec)
        ex = Fraction(1)
        for i, v in enumerate(values):
            w = W[i][j]
            if w == 0:
                continue
            if integral:
                ex *= v ** int(w)
            else:
                acc = acc * signed_power(v, w, prec)
        if integral:
            exact.append(ex)
            coords.append(rational_enclosure(ex, prec))
        else:
            coords.append(acc)
    return ReducedPoint(tuple(coords), tuple(exact) if exact is not None else None)


def gamma_reduce(delta: Sequence, frame: GaleFrame, precision_bits: int | None = None) -> ReducedPoint:
    """Gamma(delta)_j = delta_{C'_j}/delta_0 * prod_{i in C} (delta_i/delta_0)^{E_ij}."""
    prec = precision_bits or default_precision()
    delta = [to_rational(v) for v in delta]
    if len(delta) != frame.m:
        raise InputError(f"delta needs {frame.m} entries")
    return _reduce(delta, frame.W, frame.k, prec, ZeroCoordinate)


def horn_kapranov_witness(frame: GaleFrame, lam: Sequence, t: Sequence):
    """Coefficients c_i = u_i t^{a_i} (u = B lambda) and the singular point t^{-1}."""
    u = frame.forms_at(lam)
    if any(v == 0 for v in u):
        raise ZeroU("lambda lies on a coordinate hyperplane of the arrangement")
    t = [to_rational(v) for v in t]
    A = frame.support
    if len(t) != A.n or any(v == 0 for v in t):
        raise InputError(f"t needs {A.n} nonzero entries")
    coeffs = []
    for ui, a in zip(u, A.points):
        c = ui
        for tj, aj in zip(t, a):
            c *= tj**aj
        coeffs.append(c)
    x = tuple(1 / v for v in t)
    return tuple(coeffs), x


def singular_residuals(support, coeffs: Sequence[Fraction], x: Sequence[Fraction]) -> tuple:
    """(f(x), x_1 df/dx_1, ..., x_n df/dx_n) exactly."""
    A = _as_support(support)
    terms = []
    for c, a in zip(coeffs, A.points):
        v = to_rational(c)
        for xj, aj in zip(x, a):
            v *= to_rational(xj) ** aj
        terms.append(v)
    out = [sum(terms)]
    for j in range(A.n):
        out.append(sum(v * a[j] for v, a in zip(terms, A.points)))
    return tuple(out)


def psi(frame: GaleFrame, lam: Sequence, precision_bits: int | None = None, debug: bool | None = None) -> ReducedPoint:
    """psi_j(lambda) = prod_i l_i(lambda) ** b_{j,i}."""
    prec = precision_bits or default_precision()
    forms = frame.forms_at(lam)
    if any(v == 0 for v in forms):
        raise OnArrangement("a linear form vanishes at lambda")
    out = _reduce(forms, frame.W, frame.k, prec, OnArrangement)
    if debug is None:
        debug = bool(os.environ.get("FEWNOMIAL_DEBUG"))
    if debug:
        other = gamma_reduce(forms, frame, prec)
        if not out.overlaps(other):
            raise AssertionError("psi disagrees with gamma_reduce")
    return out
