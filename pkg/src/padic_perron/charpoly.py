"""Exact characteristic polynomials, Newton polygons and coefficient bounds."""

from dataclasses import dataclass
from fractions import Fraction

from .errors import HypothesisError
from .field import INF, valuation_json
from .linalg import det_exact


@dataclass(frozen=True)
class CharPoly:
    """Monic polynomial x^n + c_{n-1} x^{n-1} + ... + c_0 with exact coefficients.

    ``coeffs`` holds ``(c_0, ..., c_{n-1})``; the leading 1 is implicit.
    """

    coeffs: tuple

    @property
    def degree(self):
        return len(self.coeffs)

    def all_coeffs(self):
        """Coefficients c_0..c_n including the leading 1."""
        return self.coeffs + (1,)

    def derivative_coeffs(self):
        full = self.all_coeffs()
        return tuple(i * full[i] for i in range(1, len(full)))

    @property
    def trace(self):
        return -self.coeffs[-1] if self.coeffs else 0

    @property
    def det(self):
        if not self.coeffs:
            return 1
        return (-1) ** self.degree * self.coeffs[0]

    def __call__(self, x):
        acc = 1
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self):
        terms = []
        full = self.all_coeffs()
        for i in range(len(full) - 1, -1, -1):
            c = full[i]
            if not c:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            text = str(c)
            negative = text.startswith("-")
            mag = text[1:] if negative else text
            if mono and mag == "1":
                mag = ""
            if mono and " " in mag:
                mag = f"({mag})"
            body = f"{mag}{mono}" if mag or mono else "1"
            if not terms:
                terms.append(("-" if negative else "") + body)
            else:
                terms.append(("- " if negative else "+ ") + body)
        return " ".join(terms) if terms else "0"

    def to_json(self):
        return [str(c) for c in self.coeffs]


def char_poly(A):
    """Characteristic polynomial det(xI - A), by Berkowitz's division-free recurrence.

    Builds the polynomial for the leading r x r block from the one for the
    (r-1) x (r-1) block with a lower-triangular Toeplitz product whose first
    column is (1, -a_rr, -R C, -R A_r C, ..., -R A_r^{r-1} C).
    """
    rows = A.entries
    n = len(rows)
    vect = [1, -rows[0][0]]  # x - a_00, highest degree first
    for r in range(1, n):
        row = rows[r][:r]
        col = [rows[i][r] for i in range(r)]
        toeplitz = [1, -rows[r][r]]
        block = [rows[i][:r] for i in range(r)]
        ck = col
        for _ in range(r):
            toeplitz.append(-_dot(row, ck))
            ck = [_dot(brow, ck) for brow in block]
        vect = [
            _sum(toeplitz[i - j] * vect[j] for j in range(0, min(i, r) + 1))
            for i in range(r + 2)
        ]
    # vect = [1, c_{n-1}, ..., c_0]
    return CharPoly(tuple(reversed(vect[1:])))


def _dot(xs, ys):
    return _sum(x * y for x, y in zip(xs, ys))


def _sum(items):
    acc = 0
    for x in items:
        acc = acc + x
    return acc


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of the points (i, ord c_i), with (n, 0) for the leading 1."""

    points: tuple
    vertices: tuple
    segments: tuple  # (slope: Fraction, horizontal length: int)

    @property
    def degree(self):
        return self.points[-1][0]

    def to_json(self):
        return {
            "points": [[i, valuation_json(v)] for i, v in self.points],
            "vertices": [[i, v] for i, v in self.vertices],
            "segments": [{"slope": str(s), "length": h} for s, h in self.segments],
        }


def newton_polygon(f, ctx):
    """Newton polygon of a monic polynomial; zero coefficients contribute no point."""
    ords = [ctx.exact_ord(c) for c in f.coeffs]
    points = [(i, v) for i, v in enumerate(ords) if v is not INF] + [(f.degree, 0)]
    hull = []
    for pt in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    segments = tuple(
        (Fraction(b[1] - a[1], b[0] - a[0]), b[0] - a[0]) for a, b in zip(hull, hull[1:])
    )
    all_points = tuple((i, v) for i, v in enumerate(ords)) + ((f.degree, 0),)
    return NewtonPolygon(all_points, tuple(hull), segments)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def root_valuations(pg):
    """(valuation, count) for each segment: ``count`` roots in C_K have that valuation."""
    return tuple((-slope, length) for slope, length in pg.segments)


@dataclass(frozen=True)
class BoundCertificate:
    claim: str
    required: object
    observed: object
    relation: str  # ">=" or "=="
    holds: bool

    def to_json(self):
        return {
            "claim": self.claim,
            "required": valuation_json(self.required),
            "observed": valuation_json(self.observed),
            "relation": self.relation,
            "holds": self.holds,
        }


def _certificate(claim, required, observed, relation):
    holds = observed >= required if relation == ">=" else observed == required
    return BoundCertificate(claim, required, observed, relation, holds)


def entries_near_one(A, ctx):
    """min over entries of ord(a_ij - 1); INF when every entry is exactly 1."""
    return min(ctx.exact_ord(ctx.exact(a) - 1) for row in A for a in row)


def check_det_bound(A, ctx, ell):
    """Certify ord(det A) >= ell*(n-1) for A with entries in D(1, |pi|^ell)."""
    near = entries_near_one(A, ctx)
    if near < ell:
        raise HypothesisError(f"entries are not all in D(1, |pi|^{ell}); min ord(a_ij - 1) = {near}")
    return _certificate("det-bound", ell * (A.n - 1), ctx.exact_ord(det_exact(A)), ">=")


def check_coeff_bounds(f, ctx, ell, n):
    """Certify ord(c_j) >= ell*(n-j-1) for every j, plus ord(c_{n-1}) == ord(n) when ell > ord(n)."""
    certs = [
        _certificate(f"coeff-bound({j})", ell * (n - j - 1), ctx.exact_ord(c), ">=")
        for j, c in enumerate(f.coeffs)
    ]
    ord_n = ctx.int_ord(n)
    if ell > ord_n:
        certs.append(_certificate("trace-identity", ord_n, ctx.exact_ord(f.coeffs[-1]), "=="))
    return certs
