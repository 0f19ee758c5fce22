"""Exact and precision-tracked square matrices over K."""

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import ContextError, InputError, PrecisionError
from .field import INF, PADIC, Valuation


@dataclass(frozen=True)
class RationalMatrix:
    """Square matrix of exact scalars (Fractions, or rational functions over F_p)."""

    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) if isinstance(x, int) else x for x in r) for r in self.entries)
        if not rows:
            raise InputError("matrix must have at least one row")
        n = len(rows)
        for r in rows:
            if len(r) != n:
                raise InputError(f"matrix is not square: row of length {len(r)} in a {n}-row matrix")
        object.__setattr__(self, "entries", rows)

    @property
    def n(self):
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __iter__(self):
        return iter(self.entries)

    def scaled(self, alpha):
        return RationalMatrix(tuple(tuple(alpha * x for x in row) for row in self.entries))

    def to_json(self):
        return {"n": self.n, "entries": [[str(x) for x in row] for row in self.entries]}


def parse_matrix(text, ctx):
    """Parse ``{"n": int, "entries": [[str]]}`` (JSON text or an already-loaded dict)."""
    if isinstance(text, (str, bytes)):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed matrix JSON: {exc}") from None
    else:
        data = text
    if not isinstance(data, dict) or "entries" not in data:
        raise InputError('matrix JSON must be an object with "n" and "entries"')
    rows = data["entries"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError('"entries" must be a list of rows')
    n = data.get("n", len(rows))
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InputError('"n" must be a positive integer')
    if len(rows) != n or any(len(r) != n for r in rows):
        raise InputError(f"ragged or mis-sized matrix: expected {n}x{n}")
    return RationalMatrix(tuple(tuple(ctx.parse_scalar(x) for x in row) for row in rows))


def det_exact(M):
    """Determinant over the exact field by Gaussian elimination (used as a cross-check)."""
    rows = [list(r) for r in M.entries]
    n = len(rows)
    det = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if rows[i][k]), None)
        if piv is None:
            return 0 * rows[0][0]
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            det = -det
        det = det * rows[k][k]
        inv = 1 / rows[k][k]
        for i in range(k + 1, n):
            f = rows[i][k] * inv
            if f:
                for j in range(k, n):
                    rows[i][j] = rows[i][j] - f * rows[k][j]
    return det


class ValVector:
    """A column vector of valued elements."""

    __slots__ = ("ctx", "entries")

    def __init__(self, ctx, entries):
        self.ctx = ctx
        self.entries = tuple(entries)

    @property
    def n(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def scale(self, c):
        return ValVector(self.ctx, (c * x for x in self.entries))

    def __sub__(self, other):
        return ValVector(self.ctx, (a - b for a, b in zip(self.entries, other.entries)))

    def norm(self):
        return _min_ord(self.entries)

    def lead_index(self):
        """Lowest index of a coordinate of maximal absolute value, or None."""
        best = None
        for i, x in enumerate(self.entries):
            if x.unit is not None and (best is None or x.valuation < self.entries[best].valuation):
                best = i
        return best

    def canonical(self):
        """Rescale so the first max-abs coordinate is exactly 1."""
        i = self.lead_index()
        if i is None:
            raise PrecisionError("cannot normalize a vector that is zero at precision")
        inv = self.entries[i].inverse()
        out = [x * inv for x in self.entries]
        out[i] = self.ctx.one
        return ValVector(self.ctx, out)

    def reduce_to(self, ctx):
        return ValVector(ctx, (x.reduce_to(ctx) for x in self.entries))

    def to_json(self):
        return [x.to_json() for x in self.entries]


def _min_ord(elements):
    """Min valuation over entries; exact only if attained by a nonzero entry."""
    best_nonzero = INF
    best_bound = INF
    for x in elements:
        if x.unit is not None:
            best_nonzero = min(best_nonzero, x.valuation)
        else:
            best_bound = min(best_bound, x.absprec)
    if best_nonzero is not INF and best_nonzero <= best_bound:
        return Valuation(best_nonzero, True)
    value = min(best_nonzero, best_bound)
    return Valuation(value, value is INF and best_bound is INF)


def _dot(ctx, xs, ys):
    """Sum of products, accumulated in one residue computation where possible."""
    if ctx.kind != PADIC:
        acc = ctx.zero()
        for x, y in zip(xs, ys):
            acc = acc + x * y
        return acc
    # p-adic fast path: form each product's (valuation, unit, absprec) and
    # add them as integers aligned at the smallest valuation
    terms = []
    absprec = INF
    for x, y in zip(xs, ys):
        xu, yu = x.unit, y.unit
        if xu is None or yu is None:
            if xu is None and yu is None:
                bound = x.absprec + y.absprec
            elif xu is None:
                bound = x.absprec + y.valuation
            else:
                bound = y.absprec + x.valuation
            absprec = min(absprec, bound)
            continue
        v = x.valuation + y.valuation
        k = min(x.absprec - x.valuation, y.absprec - y.valuation)
        absprec = min(absprec, v + k)
        terms.append((v, xu * yu))
    if not terms:
        return ctx.zero(absprec)
    m = min(v for v, _ in terms)
    if m >= absprec:
        return ctx.zero(absprec)
    ring = ctx._ring
    total = 0
    for v, u in terms:
        total += u * ring.modulus(v - m)
    return ctx.from_residue(m, total, absprec - m)


class ValMatrix:
    """Square matrix of valued elements sharing one field context."""

    __slots__ = ("ctx", "rows")

    def __init__(self, ctx, rows):
        self.ctx = ctx
        self.rows = tuple(tuple(r) for r in rows)
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise ContextError("ValMatrix must be square")

    @classmethod
    def from_rational(cls, M, ctx):
        return cls(ctx, ((ctx.embed(x) for x in row) for row in M.entries))

    @classmethod
    def identity(cls, ctx, n):
        one, zero = ctx.one, ctx.zero()
        return cls(ctx, ((one if i == j else zero for j in range(n)) for i in range(n)))

    @property
    def n(self):
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def _check(self, other):
        if self.n != other.n:
            raise ContextError(f"dimension mismatch: {self.n} vs {other.n}")
        if not self.ctx.same_field(other.ctx):
            raise ContextError(f"field mismatch: {self.ctx.name} vs {other.ctx.name}")

    def __matmul__(self, other):
        if isinstance(other, ValVector):
            return ValVector(self.ctx, (_dot(self.ctx, row, other.entries) for row in self.rows))
        return mat_mul(self, other)

    def __add__(self, other):
        self._check(other)
        return ValMatrix(self.ctx, ((a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __sub__(self, other):
        self._check(other)
        return ValMatrix(self.ctx, ((a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def scale(self, c):
        return scale(self, c)

    def norm(self):
        return mat_norm(self)

    def trace(self):
        acc = self.ctx.zero()
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return acc

    def entries(self):
        for row in self.rows:
            yield from row

    def min_absprec(self):
        return min((x.absprec for x in self.entries()), default=INF)

    def all_zero(self):
        return all(x.unit is None for x in self.entries())

    def reduce_to(self, ctx):
        return ValMatrix(ctx, ((x.reduce_to(ctx) for x in row) for row in self.rows))

    def to_json(self):
        return [[x.to_json() for x in row] for row in self.rows]


def mat_norm(M):
    """Norm of M as a valuation: the minimum entry valuation."""
    return _min_ord(M.entries())


def mat_mul(A, B):
    A._check(B)
    ctx = A.ctx
    cols = list(zip(*B.rows))
    return ValMatrix(ctx, ((_dot(ctx, row, col) for col in cols) for row in A.rows))


def scale(M, c):
    c = M.rows[0][0]._coerce(c)
    return ValMatrix(M.ctx, ((c * x for x in row) for row in M.rows))


def common_disc_radius(B, alpha, ctx):
    """min ord(b_ij/alpha - 1): entries of B lie in D(alpha, |alpha|*|pi|^result)."""
    alpha = ctx.exact(alpha)
    if not alpha:
        raise InputError("rescaling factor must be nonzero")
    return min(ctx.exact_ord(ctx.exact(b) / alpha - 1) for row in B for b in row)


def rescale_to_unit_disc(B, alpha, ctx):
    """Return alpha^-1 * B after checking every entry lies in a disc D(alpha, r) with r < |alpha|.

    Eigenvalues of the result are those of B divided by alpha; eigenvectors
    and the limit projection are unchanged.
    """
    radius = common_disc_radius(B, alpha, ctx)
    if radius < 1:
        raise InputError(f"entries do not lie in a disc around {alpha} that excludes 0")
    return B.scaled(1 / ctx.exact(alpha))


def solve_kernel(M):
    """A kernel vector of M, normalized so its first max-abs coordinate is 1.

    Gaussian elimination with full pivoting on the entry of least valuation.
    Raises PrecisionError if M is invertible at the working precision, or if
    the residual ``M x`` cannot be certified beyond the scale of M.
    """
    ctx = M.ctx
    n = M.n
    rows = [list(r) for r in M.rows]
    cols = list(range(n))
    rank = 0
    for k in range(n):
        best = None
        for i in range(k, n):
            row = rows[i]
            for j in range(k, n):
                x = row[j]
                if x.unit is not None and (best is None or x.valuation < best[2]):
                    best = (i, j, x.valuation)
        if best is None:
            break
        i, j, _ = best
        rows[k], rows[i] = rows[i], rows[k]
        if j != k:
            for row in rows:
                row[k], row[j] = row[j], row[k]
            cols[k], cols[j] = cols[j], cols[k]
        pinv = rows[k][k].inverse()
        for i in range(k + 1, n):
            if rows[i][k].unit is None:
                rows[i][k] = ctx.zero()
                continue
            f = rows[i][k] * pinv
            rows[i][k] = ctx.zero()
            for j in range(k + 1, n):
                rows[i][j] = rows[i][j] - f * rows[k][j]
        rank += 1
    if rank == n:
        raise PrecisionError("matrix is invertible at working precision; no kernel vector")

    # free variable: the non-pivot column with the lowest original index
    free_pos = min(range(rank, n), key=lambda c: cols[c])
    y = [ctx.zero()] * n
    y[free_pos] = ctx.one
    for i in range(rank - 1, -1, -1):
        acc = _dot(ctx, rows[i][i + 1 :], y[i + 1 :])
        y[i] = -(acc / rows[i][i])
    x = [None] * n
    for pos, c in enumerate(cols):
        x[c] = y[pos]
    vec = ValVector(ctx, x).canonical()

    residual = (M @ vec).norm()
    scale = M.norm()
    if (residual.exact and residual.value is not INF) or (scale.exact and scale.value is not INF and residual.value <= scale.value):
        raise PrecisionError(f"kernel residual only certified to {residual}; precision exhausted")
    return vec
