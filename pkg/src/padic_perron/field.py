"""Finite-precision arithmetic in a complete discretely valued field.

Two instances share one element type: the p-adic numbers Q_p (uniformizer
p) and formal Laurent series F_p((t)) (uniformizer t).  An element is held
as ``pi^valuation * unit`` where the unit is known modulo ``pi^precision``.
Zero is special: it carries no unit, only a lower bound on its valuation
(``absprec``), because a computed zero is only zero "up to" that bound.
"""

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

from . import laurent
from .errors import ContextError, InexactZeroError, InputError

PADIC = "p-adic"
LAURENT = "laurent-series"


class _Infinity:
    """Valuation of zero.  Absorbs addition, compares above every integer."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("padic_perron.INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise ArithmeticError("inf - inf is undefined")
        return self

    def __mul__(self, other):
        if other == 0:
            return 0
        if other < 0:
            raise ArithmeticError("negative multiple of inf")
        return self

    __rmul__ = __mul__


INF = _Infinity()

ValuationValue = Union[int, _Infinity]


class Valuation(NamedTuple):
    """An ord value; ``exact=False`` means only a lower bound is known."""

    value: ValuationValue
    exact: bool = True

    def __str__(self):
        return str(self.value) if self.exact else f">={self.value}"

    def to_json(self):
        return {"value": valuation_json(self.value), "exact": self.exact}


def valuation_json(v):
    return "inf" if v is INF else v


def valuation_from_json(v):
    return INF if v == "inf" else v


class Verdict(enum.Enum):
    """Outcome of a test that finite precision may leave open."""

    TRUE = "true"
    FALSE = "false"
    UNDECIDABLE = "undecidable"

    def __bool__(self):
        return self is Verdict.TRUE


def is_prime(p):
    if not isinstance(p, int) or p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def int_ord(n, p):
    """p-adic valuation of an integer (INF for 0)."""
    if n == 0:
        return INF
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text):
    """Parse ``"a/b"`` or ``"a"`` (optional sign) into a Fraction."""
    if isinstance(text, bool):
        raise InputError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    m = _RATIONAL.match(str(text))
    if not m:
        raise InputError(f"not a rational: {text!r}")
    num, den = m.groups()
    den = int(den) if den is not None else 1
    if den == 0:
        raise InputError(f"zero denominator in {text!r}")
    return Fraction(int(num), den)


class _IntegerResidues:
    """Z/p^k arithmetic; residues are ints in [0, p^k)."""

    def __init__(self, p):
        self.p = p
        self._powers = [1]

    def modulus(self, k):
        powers = self._powers
        while len(powers) <= k:
            powers.append(powers[-1] * self.p)
        return powers[k]

    def reduce(self, x, k):
        return x % self.modulus(k)

    def add(self, x, y, k):
        return (x + y) % self.modulus(k)

    def sub(self, x, y, k):
        return (x - y) % self.modulus(k)

    def neg(self, x, k):
        return (-x) % self.modulus(k)

    def mul(self, x, y, k):
        return x * y % self.modulus(k)

    def shift(self, x, e):
        return x * self.modulus(e)

    def inv(self, u, k):
        return pow(u, -1, self.modulus(k))

    def split(self, x, k):
        """Return ``(e, unit mod p^(k-e))`` for x mod p^k, or None if x = 0 mod p^k."""
        x %= self.modulus(k)
        if x == 0:
            return None
        p = self.p
        e = 0
        while x % p == 0:
            x //= p
            e += 1
        return e, x

    def digits(self, u, k):
        out = []
        p = self.p
        for _ in range(k):
            u, d = divmod(u, p)
            out.append(d)
        return out

    def format_unit(self, u):
        return str(u)


class _SeriesResidues:
    """F_p[t]/t^k arithmetic; residues are trimmed coefficient tuples."""

    def __init__(self, p):
        self.p = p

    def reduce(self, x, k):
        return laurent.trim(x[:k])

    def add(self, x, y, k):
        return laurent.padd(x[:k], y[:k], self.p)

    def sub(self, x, y, k):
        return laurent.psub(x[:k], y[:k], self.p)

    def neg(self, x, k):
        return laurent.pneg(x[:k], self.p)

    def mul(self, x, y, k):
        return laurent.pmul(x[:k], y[:k], self.p, limit=k)

    def shift(self, x, e):
        return laurent.shift(x, e)

    def inv(self, u, k):
        return laurent.series_inverse(u, k, self.p)

    def split(self, x, k):
        x = laurent.trim(x[:k])
        e = laurent.low_order(x)
        if e is None:
            return None
        return e, x[e:]

    def digits(self, u, k):
        return [u[i] if i < len(u) else 0 for i in range(k)]

    def format_unit(self, u):
        return laurent.format_poly(u)


@dataclass(frozen=True)
class FieldContext:
    """The ambient field K together with the working precision N.

    ``precision`` counts significant uniformizer digits kept per element.
    """

    kind: str
    p: int
    precision: int

    def __post_init__(self):
        if self.kind not in (PADIC, LAURENT):
            raise InputError(f"unknown field kind {self.kind!r}")
        if not is_prime(self.p):
            raise InputError(f"{self.p} is not prime")
        if not isinstance(self.precision, int) or self.precision < 1:
            raise InputError("working precision must be a positive integer")
        ring = _IntegerResidues(self.p) if self.kind == PADIC else _SeriesResidues(self.p)
        object.__setattr__(self, "_ring", ring)

    @classmethod
    def padic(cls, p, precision=64):
        return cls(PADIC, p, precision)

    @classmethod
    def laurent(cls, p, precision=64):
        return cls(LAURENT, p, precision)

    @property
    def symbol(self):
        return str(self.p) if self.kind == PADIC else "t"

    @property
    def name(self):
        return f"Q_{self.p}" if self.kind == PADIC else f"F_{self.p}((t))"

    def with_precision(self, precision):
        return FieldContext(self.kind, self.p, precision)

    def same_field(self, other):
        return self.kind == other.kind and self.p == other.p

    # -- exact scalars: Fraction for Q_p, RationalFunction for F_p((t)) --

    def parse_scalar(self, text):
        if self.kind == PADIC:
            return parse_rational(text)
        if isinstance(text, int) and not isinstance(text, bool):
            return laurent.RationalFunction.constant(text, self.p)
        return laurent.parse_rational_function(text, self.p)

    def exact(self, q):
        """Coerce an int / Fraction / RationalFunction to this field's exact type."""
        if self.kind == PADIC:
            if isinstance(q, (int, Fraction)):
                return Fraction(q)
            raise ContextError(f"cannot use {q!r} as an element of {self.name}")
        if isinstance(q, laurent.RationalFunction):
            if q.p != self.p:
                raise ContextError("rational function over a different prime")
            return q
        if isinstance(q, int):
            return laurent.RationalFunction.constant(q, self.p)
        if isinstance(q, Fraction):
            if q.denominator % self.p == 0:
                raise ZeroDivisionError(f"{q} has no image in F_{self.p}")
            return laurent.RationalFunction.constant(q.numerator * pow(q.denominator, -1, self.p), self.p)
        raise ContextError(f"cannot use {q!r} as an element of {self.name}")

    def exact_ord(self, q):
        """Exact valuation of an exact scalar."""
        q = self.exact(q)
        if self.kind == PADIC:
            if q == 0:
                return INF
            return int_ord(q.numerator, self.p) - int_ord(q.denominator, self.p)
        v = q.ord_t()
        return INF if v is None else v

    def int_ord(self, n):
        """Valuation of the integer n viewed inside K."""
        return self.exact_ord(n)

    def format_exact(self, q):
        return str(self.exact(q))

    # -- valued elements --

    def zero(self, absprec=INF):
        return ValuedElement(self, INF, None, absprec)

    @property
    def one(self):
        return self.embed(1)

    def embed(self, q):
        """Image of an exact scalar at full working precision."""
        q = self.exact(q)
        N = self.precision
        ring = self._ring
        if not q:
            return self.zero()
        if self.kind == PADIC:
            p = self.p
            a, b = int_ord(q.numerator, p), int_ord(q.denominator, p)
            num = q.numerator // p**a
            den = q.denominator // p**b
            unit = ring.mul(num, ring.inv(den % ring.modulus(N), N), N)
            return ValuedElement(self, a - b, unit, a - b + N)
        a, b = laurent.low_order(q.num), laurent.low_order(q.den)
        num, den = q.num[a:], q.den[b:]
        unit = ring.mul(num, ring.inv(den, N), N)
        return ValuedElement(self, a - b, unit, a - b + N)

    def from_residue(self, base, residue, k):
        """Element ``pi^base * residue`` where residue is known mod pi^k."""
        split = self._ring.split(residue, k)
        if split is None:
            return self.zero(base + k)
        e, unit = split
        return ValuedElement(self, base + e, unit, base + k)


class ValuedElement:
    """``pi^valuation * unit`` with the unit known to ``precision`` digits.

    Equality (``==``) is structural: same context, valuation, unit and
    precision.  Use :meth:`is_zero` or :func:`in_disc` for mathematical
    questions.
    """

    __slots__ = ("ctx", "valuation", "unit", "absprec")

    def __init__(self, ctx, valuation, unit, absprec):
        self.ctx = ctx
        self.valuation = valuation
        self.unit = unit
        self.absprec = absprec

    @property
    def precision(self):
        """Relative precision: number of certified significant digits."""
        if self.unit is None:
            return 0
        return self.absprec - self.valuation

    def is_zero(self):
        return self.unit is None

    def is_exact_zero(self):
        return self.unit is None and self.absprec is INF

    def _coerce(self, other):
        if isinstance(other, ValuedElement):
            if other.ctx is not self.ctx and not other.ctx.same_field(self.ctx):
                raise ContextError(f"mixing elements of {self.ctx.name} and {other.ctx.name}")
            return other
        return self.ctx.embed(other)

    def truncate(self, absprec):
        """Forget digits at and beyond pi^absprec."""
        if absprec >= self.absprec:
            return self
        if self.unit is None or absprec <= self.valuation:
            return self.ctx.zero(absprec)
        k = absprec - self.valuation
        return ValuedElement(self.ctx, self.valuation, self.ctx._ring.reduce(self.unit, k), absprec)

    def reduce_to(self, ctx):
        """Move into ``ctx`` (same field), capping relative precision at ``ctx.precision``."""
        if not ctx.same_field(self.ctx):
            raise ContextError(f"cannot move {self.ctx.name} element into {ctx.name}")
        if self.unit is None:
            return ValuedElement(ctx, INF, None, self.absprec)
        k = min(self.precision, ctx.precision)
        return ValuedElement(ctx, self.valuation, ctx._ring.reduce(self.unit, k), self.valuation + k)

    def __add__(self, other):
        b = self._coerce(other)
        a = self
        ctx = a.ctx
        A = min(a.absprec, b.absprec)
        if a.unit is None:
            return b.truncate(A) if b.unit is not None else ctx.zero(A)
        if b.unit is None:
            return a.truncate(A)
        m = min(a.valuation, b.valuation)
        if m >= A:
            return ctx.zero(A)
        k = A - m
        ring = ctx._ring
        s = ring.add(ring.shift(a.unit, a.valuation - m), ring.shift(b.unit, b.valuation - m), k)
        return ctx.from_residue(m, s, k)

    __radd__ = __add__

    def __neg__(self):
        if self.unit is None:
            return self
        return ValuedElement(self.ctx, self.valuation, self.ctx._ring.neg(self.unit, self.precision), self.absprec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        b = self._coerce(other)
        a = self
        ctx = a.ctx
        if a.unit is None or b.unit is None:
            if a.unit is None and b.unit is None:
                return ctx.zero(a.absprec + b.absprec)
            z, x = (a, b) if a.unit is None else (b, a)
            return ctx.zero(z.absprec + x.valuation)
        k = min(a.precision, b.precision)
        unit = ctx._ring.mul(a.unit, b.unit, k)
        v = a.valuation + b.valuation
        return ValuedElement(ctx, v, unit, v + k)

    __rmul__ = __mul__

    def inverse(self):
        if self.unit is None:
            raise InexactZeroError(f"cannot invert zero-at-precision element {self!r}")
        k = self.precision
        return ValuedElement(self.ctx, -self.valuation, self.ctx._ring.inv(self.unit, k), k - self.valuation)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __eq__(self, other):
        if not isinstance(other, ValuedElement):
            return NotImplemented
        return (
            self.ctx.same_field(other.ctx)
            and self.valuation == other.valuation
            and self.unit == other.unit
            and self.absprec == other.absprec
        )

    def __hash__(self):
        return hash((self.ctx.kind, self.ctx.p, self.valuation, self.unit, self.absprec))

    def __repr__(self):
        return f"ValuedElement({self.ctx.name}, {render(self, 'unit-val')})"

    def __str__(self):
        return render(self, "digits")

    def to_json(self):
        if self.unit is None:
            return {"unit": None, "val": "inf", "precision": 0, "absprec": valuation_json(self.absprec)}
        return {
            "unit": self.ctx._ring.format_unit(self.unit),
            "val": self.valuation,
            "precision": self.precision,
        }


@dataclass(frozen=True)
class Disc:
    """Closed disc {x : ord(x - center) >= radius}."""

    center: object
    radius: ValuationValue


def embed_rational(q, ctx):
    return ctx.embed(q)


def ord_pi(a):
    """Valuation of ``a``; a lower bound (``exact=False``) for zero-at-precision."""
    if a.unit is not None:
        return Valuation(a.valuation, True)
    return Valuation(a.absprec, a.absprec is INF)


def in_disc(x, disc):
    diff = x - disc.center
    if diff.unit is not None:
        return Verdict.TRUE if diff.valuation >= disc.radius else Verdict.FALSE
    if diff.absprec >= disc.radius:
        return Verdict.TRUE
    return Verdict.UNDECIDABLE


# -- rendering --

_SUPERSCRIPT = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")


def superscript(n):
    return str(n).translate(_SUPERSCRIPT)


def _big_o(ctx, absprec):
    return f"O({ctx.symbol}{superscript(absprec)})"


def rational_guess(a, height=10**6):
    """Bounded-height rational reconstruction of ``a``, or None.

    For Q_p the answer has numerator and denominator at most ``height``
    (and the bound is shrunk so the answer is unique at this precision).
    For F_p((t)) ``height`` is ignored; degrees are bounded by half the
    precision.
    """
    ctx = a.ctx
    if a.unit is None:
        return None
    k = a.precision
    if ctx.kind == PADIC:
        m = ctx._ring.modulus(k)
        bound = min(height, math.isqrt(m // 2))
        r0, r1 = m, a.unit
        t0, t1 = 0, 1
        while r1 > bound:
            q = r0 // r1
            r0, r1 = r1, r0 - q * r1
            t0, t1 = t1, t0 - q * t1
        if t1 == 0 or abs(t1) > bound or r1 == 0:
            return None
        if t1 % ctx.p == 0:
            return None
        q = Fraction(r1, t1)
        if q.numerator % ctx.p == 0 or abs(q.numerator) > bound or q.denominator > bound:
            return None
        return q * Fraction(ctx.p) ** a.valuation
    found = laurent.reconstruct_series(a.unit, k, ctx.p)
    if found is None:
        return None
    num, den = found
    return laurent.RationalFunction(ctx.p, num, den) * laurent.RationalFunction.t(ctx.p) ** a.valuation


def render(a, style="digits", height=10**6):
    """Text form of an element.

    ``digits``: ``d0·p⁰ + d1·p¹ + … + O(p^k)`` listing the nonzero digits.
    ``unit-val``: ``(u, v, k)``.
    ``rational-guess``: a reconstructed rational tagged as a guess.
    """
    ctx = a.ctx
    if a.unit is None:
        return "0" if a.absprec is INF else _big_o(ctx, a.absprec)
    if style == "unit-val":
        return f"({ctx._ring.format_unit(a.unit)}, {a.valuation}, {a.precision})"
    if style == "digits":
        terms = []
        for i, d in enumerate(ctx._ring.digits(a.unit, a.precision)):
            if d:
                terms.append(f"{d}·{ctx.symbol}{superscript(a.valuation + i)}")
        terms.append(_big_o(ctx, a.absprec))
        return " + ".join(terms)
    if style == "rational-guess":
        q = rational_guess(a, height)
        if q is None:
            return "no rational guess"
        return f"{q} (guess)"
    raise ValueError(f"unknown render style {style!r}")
