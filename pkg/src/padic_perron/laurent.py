"""Polynomials and rational functions over F_p.

Polynomials are tuples of coefficients in ``range(p)``, lowest degree first,
with no trailing zeros; the zero polynomial is ``()``.  These serve two
roles: exact entries of matrices over F_p(t), and truncated power series
in F_p[[t]] used for the unit parts of Laurent-series elements.
"""

import re

from .errors import InputError

Poly = tuple


def trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def degree(a):
    return len(a) - 1


def low_order(a):
    """Index of the first nonzero coefficient, i.e. the t-adic order."""
    for i, c in enumerate(a):
        if c:
            return i
    return None


def padd(a, b, p):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % p
    return trim(out)


def pneg(a, p):
    return tuple((-c) % p for c in a)


def psub(a, b, p):
    return padd(a, pneg(b, p), p)


def pscale(a, c, p):
    c %= p
    if c == 0:
        return ()
    return tuple(x * c % p for x in a)


def pmul(a, b, p, limit=None):
    """Product of ``a`` and ``b``, truncated mod t^limit when given."""
    if not a or not b:
        return ()
    size = len(a) + len(b) - 1
    if limit is not None:
        size = min(size, limit)
    out = [0] * size
    for i, x in enumerate(a):
        if x == 0 or i >= size:
            continue
        for j in range(min(len(b), size - i)):
            out[i + j] += x * b[j]
    return trim([c % p for c in out])


def pdivmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = degree(b)
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(len(a) - db, 0)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k] * inv_lead % p
        if c:
            q[k - db] = c
            for j, bj in enumerate(b):
                a[k - db + j] = (a[k - db + j] - c * bj) % p
    return trim(q), trim(a[:db] if db > 0 else [])


def monic(a, p):
    if not a:
        return a
    return pscale(a, pow(a[-1], -1, p), p)


def pgcd(a, b, p):
    while b:
        a, b = b, pdivmod(a, b, p)[1]
    return monic(a, p)


def shift(a, e):
    """Multiply by t^e (e >= 0)."""
    if not a:
        return ()
    return (0,) * e + tuple(a)


def series_inverse(u, k, p):
    """Inverse of a unit power series modulo t^k."""
    inv0 = pow(u[0], -1, p)
    out = [inv0]
    for i in range(1, k):
        acc = 0
        for j in range(1, min(i, len(u) - 1) + 1):
            acc += u[j] * out[i - j]
        out.append((-acc * inv0) % p)
    return trim(out)


def format_poly(a, var="t"):
    """Render as a sum like ``1 + 2*t + t^2`` (parseable by :func:`parse_rational_function`)."""
    if not a:
        return "0"
    terms = []
    for i, c in enumerate(a):
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        else:
            mono = var if i == 1 else f"{var}^{i}"
            terms.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(terms)


class RationalFunction:
    """An element of F_p(t), kept as num/den in lowest terms with monic den."""

    __slots__ = ("p", "num", "den")

    def __init__(self, p, num, den=(1,)):
        num = trim(c % p for c in num)
        den = trim(c % p for c in den)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not num:
            den = (1,)
        else:
            g = pgcd(num, den, p)
            if g != (1,):
                num = pdivmod(num, g, p)[0]
                den = pdivmod(den, g, p)[0]
            lead = pow(den[-1], -1, p)
            num, den = pscale(num, lead, p), pscale(den, lead, p)
        self.p = p
        self.num = num
        self.den = den

    @classmethod
    def constant(cls, c, p):
        return cls(p, (c % p,))

    @classmethod
    def t(cls, p):
        return cls(p, (0, 1))

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.p != self.p:
                raise ValueError("rational functions over different primes")
            return other
        if isinstance(other, int):
            return RationalFunction.constant(other, self.p)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        if self.den == other.den:
            return RationalFunction(p, padd(self.num, other.num, p), self.den)
        num = padd(pmul(self.num, other.den, p), pmul(other.num, self.den, p), p)
        return RationalFunction(p, num, pmul(self.den, other.den, p))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(self.p, pneg(self.num, self.p), self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        return RationalFunction(p, pmul(self.num, other.num, p), pmul(self.den, other.den, p))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise ZeroDivisionError("division by the zero rational function")
        p = self.p
        return RationalFunction(p, pmul(self.num, other.den, p), pmul(self.den, other.num, p))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, e):
        if e < 0:
            return (1 / self) ** (-e)
        out = RationalFunction.constant(1, self.p)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.p, self.num, self.den))

    def ord_t(self):
        """t-adic valuation; ``None`` for zero (callers map it to infinity)."""
        if not self.num:
            return None
        return low_order(self.num) - low_order(self.den)

    def __str__(self):
        num = format_poly(self.num)
        if self.den == (1,):
            return num
        if len([c for c in self.num if c]) > 1:
            num = f"({num})"
        den = format_poly(self.den)
        if len([c for c in self.den if c]) > 1:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"RationalFunction(p={self.p}, {self})"


_TOKEN = re.compile(r"\s*(?:(\d+)|(t)|(\*\*|[-+*/^()]))")


def parse_rational_function(text, p):
    """Parse an expression in ``t`` over F_p, e.g. ``"(1+t)/(2+t^2)"`` or ``"1 + 3t"``."""
    tokens = []
    pos = 0
    text = str(text)
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise InputError(f"cannot parse {text!r} as a rational function in t")
        num, var, op = m.groups()
        if num is not None:
            tokens.append(("num", int(num)))
        elif var is not None:
            tokens.append(("t", None))
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    if not tokens:
        raise InputError("empty rational function")
    parser = _Parser(tokens, p, text)
    try:
        value = parser.expr()
    except ZeroDivisionError:
        raise InputError(f"division by zero in {text!r} over F_{p}") from None
    if parser.i != len(tokens):
        raise InputError(f"trailing input in {text!r}")
    return value


class _Parser:
    def __init__(self, tokens, p, text):
        self.tokens = tokens
        self.p = p
        self.text = text
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self):
        raise InputError(f"malformed rational function {self.text!r}")

    def expr(self):
        value = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while True:
            kind, tok = self.peek()
            if (kind, tok) in (("op", "*"), ("op", "/")):
                self.take()
                rhs = self.unary()
                value = value * rhs if tok == "*" else value / rhs
            elif kind == "t" or (kind, tok) == ("op", "("):
                value = value * self.power()  # implicit product, as in "3t" or "2(1+t)"
            else:
                return value

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            kind, tok = self.take()
            if kind != "num":
                self.fail()
            return base ** (sign * tok)
        return base

    def atom(self):
        kind, tok = self.take()
        if kind == "num":
            return RationalFunction.constant(tok, self.p)
        if kind == "t":
            return RationalFunction.t(self.p)
        if (kind, tok) == ("op", "("):
            value = self.expr()
            if self.take() != ("op", ")"):
                self.fail()
            return value
        self.fail()


def reconstruct_series(u, k, p):
    """Padé-style reconstruction of a rational function from a series mod t^k.

    Returns ``(num, den)`` with ``deg num <= (k-1)//2``, ``deg den <= k-1-(k-1)//2``
    and ``den(0) != 0``, or ``None`` when no such pair exists.
    """
    bound = (k - 1) // 2
    modulus = (0,) * k + (1,)
    r0, r1 = modulus, trim(u[:k])
    t0, t1 = (), (1,)
    while r1 and degree(r1) > bound:
        q, r = pdivmod(r0, r1, p)
        r0, r1 = r1, r
        t0, t1 = t1, psub(t0, pmul(q, t1, p), p)
    if not t1 or degree(t1) > k - 1 - bound or t1[0] == 0:
        return None
    if r1 and pgcd(r1, t1, p) != (1,):
        return None
    return r1, t1
