"""Exact univariate polynomials F_p[X] and rational functions F_p(X).

Coefficients are stored little-endian (index = exponent) as a tuple of ints in
range(p), with no trailing zeros; the zero polynomial is the empty tuple and has
degree ``-1`` (used as the "minus infinity" marker).
"""

from __future__ import annotations

import numpy as np

from .field import check_prime, inv_mod

NEG_INF = -1


def _trim(c):
    n = len(c)
    while n and not c[n - 1]:
        n -= 1
    return tuple(c[:n])


def _convolve(a, b, p):
    if not a or not b:
        return ()
    if p * p * min(len(a), len(b)) < 2**62:
        r = np.convolve(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)) % p
        return _trim(r.tolist())
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([v % p for v in out])


class FpPoly:
    """Immutable element of F_p[X]."""

    __slots__ = ("p", "c", "_hash")

    def __init__(self, p: int, coeffs=(), _checked=False):
        if not _checked:
            p = check_prime(p)
            coeffs = _trim([int(a) % p for a in coeffs])
        self.p = p
        self.c = coeffs
        self._hash = None

    @classmethod
    def _make(cls, p, coeffs):
        return cls(p, coeffs, _checked=True)

    @classmethod
    def zero(cls, p):
        return cls(p, ())

    @classmethod
    def one(cls, p):
        return cls(p, (1,))

    @classmethod
    def x(cls, p):
        return cls(p, (0, 1))

    @classmethod
    def const(cls, p, a):
        return cls(p, (a,))

    @classmethod
    def monomial(cls, p, k, a=1):
        return cls(p, [0] * k + [a])

    # -- basic queries -------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def __bool__(self):
        return bool(self.c)

    def is_zero(self):
        return not self.c

    def is_one(self):
        return self.c == (1,)

    def is_constant(self):
        return len(self.c) <= 1

    def lc(self) -> int:
        return self.c[-1] if self.c else 0

    def valuation(self):
        """Lowest exponent with nonzero coefficient (None for 0)."""
        for i, a in enumerate(self.c):
            if a:
                return i
        return None

    def __getitem__(self, k):
        return self.c[k] if 0 <= k < len(self.c) else 0

    def __iter__(self):
        return iter(self.c)

    def __len__(self):
        return len(self.c)

    def __eq__(self, other):
        if isinstance(other, FpPoly):
            return self.p == other.p and self.c == other.c
        if isinstance(other, int):
            return self.c == _trim([other % self.p])
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.c))
        return self._hash

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, FpPoly):
            if other.p != self.p:
                raise ValueError(f"mixing F_{self.p} and F_{other.p}")
            return other
        if isinstance(other, (int, np.integer)):
            return FpPoly(self.p, (int(other),))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, p = self.c, other.c, self.p
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] = (out[i] + v) % p
        return FpPoly._make(p, _trim(out))

    __radd__ = __add__

    def __neg__(self):
        p = self.p
        return FpPoly._make(p, tuple((-a) % p for a in self.c))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FpPoly._make(self.p, _convolve(self.c, other.c, self.p))

    __rmul__ = __mul__

    def scale(self, a: int):
        a %= self.p
        return FpPoly._make(self.p, _trim([v * a % self.p for v in self.c]))

    def shift(self, k: int):
        """Multiply by X**k (k >= 0)."""
        if not self.c:
            return self
        return FpPoly._make(self.p, (0,) * k + self.c)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = FpPoly.one(self.p)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def frobenius(self):
        """self**p, computed as a(X**p) since a**p = a on F_p."""
        return self.inflate(self.p)

    def inflate(self, k: int):
        """Substitute X -> X**k."""
        if not self.c:
            return self
        out = [0] * ((len(self.c) - 1) * k + 1)
        out[::k] = self.c
        return FpPoly._make(self.p, tuple(out))

    def divmod(self, other):
        other = self._coerce(other)
        if not other.c:
            raise ZeroDivisionError("division by the zero polynomial")
        p = self.p
        r = list(self.c)
        db = other.degree
        inv_lc = inv_mod(other.c[-1], p)
        if len(r) <= db:
            return FpPoly.zero(p), self
        q = [0] * (len(r) - db)
        b = other.c
        for i in range(len(r) - 1, db - 1, -1):
            coef = r[i] * inv_lc % p
            if coef:
                q[i - db] = coef
                for j in range(db + 1):
                    r[i - db + j] = (r[i - db + j] - coef * b[j]) % p
        return FpPoly._make(p, _trim(q)), FpPoly._make(p, _trim(r[:db]))

    def __divmod__(self, other):
        return self.divmod(other)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other):
        q, r = self.divmod(other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def monic(self):
        if not self.c:
            return self
        return self.scale(inv_mod(self.c[-1], self.p))

    def gcd(self, other):
        a, b = self, self._coerce(other)
        while b.c:
            a, b = b, a % b
        return a.monic()

    def xgcd(self, other):
        """(g, s, t) with s*self + t*other = g, g monic."""
        p = self.p
        r0, r1 = self, self._coerce(other)
        s0, s1 = FpPoly.one(p), FpPoly.zero(p)
        t0, t1 = FpPoly.zero(p), FpPoly.one(p)
        while r1.c:
            q, r = r0.divmod(r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if not r0.c:
            return r0, s0, t0
        k = inv_mod(r0.lc(), p)
        return r0.scale(k), s0.scale(k), t0.scale(k)

    def derivative(self):
        p = self.p
        return FpPoly._make(p, _trim([(i * a) % p for i, a in enumerate(self.c)][1:]))

    def __call__(self, x):
        """Horner evaluation at an int (mod p) or at any ring element supporting + and *."""
        if isinstance(x, (int, np.integer)):
            acc = 0
            for a in reversed(self.c):
                acc = (acc * int(x) + a) % self.p
            return acc
        acc = None
        for a in reversed(self.c):
            acc = a if acc is None else acc * x + a
        return 0 if acc is None else acc

    def cartier(self, i: int):
        """Coefficients at exponents p*n + i, as a polynomial in X**n."""
        return FpPoly._make(self.p, _trim(list(self.c[i :: self.p])))

    # -- printing ------------------------------------------------------

    def __str__(self):
        return format_fppoly(self)

    def __repr__(self):
        return f"FpPoly({self.p}, {list(self.c)})"


def format_fppoly(a: FpPoly, var: str = "X") -> str:
    if not a.c:
        return "0"
    parts = []
    for k in range(len(a.c) - 1, -1, -1):
        c = a.c[k]
        if not c:
            continue
        if k == 0:
            parts.append(str(c))
        else:
            mono = var if k == 1 else f"{var}^{k}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(parts)


class RationalFunction:
    """Element num/den of F_p(X), kept reduced with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: FpPoly, den: FpPoly | None = None):
        p = num.p
        if den is None:
            den = FpPoly.one(p)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = num.gcd(den)
        if not g.is_one() and not g.is_zero():
            num, den = num.exact_div(g), den.exact_div(g)
        k = inv_mod(den.lc(), p)
        self.num = num.scale(k)
        self.den = den.scale(k)

    @property
    def p(self):
        return self.num.p

    @classmethod
    def from_int(cls, p, a):
        return cls(FpPoly.const(p, a))

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, FpPoly):
            return RationalFunction(other)
        if isinstance(other, int):
            return RationalFunction(FpPoly.const(self.p, other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise ZeroDivisionError("inverting zero")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RationalFunction(self.num**e, self.den**e)

    def is_zero(self):
        return self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_one()

    def valuation(self):
        if self.num.is_zero():
            return None
        return self.num.valuation() - self.den.valuation()

    def cartier(self, i: int):
        """Lambda_i(A/B) = Lambda_i(A * B**(p-1)) / B, exact in F_p(X)."""
        p = self.p
        if self.den.valuation() != 0:
            raise ValueError("Cartier operators need a power series (denominator prime to X)")
        return RationalFunction((self.num * self.den ** (p - 1)).cartier(i), self.den)

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, RationalFunction) else other
        if o is NotImplemented:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__
