"""Truncated Laurent series over F_p with the X-adic norm and Cartier operators.

A series stores the coefficients of X^offset .. X^(trunc-1); coefficients at
exponents >= trunc are *unknown* (not zero). Series built from polynomials carry
``exact=True`` and have no truncation. Precision is propagated pessimistically:

* ``a + b``   known below ``min(Na, Nb)``
* ``a * b``   known below ``min(Na + vb, Nb + va)`` where v is the valuation
* ``1 / a``   known below ``Na - 2 va``
* ``a ** p``  known below ``p * Na`` (Frobenius spreads coefficients)
* ``Lambda_i(a)`` known below ``(Na - i - 1) // p + 1``

Equality at finite precision is only ever "equal mod X^N".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .field import check_prime, inv_mod
from .poly import FpPoly, RationalFunction

DEFAULT_TRUNC = 128


class SeriesError(ValueError):
    pass


class PrecisionError(SeriesError):
    pass


class HenselError(SeriesError):
    pass


def _arr(values):
    a = np.asarray(values, dtype=np.int64)
    a.setflags(write=False)
    return a


class TruncatedLaurentSeries:
    __slots__ = ("p", "offset", "coeffs", "exact")

    def __init__(self, p: int, coeffs, offset: int = 0, trunc: int | None = None, exact: bool = False):
        p = check_prime(p)
        c = np.asarray(coeffs, dtype=np.int64) % p
        if trunc is None and not exact:
            trunc = offset + len(c)
        if not exact:
            if trunc < offset:
                raise PrecisionError("truncation order below offset")
            c = c[: trunc - offset]
            if len(c) < trunc - offset:
                c = np.concatenate([c, np.zeros(trunc - offset - len(c), dtype=np.int64)])
        nz = np.flatnonzero(c)
        if len(nz):
            first = int(nz[0])
            last = int(nz[-1]) if exact else len(c) - 1
            c = c[first : last + 1]
            offset += first
        elif exact:
            c, offset = c[:0], 0
        else:
            c, offset = c[:0], trunc
        self.p = p
        self.offset = int(offset)
        self.coeffs = _arr(c)
        self.exact = bool(exact)

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, p):
        return cls(p, [], exact=True)

    @classmethod
    def one(cls, p):
        return cls(p, [1], exact=True)

    @classmethod
    def from_int(cls, p, a):
        return cls(p, [a], exact=True)

    @classmethod
    def from_poly(cls, a: FpPoly):
        return cls(a.p, list(a.c), exact=True)

    @classmethod
    def from_rational(cls, r: RationalFunction, trunc: int = DEFAULT_TRUNC):
        if r.is_polynomial():
            return cls.from_poly(r.num)
        num = cls.from_poly(r.num)
        den = cls.from_poly(r.den)
        return num * den.inverse(trunc)

    @classmethod
    def from_dense(cls, p, coeffs, trunc: int | None = None):
        """Power series with coefficients of X^0.. given densely."""
        coeffs = list(coeffs)
        return cls(p, coeffs, 0, trunc if trunc is not None else len(coeffs))

    @classmethod
    def monomial(cls, p, k, a=1):
        return cls(p, [a], offset=k, exact=True)

    @classmethod
    def x(cls, p):
        return cls.monomial(p, 1)

    # -- queries -------------------------------------------------------

    @property
    def trunc(self) -> float | int:
        if self.exact:
            return float("inf")
        return self.offset + len(self.coeffs)

    def known_until(self) -> int | None:
        return None if self.exact else self.offset + len(self.coeffs)

    def is_zero_so_far(self) -> bool:
        return len(self.coeffs) == 0

    def is_exact_zero(self) -> bool:
        return self.exact and len(self.coeffs) == 0

    def valuation(self):
        """Order of vanishing, or None when no nonzero coefficient is known."""
        return self.offset if len(self.coeffs) else None

    def is_power_series(self) -> bool:
        return len(self.coeffs) == 0 or self.offset >= 0

    def coeff(self, k: int) -> int:
        if not self.exact and k >= self.trunc:
            raise PrecisionError(f"coefficient of X^{k} unknown (truncated at {self.trunc})")
        j = k - self.offset
        if 0 <= j < len(self.coeffs):
            return int(self.coeffs[j])
        return 0

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients of X^lo .. X^(hi-1) as an array (all must be known)."""
        if hi > self.trunc:
            raise PrecisionError(f"coefficients up to X^{hi - 1} requested, known below {self.trunc}")
        out = np.zeros(max(hi - lo, 0), dtype=np.int64)
        if hi <= lo:
            return out
        s = max(lo, self.offset)
        e = min(hi, self.offset + len(self.coeffs))
        if s < e:
            out[s - lo : e - lo] = self.coeffs[s - self.offset : e - self.offset]
        return out

    def dense(self, upto: int | None = None) -> list[int]:
        """Coefficients of X^0 .. X^(upto-1) (default: up to the truncation)."""
        if upto is None:
            if self.exact:
                upto = self.offset + len(self.coeffs)
            else:
                upto = int(self.trunc)
        if len(self.coeffs) and self.offset < 0:
            raise SeriesError("series has negative powers of X")
        return self.window(0, upto).tolist()

    def to_poly(self) -> FpPoly:
        if not self.exact or (len(self.coeffs) and self.offset < 0):
            raise SeriesError("not a polynomial")
        return FpPoly(self.p, self.dense())

    def truncate(self, n: int) -> "TruncatedLaurentSeries":
        if n >= self.trunc:
            if self.exact:
                return TruncatedLaurentSeries(self.p, self.window(min(n, self.offset), n), min(n, self.offset), n)
            return self
        lo = min(self.offset, n)
        return TruncatedLaurentSeries(self.p, self.window(lo, n), lo, n)

    # -- comparison ----------------------------------------------------

    def agreement(self, other: "TruncatedLaurentSeries"):
        """(equal, k): first differing exponent k, or (True, common precision)."""
        if other.p != self.p:
            raise SeriesError("different characteristics")
        hi = min(self.trunc, other.trunc)
        lo = min(self.offset if len(self.coeffs) else hi, other.offset if len(other.coeffs) else hi)
        if hi == float("inf"):
            hi = max(self.offset + len(self.coeffs), other.offset + len(other.coeffs))
            lo = min(lo, hi)
            diff = np.flatnonzero(self.window(lo, hi) != other.window(lo, hi))
            return (True, float("inf")) if not len(diff) else (False, lo + int(diff[0]))
        hi = int(hi)
        lo = min(lo, hi)
        diff = np.flatnonzero(self.window(lo, hi) != other.window(lo, hi))
        if len(diff):
            return False, lo + int(diff[0])
        return True, hi

    def agrees(self, other) -> bool:
        return self.agreement(other)[0]

    def __eq__(self, other):
        if not isinstance(other, TruncatedLaurentSeries):
            return NotImplemented
        return (
            self.p == other.p
            and self.exact == other.exact
            and self.offset == other.offset
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((self.p, self.exact, self.offset, self.coeffs.tobytes()))

    def key(self, lo: int, hi: int):
        """Hashable prefix used to identify elements at working precision."""
        return self.window(lo, hi).tobytes()

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, TruncatedLaurentSeries):
            if other.p != self.p:
                raise SeriesError("different characteristics")
            return other
        if isinstance(other, (int, np.integer)):
            return TruncatedLaurentSeries.from_int(self.p, int(other))
        if isinstance(other, FpPoly):
            return TruncatedLaurentSeries.from_poly(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        exact = self.exact and o.exact
        if exact:
            hi = max(self.offset + len(self.coeffs), o.offset + len(o.coeffs))
        else:
            hi = int(min(self.trunc, o.trunc))
        lo = min(self.offset if len(self.coeffs) else hi, o.offset if len(o.coeffs) else hi, hi)
        c = self.window(lo, hi) + o.window(lo, hi)
        return TruncatedLaurentSeries(self.p, c, lo, None if exact else hi, exact=exact)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedLaurentSeries(self.p, -self.coeffs, self.offset, self.known_until(), self.exact)

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
        p = self.p
        if self.is_exact_zero() or o.is_exact_zero():
            return TruncatedLaurentSeries.zero(p)
        va, vb = self.offset, o.offset
        lo = va + vb
        if self.exact and o.exact:
            c = np.convolve(self.coeffs, o.coeffs) % p
            return TruncatedLaurentSeries(p, c, lo, exact=True)
        hi = int(min(self.trunc + vb, o.trunc + va))
        length = hi - lo
        if length <= 0:
            return TruncatedLaurentSeries(p, [], hi, hi)
        a = self.coeffs[:length]
        b = o.coeffs[:length]
        if len(a) == 0 or len(b) == 0:
            return TruncatedLaurentSeries(p, [], lo, hi)
        c = np.convolve(a, b)[:length] % p
        return TruncatedLaurentSeries(p, c, lo, hi)

    __rmul__ = __mul__

    def scale(self, a: int):
        return TruncatedLaurentSeries(self.p, self.coeffs * (int(a) % self.p), self.offset, self.known_until(), self.exact)

    def shift(self, k: int):
        """Multiply by X**k (k may be negative)."""
        t = None if self.exact else self.known_until() + k
        return TruncatedLaurentSeries(self.p, self.coeffs, self.offset + k, t, self.exact)

    def inverse(self, prec: int = DEFAULT_TRUNC):
        """Inverse by coefficient recursion; ``prec`` bounds the length of inverses of exact inputs."""
        p = self.p
        if len(self.coeffs) == 0:
            raise SeriesError("cannot invert a series indistinguishable from 0")
        v = self.offset
        if self.exact:
            if len(self.coeffs) == 1:
                return TruncatedLaurentSeries(p, [inv_mod(int(self.coeffs[0]), p)], -v, exact=True)
            length = prec
        else:
            length = len(self.coeffs)
        u = np.zeros(length, dtype=np.int64)
        m = min(length, len(self.coeffs))
        u[:m] = self.coeffs[:m]
        g = _inv_recursive(u, length, p)
        return TruncatedLaurentSeries(p, g, -v, -v + length)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def frobenius(self):
        """self ** p via a(X) -> a(X**p)."""
        p = self.p
        if len(self.coeffs) == 0:
            if self.exact:
                return self
            return TruncatedLaurentSeries(p, [], p * self.trunc, p * self.trunc)
        c = np.zeros((len(self.coeffs) - 1) * p + 1, dtype=np.int64)
        c[::p] = self.coeffs
        t = None if self.exact else p * self.known_until()
        return TruncatedLaurentSeries(p, c, p * self.offset, t, self.exact)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = TruncatedLaurentSeries.one(self.p)
        base = self
        while e:
            if e % self.p == 0:
                base = base.frobenius()
                e //= self.p
                continue
            result = result * base
            e -= 1
        return result

    # -- printing ------------------------------------------------------

    def __str__(self):
        return format_series(self)

    def __repr__(self):
        return f"TruncatedLaurentSeries({format_series(self)!r})"

    def pretty(self, terms: int = 8) -> str:
        parts = []
        for j, a in enumerate(self.coeffs[: terms * 4]):
            if a:
                k = self.offset + j
                mono = "1" if k == 0 else ("X" if k == 1 else f"X^{k}")
                parts.append(mono if a == 1 and k else (str(a) if k == 0 else f"{a}*{mono}"))
            if len(parts) >= terms:
                break
        body = " + ".join(parts) if parts else "0"
        return body if self.exact else f"{body} + O(X^{self.trunc})"


def _inv_recursive(u: np.ndarray, length: int, p: int) -> np.ndarray:
    if u[0] % p == 0:
        raise SeriesError("leading coefficient not invertible")
    inv0 = inv_mod(int(u[0]), p)
    g = np.zeros(length, dtype=np.int64)
    g[0] = inv0
    for k in range(1, length):
        s = int(np.dot(u[1 : k + 1], g[k - 1 :: -1][: k])) if k else 0
        g[k] = (-s * inv0) % p
    return g


# ---------------------------------------------------------------------------
# Norm


@dataclass(frozen=True)
class Valuation:
    """The norm p^(-order); ``order=None`` means exactly zero.

    With ``bounded=True`` the value is only known to be <= p^(-order)
    (all known coefficients vanish).
    """

    p: int
    order: int | None
    bounded: bool = False

    @property
    def is_zero(self) -> bool:
        return self.order is None

    def value(self) -> Fraction:
        if self.order is None:
            return Fraction(0)
        return Fraction(self.p) ** (-self.order)

    def __mul__(self, other: "Valuation") -> "Valuation":
        if self.order is None or other.order is None:
            return Valuation(self.p, None)
        return Valuation(self.p, self.order + other.order, self.bounded or other.bounded)

    def __le__(self, other: "Valuation") -> bool:
        return self.value() <= other.value()

    def __lt__(self, other: "Valuation") -> bool:
        return self.value() < other.value()

    def __str__(self):
        if self.order is None:
            return "0"
        return f"{'<= ' if self.bounded else ''}{self.p}^{-self.order}"


def norm(F: TruncatedLaurentSeries) -> Valuation:
    if len(F.coeffs):
        return Valuation(F.p, F.offset)
    if F.exact:
        return Valuation(F.p, None)
    return Valuation(F.p, int(F.trunc), bounded=True)


def cauchy_limit(sequence) -> TruncatedLaurentSeries:
    """Limit of a sequence whose terms agree on ever longer prefixes.

    The limit is known up to the agreement order of the last two terms;
    a sequence whose agreement orders decrease is rejected.
    """
    seq = list(sequence)
    if len(seq) < 2:
        raise SeriesError("need at least two terms")
    orders = []
    for a, b in zip(seq, seq[1:]):
        same, k = a.agreement(b)
        orders.append(k)
    if any(b < a for a, b in zip(orders, orders[1:])):
        raise SeriesError("agreement orders decrease: not a Cauchy sequence")
    k = orders[-1]
    if k == float("inf"):
        return seq[-1]
    return seq[-1].truncate(int(k))


# ---------------------------------------------------------------------------
# Cartier operators


def cartier(i: int, F: TruncatedLaurentSeries) -> TruncatedLaurentSeries:
    """Lambda_i: coefficient n of the result is coefficient p*n + i of F."""
    p = F.p
    if not 0 <= i < p:
        raise SeriesError(f"digit {i} out of range for p={p}")
    if len(F.coeffs) and F.offset < 0:
        raise SeriesError("Cartier operators are defined on F_p[[X]] only")
    if F.exact:
        hi = F.offset + len(F.coeffs)
        dense = F.window(0, hi)
        return TruncatedLaurentSeries(p, dense[i::p], 0, exact=True)
    N = int(F.trunc)
    new_trunc = (N - i - 1) // p + 1
    if new_trunc <= 0:
        return TruncatedLaurentSeries(p, [], 0, 0)
    dense = F.window(0, N)
    return TruncatedLaurentSeries(p, dense[i::p][:new_trunc], 0, new_trunc)


def reassemble(parts) -> TruncatedLaurentSeries:
    """sum_i X^i * parts[i]**p, inverse of the Cartier decomposition."""
    parts = list(parts)
    if not parts:
        raise SeriesError("no parts given")
    p = parts[0].p
    if len(parts) != p:
        raise SeriesError(f"expected {p} parts, got {len(parts)}")
    total = TruncatedLaurentSeries.zero(p)
    for i, part in enumerate(parts):
        if part.p != p:
            raise SeriesError("parts over different primes")
        if len(part.coeffs) and part.offset < 0:
            raise SeriesError("parts must be power series")
        total = total + part.frobenius().shift(i)
    return total


def cartier_parts(F: TruncatedLaurentSeries) -> list[TruncatedLaurentSeries]:
    return [cartier(i, F) for i in range(F.p)]


def tail_section(F: TruncatedLaurentSeries, j: int) -> TruncatedLaurentSeries:
    """sum_{i>=j} f_i X^(i-j), so that F = (f_0 + .. + f_{j-1} X^(j-1)) + X^j * tail."""
    if j < 0:
        raise SeriesError("negative section index")
    if len(F.coeffs) and F.offset < 0:
        raise SeriesError("tail sections are defined on F_p[[X]] only")
    if F.exact:
        hi = F.offset + len(F.coeffs)
        return TruncatedLaurentSeries(F.p, F.window(j, max(hi, j)), 0, exact=True)
    N = int(F.trunc)
    if j >= N:
        raise PrecisionError(f"no coefficient known beyond X^{N - 1}")
    return TruncatedLaurentSeries(F.p, F.window(j, N), 0, N - j)


# ---------------------------------------------------------------------------
# Polynomial evaluation and Hensel lifting


def mpoly_eval(P, point) -> TruncatedLaurentSeries:
    """Substitute series for Y1..Yn; precision follows the arithmetic rules above."""
    from .mpoly import ArityError

    point = list(point)
    if len(point) != P.n:
        raise ArityError(f"expected {P.n} coordinates, got {len(point)}")
    p = P.p
    powers = [dict() for _ in range(P.n)]

    def power(i, k):
        cache = powers[i]
        if k not in cache:
            cache[k] = point[i] ** k
        return cache[k]

    total = TruncatedLaurentSeries.zero(p)
    for e, c in P.sorted_terms():
        term = TruncatedLaurentSeries.from_poly(c)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        total = total + term
    return total


def _poly_mul_trunc(a, b, n, p):
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)
    return np.convolve(a[:n], b[:n])[:n] % p


def _horner(coeffs, f, n, p):
    acc = np.zeros(n, dtype=np.int64)
    for a in reversed(coeffs):
        acc = _poly_mul_trunc(acc, f, n, p)
        acc = np.pad(acc, (0, max(0, n - len(acc))))[:n]
        m = min(n, len(a))
        acc[:m] = (acc[:m] + a[:m]) % p
    return acc


def hensel_expand(P, seed: int, N: int = DEFAULT_TRUNC) -> TruncatedLaurentSeries:
    """The unique F in F_p[[X]] with F(0) = seed and P(X, F) = 0 mod X^N.

    Lifting is Newton's iteration (precision doubles each round); the seed
    must be a simple root of P(0, Y).
    """
    from .mpoly import ArityError

    if P.n != 1:
        raise ArityError("hensel_expand needs a polynomial in one variable Y")
    p = P.p
    seed %= p
    coeffs = P.univariate(0)
    dcoeffs = P.partial(0).univariate(0) if P.degree(0) > 0 else [FpPoly.zero(p)]
    if sum(c[0] * pow(seed, k, p) for k, c in enumerate(coeffs)) % p:
        raise HenselError(f"{seed} is not a root of P(0, Y)")
    if sum(c[0] * pow(seed, k, p) for k, c in enumerate(dcoeffs)) % p == 0:
        raise HenselError(f"{seed} is not a simple root of P(0, Y) (ramified case not supported)")
    arrs = [np.asarray(c.c[:N], dtype=np.int64) for c in coeffs]
    darrs = [np.asarray(c.c[:N], dtype=np.int64) for c in dcoeffs]
    f = np.array([seed], dtype=np.int64)
    prec = 1
    while prec < N:
        prec = min(2 * prec, N)
        f = np.pad(f, (0, prec - len(f)))
        val = _horner(arrs, f, prec, p)
        der = _horner(darrs, f, prec, p)
        step = _poly_mul_trunc(val, _inv_recursive(der, prec, p), prec, p)
        f = (f - np.pad(step, (0, prec - len(step)))) % p
    F = TruncatedLaurentSeries(p, f, 0, N)
    check = mpoly_eval(P, [F])
    if not check.is_zero_so_far():
        raise HenselError("lifted series does not annihilate P (internal error)")
    return F


def simple_residual_roots(P) -> list[int]:
    """Seeds s in F_p with P(0, s) = 0 and dP/dY(0, s) != 0."""
    p = P.p
    coeffs = P.univariate(0)
    dco = P.partial(0).univariate(0) if P.degree(0) > 0 else []
    out = []
    for s in range(p):
        if sum(c[0] * pow(s, k, p) for k, c in enumerate(coeffs)) % p == 0:
            if sum(c[0] * pow(s, k, p) for k, c in enumerate(dco)) % p:
                out.append(s)
    return out


# ---------------------------------------------------------------------------
# Text format:  p=2 offset=0 coeffs=1,1,0,1 trunc=128   (trunc=exact for polynomials)


def format_series(F: TruncatedLaurentSeries) -> str:
    coeffs = ",".join(str(int(a)) for a in F.coeffs)
    trunc = "exact" if F.exact else str(int(F.trunc))
    return f"p={F.p} offset={F.offset} coeffs={coeffs} trunc={trunc}"


def parse_series(text: str) -> TruncatedLaurentSeries:
    fields = {}
    for tok in text.split():
        if "=" not in tok:
            raise SeriesError(f"malformed field {tok!r}")
        k, v = tok.split("=", 1)
        fields[k] = v
    try:
        p = int(fields["p"])
        offset = int(fields.get("offset", "0"))
        raw = fields.get("coeffs", "")
        coeffs = [int(a) for a in raw.split(",")] if raw else []
        trunc_s = fields.get("trunc", "exact")
    except (KeyError, ValueError) as exc:
        raise SeriesError(f"malformed series text: {text!r}") from exc
    if trunc_s == "exact":
        return TruncatedLaurentSeries(p, coeffs, offset, exact=True)
    return TruncatedLaurentSeries(p, coeffs, offset, int(trunc_s))


def random_series(p: int, N: int, rng: np.random.Generator, offset: int = 0) -> TruncatedLaurentSeries:
    return TruncatedLaurentSeries(p, rng.integers(0, p, size=N), offset, offset + N)
