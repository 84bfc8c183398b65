"""Sparse multivariate polynomials over K = F_p[X] in variables Y1..Yn.

Variables are 0-based internally (``Y1`` is index 0). A polynomial maps exponent
vectors (tuples of length n) to nonzero :class:`FpPoly` coefficients.
"""

from __future__ import annotations

import re
from itertools import product as _cartesian

from .field import check_prime, inv_mod
from .poly import FpPoly, format_fppoly


class ArityError(ValueError):
    pass


class ResultantError(ValueError):
    pass


def _grlex_key(e):
    return (sum(e), e)


class MultiPolynomial:
    __slots__ = ("p", "n", "terms", "_hash")

    def __init__(self, p: int, n: int, terms=None, _checked=False):
        if not _checked:
            p = check_prime(p)
            clean = {}
            for e, c in (terms or {}).items():
                e = tuple(int(v) for v in e)
                if len(e) != n or any(v < 0 for v in e):
                    raise ArityError(f"bad exponent vector {e} for {n} variables")
                if not isinstance(c, FpPoly):
                    c = FpPoly(p, (c,))
                c = clean.get(e, FpPoly.zero(p)) + c
                if c:
                    clean[e] = c
                else:
                    clean.pop(e, None)
            terms = clean
        self.p = p
        self.n = n
        self.terms = terms
        self._hash = None

    # -- constructors --------------------------------------------------

    @classmethod
    def _make(cls, p, n, terms):
        return cls(p, n, {e: c for e, c in terms.items() if c}, _checked=True)

    @classmethod
    def zero(cls, p, n):
        return cls(p, n, {}, _checked=True)

    @classmethod
    def const(cls, p, n, c):
        if not isinstance(c, FpPoly):
            c = FpPoly(p, (c,))
        return cls._make(p, n, {(0,) * n: c})

    @classmethod
    def var(cls, p, n, i):
        if not 0 <= i < n:
            raise ArityError(f"variable index {i} out of range for {n} variables")
        e = [0] * n
        e[i] = 1
        return cls._make(p, n, {tuple(e): FpPoly.one(p)})

    @classmethod
    def from_univariate(cls, coeffs, p):
        """sum coeffs[k] * Y1**k for a list of FpPoly."""
        return cls._make(p, 1, {(k,): c for k, c in enumerate(coeffs)})

    # -- queries -------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> FpPoly:
        return self.terms.get((0,) * self.n, FpPoly.zero(self.p))

    def degree(self, i: int) -> int:
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def x_degree(self) -> int:
        return max((c.degree for c in self.terms.values()), default=-1)

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, v in enumerate(e) if v}

    def mentions(self, i: int) -> bool:
        return any(e[i] for e in self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def __eq__(self, other):
        if not isinstance(other, MultiPolynomial):
            return NotImplemented
        return self.p == other.p and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.n, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, MultiPolynomial):
            if other.p != self.p or other.n != self.n:
                raise ArityError("mismatched polynomial rings")
            return other
        if isinstance(other, (int, FpPoly)):
            return MultiPolynomial.const(self.p, self.n, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out = dict(self.terms)
        for e, c in o.terms.items():
            s = out.get(e)
            s = c if s is None else s + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return MultiPolynomial(self.p, self.n, out, _checked=True)

    __radd__ = __add__

    def __neg__(self):
        return MultiPolynomial(self.p, self.n, {e: -c for e, c in self.terms.items()}, _checked=True)

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
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e)
                prod = c1 * c2
                s = prod if s is None else s + prod
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MultiPolynomial(self.p, self.n, out, _checked=True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        result = MultiPolynomial.const(self.p, self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c):
        """Multiply by a K-constant (int or FpPoly)."""
        return self * MultiPolynomial.const(self.p, self.n, c)

    def map_coefficients(self, fn):
        return MultiPolynomial(self.p, self.n, {e: fn(c) for e, c in self.terms.items()})

    # -- structure -----------------------------------------------------

    def coeffs_in(self, i: int) -> dict[int, "MultiPolynomial"]:
        """View as a univariate polynomial in Y_i: degree -> coefficient (Y_i-free)."""
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[i]
            e2 = e[:i] + (0,) + e[i + 1 :]
            out.setdefault(k, {})[e2] = c
        return {k: MultiPolynomial(self.p, self.n, t, _checked=True) for k, t in out.items()}

    def leading_coeff_in(self, i: int) -> "MultiPolynomial":
        d = self.degree(i)
        return self.coeffs_in(i)[d]

    def partial(self, i: int) -> "MultiPolynomial":
        if not 0 <= i < self.n:
            raise ArityError(f"variable index {i} out of range")
        p = self.p
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k % p:
                e2 = e[:i] + (k - 1,) + e[i + 1 :]
                out[e2] = c.scale(k)
        return MultiPolynomial(p, self.n, out, _checked=True)

    def content(self) -> FpPoly:
        g = FpPoly.zero(self.p)
        for c in self.terms.values():
            g = c if g.is_zero() else g.gcd(c)
            if g.is_one():
                break
        return g

    def primitive(self) -> "MultiPolynomial":
        """Divide out the F_p[X]-content and make the leading coefficient monic."""
        if not self.terms:
            return self
        g = self.content()
        lead = self.sorted_terms()[0][1]
        unit = inv_mod(lead.exact_div(g).lc(), self.p) if not g.is_one() else inv_mod(lead.lc(), self.p)
        return MultiPolynomial(
            self.p, self.n, {e: (c.exact_div(g) if not g.is_one() else c).scale(unit) for e, c in self.terms.items()}
        )

    def substitute(self, i: int, value: "MultiPolynomial") -> "MultiPolynomial":
        """Replace Y_i by another polynomial in the same ring."""
        result = MultiPolynomial.zero(self.p, self.n)
        powers = {0: MultiPolynomial.const(self.p, self.n, 1)}
        for k, coef in sorted(self.coeffs_in(i).items()):
            if k not in powers:
                powers[k] = value ** k
            result = result + coef * powers[k]
        return result

    def remap(self, n_new: int, mapping: dict[int, int]) -> "MultiPolynomial":
        """Move variable i to mapping[i] in a ring of n_new variables.

        Variables absent from ``mapping`` must not occur.
        """
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * n_new
            for i, v in enumerate(e):
                if v:
                    if i not in mapping:
                        raise ArityError(f"variable Y{i + 1} occurs but is not mapped")
                    e2[mapping[i]] += v
            out[tuple(e2)] = c
        return MultiPolynomial(self.p, n_new, out)

    def univariate(self, i: int) -> list[FpPoly]:
        """Coefficient list in Y_i when no other variable occurs."""
        if self.variables() - {i}:
            raise ArityError("polynomial mentions other variables")
        d = max(self.degree(i), 0)
        out = [FpPoly.zero(self.p)] * (d + 1)
        for e, c in self.terms.items():
            out[e[i]] = c
        return out

    # -- evaluation ----------------------------------------------------

    def eval_series(self, point):
        from .series import mpoly_eval

        return mpoly_eval(self, point)

    def eval_gf(self, gf, xval: int, point) -> int:
        """Evaluate in GF(q) with X -> xval and Y -> point."""
        if len(point) != self.n:
            raise ArityError(f"expected {self.n} coordinates, got {len(point)}")
        acc = 0
        for e, c in self.terms.items():
            cv = 0
            for a in reversed(c.c):
                cv = gf.add(gf.mul(cv, xval), gf.embed(a))
            t = cv
            for yv, k in zip(point, e):
                if k:
                    t = gf.mul(t, gf.pow(yv, k))
            acc = gf.add(acc, t)
        return acc

    # -- exact division (used by fraction-free determinants) ------------

    def _flat(self):
        flat = {}
        for e, c in self.terms.items():
            for k, a in enumerate(c.c):
                if a:
                    flat[e + (k,)] = a
        return flat

    @classmethod
    def _from_flat(cls, p, n, flat):
        terms: dict = {}
        for key, a in flat.items():
            e, k = key[:n], key[n]
            terms.setdefault(e, {})[k] = a
        out = {}
        for e, d in terms.items():
            coeffs = [0] * (max(d) + 1)
            for k, a in d.items():
                coeffs[k] = a
            out[e] = FpPoly(p, coeffs)
        return cls(p, n, out, _checked=True)._clean()

    def _clean(self):
        return MultiPolynomial(self.p, self.n, {e: c for e, c in self.terms.items() if c}, _checked=True)

    def exact_div(self, other: "MultiPolynomial") -> "MultiPolynomial":
        """Quotient when ``other`` divides ``self`` exactly; raises otherwise."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        p, n = self.p, self.n
        num = self._flat()
        den = other._flat()
        lt = max(den)
        inv = inv_mod(den[lt], p)
        quot = {}
        while num:
            m = max(num)
            if any(a < b for a, b in zip(m, lt)):
                raise ArithmeticError("inexact multivariate division")
            shift = tuple(a - b for a, b in zip(m, lt))
            coef = num[m] * inv % p
            quot[shift] = coef
            for key, a in den.items():
                k2 = tuple(x + y for x, y in zip(key, shift))
                v = (num.get(k2, 0) - coef * a) % p
                if v:
                    num[k2] = v
                else:
                    num.pop(k2, None)
        return MultiPolynomial._from_flat(p, n, quot)

    # -- printing ------------------------------------------------------

    def __str__(self):
        return format_mpoly(self)

    def __repr__(self):
        return f"MultiPolynomial(p={self.p}, n={self.n}, {format_mpoly(self)!r})"


# ---------------------------------------------------------------------------
# Elimination


def determinant(matrix):
    """Bareiss fraction-free determinant of a square matrix of MultiPolynomials."""
    m = [list(row) for row in matrix]
    size = len(m)
    if size == 0:
        raise ValueError("empty matrix")
    sign = 1
    prev = None
    for k in range(size - 1):
        if m[k][k].is_zero():
            swap = next((r for r in range(k + 1, size) if not m[r][k].is_zero()), None)
            if swap is None:
                return MultiPolynomial.zero(m[0][0].p, m[0][0].n)
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                v = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = v if prev is None else v.exact_div(prev)
        prev = m[k][k]
    det = m[size - 1][size - 1]
    return -det if sign < 0 else det


def sylvester_matrix(P: MultiPolynomial, Q: MultiPolynomial, i: int):
    cp, cq = P.coeffs_in(i), Q.coeffs_in(i)
    m, n = P.degree(i), Q.degree(i)
    zero = MultiPolynomial.zero(P.p, P.n)
    size = m + n
    rows = []
    for r in range(n):
        row = [zero] * size
        for k in range(m + 1):
            row[r + (m - k)] = cp.get(k, zero)
        rows.append(row)
    for r in range(m):
        row = [zero] * size
        for k in range(n + 1):
            row[r + (n - k)] = cq.get(k, zero)
        rows.append(row)
    return rows


def resultant(P: MultiPolynomial, Q: MultiPolynomial, i: int) -> MultiPolynomial:
    """Res_{Y_i}(P, Q) as a polynomial not mentioning Y_i (Sylvester determinant)."""
    if P.p != Q.p or P.n != Q.n:
        raise ArityError("mismatched polynomial rings")
    if P.degree(i) <= 0 or Q.degree(i) <= 0:
        raise ResultantError(f"both polynomials need positive degree in Y{i + 1}")
    return determinant(sylvester_matrix(P, Q, i))


# ---------------------------------------------------------------------------
# ASCII grammar:  expr := term (('+'|'-') term)* ; term := factor ('*' factor)* ;
# factor := atom ('^' int)? ; atom := int | X | Y<k> | '(' expr ')' | '-' factor

_TOKEN = re.compile(r"\s*(?:(\d+)|(X)|Y(\d+)|(\^|\*|\+|-|\(|\)))")


class ParseError(ValueError):
    pass


def _tokenize(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected input at {text[pos:]!r}")
        num, x, y, op = m.groups()
        if num is not None:
            out.append(("int", int(num)))
        elif x:
            out.append(("X", None))
        elif y is not None:
            if int(y) < 1:
                raise ParseError("variables are numbered from Y1")
            out.append(("Y", int(y) - 1))
        else:
            out.append((op, None))
        pos = m.end()
    return out


def _max_var(tokens):
    return max((v + 1 for t, v in tokens if t == "Y"), default=0)


def parse_mpoly(text: str, p: int, n: int | None = None) -> MultiPolynomial:
    """Parse e.g. ``(1+X)^3*Y1^2 + (1+X)^2*Y1 + X``."""
    p = check_prime(p)
    tokens = _tokenize(text)
    if n is None:
        n = max(_max_var(tokens), 1)
    elif _max_var(tokens) > n:
        raise ParseError(f"variable index exceeds n={n}")
    pos = 0

    def peek():
        return tokens[pos][0] if pos < len(tokens) else None

    def take(kind=None):
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of input")
        tok = tokens[pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, got {tok[0]!r}")
        pos += 1
        return tok

    def expr():
        acc = term()
        while peek() in ("+", "-"):
            op = take()[0]
            rhs = term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term():
        acc = factor()
        while peek() == "*":
            take()
            acc = acc * factor()
        return acc

    def factor():
        if peek() == "-":
            take()
            return -factor()
        base = atom()
        if peek() == "^":
            take()
            base = base ** take("int")[1]
        return base

    def atom():
        kind, val = take()
        if kind == "int":
            return MultiPolynomial.const(p, n, val % p)
        if kind == "X":
            return MultiPolynomial.const(p, n, FpPoly.x(p))
        if kind == "Y":
            return MultiPolynomial.var(p, n, val)
        if kind == "(":
            inner = expr()
            take(")")
            return inner
        raise ParseError(f"unexpected token {kind!r}")

    if not tokens:
        raise ParseError("empty polynomial")
    result = expr()
    if pos != len(tokens):
        raise ParseError(f"trailing input near token {pos}")
    return result


def parse_fppoly(text: str, p: int) -> FpPoly:
    P = parse_mpoly(text, p, n=1)
    if not P.is_constant():
        raise ParseError("expected a polynomial in X only")
    return P.constant_value()


def format_mpoly(P: MultiPolynomial) -> str:
    if not P.terms:
        return "0"
    parts = []
    for e, c in P.sorted_terms():
        mono = "*".join(
            (f"Y{i + 1}" if k == 1 else f"Y{i + 1}^{k}") for i, k in enumerate(e) if k
        )
        if not mono:
            parts.append(format_fppoly(c))
        elif c.is_one():
            parts.append(mono)
        elif len([a for a in c.c if a]) == 1 and c.degree == 0:
            parts.append(f"{c.c[0]}*{mono}")
        else:
            cs = format_fppoly(c)
            if " " in cs:
                cs = f"({cs})"
            parts.append(f"{cs}*{mono}")
    return " + ".join(parts)


def all_points(gf, n):
    return _cartesian(range(gf.q), repeat=n)
