"""Sparse polynomials in unknowns S0, S1, .. with truncated-series coefficients.

These carry the symbolic values phi(e) during constraint propagation. A
monomial is a sorted tuple of (symbol, exponent) pairs; coefficients that are
zero at their known precision are dropped.
"""

from __future__ import annotations

from .series import TruncatedLaurentSeries, cartier

ONE = ()


def _mono_mul(a, b):
    d = dict(a)
    for s, k in b:
        d[s] = d.get(s, 0) + k
    return tuple(sorted(d.items()))


class SPoly:
    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms=None):
        self.p = p
        self.terms = {m: c for m, c in (terms or {}).items() if not c.is_zero_so_far()}

    @classmethod
    def const(cls, value: TruncatedLaurentSeries):
        return cls(value.p, {ONE: value})

    @classmethod
    def symbol(cls, p: int, s: int):
        return cls(p, {((s, 1),): TruncatedLaurentSeries.one(p)})

    @classmethod
    def zero(cls, p: int):
        return cls(p, {})

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(m == ONE for m in self.terms)

    def constant(self) -> TruncatedLaurentSeries:
        return self.terms.get(ONE, TruncatedLaurentSeries.zero(self.p))

    def symbols(self) -> set[int]:
        return {s for m in self.terms for s, _ in m}

    def degree(self, s: int) -> int:
        return max((dict(m).get(s, 0) for m in self.terms), default=-1)

    def total_degree(self) -> int:
        return max((sum(k for _, k in m) for m in self.terms), default=-1)

    def __add__(self, other: "SPoly") -> "SPoly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return SPoly(self.p, out)

    def __neg__(self):
        return SPoly(self.p, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "SPoly") -> "SPoly":
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                v = c1 * c2
                out[m] = out[m] + v if m in out else v
        return SPoly(self.p, out)

    def scale(self, c: TruncatedLaurentSeries) -> "SPoly":
        return SPoly(self.p, {m: v * c for m, v in self.terms.items()})

    def __pow__(self, k: int):
        out = SPoly.const(TruncatedLaurentSeries.one(self.p))
        for _ in range(k):
            out = out * self
        return out

    def coeffs_in(self, s: int) -> dict[int, "SPoly"]:
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            d = dict(m)
            k = d.pop(s, 0)
            out.setdefault(k, {})[tuple(sorted(d.items()))] = c
        return {k: SPoly(self.p, t) for k, t in out.items()}

    def substitute(self, s: int, value: "SPoly") -> "SPoly":
        if s not in self.symbols():
            return self
        result = SPoly.zero(self.p)
        powers = {0: SPoly.const(TruncatedLaurentSeries.one(self.p))}
        for k, coef in sorted(self.coeffs_in(s).items()):
            if k not in powers:
                powers[k] = value**k
            result = result + coef * powers[k]
        return result

    def evaluate(self, values: dict[int, TruncatedLaurentSeries]) -> TruncatedLaurentSeries:
        total = TruncatedLaurentSeries.zero(self.p)
        for m, c in self.terms.items():
            t = c
            for s, k in m:
                t = t * values[s] ** k
            total = total + t
        return total

    def p_divisible(self) -> bool:
        """Every symbol exponent is a multiple of p (and some symbol occurs)."""
        return bool(self.symbols()) and all(k % self.p == 0 for m in self.terms for _, k in m)

    def min_offset(self) -> int:
        return min((c.offset for c in self.terms.values()), default=0)

    def cartier_split(self) -> list["SPoly"]:
        """C = sum_r X^r (C_r)^p; returns [C_0, .., C_{p-1}] for a p-divisible C.

        Negative powers of X are first cleared by a factor X^(p*k), which does
        not change the zero set.
        """
        p = self.p
        low = self.min_offset()
        shift = 0 if low >= 0 else p * ((-low + p - 1) // p)
        parts = [dict() for _ in range(p)]
        for m, c in self.terms.items():
            c = c.shift(shift)
            m2 = tuple((s, k // p) for s, k in m)
            for r in range(p):
                v = cartier(r, c)
                if not v.is_zero_so_far():
                    parts[r][m2] = v
        return [SPoly(p, t) for t in parts]

    def precision(self) -> float:
        return min((c.trunc for c in self.terms.values()), default=float("inf"))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda t: (-sum(k for _, k in t[0]), t[0])):
            mono = "*".join(f"S{s}" if k == 1 else f"S{s}^{k}" for s, k in m)
            coef = c.pretty(4)
            if not mono:
                parts.append(f"({coef})")
            elif c.exact and len(c.coeffs) == 1 and c.offset == 0 and c.coeffs[0] == 1:
                parts.append(mono)
            else:
                parts.append(f"({coef})*{mono}")
        return " + ".join(parts)

    __repr__ = __str__
