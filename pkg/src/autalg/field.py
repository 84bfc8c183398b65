"""Prime fields F_p and small extension fields F_q used as brute-force oracles."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise FieldError(f"{p!r} is not a prime")
    return int(p)


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, -1, p)


class PrimeField:
    """The field F_p; elements are plain ints in range(p)."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        self.p = check_prime(p)

    def __call__(self, a: int) -> int:
        return int(a) % self.p

    def __iter__(self):
        return iter(range(self.p))

    def __len__(self):
        return self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"

    def inv(self, a: int) -> int:
        return inv_mod(a, self.p)


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, k) with q = p**k, or raise FieldError."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = 2
    while q % p:
        p += 1
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    if r != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, k


class GF:
    """F_q = F_p[t]/(m(t)) with precomputed tables.

    Element encoding: the int sum(c_i * p**i) for the residue c_0 + c_1 t + ...
    The prime subfield is therefore {0, .., p-1} and 1 is encoded as 1.
    """

    def __init__(self, q: int, max_order: int = 4096):
        if q > max_order:
            raise FieldError(f"field of order {q} exceeds table bound {max_order}")
        self.q = q
        self.p, self.k = prime_power(q)
        self.modulus = _irreducible(self.p, self.k)
        self.add_table, self.mul_table = _tables(self.p, self.k, self.modulus)
        self.neg_table = np.array([int(np.flatnonzero(self.add_table[a] == 0)[0]) for a in range(q)])
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = int(np.flatnonzero(self.mul_table[a] == 1)[0])
        self.inv_table = inv

    def __repr__(self):
        return f"GF({self.q})"

    def __iter__(self):
        return iter(range(self.q))

    @property
    def elements(self) -> range:
        return range(self.q)

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.add_table[a, self.neg_table[b]])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def embed(self, c: int) -> int:
        """Image of an F_p residue."""
        return int(c) % self.p

    def frobenius(self, a: int, power: int = 1) -> int:
        return self.pow(a, self.p**power)

    def prime_subfield(self) -> set[int]:
        return set(range(self.p))

    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            out.append(a % self.p)
            a //= self.p
        return out

    def name(self, a: int) -> str:
        if a < self.p:
            return str(a)
        terms = []
        for i, c in enumerate(self.digits(a)):
            if c:
                mono = "1" if i == 0 else ("t" if i == 1 else f"t^{i}")
                terms.append(mono if c == 1 and i else (str(c) if i == 0 else f"{c}*{mono}"))
        return "+".join(reversed(terms))


def _polymulmod(a, b, m, p):
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    k = len(m) - 1
    for i in range(len(prod) - 1, k - 1, -1):
        c = prod[i]
        if c:
            for j in range(k + 1):
                prod[i - k + j] = (prod[i - k + j] - c * m[j]) % p
    out = prod[:k] + [0] * (k - len(prod[:k]))
    return out


@lru_cache(maxsize=None)
def _irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible of degree k over F_p."""
    if k == 1:
        return (0, 1)
    from itertools import product

    for low in product(range(p), repeat=k):
        m = list(low) + [1]
        if m[0] == 0:
            continue
        if _is_irreducible(m, p):
            return tuple(m)
    raise FieldError(f"no irreducible of degree {k} over F_{p}")


def _is_irreducible(m, p) -> bool:
    from .poly import FpPoly

    f = FpPoly(p, m)
    k = f.degree
    x = FpPoly(p, [0, 1])
    # Rabin-style: no factor of degree <= k/2
    xp = x
    for _ in range(1, k // 2 + 1):
        xp = pow_mod(xp, p, f)
        if not (xp - x).gcd(f).is_one():
            return False
    return True


def pow_mod(a, e, m):
    r = type(a).one(a.p)
    while e:
        if e & 1:
            r = (r * a) % m
        a = (a * a) % m
        e >>= 1
    return r


@lru_cache(maxsize=None)
def _tables(p: int, k: int, modulus: tuple[int, ...]):
    q = p**k
    digits = np.array([[(a // p**i) % p for i in range(k)] for a in range(q)], dtype=np.int64)
    weights = p ** np.arange(k, dtype=np.int64)
    add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
    mul = np.zeros((q, q), dtype=np.int64)
    m = list(modulus)
    for a in range(q):
        da = list(digits[a])
        for b in range(a, q):
            c = _polymulmod(da, list(digits[b]), m, p)
            v = int(np.dot(c, weights))
            mul[a, b] = mul[b, a] = v
    return add, mul
