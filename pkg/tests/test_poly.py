import pytest
from hypothesis import given
from hypothesis import strategies as st

from autalg.poly import FpPoly, RationalFunction


def polys(p, max_deg=8):
    return st.lists(st.integers(0, p - 1), max_size=max_deg + 1).map(lambda c: FpPoly(p, c))


P2 = polys(2)
P3 = polys(3)


def test_zero_degree_marker():
    assert FpPoly.zero(2).degree < 0
    assert FpPoly(3, [0, 0, 0]).is_zero()


def test_divmod_frobenius_identity():
    a = FpPoly(2, [1, 0, 1])
    b = FpPoly(2, [1, 1])
    q, r = a.divmod(b)
    assert q == FpPoly(2, [1, 1]) and r.is_zero()


def test_divmod_unit_divisor():
    a = FpPoly(3, [2, 0, 1, 1])
    q, r = a.divmod(FpPoly.one(3))
    assert q == a and r.is_zero()


def test_divmod_cubic():
    a = FpPoly(2, [1, 1, 0, 1])
    b = FpPoly(2, [1, 0, 1])
    q, r = a.divmod(b)
    assert r.degree <= 1
    assert q * b + r == a


@given(P3, P3, P3)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == FpPoly.zero(3)


def test_euclid_on_1000_pairs(rng):
    for _ in range(1000):
        p = int(rng.choice([2, 3, 5]))
        a = FpPoly(p, rng.integers(0, p, size=int(rng.integers(0, 12))))
        b = FpPoly(p, rng.integers(0, p, size=int(rng.integers(1, 8))))
        if b.is_zero():
            continue
        q, r = a.divmod(b)
        assert q * b + r == a
        assert r.is_zero() or r.degree < b.degree
        g = a.gcd(b)
        assert a.divmod(g)[1].is_zero() and b.divmod(g)[1].is_zero()
        g2, s, t = a.xgcd(b)
        assert s * a + t * b == g2


@given(P2)
def test_frobenius_char_2(a):
    assert a * a == a.frobenius()


@given(P3, P3.filter(lambda b: not b.is_zero()))
def test_rational_function_reduced(a, b):
    r = RationalFunction(a, b)
    assert r.den.lc() == 1
    assert r.num.gcd(r.den).is_one() or r.num.is_zero()
    assert r * RationalFunction(b) == RationalFunction(a)


def test_rational_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        RationalFunction(FpPoly.one(2), FpPoly.zero(2))
