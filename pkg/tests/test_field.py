import pytest

from autalg.field import GF, FieldError, PrimeField, inv_mod, is_prime, prime_power


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_prime_field_rejects_composite():
    with pytest.raises(FieldError):
        PrimeField(6)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 13])
def test_inverses(p):
    for a in range(1, p):
        assert a * inv_mod(a, p) % p == 1


def test_prime_power():
    assert prime_power(27) == (3, 3)
    assert prime_power(7) == (7, 1)
    with pytest.raises(FieldError):
        prime_power(12)


@pytest.mark.parametrize("q", [4, 8, 9, 25, 27])
def test_gf_field_axioms(q):
    F = GF(q)
    els = list(F.elements)
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
        for b in els:
            assert F.add(a, b) == F.add(b, a)
            assert F.mul(a, b) == F.mul(b, a)
    for a in els[:5]:
        for b in els[:5]:
            for c in els[:5]:
                assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))


@pytest.mark.parametrize("q", [4, 9, 8])
def test_frobenius_is_automorphism_fixing_prime_field(q):
    F = GF(q)
    assert {a for a in F.elements if F.frobenius(a) == a} == F.prime_subfield()
    for a in F.elements:
        for b in F.elements:
            assert F.frobenius(F.mul(a, b)) == F.mul(F.frobenius(a), F.frobenius(b))
            assert F.frobenius(F.add(a, b)) == F.add(F.frobenius(a), F.frobenius(b))
