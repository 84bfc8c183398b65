import pytest
from corpus import CORPUS, random_dfao

from autalg.automata import constant_automaton, kernel_from_automaton, nth_term, thue_morse
from autalg.christol import (
    AlgebraicSeries,
    automaton_to_polynomial,
    derive_annihilator,
    polynomial_to_automaton,
    series_from_automaton,
    series_kernel,
    verify_annihilation,
)
from autalg.mpoly import parse_mpoly
from autalg.series import TruncatedLaurentSeries as S
from autalg.series import cartier


def lacunary(N):
    return S(2, [1 if k and (k & (k - 1)) == 0 else 0 for k in range(N)], 0, N)


def test_verify_examples():
    v = verify_annihilation(parse_mpoly("Y1^2 + Y1 + X", 2), lacunary(128))
    assert v and v.precision == 128
    bad = verify_annihilation(parse_mpoly("Y1", 2), S.one(2))
    assert not bad and bad.exponent == 0
    ones = S(2, [1] * 128, 0, 128)
    assert verify_annihilation(parse_mpoly("(1+X)*Y1 + 1", 2), ones)


def test_series_kernel_all_ones():
    K = series_kernel(S(2, [1] * 128, 0, 128))
    assert K.size == 1
    assert K.closure[("k0", 0)] == K.closure[("k0", 1)] == "k0"


def test_series_kernel_lacunary_matches_coefficient_selection():
    F = AlgebraicSeries.from_polynomial(parse_mpoly("Y1^2 + Y1 + X", 2), 0, 512)
    K = series_kernel(F, 512)
    assert K.size <= 4
    for (lab, d), img in K.closure.items():
        sel = cartier(d, K.elements[lab])
        n = int(min(sel.trunc, K.elements[img].trunc))
        assert sel.dense(n) == K.elements[img].dense(n)


def test_series_kernel_thue_morse_agrees_with_automaton_kernel():
    TM = thue_morse()
    K = series_kernel(series_from_automaton(TM, 256))
    assert K.size == kernel_from_automaton(TM).size == 2
    assert not K.certified


def test_all_ones_annihilator():
    P = automaton_to_polynomial(constant_automaton(2, 1), 128)
    assert verify_annihilation(P, S(2, [1] * 128, 0, 128))
    assert P.degree(0) == 1


def test_thue_morse_annihilator_degree_two():
    r = derive_annihilator(thue_morse(), 256)
    assert r.verdict and r.verdict.precision == 256
    assert r.polynomial.degree(0) == 2 and r.polynomial.x_degree() <= 3
    classical = parse_mpoly("(1+X)^3*Y1^2 + (1+X)^2*Y1 + X", 2)
    assert r.polynomial == classical


@pytest.mark.parametrize("method", ["resultant", "frobenius"])
def test_methods_agree_on_thue_morse(method):
    r = derive_annihilator(thue_morse(), 256, method)
    assert r.verdict
    unreduced = derive_annihilator(thue_morse(), 256, method, reduce=False)
    assert unreduced.verdict and unreduced.polynomial.degree(0) >= r.polynomial.degree(0)


def test_zero_automaton():
    P = automaton_to_polynomial(constant_automaton(3, 0), 64)
    assert P == parse_mpoly("Y1", 3)


def test_polynomial_to_automaton_examples():
    M, _ = polynomial_to_automaton(AlgebraicSeries.from_polynomial(parse_mpoly("(1+X)*Y1 + 1", 2), 1, 128), 128)
    assert M.size == 1 and M.sequence(256) == [1] * 256
    M, _ = polynomial_to_automaton(AlgebraicSeries.from_polynomial(parse_mpoly("Y1^2 + Y1 + X", 2), 0, 256), 256)
    assert M.sequence(256) == [1 if n and n & (n - 1) == 0 else 0 for n in range(256)]


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_round_trip_automaton_polynomial_automaton(name):
    M = CORPUS[name]()
    r = derive_annihilator(M, 256)
    assert r.verdict
    seed = nth_term(M, 0)
    F = AlgebraicSeries.from_polynomial(r.polynomial, seed, 512)
    back, _ = polynomial_to_automaton(F, 512)
    assert back.sequence(256) == M.sequence(256)


def test_round_trip_polynomial_automaton_polynomial():
    for text, p, seed in [("Y1^2 + Y1 + X", 2, 0), ("(1+X)*Y1 + 1", 2, 1), ("Y1^3 - Y1 - X", 3, 0)]:
        P = parse_mpoly(text, p)
        F = AlgebraicSeries.from_polynomial(P, seed, 729)
        M, _ = polynomial_to_automaton(F, 729)
        Q = automaton_to_polynomial(M, 256)
        assert verify_annihilation(Q, F.expansion)


def test_random_automata_annihilated(rng):
    for _ in range(6):
        M = random_dfao(rng, 2, int(rng.integers(1, 4)))
        r = derive_annihilator(M, 256)
        assert r.verdict
