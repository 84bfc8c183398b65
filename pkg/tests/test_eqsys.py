import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autalg.christol import AlgebraicSeries, verify_annihilation
from autalg.eqsys import (
    EqsysError,
    GoodEquationalSystem,
    ReductionStuck,
    SplitError,
    counterexample_system,
    eliminate_variable,
    format_system,
    parse_system,
    reduce_system,
    simplify_over_variable,
    split_polynomial,
    system_from_witness,
)
from autalg.field import GF
from autalg.mpoly import MultiPolynomial, format_mpoly, parse_mpoly
from autalg.poly import FpPoly
from autalg.series import TruncatedLaurentSeries as S
from autalg.series import mpoly_eval, random_series
from autalg.tyszka import AmbientElement, build_network, counterexample_network, witness_from_polynomial


def const(p, n, coeffs):
    return MultiPolynomial.const(p, n, FpPoly(p, coeffs))


def series_of(a: FpPoly):
    return S.from_poly(a)


def gf_roots(polys, n, gf, nonzero=()):
    """All (x, y) over GF(q) where every poly vanishes and every constraint does not."""
    out = set()
    for x in gf.elements:
        for y in itertools.product(gf.elements, repeat=n):
            if all(P.eval_gf(gf, x, y) == 0 for P in polys) and all(D.eval_gf(gf, x, y) != 0 for D in nonzero):
                out.add((x, y))
    return out


def planted(P: MultiPolynomial, base):
    """P minus its value at a polynomial base point, so the base point is a root."""
    v = mpoly_eval(P, base)
    return P - MultiPolynomial.const(P.p, P.n, v.to_poly())


# -- building systems --------------------------------------------------------


def test_system_from_invert_witness():
    F = AlgebraicSeries.from_polynomial(parse_mpoly("(1+X)*Y1 + 1", 2), 1, 64)
    net, _ = witness_from_polynomial(F)
    sys = system_from_witness(net, ["x"])
    assert sys.n == 1
    assert parse_mpoly("(1+X)*Y1 + 1", 2) in sys.sigma
    sys.validate()


def test_system_for_element_of_k():
    x = S(2, [1, 0, 1], 0, exact=True)
    net = build_network([AmbientElement("x", x, constant=True)])
    sys = system_from_witness(net, ["x"])
    assert sys.n == 1 and sys.sigma == [parse_mpoly("Y1 - (1 + X^2)", 2)]


def test_witness_root_that_is_a_constant():
    # X*Y^2 + Y has the root 0, which already sits in the witness set as a constant
    F = AlgebraicSeries.from_polynomial(parse_mpoly("X*Y1^2 + Y1", 3), 0, 32)
    net, _ = witness_from_polynomial(F)
    assert net.elements[net.index("x")].constant
    sys = system_from_witness(net, ["x"])
    assert sys.sigma == [parse_mpoly("Y1", 3)]
    assert list(reduce_system(sys).annihilators.values()) == [parse_mpoly("Y1", 3)]


@pytest.mark.parametrize("p", [2, 3])
def test_counterexample_network_system_shape(p):
    rng = np.random.default_rng(5)
    F, G = random_series(p, 64, rng), random_series(p, 64, rng)
    sys = system_from_witness(counterexample_network(F, G), ["H2"])
    shown = sorted(sys.show(P) for P in sys.sigma)
    h = "" if p == 2 else f"{p - 1}*"
    assert shown == sorted([f"F^{p} + X*G^{p} + {h}H1", f"X*F^{p} + G^{p} + {h}H2"])
    sys.validate()


def test_counterexample_system_with_random_h1_is_stuck():
    rng = np.random.default_rng(8)
    F, G = random_series(2, 64, rng), random_series(2, 64, rng)
    sys = system_from_witness(counterexample_network(F, G), ["H2"])
    with pytest.raises(ReductionStuck):
        reduce_system(sys)


def test_validate_rejects_bad_base_point():
    sys = GoodEquationalSystem(2, 1, [parse_mpoly("Y1 + 1", 2)], [S.zero(2)], {0: "y"})
    with pytest.raises(EqsysError):
        sys.validate()


# -- simplification ----------------------------------------------------------


def test_simplify_hand_example():
    P1 = parse_mpoly("Y2^2 + Y2*Y1", 2)
    P2 = parse_mpoly("Y2 + Y1", 2)
    sys = GoodEquationalSystem(2, 2, [P1, P2], [S.zero(2), S.zero(2)], {0: "y"}).validate()
    out = simplify_over_variable(sys, 1)
    assert len(out.holders(1)) <= 1
    gf = GF(4)
    assert gf_roots(out.sigma, 2, gf, out.domain_constraints) <= gf_roots(sys.sigma, 2, gf)
    out.validate()


def test_simplify_single_or_no_holder_unchanged():
    sys = GoodEquationalSystem(3, 2, [parse_mpoly("Y2^2 - Y1", 3, 2)], [S.one(3), S.one(3)], {0: "y"}).validate()
    assert simplify_over_variable(sys, 1).sigma == sys.sigma
    sys2 = GoodEquationalSystem(3, 2, [parse_mpoly("Y1 - 1", 3, 2)], [S.one(3), S.zero(3)], {0: "y"}).validate()
    assert simplify_over_variable(sys2, 1).sigma == sys2.sigma


def test_simplify_rejects_distinguished():
    sys = GoodEquationalSystem(2, 1, [parse_mpoly("Y1", 2)], [S.zero(2)], {0: "y"})
    with pytest.raises(EqsysError):
        simplify_over_variable(sys, 0)


def _random_poly(rng, p, n, max_deg=2, terms=4):
    t = {}
    for _ in range(terms):
        e = tuple(int(a) for a in rng.integers(0, max_deg + 1, size=n))
        t[e] = FpPoly(p, rng.integers(0, p, size=2))
    return MultiPolynomial(p, n, t)


def test_simplify_root_containment_and_degree(rng):
    gf = GF(4)
    checked = 0
    for _ in range(40):
        base = [S.from_poly(FpPoly(2, rng.integers(0, 2, size=2))) for _ in range(2)]
        polys = [planted(_random_poly(rng, 2, 2), base) for _ in range(2)]
        polys = [P for P in polys if not P.is_zero()]
        if len(polys) < 2 or not all(P.mentions(1) for P in polys):
            continue
        sys = GoodEquationalSystem(2, 2, polys, base, {0: "y"}).validate()
        out = simplify_over_variable(sys, 1)
        out.validate()
        assert len(out.holders(1)) <= 1
        assert max((P.degree(1) for P in out.sigma), default=0) <= max(P.degree(1) for P in polys)
        assert gf_roots(out.sigma, 2, gf, out.domain_constraints) <= gf_roots(sys.sigma, 2, gf)
        checked += 1
    assert checked >= 10


# -- splitting ---------------------------------------------------------------


def test_split_h1_example():
    P = parse_mpoly("(1 + X + X^2) - Y1^2 - X*Y2^2", 2)
    parts = split_polynomial(P)
    assert sorted(map(format_mpoly, parts)) == sorted(map(format_mpoly, [parse_mpoly("Y1 - (1+X)", 2, 2), parse_mpoly("Y2 - 1", 2, 2)]))


def test_split_pure_power():
    assert split_polynomial(parse_mpoly("Y1^3", 3)) == [parse_mpoly("Y1", 3)]


def test_split_precondition():
    with pytest.raises(SplitError):
        split_polynomial(parse_mpoly("Y1^2 + Y1", 2))


def test_split_keeps_base_point():
    P = parse_mpoly("(1 + X + X^2) + Y1^2 + X*Y2^2", 2)
    base = [S.from_poly(FpPoly(2, [1, 1])), S.one(2)]
    parts = split_polynomial(P, base_point=base)
    assert all(mpoly_eval(Q, base).is_zero_so_far() for Q in parts)


@st.composite
def p_divisible_polys(draw):
    terms = {}
    for _ in range(draw(st.integers(1, 5))):
        e = (2 * draw(st.integers(0, 4)), 2 * draw(st.integers(0, 4)))
        terms[e] = FpPoly(2, draw(st.lists(st.integers(0, 1), max_size=5)))
    P = MultiPolynomial(2, 2, terms)
    return P


@settings(max_examples=40)
@given(p_divisible_polys())
def test_split_degree_bound_property(P):
    if not P.variables():
        return
    for Q in split_polynomial(P):
        for i in range(2):
            assert 2 * max(Q.degree(i), 0) <= max(P.degree(i), 0)


# -- elimination and reduction -----------------------------------------------


def test_eliminate_substitution_example():
    a = FpPoly(3, [1, 1])
    base = [series_of(a), series_of(a * a), series_of(a * a - FpPoly.x(3))]
    sigma = [parse_mpoly("Y2 - Y1^2", 3, 3), parse_mpoly("Y3 - Y2 + X", 3, 3)]
    sys = GoodEquationalSystem(3, 3, sigma, base, {2: "y"}, names=["Y1", "Y2", "Y3"]).validate()
    out = eliminate_variable(sys, 1)
    assert out.n == 2
    target = parse_mpoly("Y2 - Y1^2 + X", 3, 2)
    assert len(out.sigma) == 1 and out.sigma[0] in (target, -target)
    assert out.names == ["Y1", "Y3"]


def test_eliminate_split_system():
    H1 = FpPoly(2, [1, 1, 1])
    L0, L1 = H1.cartier(0), H1.cartier(1)
    sigma = [
        MultiPolynomial.var(2, 3, 0) - MultiPolynomial.const(2, 3, L0),
        MultiPolynomial.var(2, 3, 1) - MultiPolynomial.const(2, 3, L1),
        parse_mpoly("Y3 - Y2^2 - X*Y1^2", 2, 3),
    ]
    base = [series_of(L0), series_of(L1), series_of(L1 * L1 + FpPoly.x(2) * L0 * L0)]
    sys = GoodEquationalSystem(2, 3, sigma, base, {2: "H2"}).validate()
    out = eliminate_variable(eliminate_variable(sys, 0), 0)
    assert out.n == 1
    expected = MultiPolynomial.var(2, 1, 0) - MultiPolynomial.const(2, 1, L1 * L1 + FpPoly.x(2) * L0 * L0)
    assert out.sigma == [expected]


def test_reduce_pipeline_degree_one():
    sys = counterexample_system(FpPoly(2, [1, 1, 1]))
    assert sys.n == 3
    res = reduce_system(sys)
    U = res.annihilators["H2"]
    assert U.degree(0) == 1 and res.verdicts["H2"]
    assert verify_annihilation(U, sys.base_point[2])


def test_reduce_invert_witness():
    F = AlgebraicSeries.from_polynomial(parse_mpoly("(1+X)*Y1 + 1", 2), 1, 64)
    net, _ = witness_from_polynomial(F)
    res = reduce_system(system_from_witness(net, ["x"]))
    assert list(res.annihilators.values()) == [parse_mpoly("(1+X)*Y1 + 1", 2)]


def test_reduce_single_polynomial_is_itself():
    P = parse_mpoly("Y1^2 + Y1 + X", 2)
    x = AlgebraicSeries.from_polynomial(P, 0, 64).expansion
    res = reduce_system(GoodEquationalSystem(2, 1, [P], [x], {0: "x"}))
    assert list(res.annihilators.values()) == [P]


@pytest.mark.parametrize(
    "text,p,seed",
    [("Y1^2 + Y1 + X", 2, 0), ("X*Y1^2 + Y1 + 1", 2, 1), ("Y1^2 - 1 - X", 3, 1), ("Y1^3 - Y1 - X", 3, 0)],
)
def test_reduce_witness_systems(text, p, seed):
    F = AlgebraicSeries.from_polynomial(parse_mpoly(text, p), seed, 64)
    net, _ = witness_from_polynomial(F)
    sys = system_from_witness(net, ["x"])
    res = reduce_system(sys)
    (U,) = res.annihilators.values()
    assert verify_annihilation(U, F.expansion)


def test_iteration_cap():
    sys = counterexample_system(FpPoly(2, [1, 1, 1]))
    with pytest.raises(ReductionStuck):
        reduce_system(sys, max_iters=1)


def test_format_round_trip():
    sys = counterexample_system(FpPoly(2, [1, 0, 1, 1]))
    sys.domain_constraints.append(parse_mpoly("Y1 + 1", 2, 3))
    text = format_system(sys)
    back = parse_system(text)
    assert format_system(back) == text
    assert back.sigma == sys.sigma and back.targets == sys.targets
