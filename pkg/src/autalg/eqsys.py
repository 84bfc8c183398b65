"""Good equational systems over K = F_p[X] and their reduction to one variable.

A system carries polynomials sigma in Y1..Yn, a base point of series at which
all of them vanish, distinguished indices with target descriptions, and a list
of polynomials required to be nonzero (the open set). Every transformation
keeps the base point a common root.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .christol import verify_annihilation
from .elimination import EliminationError, candidate_orders, eliminate_all_but
from .mpoly import MultiPolynomial, format_mpoly, parse_mpoly
from .poly import FpPoly
from .series import SeriesError, TruncatedLaurentSeries, cartier, format_series, mpoly_eval, parse_series
from .tyszka import ConstraintNetwork, GeneralizedCartier, gco_instance


class EqsysError(ValueError):
    pass


class SplitError(EqsysError):
    pass


class ReductionStuck(EqsysError):
    def __init__(self, message: str, trace: list[str]):
        super().__init__(message)
        self.trace = trace


def _vanishes(P: MultiPolynomial, point) -> bool:
    return mpoly_eval(P, point).is_zero_so_far()


@dataclass
class GoodEquationalSystem:
    p: int
    n: int
    sigma: list[MultiPolynomial]
    base_point: list[TruncatedLaurentSeries]
    targets: dict[int, str]
    domain_constraints: list[MultiPolynomial] = field(default_factory=list)
    names: list[str] = field(default_factory=list)
    solved: list = field(default_factory=list)
    trace: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.names:
            self.names = [f"Y{i + 1}" for i in range(self.n)]

    @property
    def distinguished(self) -> list[int]:
        return sorted(self.targets)

    def validate(self):
        if len(self.base_point) != self.n or len(self.names) != self.n:
            raise EqsysError("base point and names must have one entry per variable")
        for j in self.targets:
            if not 0 <= j < self.n:
                raise EqsysError(f"distinguished index {j + 1} out of range")
        for P in self.sigma:
            if P.n != self.n:
                raise EqsysError("polynomial over the wrong number of variables")
            if not _vanishes(P, self.base_point):
                raise EqsysError(f"base point is not a root of {format_mpoly(P)}")
        for D in self.domain_constraints:
            if _vanishes(D, self.base_point):
                raise EqsysError(f"base point violates {format_mpoly(D)} != 0")
        return self

    def holders(self, j: int) -> list[int]:
        return [k for k, P in enumerate(self.sigma) if P.mentions(j)]

    def log(self, msg: str) -> "GoodEquationalSystem":
        return replace(self, trace=self.trace + [msg])

    def show(self, P: MultiPolynomial) -> str:
        text = format_mpoly(P)
        for i in reversed(range(self.n)):
            text = text.replace(f"Y{i + 1}", f"<{i}>")
        for i in range(self.n):
            text = text.replace(f"<{i}>", self.names[i])
        return text


def _dedupe(polys) -> list[MultiPolynomial]:
    """Drop repeats and units; content is kept since a constraint D != 0 must
    survive specializing X."""
    out: list[MultiPolynomial] = []
    for P in polys:
        if P.is_zero() or (P.is_constant() and P.constant_value().degree == 0):
            continue
        if P not in out:
            out.append(P)
    return out


def _clean(polys) -> list[MultiPolynomial]:
    out, seen = [], set()
    for P in polys:
        if P.is_zero():
            continue
        P = P.primitive()
        if P not in seen:
            seen.add(P)
            out.append(P)
    return out


def drop_variables(sys: GoodEquationalSystem, drop) -> GoodEquationalSystem:
    """Remove variables that no polynomial or constraint mentions any more."""
    drop = set(drop)
    keep = [i for i in range(sys.n) if i not in drop]
    mapping = {old: new for new, old in enumerate(keep)}
    n = len(keep)
    return replace(
        sys,
        n=n,
        sigma=[P.remap(n, mapping) for P in sys.sigma],
        base_point=[sys.base_point[i] for i in keep],
        targets={mapping[j]: t for j, t in sys.targets.items()},
        domain_constraints=[D.remap(n, mapping) for D in sys.domain_constraints],
        names=[sys.names[i] for i in keep],
    )


# ---------------------------------------------------------------------------
# From witness networks


def _const_poly(value: TruncatedLaurentSeries):
    if not value.exact or (len(value.coeffs) and value.offset < 0):
        return None
    return value.to_poly()


def merge_defined(sys: GoodEquationalSystem, keep=()) -> GoodEquationalSystem:
    """Substitute away non-distinguished variables given by Y_k - R with R free of Y_k.

    Definitions with the fewest terms go first, so products like X*G^p = X*(G^p)
    are unfolded before sums. Variables named in ``keep`` are never substituted.
    """
    keep = set(keep)
    while True:
        hit = None
        for k, P in enumerate(sys.sigma):
            for v in sorted(P.variables(), reverse=True):
                if v in sys.targets or sys.names[v] in keep or P.degree(v) != 1:
                    continue
                parts = P.coeffs_in(v)
                c = parts[1]
                if not c.is_constant() or c.constant_value().degree != 0:
                    continue
                rest = parts.get(0, MultiPolynomial.zero(sys.p, sys.n))
                rank = (len(rest.terms), -v, k)
                if hit is None or rank < hit[0]:
                    hit = (rank, k, v, c.constant_value().lc(), rest)
        if hit is None:
            return sys
        _, *hit = hit
        k, v, c, rest = hit
        value = rest.scale(FpPoly.const(sys.p, -pow(c, -1, sys.p)))
        sigma = [Q.substitute(v, value) for i, Q in enumerate(sys.sigma) if i != k]
        cons = [D.substitute(v, value) for D in sys.domain_constraints]
        sys = replace(
            sys,
            sigma=_clean(sigma),
            domain_constraints=cons,
            solved=sys.solved + [(sys.names[v], value)],
            trace=sys.trace + [f"merge {sys.names[v]} := {sys.show(value)}"],
        )
        sys = drop_variables(sys, [v])


def system_from_witness(net: ConstraintNetwork, targets, merge: bool = True) -> GoodEquationalSystem:
    """One variable per non-constant element, one ternary polynomial per triple.

    ``targets`` lists handles (or maps handles to descriptions). Constants
    must be polynomials in X; a non-polynomial constant is kept as a variable.
    """
    if isinstance(targets, str):
        targets = [targets]
    if not isinstance(targets, dict):
        targets = {h: f"target set of {h}" for h in targets}
    p = net.ambient.p
    consts: dict[int, FpPoly] = {}
    for c in sorted(net.constants):
        poly = _const_poly(net.elements[c].value)
        if poly is not None:
            consts[c] = poly
    var_elems = [i for i in range(net.size) if i not in consts]
    const_targets = [h for h in targets if net.index(h) in consts]
    if not var_elems or const_targets:
        if len(targets) > 1 and const_targets:
            raise EqsysError(f"target {const_targets[0]} is a constant")
        h = next(iter(targets))
        x = consts[net.index(h)]
        Y = MultiPolynomial.var(p, 1, 0)
        return GoodEquationalSystem(
            p, 1, [Y - MultiPolynomial.const(p, 1, x)], [TruncatedLaurentSeries.from_poly(x)], {0: targets[h]}, names=[h]
        )
    n = len(var_elems)
    pos = {e: k for k, e in enumerate(var_elems)}

    def term(i):
        if i in consts:
            return MultiPolynomial.const(p, n, consts[i])
        return MultiPolynomial.var(p, n, pos[i])

    sigma = []
    for op, a, b, c in net.triples():
        if a in consts and b in consts and c in consts:
            continue
        lhs = term(a) + term(b) if op == "+" else term(a) * term(b)
        sigma.append(lhs - term(c))
    tmap = {}
    for h, desc in targets.items():
        i = net.index(h)
        if i in consts:
            raise EqsysError(f"target {h} is a constant")
        tmap[pos[i]] = desc
    sys = GoodEquationalSystem(
        p,
        n,
        _clean(sigma),
        [net.elements[i].value for i in var_elems],
        tmap,
        names=[net.elements[i].handle for i in var_elems],
        trace=[f"encoded {len(net.add_triples) + len(net.mul_triples)} triples over {n} variables"],
    )
    anchors = [net.elements[i].handle for i in net.constants if i not in consts]
    return merge_defined(sys, keep=anchors) if merge else sys


def counterexample_system(H1: FpPoly) -> GoodEquationalSystem:
    """{H1 - Y1^p - X*Y2^p, Y3 - Y2^p - X*Y1^p} with Y3 distinguished.

    The base point is (Lambda_0 H1, Lambda_1 H1, its swap), the only choice
    making both polynomials vanish when p = 2; for odd p the remaining
    Cartier components of H1 must vanish.
    """
    p = H1.p
    parts = [H1.cartier(i) for i in range(p)]
    if any(parts[2:]):
        raise EqsysError("H1 needs Cartier components only at digits 0 and 1")
    X = MultiPolynomial.const(p, 3, FpPoly.x(p))
    Y1, Y2, Y3 = (MultiPolynomial.var(p, 3, i) for i in range(3))
    sigma = [MultiPolynomial.const(p, 3, H1) - Y1**p - X * Y2**p, Y3 - Y2**p - X * Y1**p]
    F, G = (TruncatedLaurentSeries.from_poly(a) for a in parts[:2])
    x = TruncatedLaurentSeries.x(p)
    base = [F, G, G.frobenius() + x * F.frobenius()]
    return GoodEquationalSystem(p, 3, sigma, base, {2: "H2"}, names=["F", "G", "H2"]).validate()


# ---------------------------------------------------------------------------
# Simplification over one variable


def simplify_over_variable(sys: GoodEquationalSystem, j: int) -> GoodEquationalSystem:
    """Combine polynomials until at most one mentions Y_j.

    With P1, P2 of Y_j-degrees d1 >= d2 and leading coefficients a, b, P1 is
    replaced by b*P1 - a*Y_j^(d1-d2)*P2 and b != 0 joins the domain
    constraints. A leading coefficient vanishing at the base point is peeled
    off instead: Q becomes Q - lead*Y_j^d together with lead.
    """
    if j in sys.targets:
        raise EqsysError("cannot simplify over a distinguished variable")
    p, n = sys.p, sys.n
    sigma = list(sys.sigma)
    cons = list(sys.domain_constraints)
    trace = list(sys.trace)
    Yj = MultiPolynomial.var(p, n, j)
    while True:
        hold = sorted((P for P in sigma if P.mentions(j)), key=lambda P: (P.degree(j), P.total_degree(), len(P.terms)))
        if len(hold) <= 1:
            break
        P2, P1 = hold[0], hold[-1]
        peeled = False
        for Q in (P2, P1):
            lead = Q.leading_coeff_in(j)
            if not lead.is_constant() and _vanishes(lead, sys.base_point):
                d = Q.degree(j)
                rest = Q - lead * Yj ** d
                sigma = [R for R in sigma if R is not Q] + [rest, lead]
                trace.append(f"peel leading coefficient {sys.show(lead)} (vanishes at base point)")
                peeled = True
                break
        if peeled:
            sigma = _clean(sigma)
            continue
        d1, d2 = P1.degree(j), P2.degree(j)
        a, b = P1.leading_coeff_in(j), P2.leading_coeff_in(j)
        R = b * P1 - a * Yj ** (d1 - d2) * P2
        sigma = [Q for Q in sigma if Q is not P1] + [R]
        if not (b.is_constant() and b.constant_value().degree == 0):
            cons.append(b)
            trace.append(f"assume {sys.show(b)} != 0")
        trace.append(f"combine over {sys.names[j]}: degree {d1} with {d2}")
        sigma = _clean(sigma)
    return replace(sys, sigma=sigma, domain_constraints=_dedupe(cons), trace=trace)


# ---------------------------------------------------------------------------
# Splitting in characteristic p


def is_p_divisible(P: MultiPolynomial) -> bool:
    return bool(P.variables()) and all(k % P.p == 0 for e in P.terms for k in e)


def split_polynomial(P: MultiPolynomial, gco: GeneralizedCartier | None = None, base_point=None) -> list[MultiPolynomial]:
    """P = sum_r r * (P_r)^p with P_r = sum_s lambda_{alpha_s}(r) Y^s; returns the nonzero P_r."""
    p = P.p
    gco = gco or gco_instance(p)
    if not is_p_divisible(P):
        raise SplitError("every variable must occur with exponent divisible by p")
    parts: list[dict] = [dict() for _ in gco.R]
    for e, c in P.terms.items():
        lams = gco.decompose(c)
        if len(lams) != 1:
            raise SplitError("ambiguous decomposition")
        for r, v in enumerate(lams[0]):
            if not isinstance(v, FpPoly):
                raise SplitError("coefficient does not decompose inside K")
            if v:
                parts[r][tuple(k // p for k in e)] = v
    out = [MultiPolynomial(p, P.n, t) for t in parts if t]
    if base_point is not None:
        for Q in out:
            if not _vanishes(Q, base_point):
                raise SplitError(f"base point is not a root of the component {format_mpoly(Q)}")
    return out


def split_system(sys: GoodEquationalSystem, k: int, gco: GeneralizedCartier | None = None) -> GoodEquationalSystem:
    P = sys.sigma[k]
    parts = split_polynomial(P, gco, sys.base_point)
    sigma = [Q for i, Q in enumerate(sys.sigma) if i != k] + parts
    msg = f"split {sys.show(P)} into {len(parts)} part(s)"
    return replace(sys, sigma=_clean(sigma), trace=sys.trace + [msg])


def cartier_substitute(sys: GoodEquationalSystem, k: int) -> GoodEquationalSystem:
    """Write Y_k = sum_r X^r Z_r^p with fresh Z_r.

    A distinguished Y_k stays and gains the defining polynomial; otherwise it
    is replaced everywhere.
    """
    p = sys.p
    v = sys.base_point[k]
    if len(v.coeffs) and v.offset < 0:
        raise EqsysError("Cartier components need a power-series coordinate")
    n2 = sys.n + p
    ext = {i: i for i in range(sys.n)}
    sigma = [P.remap(n2, ext) for P in sys.sigma]
    cons = [D.remap(n2, ext) for D in sys.domain_constraints]
    expansion = MultiPolynomial.zero(p, n2)
    for r in range(p):
        expansion = expansion + MultiPolynomial.var(p, n2, sys.n + r) ** p * MultiPolynomial.const(p, n2, FpPoly.monomial(p, r))
    names = sys.names + [f"{sys.names[k]}_{r}" for r in range(p)]
    base = sys.base_point + [cartier(r, v) for r in range(p)]
    sigma = [P.substitute(k, expansion) for P in sigma]
    cons = [D.substitute(k, expansion) for D in cons]
    out = replace(sys, n=n2, names=names, base_point=base, domain_constraints=cons)
    msg = f"substitute {sys.names[k]} = sum_r X^r ({sys.names[k]}_r)^{p}"
    if k in sys.targets:
        sigma.append(MultiPolynomial.var(p, n2, k) - expansion)
        return replace(out, sigma=_clean(sigma), trace=sys.trace + [msg])
    out = replace(out, sigma=_clean(sigma), trace=sys.trace + [msg])
    return drop_variables(out, [k])


# ---------------------------------------------------------------------------
# Elimination


def eliminate_variable(sys: GoodEquationalSystem, j: int) -> GoodEquationalSystem:
    """Remove Y_j: simplify first, then drop the single polynomial holding Y_j
    and record it as the solved form."""
    if j in sys.targets:
        raise EqsysError("cannot eliminate a distinguished variable")
    sys = simplify_over_variable(sys, j)
    hold = sys.holders(j)
    if hold:
        P = sys.sigma[hold[0]]
        if P.partial(j).is_zero():
            raise EqsysError(f"dP/d{sys.names[j]} vanishes identically; split first")
        sigma = [Q for i, Q in enumerate(sys.sigma) if i != hold[0]]
        msg = f"eliminate {sys.names[j]} (solved form {sys.show(P)})"
        sys = replace(sys, sigma=sigma, solved=sys.solved + [(sys.names[j], P)], trace=sys.trace + [msg])
    else:
        sys = sys.log(f"eliminate {sys.names[j]} (unused)")
    cons = [D for D in sys.domain_constraints if not D.mentions(j)]
    return drop_variables(replace(sys, domain_constraints=cons), [j])


# ---------------------------------------------------------------------------
# The two-phase driver


@dataclass
class ReductionResult:
    annihilators: dict[str, MultiPolynomial]
    verdicts: dict[str, object]
    system: GoodEquationalSystem
    trace: list[str]


def _variable_order(sys: GoodEquationalSystem) -> list[int]:
    used = set()
    for P in sys.sigma:
        used |= P.variables()
    free = [v for v in used if v not in sys.targets]

    def weight(v):
        return (max(P.degree(v) for P in sys.sigma if P.mentions(v)), v)

    return sorted(free, key=weight)


def _univariate(P: MultiPolynomial, i: int) -> MultiPolynomial:
    return P.remap(1, {i: 0})


def reduce_system(
    sys: GoodEquationalSystem, max_iters: int = 10_000, max_vars: int = 24, max_substitutions: int = 16
) -> ReductionResult:
    """Phase 1 removes every non-distinguished variable (split, simplify,
    eliminate; Cartier substitution when stuck). Phase 2 eliminates the other
    distinguished variables by resultants and verifies each annihilator.

    Repeated Cartier substitution that never unblocks the system usually means
    a coefficient lies outside F_p(X); after ``max_substitutions`` of them the
    reduction stops with ReductionStuck.
    """
    sys.validate()
    sys = sys.log("note: eliminating a variable projects its solved form (exact stand-in for the implicit function step)")
    gco = gco_instance(sys.p)
    steps = substitutions = 0

    def tick(s):
        nonlocal steps
        steps += 1
        if steps > max_iters:
            raise ReductionStuck(f"iteration cap {max_iters} reached", s.trace)

    while True:
        tick(sys)
        k = next((k for k, P in enumerate(sys.sigma) if is_p_divisible(P)), None)
        if k is not None:
            sys = split_system(sys, k, gco)
            continue
        order = _variable_order(sys)
        if not order:
            break
        progressed = False
        stuck = None
        for j in order:
            cand = simplify_over_variable(sys, j)
            hold = cand.holders(j)
            if hold and cand.sigma[hold[0]].partial(j).is_zero():
                stuck = stuck if stuck is not None else (cand, j)
                continue
            sys = eliminate_variable(cand, j)
            progressed = True
            break
        if progressed:
            continue
        cand, j = stuck
        P = cand.sigma[cand.holders(j)[0]]
        bad = sorted(v for v in P.variables() if any(e[v] % sys.p for e in P.terms))
        if not bad or cand.n + sys.p > max_vars:
            sigma = [Q for Q in cand.sigma if Q is not P]
            sys = replace(cand, sigma=sigma, trace=cand.trace + [f"drop {cand.show(P)} (projection without a derivative)"])
            sys = drop_variables(sys, [j]) if not any(Q.mentions(j) for Q in sys.sigma) else sys
            continue
        substitutions += 1
        if substitutions > max_substitutions:
            raise ReductionStuck(
                f"{max_substitutions} Cartier substitutions without progress; coefficients may lie outside F_p(X)",
                cand.trace,
            )
        sys = cartier_substitute(cand, bad[0])
    annihilators, verdicts = {}, {}
    for d in sys.distinguished:
        tick(sys)
        name = sys.names[d]
        found = None
        pool = [P for P in sys.sigma if P.variables() == {d}]
        if not pool:
            for order in candidate_orders(sys.sigma, d, limit=6):
                try:
                    pool = eliminate_all_but(sys.sigma, d, order)
                except EliminationError:
                    continue
                if pool:
                    break
        for P in sorted(pool, key=lambda P: (P.degree(d), P.x_degree())):
            U = _univariate(P, d)
            v = verify_annihilation(U, sys.base_point[d])
            if v:
                found = (U, v)
                break
        if found is None:
            raise ReductionStuck(f"no verified annihilator for {name}", sys.trace)
        annihilators[name], verdicts[name] = found
        sys = sys.log(f"annihilator for {name}: {format_mpoly(found[0])} ({found[1]})")
    return ReductionResult(annihilators, verdicts, sys, sys.trace)


# ---------------------------------------------------------------------------
# Text format
#
#   p = 2
#   n = 3
#   names = Y1 Y2 Y3
#   poly = (1+X+X^2) + Y1^2 + X*Y2^2
#   base 1 = p=2 offset=0 coeffs=1,1 trunc=exact
#   target 3 = roots of the annihilator
#   nonzero = Y1 + 1


def format_system(sys: GoodEquationalSystem) -> str:
    lines = [f"p = {sys.p}", f"n = {sys.n}", "names = " + " ".join(sys.names)]
    lines += [f"poly = {format_mpoly(P)}" for P in sys.sigma]
    lines += [f"base {i + 1} = {format_series(v)}" for i, v in enumerate(sys.base_point)]
    lines += [f"target {j + 1} = {t}" for j, t in sorted(sys.targets.items())]
    lines += [f"nonzero = {format_mpoly(D)}" for D in sys.domain_constraints]
    return "\n".join(lines) + "\n"


def parse_system(text: str) -> GoodEquationalSystem:
    p = n = None
    names: list[str] = []
    polys, cons, base, targets = [], [], {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise EqsysError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        parts = key.split()
        try:
            if parts == ["p"]:
                p = int(value)
            elif parts == ["n"]:
                n = int(value)
            elif parts == ["names"]:
                names = value.split()
            elif parts == ["poly"]:
                polys.append(value)
            elif parts == ["nonzero"]:
                cons.append(value)
            elif parts[0] == "base" and len(parts) == 2:
                base[int(parts[1]) - 1] = parse_series(value)
            elif parts[0] == "target" and len(parts) == 2:
                targets[int(parts[1]) - 1] = value
            else:
                raise EqsysError(f"line {lineno}: unknown field {key!r}")
        except (ValueError, SeriesError) as exc:
            if isinstance(exc, EqsysError):
                raise
            raise EqsysError(f"line {lineno}: {exc}") from exc
    if p is None or n is None:
        raise EqsysError("system file needs p and n")
    if sorted(base) != list(range(n)):
        raise EqsysError("base point needs one series per variable")
    sys = GoodEquationalSystem(
        p,
        n,
        [parse_mpoly(s, p, n) for s in polys],
        [base[i] for i in range(n)],
        targets,
        [parse_mpoly(s, p, n) for s in cons],
        names=names or [],
    )
    return sys.validate()
