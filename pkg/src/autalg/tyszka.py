"""Pseudo-morphisms on finite subsets of a field and the witness sets built from them.

A pseudo-morphism on A fixes the constants and respects every sum a+b=c and
product a*b=c whose three members lie in A. Over a finite field all of them
can be enumerated; over F_p((X)) we run a sound (incomplete) propagation that
derives what every pseudo-morphism must do.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import comb
from typing import Any

from .christol import AlgebraicSeries, verify_annihilation
from .field import GF
from .mpoly import MultiPolynomial
from .poly import FpPoly, RationalFunction
from .series import (
    DEFAULT_TRUNC,
    PrecisionError,
    TruncatedLaurentSeries,
    cartier,
    hensel_expand,
    mpoly_eval,
    simple_residual_roots,
    tail_section,
)
from .symbolic import SPoly


class NetworkError(ValueError):
    pass


class AmbiguousElementError(NetworkError):
    pass


class ContradictionError(NetworkError):
    def __init__(self, message: str, triple=None):
        super().__init__(message)
        self.triple = triple


class SeparationError(NetworkError):
    pass


class DegenerateWarning(UserWarning):
    pass


# ---------------------------------------------------------------------------
# Ambients


class FiniteAmbient:
    kind = "finite"

    def __init__(self, gf: GF):
        self.gf = gf

    def add(self, a, b):
        return self.gf.add(a, b)

    def mul(self, a, b):
        return self.gf.mul(a, b)

    def equal(self, a, b) -> bool:
        return a == b

    def show(self, v) -> str:
        return self.gf.name(v)


class SeriesAmbient:
    kind = "series"

    def __init__(self, p: int):
        self.p = p

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def equal(self, a, b) -> bool:
        return a.agrees(b)

    def show(self, v) -> str:
        return v.pretty(8)


@dataclass
class AmbientElement:
    handle: str
    value: Any
    constant: bool = False
    expression: str = ""
    aliases: list = field(default_factory=list)

    def describe(self) -> str:
        names = [self.expression or self.handle] + self.aliases
        return " = ".join(dict.fromkeys(names))


@dataclass
class ConstraintNetwork:
    ambient: Any
    elements: list[AmbientElement]
    add_triples: set
    mul_triples: set
    constants: set
    precision: int | None = None

    @property
    def size(self) -> int:
        return len(self.elements)

    def index(self, handle: str) -> int:
        for k, e in enumerate(self.elements):
            if e.handle == handle or handle in e.aliases:
                return k
        raise KeyError(handle)

    def triples(self):
        """Deterministic list of (op, a, b, c)."""
        return [("+",) + t for t in sorted(self.add_triples)] + [("*",) + t for t in sorted(self.mul_triples)]

    def restrict(self, keep) -> "ConstraintNetwork":
        keep = sorted(set(keep))
        idx = {old: new for new, old in enumerate(keep)}

        def sub(ts):
            return {tuple(idx[i] for i in t) for t in ts if all(i in idx for i in t)}

        return ConstraintNetwork(
            self.ambient,
            [self.elements[i] for i in keep],
            sub(self.add_triples),
            sub(self.mul_triples),
            {idx[c] for c in self.constants if c in idx},
            self.precision,
        )


def _series_window(elements):
    finite = [int(e.value.trunc) for e in elements if not e.value.exact]
    if finite:
        hi = min(finite)
    else:
        hi = max((e.value.offset + len(e.value.coeffs) for e in elements), default=0)
    lo = min([0] + [e.value.offset for e in elements if len(e.value.coeffs)])
    return lo, max(hi, lo)


def build_network(elements: list[AmbientElement], ambient=None) -> ConstraintNetwork:
    """Discover every sum and product among the elements (hash lookup of results).

    Series are identified by their coefficients below the smallest truncation
    order; two elements that coincide there are rejected as ambiguous.
    """
    elements = list(elements)
    if not elements:
        return ConstraintNetwork(ambient, [], set(), set(), set())
    if ambient is None:
        v = elements[0].value
        if not isinstance(v, TruncatedLaurentSeries):
            raise NetworkError("finite-field elements need an explicit FiniteAmbient")
        ambient = SeriesAmbient(v.p)
    if ambient.kind == "series":
        lo, hi = _series_window(elements)
        all_exact = all(e.value.exact for e in elements)

        def key(v):
            if v.trunc < hi:
                return None
            if all_exact and (not v.exact or v.offset + len(v.coeffs) > hi):
                return None
            if len(v.coeffs) and v.offset < lo:
                return None
            return v.key(lo, hi)

        precision = hi
    else:
        lo = hi = None

        def key(v):
            return v

        precision = None
    table: dict = {}
    for k, e in enumerate(elements):
        kk = key(e.value)
        if kk in table:
            other = elements[table[kk]].handle
            raise AmbiguousElementError(f"elements {other!r} and {e.handle!r} are equal at working precision")
        table[kk] = k
    adds, muls = set(), set()
    n = len(elements)
    for a in range(n):
        va = elements[a].value
        for b in range(n):
            vb = elements[b].value
            c = table.get(key(ambient.add(va, vb)))
            if c is not None:
                adds.add((a, b, c))
            c = table.get(key(ambient.mul(va, vb)))
            if c is not None:
                muls.add((a, b, c))
    constants = {k for k, e in enumerate(elements) if e.constant}
    return ConstraintNetwork(ambient, elements, adds, muls, constants, precision)


def collect_elements(candidates, p: int) -> list[AmbientElement]:
    """Merge candidates (handle, value, constant, expression) equal at truncation.

    Exact values win over truncated ones; a merged element is a constant as
    soon as one of its names is.
    """
    out: list[AmbientElement] = []
    for handle, value, const, expr in candidates:
        if value.p != p:
            raise NetworkError("elements over different primes")
        for e in out:
            if e.value.agrees(value):
                if e.handle != handle and handle not in e.aliases:
                    e.aliases.append(handle)
                if value.exact and not e.value.exact:
                    e.value = value
                e.constant = e.constant or const
                break
        else:
            out.append(AmbientElement(handle, value, const, expr or handle))
    return out


# ---------------------------------------------------------------------------
# Pseudo-morphisms


def _as_list(net, phi):
    if isinstance(phi, dict):
        return [phi[e.handle] if e.handle in phi else phi[k] for k, e in enumerate(net.elements)]
    return list(phi)


def is_pseudo_morphism(net: ConstraintNetwork, phi) -> bool:
    vals = _as_list(net, phi)
    if len(vals) != net.size:
        raise NetworkError("phi must be total on the network")
    amb = net.ambient
    for c in net.constants:
        if not amb.equal(vals[c], net.elements[c].value):
            return False
    for a, b, c in net.add_triples:
        if not amb.equal(amb.add(vals[a], vals[b]), vals[c]):
            return False
    for a, b, c in net.mul_triples:
        if not amb.equal(amb.mul(vals[a], vals[b]), vals[c]):
            return False
    return True


def enumerate_pseudo_morphisms(net: ConstraintNetwork, first_value: int | None = None) -> list[tuple[int, ...]]:
    """All pseudo-morphisms of a network over F_q, as value tuples in element order.

    Backtracking with forward checking: each assignment is pushed through the
    triples (third member of a sum, product or quotient) before branching.
    ``first_value`` restricts the first branching element, which partitions
    the search.
    """
    if net.ambient.kind != "finite":
        raise NetworkError("enumeration needs a finite ambient")
    gf = net.ambient.gf
    n = net.size
    occ: list[list] = [[] for _ in range(n)]
    for t in net.triples():
        for i in set(t[1:]):
            occ[i].append(t)
    val: list = [None] * n
    trail: list[int] = []

    def assign(i, v, queue):
        if val[i] is None:
            val[i] = v
            trail.append(i)
            queue.append(i)
            return True
        return val[i] == v

    def propagate(queue):
        while queue:
            i = queue.pop()
            for op, a, b, c in occ[i]:
                va, vb, vc = val[a], val[b], val[c]
                if op == "+":
                    if va is not None and vb is not None:
                        if not assign(c, gf.add(va, vb), queue):
                            return False
                    elif va is not None and vc is not None:
                        if not assign(b, gf.sub(vc, va), queue):
                            return False
                    elif vb is not None and vc is not None:
                        if not assign(a, gf.sub(vc, vb), queue):
                            return False
                else:
                    if va is not None and vb is not None:
                        if not assign(c, gf.mul(va, vb), queue):
                            return False
                    elif va is not None and vc is not None:
                        if va:
                            if not assign(b, gf.div(vc, va), queue):
                                return False
                        elif vc:
                            return False
                    elif vb is not None and vc is not None:
                        if vb:
                            if not assign(a, gf.div(vc, vb), queue):
                                return False
                        elif vc:
                            return False
        return True

    def undo(mark):
        while len(trail) > mark:
            val[trail.pop()] = None

    queue: list[int] = []
    for c in sorted(net.constants):
        if not assign(c, net.elements[c].value, queue):
            return []
    if not propagate(queue):
        return []
    order = sorted(range(n), key=lambda i: (-len(occ[i]), i))
    results: list[tuple[int, ...]] = []

    def search(first):
        i = next((j for j in order if val[j] is None), None)
        if i is None:
            results.append(tuple(val))
            return
        choices = [first_value] if first and first_value is not None else range(gf.q)
        for v in choices:
            mark = len(trail)
            q: list[int] = []
            if assign(i, v, q) and propagate(q):
                search(False)
            undo(mark)

    search(True)
    return results


def field_network(q: int) -> ConstraintNetwork:
    """The whole of F_q as a witness set, with 0 and 1 as constants."""
    gf = GF(q)
    elements = [AmbientElement(gf.name(a), a, constant=a in (0, 1)) for a in gf.elements]
    return build_network(elements, FiniteAmbient(gf))


def subset_network(q: int, values, constants=()) -> ConstraintNetwork:
    gf = GF(q)
    elements = [AmbientElement(gf.name(a), a, constant=a in set(constants)) for a in values]
    return build_network(elements, FiniteAmbient(gf))


def characterizable_subfield(q: int) -> set[int]:
    """Elements of F_q fixed by every pseudo-morphism on the full-field network."""
    net = field_network(q)
    maps = enumerate_pseudo_morphisms(net)
    return {a for a in range(q) if all(phi[a] == a for phi in maps)}


# ---------------------------------------------------------------------------
# Propagation over series


@dataclass(frozen=True)
class Forced:
    value: TruncatedLaurentSeries

    def __str__(self):
        return f"Forced({self.value.pretty(6)})"


@dataclass(frozen=True)
class RootOf:
    polynomial: SPoly
    symbol: int
    expression: SPoly

    def __str__(self):
        return f"RootOf({self.polynomial}) via {self.expression}"


@dataclass(frozen=True)
class Open:
    expression: SPoly | None = None

    def __str__(self):
        return "Open"


@dataclass
class DeductionState:
    network: ConstraintNetwork
    statuses: list
    symbols: list[int]
    trace: list[str]

    def status(self, handle: str):
        return self.statuses[self.network.index(handle)]

    def forced(self, handle: str) -> bool:
        return isinstance(self.status(handle), Forced)

    def forced_value(self, handle: str) -> TruncatedLaurentSeries:
        st = self.status(handle)
        if not isinstance(st, Forced):
            raise NetworkError(f"{handle} is not forced")
        return st.value

    def audit(self) -> list:
        """Triples whose members are all Forced but violate the arithmetic."""
        bad = []
        amb = self.network.ambient
        for op, a, b, c in self.network.triples():
            sts = [self.statuses[i] for i in (a, b, c)]
            if all(isinstance(s, Forced) for s in sts):
                va, vb, vc = (s.value for s in sts)
                got = amb.add(va, vb) if op == "+" else amb.mul(va, vb)
                if not amb.equal(got, vc):
                    bad.append((op, a, b, c))
        return bad


def _hasse(Q: SPoly, s: int, k: int, u: TruncatedLaurentSeries) -> TruncatedLaurentSeries:
    """k-th Hasse derivative of the univariate Q (in S_s) evaluated at u."""
    p = Q.p
    total = TruncatedLaurentSeries.zero(p)
    for deg, coef in Q.coeffs_in(s).items():
        if deg >= k:
            b = comb(deg, k) % p
            if b:
                total = total + coef.constant().scale(b) * u ** (deg - k)
    return total


def _lower_val(v: TruncatedLaurentSeries) -> float:
    return v.offset if len(v.coeffs) else v.trunc


class _Propagator:
    def __init__(self, net: ConstraintNetwork, pinned, min_precision: int):
        if net.ambient is None or net.ambient.kind != "series":
            raise NetworkError("propagation runs over series networks")
        self.net = net
        self.p = net.ambient.p
        self.min_precision = min_precision
        self.prec = max(int(net.precision or DEFAULT_TRUNC), 8)
        self.expr: dict[int, SPoly] = {}
        self.symbols: list[int] = []
        self.solved: dict[int, SPoly] = {}
        self.roots: dict[int, SPoly] = {}
        self.trace: list[str] = []
        self.pinned = {}
        for key, v in (pinned or {}).items():
            i = net.index(key) if isinstance(key, str) else key
            self.pinned[i] = v

    def name(self, i):
        return self.net.elements[i].handle

    def inverse(self, c: TruncatedLaurentSeries):
        return c.inverse(self.prec)

    def is_nonzero(self, c: TruncatedLaurentSeries) -> bool:
        return len(c.coeffs) > 0

    # R1 and pins
    def seed(self):
        for c in sorted(self.net.constants):
            self.expr[c] = SPoly.const(self.net.elements[c].value)
            self.trace.append(f"R1 {self.name(c)} is a constant")
        for i, v in sorted(self.pinned.items()):
            if i in self.expr and not self.expr[i].constant().agrees(v):
                raise ContradictionError(f"pin on {self.name(i)} contradicts its constant value")
            self.expr[i] = SPoly.const(v)
            self.trace.append(f"pin {self.name(i)}")

    # R2/R3: push expressions through triples; fully known triples become constraints
    def sweep(self, constraints, done):
        progress = True
        while progress:
            progress = False
            for t in self.net.triples():
                if t in done:
                    continue
                op, a, b, c = t
                E = self.expr
                ka, kb, kc = a in E, b in E, c in E
                if ka and kb and kc:
                    lhs = E[a] + E[b] if op == "+" else E[a] * E[b]
                    constraints.append((lhs - E[c], t))
                    done.add(t)
                elif ka and kb:
                    E[c] = E[a] + E[b] if op == "+" else E[a] * E[b]
                    self.trace.append(f"R2 {self.name(c)} from {self.name(a)} {op} {self.name(b)}")
                    done.add(t)
                    progress = True
                elif kc and (ka or kb):
                    known, unknown = (a, b) if ka else (b, a)
                    if op == "+":
                        E[unknown] = E[c] - E[known]
                    elif E[known].is_constant() and self.is_nonzero(E[known].constant()):
                        E[unknown] = E[c].scale(self.inverse(E[known].constant()))
                    else:
                        continue
                    self.trace.append(f"R2 {self.name(unknown)} from {self.name(c)} and {self.name(known)}")
                    done.add(t)
                    progress = True

    def new_symbol(self, constraints, done) -> bool:
        missing = [i for i in range(self.net.size) if i not in self.expr]
        if not missing:
            return False

        def score(i):
            hits = sum(1 for t in self.net.triples() if i in t[1:] and t not in done)
            return (-hits, i)

        i = min(missing, key=score)
        s = len(self.symbols)
        self.symbols.append(i)
        self.expr[i] = SPoly.symbol(self.p, s)
        self.trace.append(f"symbol S{s} := phi({self.name(i)})")
        return True

    def substitute_all(self, s: int, value: SPoly, constraints):
        for k in list(self.solved):
            self.solved[k] = self.solved[k].substitute(s, value)
        self.solved[s] = value
        for i in list(self.expr):
            self.expr[i] = self.expr[i].substitute(s, value)
        return [(C.substitute(s, value), t) for C, t in constraints]

    def linear_solve(self, C: SPoly):
        best = None
        for s in sorted(C.symbols()):
            if C.degree(s) != 1:
                continue
            parts = C.coeffs_in(s)
            coef = parts[1]
            if not coef.is_constant() or not self.is_nonzero(coef.constant()):
                continue
            rest = parts.get(0, SPoly.zero(self.p))
            if s in rest.symbols():
                continue
            v = coef.constant().offset
            if best is None or v < best[0]:
                best = (v, s, coef.constant(), rest)
        if best is None:
            return None
        _, s, coef, rest = best
        return s, (-rest).scale(self.inverse(coef))

    def integrality_bound(self, s: int) -> int:
        """m with phi(S_s) - u in X^m F_p[[X]], from elements affine in S_s."""
        m = 0
        u = self.net.elements[self.symbols[s]].value
        for i, E in self.expr.items():
            if E.symbols() != {s} or E.degree(s) != 1:
                continue
            value = self.net.elements[i].value
            if len(value.coeffs) and value.offset < 0:
                continue
            coef = E.coeffs_in(s)[1].constant()
            if not len(coef.coeffs):
                continue
            m = max(m, -coef.offset)
        return m

    def dominance(self, Q: SPoly, s: int):
        """True value u if Q has no other root u + h (h in X^m F_p[[X]])."""
        u = self.net.elements[self.symbols[s]].value
        value = Q.evaluate({s: u})
        if not value.is_zero_so_far() or value.trunc < self.min_precision:
            return None
        m = self.integrality_bound(s)
        d1 = _hasse(Q, s, 1, u)
        if not len(d1.coeffs):
            return None
        v1 = d1.offset
        for k in range(2, Q.degree(s) + 1):
            vk = _lower_val(_hasse(Q, s, k, u))
            if not v1 < vk + (k - 1) * m:
                return None
        return u

    def solve(self, constraints):
        queue = list(constraints)
        kept: list = []
        while queue:
            C, t = queue.pop(0)
            if C.is_constant():
                c = C.constant()
                if self.is_nonzero(c) and c.trunc >= self.min_precision:
                    op, a, b, cc = t
                    raise ContradictionError(
                        f"triple {self.name(a)} {op} {self.name(b)} = {self.name(cc)} is violated", t
                    )
                continue
            if C.p_divisible():
                parts = [P for P in C.cartier_split() if not P.is_zero()]
                self.trace.append(f"R4 Cartier split of a constraint into {len(parts)} parts")
                queue = [(P, t) for P in parts] + queue
                continue
            found = self.linear_solve(C)
            if found is None and len(C.symbols()) == 1:
                (s,) = C.symbols()
                u = self.dominance(C, s)
                if u is not None:
                    self.trace.append(f"R5 S{s} forced: simple root in its Hensel disk")
                    found = (s, SPoly.const(u))
            if found is None:
                kept.append((C, t))
                continue
            s, value = found
            self.trace.append(f"solve S{s} := {value}")
            queue = self.substitute_all(s, value, kept + queue)
            kept = []
        for C, _ in kept:
            syms = C.symbols()
            if len(syms) == 1:
                (s,) = syms
                if s not in self.roots or C.degree(s) < self.roots[s].degree(s):
                    self.roots[s] = C
        return kept

    def run(self) -> DeductionState:
        self.seed()
        constraints: list = []
        done: set = set()
        while True:
            self.sweep(constraints, done)
            if not self.new_symbol(constraints, done):
                break
        constraints = self.solve(constraints)
        statuses = []
        for i in range(self.net.size):
            E = self.expr[i]
            syms = E.symbols()
            if not syms:
                statuses.append(Forced(E.constant()))
            elif len(syms) == 1 and next(iter(syms)) in self.roots:
                s = next(iter(syms))
                statuses.append(RootOf(self.roots[s], s, E))
            else:
                statuses.append(Open(E))
        return DeductionState(self.net, statuses, list(self.symbols), self.trace)


def propagate_closure(net: ConstraintNetwork, pinned=None, min_precision: int = 4) -> DeductionState:
    """Fixpoint of the deduction rules over a series network.

    Rules: constants are fixed (R1); a triple with two known members gives
    the third (R2, powers included as R3); a constraint in which every unknown
    occurs with p-divisible exponent splits by Cartier uniqueness (R4); a
    constraint in one unknown gives RootOf, or Forced when the true value is
    the only root in its Hensel disk (R5). Unknowns are taken in F_p[[X]].
    """
    return _Propagator(net, pinned, min_precision).run()


# ---------------------------------------------------------------------------
# Witness sets


@dataclass
class TargetSet:
    description: str
    explicit: list = field(default_factory=list)


def _hensel_roots(P: MultiPolynomial, N: int):
    return [hensel_expand(P, s, N) for s in simple_residual_roots(P)]


def _series_handle(prefix, k):
    return f"{prefix}{k}"


def witness_candidates(F: AlgebraicSeries):
    """The four families: a_i, x^i, a_i x^i and the partial sums of P(x)."""
    P = F.annihilator
    p = P.p
    x = F.expansion
    coeffs = P.univariate(0)
    d = len(coeffs) - 1
    if d < 1 or coeffs[d].is_zero():
        raise NetworkError("annihilator needs degree >= 1 in Y")
    out = []
    partial = TruncatedLaurentSeries.zero(p)
    for i, a in enumerate(coeffs):
        av = TruncatedLaurentSeries.from_poly(a)
        xi = x**i
        term = av * xi
        partial = partial + term
        out.append((f"a{i}", av, True, f"a{i}"))
        out.append((f"x^{i}", xi, i == 0, "1" if i == 0 else ("x" if i == 1 else f"x^{i}")))
        out.append((f"a{i}x^{i}", term, False, f"a{i}*x^{i}"))
        handle = f"sum{i}"
        if i == d:
            partial = TruncatedLaurentSeries.zero(p)
        out.append((handle, partial, i == d, f"sum_(k<={i}) a_k x^k"))
    return out


def witness_from_polynomial(F: AlgebraicSeries):
    """Witness network A(x) for x = F.expansion and the target set B of roots of P."""
    P = F.annihilator
    elements = collect_elements(witness_candidates(F), P.p)
    _rename_target(elements, F.expansion, "x")
    net = build_network(elements)
    N = int(F.expansion.trunc)
    roots = [r for r in _hensel_roots(P, N)]
    return net, TargetSet(f"roots of {P}", roots)


def _rename_target(elements, value, handle):
    for e in elements:
        if e.value.agrees(value):
            if e.constant:
                # x lies in K: keep the constant's name, reach it through an alias
                if handle != e.handle and handle not in e.aliases:
                    e.aliases.append(handle)
            elif e.handle != handle:
                e.aliases.insert(0, e.handle)
                e.handle = handle
            return


def separation_order(F: AlgebraicSeries) -> int:
    """N such that F differs from every other Hensel root before X^(N+1) and
    val(P'(F)) <= N."""
    P = F.annihilator
    x = F.expansion
    N = 0
    for r in _hensel_roots(P, int(x.trunc)):
        same, k = r.agreement(x)
        if same:
            continue
        N = max(N, k)
    deriv = mpoly_eval(P.partial(0), [x])
    if not len(deriv.coeffs):
        raise SeparationError("P'(x) vanishes at working precision")
    N = max(N, deriv.offset)
    if N + 2 >= x.trunc:
        raise SeparationError("root separation not achieved at working precision")
    return N


def witness_tc_series(F: AlgebraicSeries, N: int | None = None) -> ConstraintNetwork:
    """A(x) together with coefficient constants f_0..f_N, X, tails G_j and X*G_j (j <= N+1)."""
    x = F.expansion
    p = F.p
    if N is None:
        N = separation_order(F)
    if N + 2 >= x.trunc:
        raise SeparationError("root separation not achieved at working precision")
    cands = witness_candidates(F)
    X = TruncatedLaurentSeries.x(p)
    cands.append(("X", X, True, "X"))
    for j in range(N + 1):
        cands.append((f"f{j}", TruncatedLaurentSeries.from_int(p, x.coeff(j)), True, f"f{j}"))
    for j in range(N + 2):
        G = tail_section(x, j)
        cands.append((f"G{j}", G, False, f"G{j}"))
        cands.append((f"XG{j}", X * G, False, f"X*G{j}"))
    elements = collect_elements(cands, p)
    _rename_target(elements, x, "x")
    return build_network(elements)


# ---------------------------------------------------------------------------
# The two-transcendental example


@dataclass
class CounterexampleReport:
    p: int
    precision: int
    forced: bool
    degenerate: bool
    state: DeductionState
    caveat: str = "F and G are treated as transcendental; this is assumed, not certified."

    def lines(self) -> list[str]:
        out = [f"p = {self.p}, working precision X^{self.precision}"]
        for e, st in zip(self.state.network.elements, self.state.statuses):
            out.append(f"  {e.describe():<16} {st}")
        out.append(f"phi(H2) forced to H2: {'yes' if self.forced else 'no'}")
        if self.degenerate:
            out.append("warning: F = G at truncation, the demonstration is vacuous")
        out.append(self.caveat)
        return out


def counterexample_network(F: TruncatedLaurentSeries, G: TruncatedLaurentSeries) -> ConstraintNetwork:
    p = F.p
    X = TruncatedLaurentSeries.x(p)
    Fp, Gp = F.frobenius(), G.frobenius()
    H1 = Fp + X * Gp
    H2 = Gp + X * Fp
    cands = [("X", X, True, "X"), ("H1", H1, True, "H1")]
    for name, S in (("F", F), ("G", G)):
        power = S
        for i in range(1, p + 1):
            if i > 1:
                power = power * S
            cands.append((name if i == 1 else f"{name}^{i}", power if i < p else S.frobenius(), False, ""))
    cands += [("XF^p", X * Fp, False, ""), ("XG^p", X * Gp, False, ""), ("H2", H2, False, "H2")]
    return build_network(collect_elements(cands, p))


def counterexample_311(F: TruncatedLaurentSeries, G: TruncatedLaurentSeries) -> CounterexampleReport:
    """Pin phi(H1) = H1 and check that propagation forces phi(H2) = H2."""
    if F.p != G.p:
        raise NetworkError("F and G must share the characteristic")
    if (len(F.coeffs) and F.offset < 0) or (len(G.coeffs) and G.offset < 0):
        raise NetworkError("F and G must be power series")
    N = int(min(F.trunc, G.trunc))
    F, G = F.truncate(N), G.truncate(N)
    degenerate = F.agrees(G)
    if degenerate:
        warnings.warn("F = G at truncation; H1 = H2 and the example is vacuous", DegenerateWarning, stacklevel=2)
    net = counterexample_network(F, G)
    h1 = net.index("H1")
    state = propagate_closure(net, {h1: net.elements[h1].value})
    st = state.status("H2")
    forced = isinstance(st, Forced) and st.value.agrees(net.elements[net.index("H2")].value)
    return CounterexampleReport(F.p, int(net.precision), forced, degenerate, state)


# ---------------------------------------------------------------------------
# Generalized Cartier operators and the bounded closure


@dataclass
class GeneralizedCartier:
    p: int
    R: list

    def decompose(self, x) -> list[tuple]:
        """Lambda_x as a list of maps, each a tuple indexed like R."""
        if isinstance(x, TruncatedLaurentSeries):
            return [tuple(cartier(i, x) for i in range(self.p))]
        if isinstance(x, (FpPoly, RationalFunction)):
            return [tuple(x.cartier(i) for i in range(self.p))]
        raise TypeError(f"cannot decompose {type(x).__name__}")

    def recompose(self, lam):
        total = None
        for r, v in zip(self.R, lam):
            if isinstance(v, TruncatedLaurentSeries):
                term = v.frobenius() * TruncatedLaurentSeries.from_poly(r)
            else:
                term = v**self.p * r
            total = term if total is None else total + term
        return total

    def is_k_stable(self, samples) -> bool:
        for x in samples:
            for lam in self.decompose(x):
                if not all(isinstance(v, (FpPoly, RationalFunction)) for v in lam):
                    return False
                back = self.recompose(lam)
                if isinstance(x, FpPoly) and isinstance(back, RationalFunction):
                    back_ok = back == RationalFunction(x)
                else:
                    back_ok = back == x
                if not back_ok:
                    return False
        return True


def gco_instance(p: int) -> GeneralizedCartier:
    return GeneralizedCartier(p, [FpPoly.monomial(p, i) for i in range(p)])


@dataclass
class KhatVerdict:
    member: bool
    depth: int | None
    witness: str = ""

    def __str__(self):
        if self.member:
            return f"yes at depth {self.depth}: {self.witness}"
        return "not found within the depth bound"


def khat_members(
    generators: dict,
    query: TruncatedLaurentSeries,
    depth: int = 3,
    min_precision: int = 8,
    max_level: int = 256,
) -> KhatVerdict:
    """Bounded search for the query in the Cartier closure of F_p(X, generators).

    Level n+1 adds Lambda_i of every level-n element. The query is exhibited
    when it equals a*s + b (a, b in F_p) or satisfies s1*y = s2 for level
    elements s, s1, s2. Only positive answers are certified.
    """
    p = query.p
    if query.exact:
        return KhatVerdict(True, 0, "query is a polynomial")
    level = [("X", TruncatedLaurentSeries.x(p))] + list(generators.items())

    def ok(a, b):
        same, k = a.agreement(b)
        return same and k >= min_precision

    for n in range(depth + 1):
        for name, s in level:
            for a in range(1, p):
                for b in range(p):
                    if ok(query, s.scale(a) + b):
                        return KhatVerdict(True, n, f"{a}*{name} + {b}" if b else (name if a == 1 else f"{a}*{name}"))
        if len(level) <= 48:
            for n1, s1 in level:
                for n2, s2 in level:
                    if n1 != n2 and not s1.is_zero_so_far() and ok(query * s1, s2):
                        return KhatVerdict(True, n, f"{n1}*y = {n2}")
        if n == depth:
            break
        nxt = list(level)
        for name, s in level:
            if len(s.coeffs) and s.offset < 0:
                continue
            for i in range(p):
                v = cartier(i, s)
                if v.trunc < min_precision or v.is_zero_so_far() or any(v.agrees(w) for _, w in nxt):
                    continue
                nxt.append((f"L{i}({name})", v))
        level = nxt[:max_level]
    return KhatVerdict(False, None)


# ---------------------------------------------------------------------------
# Reports


def witness_rows(net: ConstraintNetwork, state: DeductionState | None = None) -> list[dict]:
    rows = []
    for k, e in enumerate(net.elements):
        value = e.value
        row = {
            "handle": e.handle,
            "expression": e.describe(),
            "constant": bool(e.constant),
            "status": str(state.statuses[k]) if state is not None else "",
        }
        if isinstance(value, TruncatedLaurentSeries):
            row["value"] = value.pretty(6)
        rows.append(row)
    return rows


def format_witness_table(rows: list[dict]) -> str:
    heads = ["handle", "expression", "K", "status"]
    data = [[r["handle"], r["expression"], "yes" if r["constant"] else "no", r["status"]] for r in rows]
    widths = [max(len(h), *(len(d[i]) for d in data)) if data else len(h) for i, h in enumerate(heads)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(heads, widths)).rstrip()]
    for d in data:
        lines.append("  ".join(c.ljust(w) for c, w in zip(d, widths)).rstrip())
    return "\n".join(lines)


def check_targets(state: DeductionState, handle: str, P: MultiPolynomial) -> bool:
    """Every deduced value of the target is a root of P at truncation."""
    st = state.status(handle)
    if isinstance(st, Forced):
        return bool(verify_annihilation(P, st.value))
    return True


__all__ = [
    "AmbientElement",
    "AmbiguousElementError",
    "ConstraintNetwork",
    "ContradictionError",
    "CounterexampleReport",
    "DeductionState",
    "Forced",
    "GeneralizedCartier",
    "Open",
    "PrecisionError",
    "RootOf",
    "SeparationError",
    "build_network",
    "characterizable_subfield",
    "counterexample_311",
    "enumerate_pseudo_morphisms",
    "gco_instance",
    "is_pseudo_morphism",
    "khat_members",
    "propagate_closure",
    "witness_from_polynomial",
    "witness_tc_series",
]
