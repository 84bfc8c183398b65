"""Constructive Christol correspondence between automata and algebraic series."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .automata import Dfao, Kernel, automaton_from_kernel, kernel_from_automaton
from .elimination import DegreeBoundExceeded, EliminationError, candidate_orders, eliminate_all_but
from .mpoly import MultiPolynomial, ResultantError, resultant
from .poly import FpPoly, RationalFunction
from .series import (
    DEFAULT_TRUNC,
    PrecisionError,
    SeriesError,
    TruncatedLaurentSeries,
    cartier,
    hensel_expand,
    mpoly_eval,
)


class ChristolError(ValueError):
    pass


class KernelOverflow(ChristolError):
    pass


@dataclass(frozen=True)
class Verdict:
    """Outcome of substituting a series into a polynomial.

    ``holds`` with ``precision`` M means P(X, F) = 0 mod X^M; otherwise
    ``exponent`` is the first exponent with a nonzero coefficient.
    """

    holds: bool
    precision: int | None = None
    exponent: int | None = None

    def __bool__(self):
        return self.holds

    def __str__(self):
        if self.holds:
            return "holds exactly" if self.precision is None else f"holds mod X^{self.precision}"
        return f"fails at exponent {self.exponent}"


def verify_annihilation(P: MultiPolynomial, F: TruncatedLaurentSeries) -> Verdict:
    if P.n != 1:
        raise ChristolError("annihilators are polynomials in one variable Y")
    value = mpoly_eval(P, [F])
    if value.is_zero_so_far():
        prec = value.trunc
        return Verdict(True, None if prec == float("inf") else int(prec))
    return Verdict(False, exponent=value.offset)


@dataclass
class AlgebraicSeries:
    annihilator: MultiPolynomial
    seed: int
    expansion: TruncatedLaurentSeries

    @classmethod
    def from_polynomial(cls, P: MultiPolynomial, seed: int, N: int = DEFAULT_TRUNC) -> "AlgebraicSeries":
        if P.is_zero():
            raise ChristolError("annihilator must be nonzero")
        return cls(P, seed % P.p, hensel_expand(P, seed, N))

    @property
    def p(self):
        return self.annihilator.p

    def expand(self, N: int) -> "AlgebraicSeries":
        if N <= self.expansion.trunc:
            return self
        return AlgebraicSeries.from_polynomial(self.annihilator, self.seed, N)


# ---------------------------------------------------------------------------
# series -> kernel -> automaton


def series_kernel(
    F,
    N: int | None = None,
    max_size: int = 64,
    min_precision: int = 8,
) -> Kernel:
    """Breadth-first closure of F under Lambda_0..Lambda_{p-1}.

    Images are merged with an existing element when they agree at their
    common precision; the kernel is therefore only truncation-certified.
    """
    if isinstance(F, AlgebraicSeries):
        series = F.expand(N).expansion if N else F.expansion
    else:
        series = F
    if N is not None and series.trunc > N:
        series = series.truncate(N)
    p = series.p
    elements = [series]
    closure: dict[tuple[str, int], str] = {}
    min_seen = series.trunc
    queue = deque([0])
    while queue:
        j = queue.popleft()
        for i in range(p):
            image = cartier(i, elements[j])
            match = None
            for k, other in enumerate(elements):
                same, prec = image.agreement(other)
                if same:
                    if prec < min_precision:
                        raise PrecisionError(
                            f"kernel comparison at only {prec} coefficients; raise the truncation order"
                        )
                    match = k
                    min_seen = min(min_seen, prec)
                    break
            if match is None:
                if image.trunc < min_precision:
                    raise PrecisionError(
                        f"precision exhausted after {len(elements)} kernel elements; raise the truncation order"
                    )
                if len(elements) >= max_size:
                    raise KernelOverflow(f"kernel exceeds {max_size} elements before stabilizing")
                elements.append(image)
                match = len(elements) - 1
                queue.append(match)
            closure[(f"k{j}", i)] = f"k{match}"
    labels = [f"k{i}" for i in range(len(elements))]
    outputs = {lab: e.coeff(0) for lab, e in zip(labels, elements)}
    prec = None if min_seen == float("inf") else int(min_seen)
    exact = all(e.exact for e in elements)
    return Kernel(p, labels, closure, outputs, certified=exact, precision=prec, elements=dict(zip(labels, elements)))


def polynomial_to_automaton(F: AlgebraicSeries, N: int = DEFAULT_TRUNC, **kw) -> tuple[Dfao, Kernel]:
    """Automaton for the coefficient sequence of F, and the (truncation-certified) kernel used."""
    kernel = series_kernel(F, N, **kw)
    return automaton_from_kernel(kernel), kernel


# ---------------------------------------------------------------------------
# automaton -> polynomial


@dataclass
class AnnihilatorResult:
    polynomial: MultiPolynomial
    method: str
    verdict: Verdict
    kernel: Kernel
    notes: list[str] = field(default_factory=list)


def _is_zero_element(kernel: Kernel, label: str) -> bool:
    seen, stack = {label}, [label]
    while stack:
        lab = stack.pop()
        if kernel.outputs[lab]:
            return False
        for d in range(kernel.p):
            nxt = kernel.closure[(lab, d)]
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return True


def kernel_system(kernel: Kernel) -> list[MultiPolynomial]:
    """Y_j - sum_i X^i * Y_{c(j,i)}^p for each kernel element j (zero elements substituted)."""
    p, k = kernel.p, kernel.size
    idx = {lab: j for j, lab in enumerate(kernel.labels)}
    zero = {lab for lab in kernel.labels if _is_zero_element(kernel, lab)}
    polys = []
    for lab in kernel.labels:
        j = idx[lab]
        if lab in zero:
            polys.append(MultiPolynomial.var(p, k, j))
            continue
        P = MultiPolynomial.var(p, k, j)
        for i in range(p):
            tgt = kernel.closure[(lab, i)]
            if tgt in zero:
                continue
            P = P - MultiPolynomial.var(p, k, idx[tgt]) ** p * FpPoly.monomial(p, i)
        polys.append(P)
    return polys


def _strip_y_power(P: MultiPolynomial) -> MultiPolynomial:
    low = min(e[0] for e in P.terms)
    if not low:
        return P
    return MultiPolynomial(P.p, 1, {(e[0] - low,): c for e, c in P.terms.items()})


def _to_one_var(P: MultiPolynomial, keep: int) -> MultiPolynomial:
    return P.remap(1, {keep: 0}).primitive()


def _by_resultants(kernel: Kernel, F: TruncatedLaurentSeries, nonzero: bool, max_x_degree: int):
    system = kernel_system(kernel)
    last_error = None
    for order in candidate_orders(system, 0):
        try:
            candidates = eliminate_all_but(system, 0, order, max_x_degree=max_x_degree)
        except (DegreeBoundExceeded, ResultantError) as exc:
            last_error = exc
            if isinstance(exc, DegreeBoundExceeded):
                raise
            continue
        for C in sorted(candidates, key=lambda P: (P.degree(0), P.x_degree())):
            if C.degree(0) <= 0:
                continue
            P = _to_one_var(C, 0)
            if nonzero:
                P = _strip_y_power(P)
            v = verify_annihilation(P, F)
            if v:
                return P, v
    raise EliminationError(f"every elimination order vanished identically ({last_error})")


def _frobenius_matrix(kernel: Kernel):
    p, k = kernel.p, kernel.size
    idx = {lab: j for j, lab in enumerate(kernel.labels)}
    M = [[FpPoly.zero(p) for _ in range(k)] for _ in range(k)]
    for lab in kernel.labels:
        for i in range(p):
            t = idx[kernel.closure[(lab, i)]]
            M[idx[lab]][t] = M[idx[lab]][t] + FpPoly.monomial(p, i)
    return M


def _matmul(A, B, p):
    n, m, r = len(A), len(B), len(B[0])
    out = [[FpPoly.zero(p) for _ in range(r)] for _ in range(n)]
    for i in range(n):
        for t in range(m):
            a = A[i][t]
            if a:
                for j in range(r):
                    if B[t][j]:
                        out[i][j] = out[i][j] + a * B[t][j]
    return out


def _dependency(rows, p):
    """First linear dependency c_0 r_0 + .. + c_m r_m = 0 over F_p(X), as polynomials."""
    basis: list[tuple[list[RationalFunction], list[RationalFunction]]] = []
    width = len(rows[0])
    for m, row in enumerate(rows):
        vec = [RationalFunction(a) for a in row]
        combo = [RationalFunction.from_int(p, 0) for _ in range(len(rows))]
        combo[m] = RationalFunction.from_int(p, 1)
        for piv_vec, piv_combo in basis:
            col = next(c for c in range(width) if not piv_vec[c].is_zero())
            if not vec[col].is_zero():
                f = vec[col] / piv_vec[col]
                vec = [a - f * b for a, b in zip(vec, piv_vec)]
                combo = [a - f * b for a, b in zip(combo, piv_combo)]
        if all(a.is_zero() for a in vec):
            coeffs = combo[: m + 1]
            den = FpPoly.one(p)
            for c in coeffs:
                den = (den * c.den).exact_div(den.gcd(c.den))
            return [(c * den).num for c in coeffs]
        basis.append((vec, combo))
    return None


def _by_frobenius(kernel: Kernel, F: TruncatedLaurentSeries):
    """sum_m c_m F^(p^m) = 0 from the linear recursion V = M V^(p) on the kernel vector."""
    p, k = kernel.p, kernel.size
    M = _frobenius_matrix(kernel)
    ident = [[FpPoly.one(p) if i == j else FpPoly.zero(p) for j in range(k)] for i in range(k)]
    S = ident
    rows = [None] * (k + 1)
    rows[k] = S[0]
    for m in range(k - 1, -1, -1):
        Mq = [[a.inflate(p**m) for a in row] for row in M]
        S = _matmul(Mq, S, p)
        rows[m] = S[0]
    coeffs = _dependency(rows, p)
    if coeffs is None:
        raise EliminationError("no Frobenius dependency found")
    P = MultiPolynomial(p, 1, {(p**m,): c for m, c in enumerate(coeffs) if c}).primitive()
    return P, verify_annihilation(P, F)


def _prem(A: MultiPolynomial, B: MultiPolynomial) -> MultiPolynomial:
    """Primitive part of the pseudo-remainder of A by B in Y."""
    db, lb = B.degree(0), B.leading_coeff_in(0)
    y = MultiPolynomial.var(A.p, 1, 0)
    while not A.is_zero() and A.degree(0) >= db:
        A = A * lb - B * A.leading_coeff_in(0) * y ** (A.degree(0) - db)
    return A.primitive() if not A.is_zero() else A


def _y_gcd(A: MultiPolynomial, B: MultiPolynomial) -> MultiPolynomial:
    """Primitive gcd over F_p(X) of two polynomials in Y."""
    A, B = A.primitive(), B.primitive()
    while not B.is_zero():
        A, B = B, _prem(A, B)
    return A


def _nullvector_mod_p(A: np.ndarray, p: int):
    """One nonzero kernel vector of A over F_p, or None."""
    A = A.copy() % p
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        hit = np.nonzero(A[r:, c])[0]
        if not len(hit):
            continue
        k = r + hit[0]
        A[[r, k]] = A[[k, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
        others = np.nonzero(A[:, c])[0]
        others = others[others != r]
        A[others] = (A[others] - np.outer(A[others, c], A[r])) % p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = next((c for c in range(cols) if c not in set(pivots)), None)
    if free is None:
        return None
    v = np.zeros(cols, dtype=np.int64)
    v[free] = 1
    for i, c in enumerate(pivots):
        v[c] = -A[i, free] % p
    return v


def _pade_candidate(dense: np.ndarray, p: int, d: int, D: int):
    """Some Q with deg_Y Q <= d, deg_X Q <= D and Q(F) = 0 mod X^len(dense)."""
    N = len(dense)
    power = np.zeros(N, dtype=np.int64)
    power[0] = 1
    cols = []
    for _ in range(d + 1):
        for j in range(D + 1):
            col = np.zeros(N, dtype=np.int64)
            col[j:] = power[: N - j]
            cols.append(col)
        power = np.convolve(power, dense)[:N] % p
    v = _nullvector_mod_p(np.stack(cols, axis=1), p)
    if v is None:
        return None
    terms = {}
    for k in range(d + 1):
        c = FpPoly(p, [int(a) for a in v[k * (D + 1) : (k + 1) * (D + 1)]])
        if c:
            terms[(k,)] = c
    return MultiPolynomial(p, 1, terms)


def _certified_factor(P: MultiPolynomial, h: MultiPolynomial, F: TruncatedLaurentSeries) -> bool:
    """h | P, h(F) = 0 mod X^N, and that vanishing is forced to be exact.

    With P = h*c and R = Res_Y(h, c) != 0, R = A*h + B*c for polynomials A, B.
    If h(F) were nonzero then c(F) = 0, so val h(F) <= deg R; vanishing past
    deg R therefore means h(F) = 0 exactly.
    """
    try:
        c = P.exact_div(h)
    except ArithmeticError:
        return False
    v = verify_annihilation(h, F)
    if not v:
        return False
    if c.degree(0) <= 0:
        return True
    R = resultant(h, c, 0)
    if R.is_zero():
        return False
    prec = float("inf") if v.precision is None else v.precision
    return R.x_degree() < prec


def reduce_annihilator(P: MultiPolynomial, M: Dfao, max_unknowns: int = 600) -> MultiPolynomial:
    """Lowest-degree certified factor of P that still annihilates the series of M."""
    p, D = P.p, P.x_degree()
    for d in range(1, P.degree(0)):
        unknowns = (d + 1) * (D + 1)
        if unknowns > max_unknowns:
            break
        N = 2 * unknowns + 32
        F = TruncatedLaurentSeries.from_dense(p, M.sequence(N), N)
        Q = _pade_candidate(np.array(M.sequence(N), dtype=np.int64) % p, p, d, D)
        if Q is None or Q.degree(0) <= 0:
            continue
        h = _y_gcd(P, Q)
        if 0 < h.degree(0) < P.degree(0) and _certified_factor(P, h, F):
            return h
    return P


def derive_annihilator(
    M: Dfao,
    N: int = 256,
    method: str = "auto",
    max_x_degree: int = 512,
    max_resultant_kernel: int = 4,
    reduce: bool = True,
) -> AnnihilatorResult:
    """Nonzero P with P(X, F) = 0 for the series F of M, verified mod X^N.

    ``method`` is "resultant" (iterated resultants of the kernel system),
    "frobenius" (linear dependency among F, F^p, F^(p^2), ...) or "auto",
    which uses resultants for kernels of at most ``max_resultant_kernel``
    elements and falls back to the Frobenius dependency otherwise. With
    ``reduce`` the result is replaced by a certified factor of lower degree
    in Y when one exists.
    """
    kernel = kernel_from_automaton(M)
    F = TruncatedLaurentSeries.from_dense(M.p, M.sequence(N), N)
    p = M.p
    notes = []
    if _is_zero_element(kernel, kernel.labels[0]):
        P = MultiPolynomial.var(p, 1, 0)
        return AnnihilatorResult(P, "zero", verify_annihilation(P, F), kernel)
    if method not in ("auto", "resultant", "frobenius"):
        raise ChristolError(f"unknown method {method!r}")
    use_resultant = method == "resultant" or (method == "auto" and kernel.size <= max_resultant_kernel)
    if use_resultant:
        try:
            P, v = _by_resultants(kernel, F, True, max_x_degree)
            P, v = _reduced(P, M, F, reduce, notes)
            return AnnihilatorResult(P, "resultant", v, kernel, notes)
        except EliminationError as exc:
            if method == "resultant":
                raise ChristolError(str(exc)) from exc
            notes.append(f"resultant elimination abandoned: {exc}")
    P, v = _by_frobenius(kernel, F)
    if not v:
        raise ChristolError(f"derived polynomial fails verification ({v})")
    P, v = _reduced(P, M, F, reduce, notes)
    return AnnihilatorResult(P, "frobenius", v, kernel, notes)


def _reduced(P, M, F, reduce, notes):
    if reduce:
        h = reduce_annihilator(P, M)
        if h is not P:
            notes.append(f"reduced from degree {P.degree(0)} to {h.degree(0)} in Y")
            P = h
    return P, verify_annihilation(P, F)


def automaton_to_polynomial(M: Dfao, N: int = 256, method: str = "auto") -> MultiPolynomial:
    result = derive_annihilator(M, N, method)
    if not result.verdict:
        raise ChristolError(f"annihilator failed verification: {result.verdict}")
    return result.polynomial


def series_from_automaton(M: Dfao, N: int) -> TruncatedLaurentSeries:
    return TruncatedLaurentSeries.from_dense(M.p, M.sequence(N), N)


__all__ = [
    "AlgebraicSeries",
    "AnnihilatorResult",
    "ChristolError",
    "KernelOverflow",
    "PrecisionError",
    "SeriesError",
    "Verdict",
    "automaton_to_polynomial",
    "derive_annihilator",
    "kernel_system",
    "polynomial_to_automaton",
    "reduce_annihilator",
    "series_from_automaton",
    "series_kernel",
    "verify_annihilation",
]
