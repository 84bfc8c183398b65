"""Iterated resultant elimination down to one variable."""

from __future__ import annotations

from itertools import permutations

from .mpoly import MultiPolynomial, resultant


class EliminationError(ArithmeticError):
    pass


class DegreeBoundExceeded(EliminationError):
    pass


def _normalize(P: MultiPolynomial) -> MultiPolynomial:
    return P.primitive() if P else P


def _dedupe(polys):
    out, seen = [], set()
    for P in polys:
        P = _normalize(P)
        if P and P not in seen:
            seen.add(P)
            out.append(P)
    return out


def variable_order(polys, keep: int) -> list[int]:
    """Variables to eliminate: lowest total degree first, ties by index."""
    vs = set()
    for P in polys:
        vs |= P.variables()
    vs.discard(keep)

    def weight(v):
        return (max((P.degree(v) for P in polys if P.mentions(v)), default=0), sum(P.mentions(v) for P in polys), v)

    return sorted(vs, key=weight)


def eliminate_all_but(
    polys,
    keep: int,
    order: list[int] | None = None,
    max_x_degree: int = 512,
    max_y_degree: int = 64,
) -> list[MultiPolynomial]:
    """Polynomials in Y_keep alone, vanishing at every common root of ``polys``.

    Each variable is removed by taking resultants of its holders against a
    pivot of least degree; a holder sharing a factor with the pivot yields a
    zero resultant and is dropped (the result is still implied by the input).
    """
    polys = _dedupe(polys)
    order = list(order) if order is not None else variable_order(polys, keep)
    for v in order:
        holders = [P for P in polys if P.mentions(v)]
        rest = [P for P in polys if not P.mentions(v)]
        if len(holders) <= 1:
            polys = rest
            continue
        pivot = min(holders, key=lambda P: (P.degree(v), P.total_degree(), len(P.terms)))
        new = []
        for Q in holders:
            if Q is pivot:
                continue
            R = resultant(Q, pivot, v)
            if R:
                R = _normalize(R)
                if R.x_degree() > max_x_degree:
                    raise DegreeBoundExceeded(f"intermediate X-degree {R.x_degree()} exceeds {max_x_degree}")
                if R.degree(keep) > max_y_degree:
                    raise DegreeBoundExceeded(f"intermediate Y-degree {R.degree(keep)} exceeds {max_y_degree}")
                new.append(R)
        polys = _dedupe(rest + new)
    return [P for P in polys if P.variables() <= {keep}]


def candidate_orders(polys, keep: int, limit: int = 24):
    base = variable_order(polys, keep)
    yield base
    for k, perm in enumerate(permutations(base)):
        if k >= limit:
            return
        if list(perm) != base:
            yield list(perm)
