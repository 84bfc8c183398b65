"""Deterministic finite automata with output over the digit alphabet {0..p-1}.

User-facing automata read base-p expansions most-significant digit first.
Kernel computations work on the least-significant-digit-first automaton, where
reading digit i applies the Cartier operator Lambda_i to the sequence. Both
directions are related by :func:`reverse`; conversions are always explicit.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field

from .field import check_prime


class AutomatonError(ValueError):
    pass


class LeadingZeroWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Dfao:
    p: int
    delta: tuple[tuple[int, ...], ...]
    q0: int
    tau: tuple[int, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        check_prime(self.p)
        n = len(self.delta)
        if n == 0:
            raise AutomatonError("automaton needs at least one state")
        if len(self.tau) != n:
            raise AutomatonError("tau must give one output per state")
        if not 0 <= self.q0 < n:
            raise AutomatonError("initial state out of range")
        for row in self.delta:
            if len(row) != self.p:
                raise AutomatonError("delta must be total: one successor per digit")
            if any(not 0 <= s < n for s in row):
                raise AutomatonError("transition to unknown state")
        if any(not 0 <= t < self.p for t in self.tau):
            raise AutomatonError("outputs must lie in 0..p-1")
        if not self.names:
            object.__setattr__(self, "names", tuple(f"q{i}" for i in range(n)))
        elif len(self.names) != n or len(set(self.names)) != n:
            raise AutomatonError("state names must be unique, one per state")

    @property
    def size(self) -> int:
        return len(self.delta)

    def run(self, word, start: int | None = None) -> int:
        q = self.q0 if start is None else start
        for d in word:
            d = int(d)
            if not 0 <= d < self.p:
                raise AutomatonError(f"digit {d} out of range for p={self.p}")
            q = self.delta[q][d]
        return q

    def reachable(self) -> list[int]:
        seen, order, queue = {self.q0}, [self.q0], deque([self.q0])
        while queue:
            q = queue.popleft()
            for s in self.delta[q]:
                if s not in seen:
                    seen.add(s)
                    order.append(s)
                    queue.append(s)
        return order

    def sequence(self, count: int) -> list[int]:
        return [nth_term(self, n) for n in range(count)]


def _word(w):
    if isinstance(w, str):
        return [int(ch, 36) for ch in w]
    return list(w)


def eval_word(M: Dfao, w) -> int:
    """f_M(w): run delta from q0 over w (first digit first) and emit tau."""
    return M.tau[M.run(_word(w))]


def digits_msd(n: int, p: int) -> list[int]:
    """Canonical base-p expansion, no leading zeros; 0 maps to the empty word."""
    if n < 0:
        raise AutomatonError("negative index")
    out = []
    while n:
        out.append(n % p)
        n //= p
    return out[::-1]


def nth_term(M: Dfao, n: int) -> int:
    return eval_word(M, digits_msd(n, M.p))


# ---------------------------------------------------------------------------
# Minimization


def _partition(M: Dfao, states: list[int]) -> dict[int, int]:
    """Moore refinement: state -> block id, blocks numbered canonically."""
    block = {q: M.tau[q] for q in states}
    while True:
        sig = {q: (block[q],) + tuple(block[s] for s in M.delta[q]) for q in states}
        ids: dict = {}
        new = {}
        for q in states:
            new[q] = ids.setdefault(sig[q], len(ids))
        if len(ids) == len(set(block.values())):
            return new
        block = new


def minimize(M: Dfao) -> Dfao:
    """Minimal automaton with the same f_M, states numbered in BFS order."""
    reach = M.reachable()
    block = _partition(M, reach)
    order: list[int] = []
    rep: dict[int, int] = {}
    queue = deque([M.q0])
    rep[block[M.q0]] = 0
    order.append(M.q0)
    while queue:
        q = queue.popleft()
        for s in M.delta[q]:
            b = block[s]
            if b not in rep:
                rep[b] = len(order)
                order.append(s)
                queue.append(s)
    delta = tuple(tuple(rep[block[s]] for s in M.delta[q]) for q in order)
    tau = tuple(M.tau[q] for q in order)
    names = tuple(M.names[q] for q in order)
    return Dfao(M.p, delta, 0, tau, names)


def equivalent_states(M: Dfao, a: int, b: int) -> bool:
    block = _partition(M, list(range(M.size)))
    return block[a] == block[b]


def is_leading_zero_invariant(M: Dfao) -> bool:
    """True when f_M(0w) = f_M(w) for every word w."""
    return equivalent_states(M, M.q0, M.delta[M.q0][0])


def normalize_leading_zeros(M: Dfao) -> Dfao:
    """Automaton agreeing with M on canonical expansions and ignoring leading zeros."""
    if is_leading_zero_invariant(M):
        return M
    n = M.size
    start_row = (n,) + tuple(M.delta[M.q0][1:])
    name = "start"
    while name in M.names:
        name += "'"
    return Dfao(M.p, M.delta + (start_row,), n, M.tau + (M.tau[M.q0],), M.names + (name,))


def reverse(M: Dfao) -> Dfao:
    """Automaton reading words in the opposite order: f_R(w) = f_M(reversed w).

    States are output profiles g: reachable states of M -> digits; reading i
    maps g to q -> g(delta(q, i)).
    """
    reach = M.reachable()
    index = {q: k for k, q in enumerate(reach)}
    start = tuple(M.tau[q] for q in reach)
    states = {start: 0}
    order = [start]
    rows = []
    k = 0
    while k < len(order):
        g = order[k]
        row = []
        for d in range(M.p):
            g2 = tuple(g[index[M.delta[q][d]]] for q in reach)
            if g2 not in states:
                states[g2] = len(order)
                order.append(g2)
            row.append(states[g2])
        rows.append(tuple(row))
        k += 1
    tau = tuple(g[index[M.q0]] for g in order)
    return Dfao(M.p, tuple(rows), 0, tau, tuple(f"r{i}" for i in range(len(order))))


def to_lsd(M: Dfao) -> Dfao:
    """Minimal LSD-first automaton generating the same sequence as the MSD-first M."""
    return minimize(reverse(normalize_leading_zeros(M)))


def to_msd(L: Dfao) -> Dfao:
    """Minimal MSD-first automaton for the sequence of an LSD-first automaton."""
    return minimize(reverse(L))


def lsd_nth_term(L: Dfao, n: int, start: int | None = None) -> int:
    return L.tau[L.run(digits_msd(n, L.p)[::-1], start)]


# ---------------------------------------------------------------------------
# Kernels


@dataclass
class Kernel:
    """Finite p-kernel: labels, closure under Lambda_0..Lambda_{p-1}, first coefficients.

    ``certified`` is False when the closure was found by comparing truncated
    series; ``precision`` then records the smallest comparison precision.
    """

    p: int
    labels: list[str]
    closure: dict[tuple[str, int], str]
    outputs: dict[str, int]
    certified: bool = True
    precision: int | None = None
    elements: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.labels)

    def check_total(self):
        for lab in self.labels:
            for d in range(self.p):
                if (lab, d) not in self.closure:
                    raise AutomatonError(f"closure undefined for ({lab}, {d})")
                if self.closure[(lab, d)] not in self.outputs:
                    raise AutomatonError(f"closure maps ({lab}, {d}) outside the kernel")

    def lsd_automaton(self, start: str | None = None) -> Dfao:
        self.check_total()
        labels = list(self.labels)
        if start is not None:
            labels.remove(start)
            labels.insert(0, start)
        idx = {lab: k for k, lab in enumerate(labels)}
        delta = tuple(tuple(idx[self.closure[(lab, d)]] for d in range(self.p)) for lab in labels)
        tau = tuple(self.outputs[lab] for lab in labels)
        return Dfao(self.p, delta, 0, tau, tuple(labels))

    def element_automaton(self, label: str) -> Dfao:
        """MSD-first automaton generating the kernel element ``label``."""
        return to_msd(self.lsd_automaton(label))

    def table(self) -> str:
        head = "element  " + "  ".join(f"L{d}" for d in range(self.p)) + "  out"
        lines = [head]
        for lab in self.labels:
            row = "  ".join(self.closure[(lab, d)] for d in range(self.p))
            lines.append(f"{lab:<8} {row}  {self.outputs[lab]}")
        return "\n".join(lines)


def kernel_from_automaton(M: Dfao) -> Kernel:
    """Kernel of the sequence of M; element 'k0' is the sequence itself."""
    if not is_leading_zero_invariant(M):
        warnings.warn(
            "f_M depends on leading zeros; using canonical expansions (no leading zeros)",
            LeadingZeroWarning,
            stacklevel=2,
        )
    L = to_lsd(M)
    labels = [f"k{i}" for i in range(L.size)]
    closure = {(labels[q], d): labels[L.delta[q][d]] for q in range(L.size) for d in range(L.p)}
    outputs = {labels[q]: L.tau[q] for q in range(L.size)}
    return Kernel(L.p, labels, closure, outputs)


def automaton_from_kernel(kernel: Kernel, start: str | None = None) -> Dfao:
    """MSD-first automaton for the element ``start`` (default: first label)."""
    if not kernel.labels:
        raise AutomatonError("empty kernel")
    return kernel.element_automaton(start or kernel.labels[0])


# ---------------------------------------------------------------------------
# Text format
#
#   p = 2
#   states = a b
#   q0 = a
#   delta a = a b
#   delta b = b a
#   tau a = 0
#   tau b = 1


def format_automaton(M: Dfao) -> str:
    lines = [f"p = {M.p}", "states = " + " ".join(M.names), f"q0 = {M.names[M.q0]}"]
    for q, row in enumerate(M.delta):
        lines.append(f"delta {M.names[q]} = " + " ".join(M.names[s] for s in row))
    for q, t in enumerate(M.tau):
        lines.append(f"tau {M.names[q]} = {t}")
    return "\n".join(lines) + "\n"


def parse_automaton(text: str) -> Dfao:
    p = names = q0 = None
    delta: dict[str, list[str]] = {}
    tau: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise AutomatonError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        parts = key.split()
        try:
            if parts == ["p"]:
                p = int(value)
            elif parts == ["states"]:
                names = value.split()
            elif parts == ["q0"]:
                q0 = value
            elif parts[0] == "delta" and len(parts) == 2:
                delta[parts[1]] = value.split()
            elif parts[0] == "tau" and len(parts) == 2:
                tau[parts[1]] = int(value)
            else:
                raise AutomatonError(f"line {lineno}: unknown field {key!r}")
        except ValueError as exc:
            raise AutomatonError(f"line {lineno}: {exc}") from exc
    if p is None or names is None or q0 is None:
        raise AutomatonError("automaton file needs p, states and q0")
    idx = {nm: k for k, nm in enumerate(names)}
    try:
        rows = tuple(tuple(idx[s] for s in delta[nm]) for nm in names)
        outs = tuple(tau[nm] for nm in names)
        start = idx[q0]
    except KeyError as exc:
        raise AutomatonError(f"undefined state or missing entry: {exc}") from exc
    return Dfao(p, rows, start, outs, tuple(names))


def thue_morse() -> Dfao:
    return Dfao(2, ((0, 1), (1, 0)), 0, (0, 1), ("a", "b"))


def constant_automaton(p: int, value: int) -> Dfao:
    return Dfao(p, (tuple([0] * p),), 0, (value,), ("c",))
