"""Command-line entry point: ``autalg <verb> <subcommand> ...``.

Global options may also be set through environment variables named
AUTALG_P, AUTALG_TRUNC, AUTALG_SEED, AUTALG_MAX_KERNEL, AUTALG_MAX_ITERS and
AUTALG_FORMAT. Random series come from numpy's PCG64 generator seeded with
--seed, so they are reproducible across platforms.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from .automata import (
    format_automaton,
    kernel_from_automaton,
    minimize,
    parse_automaton,
    reverse,
)
from .christol import AlgebraicSeries, derive_annihilator, polynomial_to_automaton, series_kernel
from .eqsys import (
    counterexample_system,
    eliminate_variable,
    format_system,
    parse_system,
    reduce_system,
    simplify_over_variable,
    split_system,
    system_from_witness,
)
from .field import GF, check_prime
from .mpoly import format_mpoly, parse_fppoly, parse_mpoly
from .series import cartier, format_series, hensel_expand, norm, parse_series, random_series, reassemble
from .tyszka import (
    characterizable_subfield,
    counterexample_311,
    enumerate_pseudo_morphisms,
    format_witness_table,
    propagate_closure,
    subset_network,
    witness_from_polynomial,
    witness_rows,
    witness_tc_series,
)

ENV_PREFIX = "AUTALG_"
ROOT_HELP = "residual root in F_p selecting the series (here --seed means this, not the RNG seed)"


@dataclass
class RunConfig:
    p: int = 2
    trunc: int = 128
    seed: int = 0
    max_kernel: int = 64
    max_iters: int = 10_000
    format: str = "human"

    def validate(self):
        check_prime(self.p)
        if self.trunc < 8:
            raise ValueError("truncation order must be at least 8")
        if self.max_kernel <= 0 or self.max_iters <= 0:
            raise ValueError("size bounds must be positive")
        if self.format not in ("human", "structured"):
            raise ValueError("format must be human or structured")
        return self


def _env_default(name: str, cast, fallback):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    return cast(raw) if raw is not None else fallback


def _globals(parser: argparse.ArgumentParser, suppress: bool, seed: bool = True):
    d = RunConfig()

    def default(name, cast, value):
        return argparse.SUPPRESS if suppress else _env_default(name, cast, value)

    g = parser.add_argument_group("global options")
    g.add_argument("--p", type=int, default=default("p", int, d.p), help="characteristic (prime)")
    g.add_argument("--trunc", type=int, default=default("trunc", int, d.trunc), help="truncation order N")
    if seed:
        g.add_argument("--seed", type=int, default=default("seed", int, d.seed), help="RNG seed")
    g.add_argument("--max-kernel", type=int, default=default("max_kernel", int, d.max_kernel))
    g.add_argument("--max-iters", type=int, default=default("max_iters", int, d.max_iters))
    g.add_argument(
        "--format", choices=["human", "structured"], default=default("format", str, d.format), help="output style"
    )


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _series_lines(path: str):
    return [parse_series(line) for line in _read(path).splitlines() if line.strip() and not line.startswith("#")]


class Output:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg

    def emit(self, human: str, data: dict):
        if self.cfg.format == "structured":
            print(json.dumps(data, indent=2, sort_keys=True))
        else:
            print(human)


# ---------------------------------------------------------------------------
# handlers


def cmd_series(args, cfg, out):
    if args.sub == "random":
        F = random_series(cfg.p, cfg.trunc, np.random.default_rng(cfg.seed), args.offset)
        out.emit(format_series(F), {"series": format_series(F)})
    elif args.sub == "cartier":
        (F,) = _series_lines(args.file)[:1]
        digits = [args.digit] if args.digit is not None else range(F.p)
        parts = {str(i): format_series(cartier(i, F)) for i in digits}
        out.emit("\n".join(parts.values()), {"parts": parts})
    elif args.sub == "reassemble":
        F = reassemble(_series_lines(args.file))
        out.emit(format_series(F), {"series": format_series(F)})
    elif args.sub == "hensel":
        P = parse_mpoly(args.poly, cfg.p, 1)
        F = hensel_expand(P, args.root, cfg.trunc)
        out.emit(format_series(F), {"series": format_series(F)})
    elif args.sub == "norm":
        (F,) = _series_lines(args.file)[:1]
        v = norm(F)
        out.emit(str(v), {"norm": str(v), "order": v.order, "bounded": v.bounded})


def cmd_automaton(args, cfg, out):
    M = parse_automaton(_read(args.file))
    if args.sub == "terms":
        terms = M.sequence(args.count)
        out.emit(" ".join(map(str, terms)), {"terms": terms})
    elif args.sub == "minimize":
        text = format_automaton(minimize(M))
        out.emit(text.rstrip(), {"automaton": text})
    elif args.sub == "reverse":
        text = format_automaton(minimize(reverse(M)))
        out.emit(text.rstrip(), {"automaton": text})


def _kernel_data(K):
    return {
        "size": K.size,
        "labels": K.labels,
        "closure": {f"{lab},{d}": K.closure[(lab, d)] for lab in K.labels for d in range(K.p)},
        "outputs": K.outputs,
        "certified": K.certified,
        "precision": K.precision,
    }


def cmd_kernel(args, cfg, out):
    if args.automaton:
        K = kernel_from_automaton(parse_automaton(_read(args.automaton)))
    elif args.series:
        (F,) = _series_lines(args.series)[:1]
        K = series_kernel(F, max_size=cfg.max_kernel)
    else:
        raise ValueError("kernel needs --automaton or --series")
    head = f"kernel size {K.size}" + ("" if K.certified else f" (at precision {K.precision}, not certified)")
    out.emit(head + "\n" + K.table(), _kernel_data(K))


def cmd_christol(args, cfg, out):
    if args.sub == "to-poly":
        M = parse_automaton(_read(args.file))
        res = derive_annihilator(M, N=max(cfg.trunc, 256), method=args.method)
        poly = format_mpoly(res.polynomial)
        human = f"{poly}\nmethod: {res.method}; {res.verdict}"
        out.emit(human, {"polynomial": poly, "method": res.method, "verdict": str(res.verdict)})
    else:
        P = parse_mpoly(args.poly, cfg.p, 1)
        F = AlgebraicSeries.from_polynomial(P, args.root, cfg.trunc)
        M, K = polynomial_to_automaton(F, cfg.trunc, max_size=cfg.max_kernel)
        text = format_automaton(M)
        out.emit(text.rstrip(), {"automaton": text, "kernel": _kernel_data(K)})


def cmd_tyszka(args, cfg, out):
    if args.sub == "subfield":
        gf = GF(args.field)
        S = sorted(characterizable_subfield(args.field))
        names = [gf.name(a) for a in S]
        out.emit("{" + ", ".join(names) + "}", {"field": args.field, "subfield": names})
    elif args.sub == "enumerate":
        net = subset_network(args.field, args.set, args.constants or ())
        maps = enumerate_pseudo_morphisms(net)
        handles = [e.handle for e in net.elements]
        rows = [dict(zip(handles, (net.ambient.gf.name(v) for v in m))) for m in maps]
        human = f"{len(maps)} pseudo-morphism(s)\n" + "\n".join(
            "  " + ", ".join(f"{k} -> {v}" for k, v in r.items()) for r in rows
        )
        out.emit(human, {"count": len(maps), "maps": rows})
    elif args.sub == "witness":
        P = parse_mpoly(args.poly, cfg.p, 1)
        F = AlgebraicSeries.from_polynomial(P, args.root, cfg.trunc)
        if args.tc:
            net = witness_tc_series(F)
            target = "roots of P; propagation decides TC"
        else:
            net, B = witness_from_polynomial(F)
            target = B.description
        state = propagate_closure(net)
        rows = witness_rows(net, state)
        out.emit(f"target set: {target}\n" + format_witness_table(rows), {"target": target, "elements": rows})
    elif args.sub == "counterexample":
        rng = np.random.default_rng(cfg.seed)
        F = random_series(cfg.p, cfg.trunc, rng)
        G = random_series(cfg.p, cfg.trunc, rng)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rep = counterexample_311(F, G)
        rows = witness_rows(rep.state.network, rep.state)
        data = {"p": rep.p, "precision": rep.precision, "forced": rep.forced, "degenerate": rep.degenerate}
        data["elements"] = rows
        data["caveat"] = rep.caveat
        out.emit("\n".join(rep.lines()), data)


def cmd_eqsys(args, cfg, out):
    if args.sub in ("example", "witness"):
        if args.sub == "example":
            system = counterexample_system(parse_fppoly(args.h1, cfg.p))
        else:
            P = parse_mpoly(args.poly, cfg.p, 1)
            net, B = witness_from_polynomial(AlgebraicSeries.from_polynomial(P, args.root, cfg.trunc))
            system = system_from_witness(net, {"x": B.description})
        text = format_system(system)
        out.emit(text.rstrip(), {"system": text})
        return
    system = parse_system(_read(args.file))
    if args.sub == "reduce":
        res = reduce_system(system, max_iters=cfg.max_iters)
        anns = {k: format_mpoly(v) for k, v in res.annihilators.items()}
        lines = [f"{k}: {v}  ({res.verdicts[k]})" for k, v in anns.items()]
        if args.trace:
            lines = res.trace + [""] + lines
        data = {"annihilators": anns, "verdicts": {k: str(v) for k, v in res.verdicts.items()}}
        if args.trace:
            data["trace"] = res.trace
        out.emit("\n".join(lines), data)
        return
    if args.sub == "simplify":
        new = simplify_over_variable(system, args.var - 1)
    elif args.sub == "eliminate":
        new = eliminate_variable(system, args.var - 1)
    else:
        new = split_system(system, args.poly - 1)
    text = format_system(new)
    human = text.rstrip()
    if args.trace:
        human = "\n".join("# " + t for t in new.trace) + "\n" + human
    out.emit(human, {"system": text, "trace": new.trace})


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(prog="autalg", description="Automatic sequences, Christol and pseudo-morphisms")
    _globals(root, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _globals(common, suppress=True)
    rooted = argparse.ArgumentParser(add_help=False)
    _globals(rooted, suppress=True, seed=False)
    verbs = root.add_subparsers(dest="verb", metavar="verb")

    s = verbs.add_parser("series", parents=[common], help="truncated Laurent series")
    ss = s.add_subparsers(dest="sub", required=True)
    r = ss.add_parser("random", parents=[common])
    r.add_argument("--offset", type=int, default=0)
    c = ss.add_parser("cartier", parents=[common])
    c.add_argument("file")
    c.add_argument("--digit", type=int)
    ss.add_parser("reassemble", parents=[common]).add_argument("file", help="p series, one per line")
    h = ss.add_parser("hensel", parents=[common])
    h.add_argument("--poly", required=True)
    h.add_argument("--root", type=int, default=0, help=ROOT_HELP)
    ss.add_parser("norm", parents=[common]).add_argument("file")
    s.set_defaults(func=cmd_series)

    a = verbs.add_parser("automaton", parents=[common], help="automata with output")
    aa = a.add_subparsers(dest="sub", required=True)
    t = aa.add_parser("terms", parents=[common])
    t.add_argument("file")
    t.add_argument("--count", type=int, default=32)
    aa.add_parser("minimize", parents=[common]).add_argument("file")
    aa.add_parser("reverse", parents=[common]).add_argument("file")
    a.set_defaults(func=cmd_automaton)

    k = verbs.add_parser("kernel", parents=[common], help="p-kernel table")
    k.add_argument("--automaton")
    k.add_argument("--series")
    k.set_defaults(func=cmd_kernel)

    ch = verbs.add_parser("christol", parents=[common], help="automaton <-> polynomial")
    cc = ch.add_subparsers(dest="sub", required=True)
    tp = cc.add_parser("to-poly", parents=[common])
    tp.add_argument("file")
    tp.add_argument("--method", choices=["auto", "resultant", "frobenius"], default="auto")
    ta = cc.add_parser("to-automaton", parents=[rooted])
    ta.add_argument("poly")
    ta.add_argument("--seed", "--root", dest="root", type=int, default=0, help=ROOT_HELP)
    ch.set_defaults(func=cmd_christol)

    ty = verbs.add_parser("tyszka", parents=[common], help="pseudo-morphisms and witness sets")
    tt = ty.add_subparsers(dest="sub", required=True)
    w = tt.add_parser("witness", parents=[rooted])
    w.add_argument("--poly", required=True)
    w.add_argument("--seed", "--root", dest="root", type=int, default=0, help=ROOT_HELP)
    w.add_argument("--tc", action="store_true", help="add coefficient constants and tail sections")
    e = tt.add_parser("enumerate", parents=[common])
    e.add_argument("--field", type=int, required=True)
    e.add_argument("--set", type=int, nargs="+", required=True)
    e.add_argument("--constants", type=int, nargs="*")
    tt.add_parser("counterexample", parents=[common])
    tt.add_parser("subfield", parents=[common]).add_argument("--field", type=int, required=True)
    ty.set_defaults(func=cmd_tyszka)

    eq = verbs.add_parser("eqsys", parents=[common], help="good equational systems")
    ee = eq.add_subparsers(dest="sub", required=True)
    for name, extra in (("simplify", "--var"), ("eliminate", "--var"), ("split", "--poly"), ("reduce", None)):
        sp = ee.add_parser(name, parents=[common])
        sp.add_argument("file")
        sp.add_argument("--trace", action="store_true")
        if extra:
            sp.add_argument(extra, type=int, required=True, help="1-based index")
    ex = ee.add_parser("example", parents=[common], help="the two-variable Cartier example system")
    ex.add_argument("--h1", required=True, help="H1 as a polynomial in X")
    wi = ee.add_parser("witness", parents=[rooted], help="system from the witness network of a root")
    wi.add_argument("--poly", required=True)
    wi.add_argument("--seed", "--root", dest="root", type=int, default=0, help=ROOT_HELP)
    eq.set_defaults(func=cmd_eqsys)
    return root


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not getattr(args, "verb", None):
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = RunConfig(args.p, args.trunc, args.seed, args.max_kernel, args.max_iters, args.format).validate()
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        args.func(args, cfg, Output(cfg))
    except (ValueError, ArithmeticError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
