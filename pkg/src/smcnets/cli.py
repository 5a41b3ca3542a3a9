"""Command-line front end.

Verbs: check, compose, eq, curry, decompose, translate, enum, render,
oracle.  Results go to stdout, diagnostics to stderr; exit codes: 0 success
(`eq`: equal), 1 failed check / distinct, 2 usage or parse errors, 3 unknown
equivalence."""

from __future__ import annotations

import argparse
import os
import sys

from . import fileio
from .bigraph import bigraph_to_dot, check_bigraph, compose_bigraphs, enumerate_ground_bigraphs
from .calculi import builtin_theory, enumerate_nets
from .equivalence import collapsed_equal, rewiring_equivalent, theory_equivalent_bounded
from .formula import ParseError, format_formula, parse_formula
from .net import NetError, correctness_report, net_to_dot
from .signature import TheoryError
from .smc import compose, curry, decompose, uncurry
from .translate import TranslationContext, check_closed_term_iso, translate_bigraph, translate_object


def _load_any(path: str):
    ext = os.path.splitext(path)[1]
    if ext == ".snet":
        return "net", fileio.load_net(path)
    if ext == ".sbg":
        return "bigraph", fileio.load_bigraph(path)
    if ext == ".sth":
        return "theory", fileio.load_theory(path)
    if ext == ".sbs":
        return "bigsig", fileio.load_bigsignature(path)
    raise ParseError(f"unrecognised file extension {ext!r} for {path}")


def _cmd_check(args) -> int:
    kind, value = _load_any(args.file)
    if kind == "net":
        ok, why = correctness_report(value)
        print(f"{args.file}: {why}")
        return 0 if ok else 1
    if kind == "bigraph":
        check_bigraph(value)
        print(f"{args.file}: valid")
        return 0
    print(f"{args.file}: loaded ({kind})")
    return 0


def _cmd_compose(args) -> int:
    kind_f, f = _load_any(args.f)
    kind_g, g = _load_any(args.g)
    if kind_f != kind_g:
        raise ParseError("compose: both inputs must be nets or both bigraphs")
    if kind_f == "net":
        out = compose(g, f)  # pipeline order: f then g
        if args.output:
            fileio.save_net(out, args.output)
        else:
            print(repr(out))
    else:
        out = compose_bigraphs(g, f)
        if args.output:
            fileio.save_bigraph(out, args.output)
        else:
            print(out)
    return 0


def _cmd_eq(args) -> int:
    _, f = _load_any(args.f)
    _, g = _load_any(args.g)
    if args.mode == "rewiring":
        verdict = "equal" if rewiring_equivalent(f, g, max_states=args.budget) else "distinct"
    elif args.mode == "collapsed":
        verdict = "equal" if collapsed_equal(f, g, max_states=args.budget) else "distinct"
    else:
        verdict = theory_equivalent_bounded(f, g, f.theory, budget=args.budget)
    print(verdict)
    return {"equal": 0, "distinct": 1, "unknown": 3}[verdict]


def _cmd_curry(args) -> int:
    _, f = _load_any(args.file)
    out = uncurry(f) if args.inverse else curry(f)
    if args.output:
        fileio.save_net(out, args.output)
    else:
        print(repr(out))
    return 0


def _cmd_decompose(args) -> int:
    _, f = _load_any(args.file)
    c1 = set(args.cells.split(",")) if args.cells else set()
    f1, f2 = decompose(f, c1)
    prefix = args.output or os.path.splitext(args.file)[0]
    fileio.save_net(f1, prefix + ".f1.snet")
    fileio.save_net(f2, prefix + ".f2.snet")
    print(f"wrote {prefix}.f1.snet and {prefix}.f2.snet")
    return 0


def _cmd_translate(args) -> int:
    b = fileio.load_bigraph(args.file)
    ctx = TranslationContext.of(b.sig)
    if args.interface:
        print(f"dom: {format_formula(translate_object(b.dom))}")
        print(f"cod: {format_formula(translate_object(b.cod))}")
        return 0
    net = translate_bigraph(b, ctx)
    if args.output:
        theory_file = args.output + ".sth"
        fileio.save_theory(ctx.theory, theory_file)
        fileio.save_net(net, args.output, theory_ref=os.path.basename(theory_file))
        print(f"wrote {args.output} (theory: {theory_file})")
    else:
        print(repr(net))
    return 0


def _cmd_enum(args) -> int:
    if args.bigsig:
        sig = fileio.load_bigsignature(args.bigsig)
        if not args.ground:
            raise ParseError("enum --bigsig currently supports --ground enumeration")
        items = enumerate_ground_bigraphs(sig, args.nodes)
        print(len(items))
        return 0
    theory = fileio.load_theory(args.theory)
    dom = parse_formula(args.dom, theory.signature.sorts)
    cod = parse_formula(args.cod, theory.signature.sorts)
    nets = enumerate_nets(theory, dom, cod, args.cells)
    print(len(nets))
    if args.list:
        for net in nets:
            print(repr(net))
    return 0


def _cmd_render(args) -> int:
    kind, value = _load_any(args.file)
    if kind == "net":
        dot = net_to_dot(value)
    elif kind == "bigraph":
        dot = bigraph_to_dot(value)
    else:
        raise ParseError("render expects a net or bigraph file")
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(dot)
    else:
        sys.stdout.write(dot)
    return 0


def _cmd_oracle(args) -> int:
    if args.kind != "closed-term-iso":
        raise ParseError(f"unknown oracle {args.kind!r}")
    sig = fileio.load_bigsignature(args.bigsig)
    report = check_closed_term_iso(sig, args.nodes)
    for budget, nb, nn in report.counts:
        print(f"nodes <= {budget}: bigraphs {nb}, nets {nn}")
    print("bijection verified" if report.ok else "MISMATCH")
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="smcnets", description=__doc__)
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("check", help="well-formedness + correctness / validity")
    c.add_argument("file")
    c.set_defaults(fn=_cmd_check)

    c = sub.add_parser("compose", help="compose two nets or two bigraphs (pipeline order)")
    c.add_argument("f")
    c.add_argument("g")
    c.add_argument("-o", "--output")
    c.set_defaults(fn=_cmd_compose)

    c = sub.add_parser("eq", help="decide an equivalence")
    c.add_argument("f")
    c.add_argument("g")
    c.add_argument("--mode", choices=["rewiring", "theory", "collapsed"], default="rewiring")
    c.add_argument("--budget", type=int, default=10000)
    c.set_defaults(fn=_cmd_eq)

    c = sub.add_parser("curry", help="curry a net (or uncurry with --inverse)")
    c.add_argument("file")
    c.add_argument("--inverse", action="store_true")
    c.add_argument("-o", "--output")
    c.set_defaults(fn=_cmd_curry)

    c = sub.add_parser("decompose", help="split a net by a cell subset")
    c.add_argument("file")
    c.add_argument("--cells", default="", help="comma-separated cell ids for the first stage")
    c.add_argument("-o", "--output", help="output prefix")
    c.set_defaults(fn=_cmd_decompose)

    c = sub.add_parser("translate", help="bigraph -> net; --interface for the objects")
    c.add_argument("file")
    c.add_argument("--interface", action="store_true")
    c.add_argument("-o", "--output")
    c.set_defaults(fn=_cmd_translate)

    c = sub.add_parser("enum", help="oracle enumerations with counts")
    c.add_argument("--theory")
    c.add_argument("--dom")
    c.add_argument("--cod")
    c.add_argument("--cells", type=int, default=4)
    c.add_argument("--bigsig")
    c.add_argument("--nodes", type=int, default=2)
    c.add_argument("--ground", action="store_true")
    c.add_argument("--list", action="store_true")
    c.set_defaults(fn=_cmd_enum)

    c = sub.add_parser("render", help="DOT export")
    c.add_argument("file")
    c.add_argument("-o", "--output")
    c.set_defaults(fn=_cmd_render)

    c = sub.add_parser("oracle", help="desk-scale theorem checks")
    c.add_argument("kind", choices=["closed-term-iso"])
    c.add_argument("--bigsig", required=True)
    c.add_argument("--nodes", type=int, default=2)
    c.set_defaults(fn=_cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ParseError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (NetError, TheoryError, Exception) as e:  # semantic failures
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
