"""Built-in example theories, term encoders/decoders, and the brute-force
enumerators used as oracles for the bijection checks.

Size conventions (fixed here because the bijection statements carry none):
a linear lambda term with k applications encodes to 2k+1 cells (one per
lambda and one per application; variables are wires).  In the two-sorted
theory every variable occurrence costs a `d` cell and every unused binder a
`w` cell, so the weight of a term is #lam + #app + #occurrences + #unused
binders, which again equals the cell count of its encoding."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache

from .formula import (
    Atom,
    ClassicalFormula,
    CPar,
    CTensor,
    Formula,
    Lollipop,
    ParseError,
    Polarity,
    Sort,
    Tensor,
    UNIT,
    classicalize,
    leaf_count,
    leaves,
    polarity,
    tensor_all,
)
from .iso import canonical_key
from .net import (
    Net,
    NetError,
    PortRef,
    cell_cod_port,
    cell_dom_port,
    cod_port,
    dom_port,
    is_correct,
)
from .signature import Theory, make_signature
from .smc import attach_units
from .equivalence import rewiring_canonical, unit_sources


def _a(name: str) -> Atom:
    return Atom(Sort(name))


# -- terms ---------------------------------------------------------------------


class LambdaTerm:
    __slots__ = ()


@dataclass(frozen=True)
class Var(LambdaTerm):
    level: int  # de Bruijn level: 0 is the outermost enclosing binder
    __slots__ = ("level",)


@dataclass(frozen=True)
class App(LambdaTerm):
    fun: LambdaTerm
    arg: LambdaTerm
    __slots__ = ("fun", "arg")


@dataclass(frozen=True)
class Lam(LambdaTerm):
    body: LambdaTerm
    __slots__ = ("body",)


@dataclass(frozen=True)
class Hole(LambdaTerm):
    """A numbered context hole, applied to the terms it captures."""

    index: int
    args: tuple
    __slots__ = ("index", "args")

    @staticmethod
    def plain(index: int) -> "Hole":
        return Hole(index, ())


class PiTerm:
    __slots__ = ()


@dataclass(frozen=True)
class Zero(PiTerm):
    __slots__ = ()


@dataclass(frozen=True)
class Par(PiTerm):
    left: PiTerm
    right: PiTerm
    __slots__ = ("left", "right")


@dataclass(frozen=True)
class Send(PiTerm):
    subject: str
    payload: str
    cont: PiTerm
    __slots__ = ("subject", "payload", "cont")


@dataclass(frozen=True)
class Get(PiTerm):
    subject: str
    binder: str
    cont: PiTerm
    __slots__ = ("subject", "binder", "cont")


@dataclass(frozen=True)
class Nu(PiTerm):
    binder: str
    cont: PiTerm
    __slots__ = ("binder", "cont")


@dataclass(frozen=True)
class PiHole(PiTerm):
    index: int
    __slots__ = ("index",)


# -- lambda term utilities -------------------------------------------------------


def lam_is_closed(t: LambdaTerm, depth: int = 0) -> bool:
    if isinstance(t, Var):
        return 0 <= t.level < depth
    if isinstance(t, App):
        return lam_is_closed(t.fun, depth) and lam_is_closed(t.arg, depth)
    if isinstance(t, Lam):
        return lam_is_closed(t.body, depth + 1)
    return all(lam_is_closed(a, depth) for a in t.args)


def _level_uses(t: LambdaTerm, counts: dict[int, int]) -> None:
    if isinstance(t, Var):
        counts[t.level] = counts.get(t.level, 0) + 1
    elif isinstance(t, App):
        _level_uses(t.fun, counts)
        _level_uses(t.arg, counts)
    elif isinstance(t, Lam):
        _level_uses(t.body, counts)
    elif isinstance(t, Hole):
        for a in t.args:
            _level_uses(a, counts)


def lam_is_linear(t: LambdaTerm) -> bool:
    """Every binder is used exactly once."""

    def walk(t, depth) -> bool:
        if isinstance(t, (Var, Hole)):
            return all(walk(a, depth) for a in t.args) if isinstance(t, Hole) else True
        if isinstance(t, App):
            return walk(t.fun, depth) and walk(t.arg, depth)
        counts: dict[int, int] = {}
        _level_uses(t.body, counts)
        return counts.get(depth, 0) == 1 and walk(t.body, depth + 1)

    return walk(t, 0)


def lam_weight(t: LambdaTerm, depth: int = 0) -> int:
    """Cell count of the two-sorted encoding: lam/app/occurrence nodes plus
    one for each unused binder."""
    if isinstance(t, Var):
        return 1
    if isinstance(t, App):
        return 1 + lam_weight(t.fun, depth) + lam_weight(t.arg, depth)
    if isinstance(t, Hole):
        return sum(lam_weight(a, depth) for a in t.args)
    counts: dict[int, int] = {}
    _level_uses(t.body, counts)
    unused = 1 if counts.get(depth, 0) == 0 else 0
    return 1 + unused + lam_weight(t.body, depth + 1)


def format_lambda(t: LambdaTerm) -> str:
    def name(level):
        return f"x{level}"

    def fmt(t, depth, ctx):
        if isinstance(t, Var):
            return name(t.level)
        if isinstance(t, Hole):
            if t.args:
                return f"[{t.index}](" + ", ".join(fmt(a, depth, 0) for a in t.args) + ")"
            return f"[{t.index}]"
        if isinstance(t, Lam):
            body = f"\\{name(depth)}. " + fmt(t.body, depth + 1, 0)
            return f"({body})" if ctx > 0 else body
        body = fmt(t.fun, depth, 1) + " " + fmt(t.arg, depth, 2)
        return f"({body})" if ctx > 1 else body

    return fmt(t, 0, 0)


_LAM_TOKEN = re.compile(
    r"\s*(?:(?P<lam>\\)|(?P<dot>\.)|(?P<lpar>\()|(?P<rpar>\))|(?P<comma>,)"
    r"|(?P<hole>\[[0-9]+\])|(?P<name>[a-zA-Z0-9_']+))"
)


def _token_stream(regex, text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = regex.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def parse_lambda(text: str) -> LambdaTerm:
    """Named-variable surface syntax: \\x. e, application by juxtaposition,
    holes as [k] (optionally applied: [k](e1, e2))."""
    tokens = _token_stream(_LAM_TOKEN, text)
    index = 0

    def peek():
        return tokens[index]

    def advance():
        nonlocal index
        t = tokens[index]
        index += 1
        return t

    def parse_term(env):
        kind, _, _ = peek()
        if kind == "lam":
            advance()
            k2, v2, p2 = advance()
            if k2 != "name":
                raise ParseError("expected a variable after \\", p2)
            k3, _, p3 = advance()
            if k3 != "dot":
                raise ParseError("expected '.' after binder", p3)
            return Lam(parse_term(env + [v2]))
        return parse_app(env)

    def parse_app(env):
        out = parse_atom(env)
        while True:
            k = peek()[0]
            if k in ("lpar", "name", "hole"):
                out = App(out, parse_atom(env))
            elif k == "lam":  # a trailing lambda argument extends to the end
                out = App(out, parse_term(env))
                break
            else:
                break
        return out

    def parse_atom(env):
        kind, value, pos = advance()
        if kind == "lpar":
            inner = parse_term(env)
            k2, _, p2 = advance()
            if k2 != "rpar":
                raise ParseError("expected ')'", p2)
            return inner
        if kind == "name":
            for level in range(len(env) - 1, -1, -1):
                if env[level] == value:
                    return Var(level)
            raise ParseError(f"unbound variable {value!r}", pos)
        if kind == "hole":
            idx = int(value[1:-1])
            if peek()[0] == "lpar":
                advance()
                args = [parse_term(env)]
                while peek()[0] == "comma":
                    advance()
                    args.append(parse_term(env))
                k2, _, p2 = advance()
                if k2 != "rpar":
                    raise ParseError("expected ')'", p2)
                return Hole(idx, tuple(args))
            return Hole(idx, ())
        raise ParseError("expected a term", pos)

    out = parse_term([])
    kind, _, pos = peek()
    if kind != "end":
        raise ParseError("trailing input", pos)
    return out


def format_pi(t: PiTerm) -> str:
    def fmt(t, ctx):
        if isinstance(t, Zero):
            return "0"
        if isinstance(t, PiHole):
            return f"[{t.index}]"
        if isinstance(t, Par):
            body = fmt(t.left, 1) + " | " + fmt(t.right, 1)
            return f"({body})" if ctx > 0 else body
        if isinstance(t, Send):
            return f"send {t.subject} {t.payload}. " + fmt(t.cont, 1)
        if isinstance(t, Get):
            return f"get {t.subject}({t.binder}). " + fmt(t.cont, 1)
        return f"nu {t.binder}. " + fmt(t.cont, 1)

    return fmt(t, 0)


_PI_TOKEN = re.compile(
    r"\s*(?:(?P<bar>\|)|(?P<dot>\.)|(?P<lpar>\()|(?P<rpar>\))"
    r"|(?P<hole>\[[0-9]+\])|(?P<zero>0)|(?P<name>[a-zA-Z_][a-zA-Z0-9_']*))"
)


def parse_pi(text: str) -> PiTerm:
    tokens = _token_stream(_PI_TOKEN, text)
    index = 0

    def peek():
        return tokens[index]

    def advance():
        nonlocal index
        t = tokens[index]
        index += 1
        return t

    def expect(kind):
        k, v, p = advance()
        if k != kind:
            raise ParseError(f"expected {kind}", p)
        return v

    def parse_proc():
        out = parse_factor()
        while peek()[0] == "bar":
            advance()
            out = Par(out, parse_factor())
        return out

    def parse_factor():
        kind, value, pos = advance()
        if kind == "zero":
            return Zero()
        if kind == "hole":
            return PiHole(int(value[1:-1]))
        if kind == "lpar":
            inner = parse_proc()
            expect("rpar")
            return inner
        if kind == "name" and value == "send":
            subject = expect("name")
            payload = expect("name")
            expect("dot")
            return Send(subject, payload, parse_factor())
        if kind == "name" and value == "get":
            subject = expect("name")
            expect("lpar")
            binder = expect("name")
            expect("rpar")
            expect("dot")
            return Get(subject, binder, parse_factor())
        if kind == "name" and value == "nu":
            binder = expect("name")
            expect("dot")
            return Nu(binder, parse_factor())
        raise ParseError("expected a process", pos)

    out = parse_proc()
    kind, _, pos = peek()
    if kind != "end":
        raise ParseError("trailing input", pos)
    return out


def pi_free_names(t: PiTerm, bound: frozenset[str] = frozenset()) -> set[str]:
    if isinstance(t, (Zero, PiHole)):
        return set()
    if isinstance(t, Par):
        return pi_free_names(t.left, bound) | pi_free_names(t.right, bound)
    if isinstance(t, Send):
        out = pi_free_names(t.cont, bound)
        out |= {n for n in (t.subject, t.payload) if n not in bound}
        return out
    if isinstance(t, Get):
        out = {t.subject} - bound
        return out | pi_free_names(t.cont, bound | {t.binder})
    return pi_free_names(t.cont, bound | {t.binder})


# -- built-in theories -----------------------------------------------------------


@lru_cache(maxsize=None)
def builtin_theory(name: str) -> Theory:
    t = _a("t")
    v = _a("v")
    if name == "linear_lambda":
        sig = make_signature({"t"}, {
            "app": (Tensor(t, t), t),
            "lam": (Lollipop(t, t), t),
        })
        return Theory(signature=sig, name=name)
    if name == "lambda_sharing":
        sig = make_signature({"t"}, {
            "app": (Tensor(t, t), t),
            "lam": (Lollipop(t, t), t),
            "c": (t, Tensor(t, t)),
            "w": (t, UNIT),
        })
        return Theory(signature=sig, comonoid_sorts=((t.sort, "c", "w"),), name=name)
    if name == "lambda_two_sorted":
        sig = make_signature({"t", "v"}, {
            "app": (Tensor(t, t), t),
            "lam": (Lollipop(v, t), t),
            "c": (v, Tensor(v, v)),
            "w": (v, UNIT),
            "d": (v, t),
        })
        return Theory(signature=sig, comonoid_sorts=((v.sort, "c", "w"),), name=name)
    if name == "pi":
        sig = make_signature({"t", "v"}, {
            "s": (Tensor(v, Tensor(v, t)), t),
            "g": (Tensor(v, Lollipop(v, t)), t),
            "par": (Tensor(t, t), t),
            "nil": (UNIT, t),
            "c": (v, Tensor(v, v)),
            "w": (v, UNIT),
            "nu": (UNIT, v),
        })
        return Theory(
            signature=sig,
            monoid_sorts=((t.sort, "par", "nil"),),
            comonoid_sorts=((v.sort, "c", "w"),),
            nu_ops=(("nu", "w"),),
            name=name,
        )
    raise ValueError(f"unknown built-in theory {name!r}")


BUILTIN_THEORIES = ("linear_lambda", "lambda_sharing", "lambda_two_sorted", "pi")


# -- lambda encoding -------------------------------------------------------------


class _CellAlloc:
    def __init__(self):
        self.cells: list[tuple[str, str]] = []
        self.n = 0

    def new(self, op: str) -> str:
        cid = f"c{self.n}"
        self.n += 1
        self.cells.append((cid, op))
        return cid


def encode_lambda(term: LambdaTerm, theory_name: str = "linear_lambda",
                  hole_captures: tuple[int, ...] = ()) -> Net:
    """Compositional encoding of a closed term (or linear context with holes)
    as a net I -> t, or (t^cap0 -o t) * ... -> t when holes are declared;
    hole_captures[k] is the number of bound arguments hole k receives."""
    theory = builtin_theory(theory_name)
    if theory_name not in ("linear_lambda", "lambda_two_sorted"):
        raise ValueError("encode_lambda supports linear_lambda and lambda_two_sorted")
    two_sorted = theory_name == "lambda_two_sorted"
    if not lam_is_closed(term):
        raise NetError("encode_lambda: term is not closed")
    if not two_sorted and not lam_is_linear(term):
        raise NetError("encode_lambda: term is not linear")

    t = _a("t")
    factors = [Lollipop(tensor_all([t] * cap), t) if cap else t for cap in hole_captures]
    dom = tensor_all(factors, UNIT)
    offsets = []
    off = 0
    for f in factors:
        offsets.append(off)
        off += leaf_count(f)

    alloc = _CellAlloc()
    wires: list[tuple[PortRef, PortRef]] = []
    binder_uses: dict[int, list[PortRef]] = {}
    binder_src: dict[int, PortRef] = {}

    def build(term, target: PortRef, depth: int):
        if isinstance(term, Var):
            if two_sorted:
                d = alloc.new("d")
                wires.append((cell_cod_port(d, 0), target))
                binder_uses[term.level].append(cell_dom_port(d, 0))
            else:
                binder_uses[term.level].append(target)
        elif isinstance(term, App):
            a = alloc.new("app")
            wires.append((cell_cod_port(a, 0), target))
            build(term.fun, cell_dom_port(a, 0), depth)
            build(term.arg, cell_dom_port(a, 1), depth)
        elif isinstance(term, Lam):
            l = alloc.new("lam")
            wires.append((cell_cod_port(l, 0), target))
            binder_src[depth] = cell_dom_port(l, 0)
            binder_uses[depth] = []
            build(term.body, cell_dom_port(l, 1), depth + 1)
            uses = binder_uses.pop(depth)
            src = binder_src.pop(depth)
            if not uses:
                if not two_sorted:
                    raise NetError("encode_lambda: unused binder in a linear term")
                w = alloc.new("w")
                uses = [cell_dom_port(w, 0)]
            if len(uses) > 1 and not two_sorted:
                raise NetError("encode_lambda: repeated variable in a linear term")
            wires.extend((src, u) for u in uses)
        else:  # hole: the factor's last leaf is its output
            k = term.index
            cap = hole_captures[k]
            wires.append((dom_port(offsets[k] + cap), target))
            for j, arg in enumerate(term.args):
                build(arg, dom_port(offsets[k] + j), depth)

    build(term, cod_port(0), 0)
    net = Net(theory, dom, t, alloc.cells, wires)
    missing = [p for p in unit_sources(net) if not net.wires_from(p)]
    return attach_units(net, missing)


def decode_net(net: Net, theory_name: str = "linear_lambda") -> LambdaTerm:
    """Inverse reading: decode_net(encode_lambda(t)) == t.  Accepts contexts
    whose domain is a tensor of hole factors (t^cap -o t, or t); raises
    NetError naming the obstruction when the net is not an encoded term."""
    theory = builtin_theory(theory_name)
    two_sorted = theory_name == "lambda_two_sorted"
    if net.theory.signature != theory.signature:
        raise NetError("decode_net: net is not over the requested theory")
    if net.cod != _a("t"):
        raise NetError("decode_net: codomain must be t")

    hole_out: dict[int, int] = {}
    hole_caps: dict[int, list[int]] = {}
    if net.dom != UNIT:
        factors = []
        f = net.dom
        while isinstance(f, Tensor):
            factors.append(f.left)
            f = f.right
        factors.append(f)
        off = 0
        for k, factor in enumerate(factors):
            if isinstance(factor, Lollipop):
                caps = list(range(off, off + leaf_count(factor.left)))
                out = off + leaf_count(factor.left)
            elif isinstance(factor, Atom):
                caps, out = [], off
            else:
                raise NetError("decode_net: domain is not a tensor of hole factors")
            hole_out[out] = k
            hole_caps[k] = caps
            off += leaf_count(factor)

    sort_in: dict[PortRef, PortRef] = {}
    for s, t in net.wires:
        if net.port_kind(s) is not None:
            if t in sort_in:
                raise NetError("decode_net: fan-in at a decoded port")
            sort_in[t] = s

    binder_level: dict[PortRef, int] = {}
    visited_cells: set[str] = set()
    visiting: set[PortRef] = set()

    def decode(target: PortRef, depth: int) -> LambdaTerm:
        if target in visiting:
            raise NetError("decode_net: cyclic structure; not an encoded term")
        visiting.add(target)
        src = sort_in.get(target)
        if src is None:
            raise NetError(f"decode_net: no input at {target}")
        if src.cell is None:
            if src.loc != "dom" or src.index not in hole_out:
                raise NetError(f"decode_net: unexpected source {src}")
            k = hole_out[src.index]
            args = tuple(decode(dom_port(i), depth) for i in hole_caps[k])
            visiting.discard(target)
            return Hole(k, args)
        op = net.cell_op(src.cell)
        if src.loc == "cdom":
            if op == "lam" and src.index == 0 and not two_sorted:
                if src not in binder_level:
                    raise NetError("decode_net: variable outside its binder's body")
                visiting.discard(target)
                return Var(binder_level[src])
            raise NetError(f"decode_net: unexpected cell source {src}")
        if op == "app":
            visited_cells.add(src.cell)
            fun = decode(cell_dom_port(src.cell, 0), depth)
            arg = decode(cell_dom_port(src.cell, 1), depth)
            visiting.discard(target)
            return App(fun, arg)
        if op == "lam":
            visited_cells.add(src.cell)
            binder_level[cell_dom_port(src.cell, 0)] = depth
            body = decode(cell_dom_port(src.cell, 1), depth + 1)
            visiting.discard(target)
            return Lam(body)
        if op == "d" and two_sorted:
            visited_cells.add(src.cell)
            vsrc = sort_in.get(cell_dom_port(src.cell, 0))
            if vsrc is None or vsrc not in binder_level:
                raise NetError("decode_net: variable cell not fed by a binder in scope")
            visiting.discard(target)
            return Var(binder_level[vsrc])
        raise NetError(f"decode_net: unexpected operation {op!r}")

    term = decode(cod_port(0), 0)
    for cid, op in net.cells:
        if cid in visited_cells:
            continue
        if op == "w" and two_sorted:
            vsrc = sort_in.get(cell_dom_port(cid, 0))
            if vsrc is not None and vsrc in binder_level:
                continue
        raise NetError(f"decode_net: cell {cid} ({op}) is not part of an encoded term")
    return term


# -- term enumeration oracles ------------------------------------------------------


def enumerate_closed_linear_terms(n_apps: int) -> list[LambdaTerm]:
    """All closed linear terms with exactly `n_apps` applications, in a
    deterministic order (de Bruijn levels make alpha-equivalence canonical)."""

    def gen(n: int, avail: tuple[int, ...], depth: int):
        if len(avail) > n + 1:
            return
        if n == 0 and len(avail) == 1:
            yield Var(avail[0])
        for body in gen(n, tuple(sorted(avail + (depth,))), depth + 1):
            yield Lam(body)
        if n >= 1:
            for n1 in range(n):
                n2 = n - 1 - n1
                for r in range(len(avail) + 1):
                    for s1 in itertools.combinations(avail, r):
                        s2 = tuple(x for x in avail if x not in s1)
                        for f in gen(n1, s1, depth):
                            for a in gen(n2, s2, depth):
                                yield App(f, a)

    return list(gen(n_apps, (), 0))


@lru_cache(maxsize=None)
def count_closed_linear_terms(n_apps: int, free: int = 0) -> int:
    """Independent count-only recurrence for linear terms with `n_apps`
    applications and `free` distinct free variables, each used once."""
    from math import comb

    total = 0
    if n_apps == 0 and free == 1:
        total += 1
    if free <= n_apps:
        total += count_closed_linear_terms(n_apps, free + 1)
    if n_apps >= 1:
        for n1 in range(n_apps):
            n2 = n_apps - 1 - n1
            for r in range(free + 1):
                total += (comb(free, r)
                          * count_closed_linear_terms(n1, r)
                          * count_closed_linear_terms(n2, free - r))
    return total


def enumerate_closed_terms_by_weight(max_weight: int) -> list[LambdaTerm]:
    """All closed lambda terms whose two-sorted encoding uses at most
    `max_weight` cells."""

    def gen(nodes: int, depth: int):
        if nodes == 1:
            for level in range(depth):
                yield Var(level)
            return
        for body in gen(nodes - 1, depth + 1):
            yield Lam(body)
        for n1 in range(1, nodes - 1):
            for f in gen(n1, depth):
                for a in gen(nodes - 1 - n1, depth):
                    yield App(f, a)

    out = []
    for nodes in range(1, max_weight + 1):
        for t in gen(nodes, 0):
            if lam_weight(t) <= max_weight:
                out.append(t)
    return out


# -- net enumeration ---------------------------------------------------------------


def _op_ports(theory: Theory, op: str):
    """(negative, positive) cell ports of `op` with their kinds."""
    a, b = theory.signature.op(op)
    neg, pos = [], []
    for i, kind in enumerate(leaves(a)):
        (pos if polarity(a, i) is Polarity.POSITIVE else neg).append((("cdom", i), kind))
    for j, kind in enumerate(leaves(b)):
        (neg if polarity(b, j) is Polarity.POSITIVE else pos).append((("ccod", j), kind))
    return neg, pos


def _boundary_ports(net_dom: Formula, net_cod: Formula):
    neg, pos = [], []
    for i, kind in enumerate(leaves(net_dom)):
        if polarity(net_dom, i) is Polarity.POSITIVE:
            neg.append((dom_port(i), kind))
        else:
            pos.append((dom_port(i), kind))
    for i, kind in enumerate(leaves(net_cod)):
        if polarity(net_cod, i) is Polarity.POSITIVE:
            pos.append((cod_port(i), kind))
        else:
            neg.append((cod_port(i), kind))
    return neg, pos


@lru_cache(maxsize=None)
def _rigid_groups(c: ClassicalFormula) -> tuple[tuple[int, ...], int]:
    """Leaf -> rigid-component id over the classical tree with par-argument
    edges removed; a cycle inside one component survives every switching."""
    group_of_leaf: list[int] = []
    counter = [0]

    def walk(node: ClassicalFormula, group: int):
        if isinstance(node, CTensor):
            walk(node.left, group)
            walk(node.right, group)
        elif isinstance(node, CPar):
            counter[0] += 1
            walk(node.left, counter[0])
            counter[0] += 1
            walk(node.right, counter[0])
        else:
            group_of_leaf.append(group)

    walk(c, 0)
    return tuple(group_of_leaf), counter[0] + 1


def enumerate_nets(theory: Theory, dom: Formula, cod: Formula, max_cells: int,
                   logical_max: tuple[frozenset[str], int] | None = None) -> list[Net]:
    """Exhaustively generate correct nets with at most `max_cells` cells over
    the theory's operations, deduplicated by the appropriate equivalence
    (rewiring for plain theories, the collapsed normal form for economised
    ones).  `logical_max` = (ops, n) additionally caps the number of cells
    drawn from `ops`.  Deterministic order."""
    if max_cells > 12:
        raise NetError("enumerate_nets: cell budget above the desk-scale bound")
    if theory.collapsed:
        return _enumerate_collapsed(theory, dom, cod, max_cells, logical_max)
    nets = _enumerate_strict(theory, dom, cod, max_cells)
    if logical_max is not None:
        ops, n = logical_max
        nets = [net for net in nets if sum(1 for _, op in net.cells if op in ops) <= n]
    return nets


class _GrowthState:
    """Incremental union-find over rigid leaf groups, with undo."""

    def __init__(self):
        self.parent: list[int] = []
        self.trail: list[int] = []

    def new_vertex(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        self.trail.append(ra)
        return True

    def mark(self) -> int:
        return len(self.trail)

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            ra = self.trail.pop()
            self.parent[ra] = ra


@lru_cache(maxsize=None)
def _full_tree(c: ClassicalFormula):
    """Switching structure of a classical tree relative to a vertex offset 0:
    (vertex count, fixed edges, par groups, leaf vertex ids)."""
    from .net import _tree_structure

    return _tree_structure(c)


class _OpInstance:
    """Precomputed data for "cell number i of operation op": its port refs,
    switching-tree structure and anchor options.  Avoids all per-node
    recomputation inside the growth search."""

    __slots__ = ("cid", "op", "refs", "rigid_groups", "n_rigid", "tree",
                 "anchors", "pos_pending", "positive_refs", "unit_negs")

    def __init__(self, theory: Theory, op: str, index: int):
        self.cid = f"c{index}"
        self.op = op
        a_f, b_f = theory.signature.op(op)
        na, nb = leaf_count(a_f), leaf_count(b_f)
        view = CTensor(classicalize(a_f, False), classicalize(b_f, True))
        self.refs = [cell_dom_port(self.cid, i) for i in range(na)] + \
                    [cell_cod_port(self.cid, j) for j in range(nb)]
        self.rigid_groups, self.n_rigid = _rigid_groups(view)
        self.tree = _full_tree(view)
        neg, pos = _op_ports(theory, op)
        negs = [(PortRef(t[0], self.cid, t[1]), k) for t, k in neg]
        self.pos_pending = [(PortRef(t[0], self.cid, t[1]), k) for t, k in pos if k is not None]
        # anchor options: (anchor ref, anchor kind, other negative sort ports)
        self.anchors = []
        for i, (ref, k) in enumerate(negs):
            if k is None:
                continue
            others = [(r2, k2) for j, (r2, k2) in enumerate(negs) if j != i and k2 is not None]
            self.anchors.append((ref, k, others))
        akinds, bkinds = leaves(a_f), leaves(b_f)
        info = [(self.refs[i], akinds[i], polarity(a_f, i)) for i in range(na)] + \
               [(self.refs[na + j], bkinds[j], polarity(b_f, j).flip()) for j in range(nb)]
        self.positive_refs = [r for r, _, p in info if p is Polarity.POSITIVE]
        self.unit_negs = [r for r, k, p in info if p is Polarity.NEGATIVE and k is None]


def _enumerate_strict(theory: Theory, dom: Formula, cod: Formula, max_cells: int) -> list[Net]:
    """Connected-growth backtracking over per-sort bijections.  Positive sort
    ports are filled in a fixed discovery order; sources come from the pool
    of unused negative ports or from one port of a freshly allocated cell, so
    every abstract net is produced by exactly one branch (its replay).  The
    switching problem is maintained incrementally and completions are checked
    by the kernel directly."""
    from . import dr

    ops = [name for name, _, _ in theory.signature.operations]
    op_ports = {op: _op_ports(theory, op) for op in ops}
    bneg, bpos = _boundary_ports(dom, cod)
    instances = [{op: _OpInstance(theory, op, i) for op in ops} for i in range(max_cells)]

    parent: list[int] = []     # rigid union-find with an undo trail
    trail: list[int] = []
    port_group: dict[PortRef, int] = {}

    def find(x: int) -> int:
        while parent[x] != x:
            x = parent[x]
        return x

    # full switching structure, maintained in parallel with the search
    n_vertices = [0]
    tree_fixed: list[tuple[int, int]] = []
    par_groups: list[list[tuple[int, int]]] = []
    port_vertex: dict[PortRef, int] = {}
    unit_neg: list[PortRef] = []   # negative unit ports (need a wire at the end)
    positives: list[PortRef] = []  # all positive ports (unit-wire candidates)

    def add_rigid(groups, n_groups, refs):
        base = len(parent)
        parent.extend(range(base, base + n_groups))
        for leaf_index, ref in enumerate(refs):
            port_group[ref] = base + groups[leaf_index]

    def add_full(tree, refs):
        size, tfixed, tpars, tleaves = tree
        off = n_vertices[0]
        n_vertices[0] += size
        tree_fixed.extend((u + off, v + off) for u, v in tfixed)
        for (u1, v1), (u2, v2) in tpars:
            par_groups.append([(u1 + off, v1 + off), (u2 + off, v2 + off)])
        for leaf_index, ref in enumerate(refs):
            port_vertex[ref] = tleaves[leaf_index] + off

    dom_refs = [dom_port(i) for i in range(leaf_count(dom))]
    cod_refs = [cod_port(i) for i in range(leaf_count(cod))]
    g1, n1 = _rigid_groups(classicalize(dom, True))
    g2, n2 = _rigid_groups(classicalize(cod, False))
    add_rigid(g1, n1, dom_refs)
    add_rigid(g2, n2, cod_refs)
    add_full(_full_tree(classicalize(dom, True)), dom_refs)
    add_full(_full_tree(classicalize(cod, False)), cod_refs)
    dkinds, ckinds = leaves(dom), leaves(cod)
    for i, r in enumerate(dom_refs):
        pol = polarity(dom, i).flip()
        if pol is Polarity.POSITIVE:
            positives.append(r)
        elif dkinds[i] is None:
            unit_neg.append(r)
    for i, r in enumerate(cod_refs):
        pol = polarity(cod, i)
        if pol is Polarity.POSITIVE:
            positives.append(r)
        elif ckinds[i] is None:
            unit_neg.append(r)

    results: list[Net] = []
    seen_keys: set = set()
    cells: list[tuple[str, str]] = []
    wires: list[tuple[PortRef, PortRef]] = []
    free_sources: dict[PortRef, object] = {}
    pending: list[tuple[PortRef, object]] = []

    max_pos_gain = max((sum(1 for _, k in op_ports[op][1] if k is not None) for op in ops), default=0)
    run = dr.run_switchings

    def finish():
        fixed = tree_fixed + [(port_vertex[s], port_vertex[t]) for s, t in wires]
        nv = n_vertices[0]
        if unit_neg:
            # a persistent cycle cannot be repaired by extra unit wires
            status, _, _ = run(nv, fixed, par_groups, None, False)
            if status == dr.CYCLIC:
                return
            chosen = []
            for src in unit_neg:
                sv = port_vertex[src]
                found = None
                connectivity = len(chosen) + 1 == len(unit_neg)
                for cand in positives:
                    trial = fixed + chosen + [(sv, port_vertex[cand])]
                    status, _, _ = run(nv, trial, par_groups, None, connectivity)
                    if status == dr.OK:
                        found = (src, cand)
                        break
                if found is None:
                    return
                chosen.append((sv, port_vertex[found[1]]))
                wires.append(found)
            extra = len(unit_neg)
        else:
            status, _, _ = run(nv, fixed, par_groups, None)
            if status != dr.OK:
                return
            extra = 0
        try:
            net = Net(theory, dom, cod, list(cells), list(wires))
            if len(unit_neg) <= 1:
                stripped = net.replace(
                    wires=[(s, t) for s, t in net.wires if s not in unit_neg])
                key = canonical_key(stripped)
                rep = net
            else:
                rep = rewiring_canonical(net)
                key = canonical_key(rep)
            if key not in seen_keys:
                seen_keys.add(key)
                results.append(rep)
        finally:
            for _ in range(extra):
                wires.pop()

    def extend():
        if not pending:
            if not free_sources:
                finish()
            return
        if len(free_sources) > len(pending) + (max_cells - len(cells)) * max_pos_gain:
            return
        target, kind = pending.pop()
        tg = port_group[target]

        for src, skind in list(free_sources.items()):
            if skind != kind:
                continue
            ra, rb = find(port_group[src]), find(tg)
            if ra == rb:
                continue
            parent[ra] = rb
            del free_sources[src]
            wires.append((src, target))
            # wiring into the existing component may close a switching cycle;
            # a cycle in the partial graph survives to every completion
            fixed = tree_fixed + [(port_vertex[s], port_vertex[t]) for s, t in wires]
            status, _, _ = run(n_vertices[0], fixed, par_groups, None, False)
            if status == dr.OK:
                extend()
            wires.pop()
            free_sources[src] = skind
            parent[ra] = ra

        if len(cells) < max_cells:
            bank = instances[len(cells)]
            for op in ops:
                inst = bank[op]
                for anchor, akind, others in inst.anchors:
                    if akind != kind:
                        continue
                    cells.append((inst.cid, op))
                    rigid_before = len(parent)
                    add_rigid(inst.rigid_groups, inst.n_rigid, inst.refs)
                    full_before = (n_vertices[0], len(tree_fixed), len(par_groups))
                    add_full(inst.tree, inst.refs)
                    pos_before, unit_before = len(positives), len(unit_neg)
                    positives.extend(inst.positive_refs)
                    unit_neg.extend(inst.unit_negs)
                    for r2, k2 in others:
                        free_sources[r2] = k2
                    pending.extend(inst.pos_pending)
                    ra, rb = find(port_group[anchor]), find(tg)
                    if ra != rb:
                        parent[ra] = rb
                        wires.append((anchor, target))
                        extend()
                        wires.pop()
                        parent[ra] = ra
                    if inst.pos_pending:
                        del pending[-len(inst.pos_pending):]
                    for r2, _ in others:
                        del free_sources[r2]
                    for ref in inst.refs:
                        del port_group[ref]
                        del port_vertex[ref]
                    del parent[rigid_before:]
                    n_vertices[0] = full_before[0]
                    del tree_fixed[full_before[1]:]
                    del par_groups[full_before[2]:]
                    del positives[pos_before:]
                    del unit_neg[unit_before:]
                    cells.pop()

        pending.append((target, kind))

    for ref, kind in bneg:
        if kind is not None:
            free_sources[ref] = kind
    for ref, kind in reversed([(r, k) for r, k in bpos if k is not None]):
        pending.append((ref, kind))
    extend()
    results.sort(key=canonical_key)
    return results


def _enumerate_collapsed(theory: Theory, dom: Formula, cod: Formula, max_cells: int,
                         logical_max: tuple[frozenset[str], int] | None = None) -> list[Net]:
    """Product enumeration for economised theories: per monoid sort every
    negative port picks a target, per comonoid sort every positive port picks
    a source (sources must all be used), other sorts match bijectively."""
    sig = theory.signature
    excluded = set()
    for _, m, e in theory.monoid_sorts:
        excluded |= {m, e}
    for _, c, _ in theory.comonoid_sorts:
        excluded.add(c)
    ops = [name for name, _, _ in sig.operations if name not in excluded]
    op_ports = {op: _op_ports(theory, op) for op in ops}
    bneg, bpos = _boundary_ports(dom, cod)
    counit_ops = theory.weakening_ops
    restriction_ops = theory.restriction_ops

    results = []
    seen = set()

    for multiset in _multisets(ops, max_cells):
        if logical_max is not None:
            lops, ln = logical_max
            if sum(1 for op in multiset if op in lops) > ln:
                continue
        if not _multiset_feasible(theory, multiset, op_ports, bneg, bpos,
                                  counit_ops, restriction_ops):
            continue
        cells = [(f"c{i}", op) for i, op in enumerate(multiset)]
        neg_by_sort: dict = {}
        pos_by_sort: dict = {}
        for ref, kind in bneg:
            if kind is not None:
                neg_by_sort.setdefault(kind, []).append(ref)
        for ref, kind in bpos:
            if kind is not None:
                pos_by_sort.setdefault(kind, []).append(ref)
        for cid, op in cells:
            neg, pos = op_ports[op]
            for (loc, idx), kind in neg:
                if kind is not None:
                    neg_by_sort.setdefault(kind, []).append(PortRef(loc, cid, idx))
            for (loc, idx), kind in pos:
                if kind is not None:
                    pos_by_sort.setdefault(kind, []).append(PortRef(loc, cid, idx))

        sorts = sorted(set(neg_by_sort) | set(pos_by_sort), key=lambda s: s.name)
        per_sort_choices = []
        feasible = True
        for s in sorts:
            negs = neg_by_sort.get(s, [])
            poss = pos_by_sort.get(s, [])
            if theory.monoid_decl(s):
                choices = [list(zip(negs, combo))
                           for combo in itertools.product(poss, repeat=len(negs))]
            elif theory.comonoid_decl(s):
                choices = [list(zip(combo, poss))
                           for combo in itertools.product(negs, repeat=len(poss))
                           if set(combo) == set(negs)]
            else:
                if len(negs) != len(poss):
                    feasible = False
                    break
                choices = [list(zip(perm, poss)) for perm in itertools.permutations(negs)]
            if not choices:
                feasible = False
                break
            per_sort_choices.append(choices)
        if not feasible:
            continue

        for assignment in itertools.product(*per_sort_choices):
            wires = [w for group in assignment for w in group]
            net = Net(theory, dom, cod, cells, wires)
            if not _collapsed_normal_form(net, counit_ops, restriction_ops):
                continue
            missing = [p for p in unit_sources(net) if not net.wires_from(p)]
            try:
                candidate = attach_units(net, missing) if missing else net
            except NetError:
                continue
            if not is_correct(candidate):
                continue
            rep = rewiring_canonical(candidate)
            key = canonical_key(rep)
            if key not in seen:
                seen.add(key)
                results.append(rep)
    results.sort(key=canonical_key)
    return results


def _multiset_feasible(theory, multiset, op_ports, bneg, bpos, counit_ops, restriction_ops) -> bool:
    """Cheap per-sort counting bounds: totality of comonoid sources needs at
    least as many uses as sources, and in normal form every counit cell is
    fed by a non-restriction source with no other use."""
    neg_count: dict = {}
    pos_count: dict = {}
    for ref, kind in bneg:
        if kind is not None:
            neg_count[kind] = neg_count.get(kind, 0) + 1
    for ref, kind in bpos:
        if kind is not None:
            pos_count[kind] = pos_count.get(kind, 0) + 1
    restriction_neg = 0
    counits = 0
    for op in multiset:
        neg, pos = op_ports[op]
        if op in counit_ops:
            counits += 1
        for _, kind in neg:
            if kind is not None:
                neg_count[kind] = neg_count.get(kind, 0) + 1
                if op in restriction_ops:
                    restriction_neg += 1
        for _, kind in pos:
            if kind is not None:
                pos_count[kind] = pos_count.get(kind, 0) + 1
    for sort in set(neg_count) | set(pos_count):
        n, p = neg_count.get(sort, 0), pos_count.get(sort, 0)
        if theory.comonoid_decl(sort):
            if n > p:
                return False
        elif theory.monoid_decl(sort):
            if n > 0 and p == 0:
                return False
        elif n != p:
            return False
    total_neg_v = sum(neg_count.get(s, 0) for s, _, _ in theory.comonoid_sorts)
    if counits > total_neg_v - restriction_neg:
        return False
    return True


def _collapsed_normal_form(net: Net, counit_ops, restriction_ops) -> bool:
    """Reject nets the collapse pass would rewrite: a counit whose source has
    other uses, or a restriction feeding only counits."""
    for cid, op in net.cells:
        if op in counit_ops:
            for s in net.wires_into(cell_dom_port(cid, 0)):
                if net.port_kind(s) is None:
                    continue
                if len(net.wires_from(s)) > 1:
                    return False
        if op in restriction_ops:
            tgts = net.wires_from(cell_cod_port(cid, 0))
            if tgts and all(
                t.loc == "cdom" and net.cell_op(t.cell) in counit_ops for t in tgts
            ):
                return False
    return True


def _multisets(ops, max_cells):
    for total in range(max_cells + 1):
        for combo in itertools.combinations_with_replacement(ops, total):
            yield combo


# -- pi encoding -----------------------------------------------------------------


def encode_pi(term: PiTerm, hole_names: tuple[tuple[str, ...], ...] = (),
              global_names: tuple[str, ...] = ()) -> Net:
    """Encode a process with numbered holes over the pi theory.  The domain
    is v^|global| -o ((v^|hole 0 names| -o t) * ...): `hole_names[k]` lists
    the names hole k may use (each must be free, or bound and in scope at
    the hole); `global_names` are granted to the whole context."""
    theory = builtin_theory("pi")
    v = _a("v")
    t = _a("t")
    hole_names = tuple(tuple(sorted(set(ns))) for ns in hole_names)
    global_names = tuple(sorted(set(global_names)))

    factors = [Lollipop(tensor_all([v] * len(ns)), t) if ns else t for ns in hole_names]
    body = tensor_all(factors, UNIT)
    if global_names:
        dom = Lollipop(tensor_all([v] * len(global_names)), body)
    else:
        dom = body

    free = sorted(pi_free_names(term) | set(global_names))
    cod = Lollipop(tensor_all([v] * len(free)), t) if free else t

    global_leaf = {}
    off = 0
    for i, name in enumerate(global_names):
        global_leaf[name] = i
        off = len(global_names)
    hole_v_leaf: dict[tuple[int, str], int] = {}
    hole_t_leaf: dict[int, int] = {}
    for k, ns in enumerate(hole_names):
        for j, n in enumerate(ns):
            hole_v_leaf[(k, n)] = off + j
        hole_t_leaf[k] = off + len(ns)
        off += len(ns) + 1
    cod_v_leaf = {name: i for i, name in enumerate(free)}
    cod_t_leaf = len(free)

    alloc = _CellAlloc()
    wires: list[tuple[PortRef, PortRef]] = []
    uses: dict[str, list[PortRef]] = {name: [] for name in free}
    source: dict[str, PortRef] = {name: cod_port(cod_v_leaf[name]) for name in free}
    holes_seen: set[int] = set()

    def use(name: str, port: PortRef):
        if name not in uses:
            raise NetError(f"encode_pi: unbound name {name!r}")
        uses[name].append(port)

    def flush(name: str):
        src = source[name]
        us = uses[name]
        if not us:
            w = alloc.new("w")
            us = [cell_dom_port(w, 0)]
        wires.extend((src, u) for u in us)

    def build(term: PiTerm, target: PortRef, scope: tuple[str, ...]):
        if isinstance(term, Zero):
            return
        if isinstance(term, Par):
            build(term.left, target, scope)
            build(term.right, target, scope)
            return
        if isinstance(term, Send):
            s = alloc.new("s")
            wires.append((cell_cod_port(s, 0), target))
            use(term.subject, cell_dom_port(s, 0))
            use(term.payload, cell_dom_port(s, 1))
            build(term.cont, cell_dom_port(s, 2), scope)
            return
        if isinstance(term, Get):
            g = alloc.new("g")
            wires.append((cell_cod_port(g, 0), target))
            use(term.subject, cell_dom_port(g, 0))
            saved = (source.get(term.binder), uses.get(term.binder))
            source[term.binder] = cell_dom_port(g, 1)
            uses[term.binder] = []
            build(term.cont, cell_dom_port(g, 2), scope + (term.binder,))
            flush(term.binder)
            _restore(term.binder, saved)
            return
        if isinstance(term, Nu):
            nu = alloc.new("nu")
            saved = (source.get(term.binder), uses.get(term.binder))
            source[term.binder] = cell_cod_port(nu, 0)
            uses[term.binder] = []
            build(term.cont, target, scope + (term.binder,))
            if uses[term.binder]:
                flush(term.binder)
            else:
                alloc.cells.remove((nu, "nu"))  # w o nu = id: emit nothing
            _restore(term.binder, saved)
            return
        if isinstance(term, PiHole):
            k = term.index
            if k in holes_seen or k >= len(hole_names):
                raise NetError(f"encode_pi: hole {k} unknown or repeated")
            holes_seen.add(k)
            wires.append((dom_port(hole_t_leaf[k]), target))
            for name in hole_names[k]:
                if name not in scope and name not in free:
                    raise NetError(f"encode_pi: hole {k} grants out-of-scope name {name!r}")
                use(name, dom_port(hole_v_leaf[(k, name)]))
            return
        raise NetError("encode_pi: unknown term node")

    def _restore(name, saved):
        src, us = saved
        if src is None:
            del source[name], uses[name]
        else:
            source[name], uses[name] = src, us

    build(term, cod_port(cod_t_leaf), ())
    if holes_seen != set(range(len(hole_names))):
        raise NetError("encode_pi: every declared hole must occur exactly once")
    for name in global_names:
        uses[name].append(dom_port(global_leaf[name]))
    for name in free:
        flush(name)

    net = Net(theory, dom, cod, alloc.cells, wires)
    missing = [p for p in unit_sources(net) if not net.wires_from(p)]
    return attach_units(net, missing)
