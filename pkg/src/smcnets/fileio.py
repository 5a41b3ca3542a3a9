"""Line-oriented text formats: theories (.sth), nets (.snet), bigraphical
signatures (.sbs) and bigraphs (.sbg).  Everything written by `save_*`
re-parses to an equal value."""

from __future__ import annotations

import os

from .bigraph import BigSignature, Bigraph, BigraphError, Interface, make_bigraph
from .calculi import builtin_theory, BUILTIN_THEORIES
from .formula import Formula, ParseError, Sort, format_formula, parse_formula
from .net import Net, NetError, PortRef, parse_portref
from .signature import Equation, SmcSignature, Theory, validate_theory


def _lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line


def _fail(path, lineno, message):
    raise ParseError(f"{path}:{lineno}: {message}")


# -- theories (.sth) ---------------------------------------------------------------


def load_theory(path: str) -> Theory:
    """`sort`, `op`, `monoid`, `comonoid`, `nu` and `eq` lines; equation net
    files are resolved relative to the theory file.  The name `builtin:<x>`
    denotes a built-in theory instead of a file."""
    if path.startswith("builtin:"):
        return builtin_theory(path[len("builtin:"):])
    text = open(path).read()
    sorts: list[str] = []
    ops: dict[str, tuple[Formula, Formula]] = {}
    monoid, comonoid, nus = [], [], []
    eqs: list[tuple[str, str, str]] = []
    for lineno, line in _lines(text):
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "sort":
            sorts.append(rest)
        elif head == "op":
            name, _, typ = rest.partition(":")
            dom_s, arrow, cod_s = typ.partition("->")
            if not arrow:
                _fail(path, lineno, "op needs `name : dom -> cod`")
            sset = frozenset(Sort(s) for s in sorts)
            ops[name.strip()] = (parse_formula(dom_s, sset), parse_formula(cod_s, sset))
        elif head == "monoid":
            parts = rest.split()
            if len(parts) != 3:
                _fail(path, lineno, "monoid needs `sort m-op e-op`")
            monoid.append((Sort(parts[0]), parts[1], parts[2]))
        elif head == "comonoid":
            parts = rest.split()
            if len(parts) != 3:
                _fail(path, lineno, "comonoid needs `sort c-op w-op`")
            comonoid.append((Sort(parts[0]), parts[1], parts[2]))
        elif head == "nu":
            parts = rest.split()
            if len(parts) != 2:
                _fail(path, lineno, "nu needs `nu-op w-op`")
            nus.append((parts[0], parts[1]))
        elif head == "eq":
            name, _, sides = rest.partition(":")
            lhs, bar, rhs = sides.partition("=")
            if not bar:
                _fail(path, lineno, "eq needs `name : lhs-file = rhs-file`")
            eqs.append((name.strip(), lhs.strip(), rhs.strip()))
        else:
            _fail(path, lineno, f"unknown directive {head!r}")
    from .signature import make_signature

    base = Theory(
        signature=make_signature(set(sorts), ops),
        monoid_sorts=tuple(monoid),
        comonoid_sorts=tuple(comonoid),
        nu_ops=tuple(nus),
        name=os.path.basename(path),
    )
    here = os.path.dirname(os.path.abspath(path))
    equations = []
    for name, lhs_file, rhs_file in eqs:
        lhs = load_net(os.path.join(here, lhs_file), theory=base)
        rhs = load_net(os.path.join(here, rhs_file), theory=base)
        equations.append(Equation(name, lhs, rhs))
    theory = Theory(
        signature=base.signature,
        equations=tuple(equations),
        monoid_sorts=base.monoid_sorts,
        comonoid_sorts=base.comonoid_sorts,
        nu_ops=base.nu_ops,
        name=base.name,
    )
    validate_theory(theory)
    return theory


def save_theory(theory: Theory, path: str, equation_files: dict[str, tuple[str, str]] | None = None) -> None:
    lines = []
    for s in sorted(theory.signature.sorts):
        lines.append(f"sort {s.name}")
    for name, dom, cod in theory.signature.operations:
        lines.append(f"op {name} : {format_formula(dom)} -> {format_formula(cod)}")
    for s, m, e in theory.monoid_sorts:
        lines.append(f"monoid {s.name} {m} {e}")
    for s, c, w in theory.comonoid_sorts:
        lines.append(f"comonoid {s.name} {c} {w}")
    for nu, w in theory.nu_ops:
        lines.append(f"nu {nu} {w}")
    here = os.path.dirname(os.path.abspath(path))
    for eq in theory.equations:
        if equation_files and eq.name in equation_files:
            lf, rf = equation_files[eq.name]
        else:
            lf, rf = f"{eq.name}.lhs.snet", f"{eq.name}.rhs.snet"
        save_net(eq.lhs, os.path.join(here, lf), theory_ref="<inline>")
        save_net(eq.rhs, os.path.join(here, rf), theory_ref="<inline>")
        lines.append(f"eq {eq.name} : {lf} = {rf}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# -- nets (.snet) -------------------------------------------------------------------


def load_net(path: str, theory: Theory | None = None) -> Net:
    text = open(path).read()
    here = os.path.dirname(os.path.abspath(path))
    dom = cod = None
    cells: list[tuple[str, str]] = []
    wires: list[tuple[PortRef, PortRef]] = []
    for lineno, line in _lines(text):
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "theory":
            if theory is None:
                ref = rest if rest.startswith("builtin:") else os.path.join(here, rest)
                theory = load_theory(ref)
        elif head == "dom":
            dom = parse_formula(rest, theory.signature.sorts if theory else None)
        elif head == "cod":
            cod = parse_formula(rest, theory.signature.sorts if theory else None)
        elif head == "cell":
            parts = rest.split()
            if len(parts) != 2:
                _fail(path, lineno, "cell needs `id op-name`")
            cells.append((parts[0], parts[1]))
        elif head == "wire":
            src_s, arrow, tgt_s = rest.partition("->")
            if not arrow:
                _fail(path, lineno, "wire needs `src -> tgt`")
            wires.append((parse_portref(src_s.strip()), parse_portref(tgt_s.strip())))
        else:
            _fail(path, lineno, f"unknown directive {head!r}")
    if theory is None:
        _fail(path, 0, "net file lacks a `theory` line")
    if dom is None or cod is None:
        _fail(path, 0, "net file needs `dom` and `cod` lines")
    return Net(theory, dom, cod, cells, wires)


def save_net(net: Net, path: str, theory_ref: str | None = None) -> None:
    lines = []
    name = net.theory.name
    if theory_ref is None:
        if name in BUILTIN_THEORIES:
            theory_ref = f"builtin:{name}"
        else:  # write the theory next to the net so the file is self-contained
            theory_ref = os.path.basename(path) + ".sth"
            save_theory(net.theory, path + ".sth")
    lines.append(f"theory {theory_ref}")
    lines.append(f"dom {format_formula(net.dom)}")
    lines.append(f"cod {format_formula(net.cod)}")
    for cid, op in net.cells:
        lines.append(f"cell {cid} {op}")
    for src, tgt in sorted(net.wires):
        lines.append(f"wire {src} -> {tgt}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# -- bigraphical signatures (.sbs) and bigraphs (.sbg) --------------------------------


def _parse_bigsig_line(rest: str):
    name, _, spec = rest.partition(":")
    parts = spec.split()
    atomic = False
    if parts and parts[-1] == "atomic":
        atomic = True
        parts = parts[:-1]
    if len(parts) != 4 or parts[0] != "bind" or parts[2] != "free":
        raise ParseError("bigsig needs `name : bind B free F [atomic]`")
    return name.strip(), int(parts[1]), int(parts[3]), atomic


def load_bigsignature(path: str) -> BigSignature:
    controls = []
    atomic = set()
    for lineno, line in _lines(open(path).read()):
        head, _, rest = line.partition(" ")
        if head != "bigsig":
            _fail(path, lineno, f"unknown directive {head!r}")
        name, b, f, is_atomic = _parse_bigsig_line(rest)
        controls.append((name, b, f))
        if is_atomic:
            atomic.add(name)
    return BigSignature(tuple(controls), frozenset(atomic))


def save_bigsignature(sig: BigSignature, path: str) -> None:
    with open(path, "w") as fh:
        for name, b, f in sig.controls:
            suffix = " atomic" if name in sig.atomic else ""
            fh.write(f"bigsig {name} : bind {b} free {f}{suffix}\n")


def load_bigraph(path: str) -> Bigraph:
    controls: list[tuple[str, int, int]] = []
    atomic: set[str] = set()
    dom_width = cod_width = 0
    names: dict[str, tuple[str, int | None]] = {}  # name -> (side, locality)
    nodes: dict[str, str] = {}
    parent: dict[tuple, tuple] = {}
    edges: set[str] = set()
    link: dict[tuple, tuple] = {}
    link_lines: list[tuple[int, str, str]] = []

    def parse_place(text: str) -> tuple:
        if text.startswith("root."):
            return ("root", int(text[5:]))
        return ("node", text)

    for lineno, line in _lines(open(path).read()):
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "bigsig":
            name, b, f, is_atomic = _parse_bigsig_line(rest)
            controls.append((name, b, f))
            if is_atomic:
                atomic.add(name)
        elif head == "dom":
            if not rest.startswith("width "):
                _fail(path, lineno, "dom needs `width <n>`")
            dom_width = int(rest[6:])
        elif head == "cod":
            if not rest.startswith("width "):
                _fail(path, lineno, "cod needs `width <n>`")
            cod_width = int(rest[6:])
        elif head == "name":
            parts = rest.split()
            if len(parts) != 5 or parts[1] != "at" or parts[3] != "in":
                _fail(path, lineno, "name needs `x at <site k|global> in <dom|cod>`")
            locality = None if parts[2] == "global" else int(parts[2].split(".")[-1])
            names[parts[0]] = (parts[4], locality)
        elif head == "node":
            spec, _, place = rest.partition(" in ")
            nid, _, control = spec.partition(":")
            nodes[nid.strip()] = control.strip()
            parent[("node", nid.strip())] = parse_place(place.strip())
        elif head == "site":
            spec, _, place = rest.partition(" in ")
            parent[("site", int(spec))] = parse_place(place.strip())
        elif head == "edge":
            edges.add(rest)
        elif head == "link":
            src, arrow, tgt = rest.partition("->")
            if not arrow:
                _fail(path, lineno, "link needs `point -> target`")
            link_lines.append((lineno, src.strip(), tgt.strip()))
        else:
            _fail(path, lineno, f"unknown directive {head!r}")

    sig = BigSignature(tuple(controls), frozenset(atomic))
    dom_names = {x: loc for x, (side, loc) in names.items() if side == "dom"}
    cod_names = {x: loc for x, (side, loc) in names.items() if side == "cod"}
    from .bigraph import make_interface

    dom = make_interface(dom_width, dom_names)
    cod = make_interface(cod_width, cod_names)
    for lineno, src, tgt in link_lines:
        if "." in src:
            nid, _, idx = src.rpartition(".")
            point = ("port", nid, int(idx))
        else:
            point = ("name", src)
        if tgt in edges:
            target = ("edge", tgt)
        elif tgt in cod_names:
            target = ("name", tgt)
        else:
            _fail(path, lineno, f"link target {tgt!r} is neither an edge nor an outer name")
        link[point] = target
    return make_bigraph(sig, dom, cod, nodes, parent, edges, link)


def save_bigraph(b: Bigraph, path: str) -> None:
    lines = []
    for name, bb, f in b.sig.controls:
        suffix = " atomic" if name in b.sig.atomic else ""
        lines.append(f"bigsig {name} : bind {bb} free {f}{suffix}")
    lines.append(f"dom width {b.dom.width}")
    lines.append(f"cod width {b.cod.width}")
    for side, iface in (("dom", b.dom), ("cod", b.cod)):
        for x in iface.names:
            loc = iface.loc[x]
            where = "global" if loc is None else f"site.{loc}"
            lines.append(f"name {x} at {where} in {side}")

    def fmt_place(p: tuple) -> str:
        return f"root.{p[1]}" if p[0] == "root" else str(p[1])

    node_map = b.node_map
    for child, p in sorted(b.parent, key=repr):
        if child[0] == "node":
            lines.append(f"node {child[1]} : {node_map[child[1]]} in {fmt_place(p)}")
        else:
            lines.append(f"site {child[1]} in {fmt_place(p)}")
    for e in sorted(b.edges):
        lines.append(f"edge {e}")
    for point, t in sorted(b.link, key=repr):
        src = f"{point[1]}.{point[2]}" if point[0] == "port" else point[1]
        tgt = t[1]
        lines.append(f"link {src} -> {tgt}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
