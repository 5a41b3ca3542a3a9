"""Linkings with cells over a theory.

A net has a domain formula, a codomain formula, a multiset of cells (each a
formal occurrence of a signature operation) and a set of directed wires from
globally negative ports to globally positive ports.

Global polarity: codomain ports keep their polarity in the codomain formula
and domain ports flip it; for a cell c : A -> B, ports on the A side keep
their polarity in A while ports on the B side flip it, so the cell boundary
behaves like an extra A -o B assumption in the domain.

Correctness is totality of the wiring plus the switching criterion: every
switching of the glued graph (classical views of the dual of the domain, of
the codomain, and of A (x) dual(B) for each cell, glued along ports by the
undirected wires) must be acyclic and connected.  In the economised
representation a negative port of a declared comonoid sort may carry several
wires; such a fan-out contributes one switching choice per wire, which is
exactly the choice structure of the comultiplication tree it abbreviates.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from . import dr
from .formula import (
    Bottom,
    ClassicalFormula,
    CPar,
    CTensor,
    Formula,
    NegAtom,
    One,
    Polarity,
    PosAtom,
    Sort,
    classicalize,
    format_formula,
    leaf_count,
    leaves,
    polarity,
    sorts_of,
)
from .signature import Theory


class NetError(ValueError):
    pass


_LOC_RANK = {"dom": 0, "cod": 1, "cdom": 2, "ccod": 3}


class PortRef(tuple):
    """A port of a net: a boundary leaf or a cell-boundary leaf.

    loc is one of dom/cod (cell None) or cdom/ccod (cell set); index is the
    leaf index within the located formula.  Tuple-backed for cheap hashing.
    """

    __slots__ = ()

    def __new__(cls, loc: str, cell: str | None, index: int):
        return tuple.__new__(cls, (loc, cell, index))

    @property
    def loc(self) -> str:
        return self[0]

    @property
    def cell(self) -> str | None:
        return self[1]

    @property
    def index(self) -> int:
        return self[2]

    def __repr__(self):
        return f"PortRef({self[0]!r}, {self[1]!r}, {self[2]!r})"

    def __str__(self):
        if self[1] is None:
            return f"{self[0]}.{self[2]}"
        side = "dom" if self[0] == "cdom" else "cod"
        return f"cell.{self[1]}.{side}.{self[2]}"


def dom_port(i: int) -> PortRef:
    return PortRef("dom", None, i)


def cod_port(i: int) -> PortRef:
    return PortRef("cod", None, i)


def cell_dom_port(cell: str, i: int) -> PortRef:
    return PortRef("cdom", cell, i)


def cell_cod_port(cell: str, i: int) -> PortRef:
    return PortRef("ccod", cell, i)


def parse_portref(text: str) -> PortRef:
    parts = text.split(".")
    if len(parts) == 2 and parts[0] in ("dom", "cod"):
        return PortRef(parts[0], None, int(parts[1]))
    if len(parts) == 4 and parts[0] == "cell" and parts[2] in ("dom", "cod"):
        return PortRef("cdom" if parts[2] == "dom" else "ccod", parts[1], int(parts[3]))
    raise NetError(f"bad port reference {text!r}")


class Net:
    """Immutable; wires are a set of (source, target) pairs."""

    __slots__ = ("theory", "dom", "cod", "cells", "wires", "_cells_dict", "_hash", "_ports")

    def __init__(
        self,
        theory: Theory,
        dom: Formula,
        cod: Formula,
        cells: Iterable[tuple[str, str]] = (),
        wires: Iterable[tuple[PortRef, PortRef]] = (),
    ):
        object.__setattr__(self, "theory", theory)
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        cells_t = tuple(sorted(cells))
        object.__setattr__(self, "cells", cells_t)
        object.__setattr__(self, "_cells_dict", dict(cells_t))
        if len(self._cells_dict) != len(cells_t):
            raise NetError("duplicate cell id")
        object.__setattr__(self, "wires", frozenset(wires))
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_ports", None)

    def __setattr__(self, *_):
        raise AttributeError("nets are immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Net)
            and self.dom == other.dom
            and self.cod == other.cod
            and self.cells == other.cells
            and self.wires == other.wires
        )

    def __hash__(self):
        h = object.__getattribute__(self, "_hash")
        if h is None:
            h = hash((self.dom, self.cod, self.cells, self.wires))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return (
            f"Net({format_formula(self.dom)} -> {format_formula(self.cod)}, "
            f"cells={list(self.cells)}, wires={sorted((str(a), str(b)) for a, b in self.wires)})"
        )

    # -- ports ----------------------------------------------------------

    def cell_op(self, cell: str) -> str:
        try:
            return self._cells_dict[cell]
        except KeyError:
            raise NetError(f"unknown cell {cell!r}") from None

    def cell_type(self, cell: str) -> tuple[Formula, Formula]:
        return self.theory.signature.op(self.cell_op(cell))

    def located_formula(self, ref: PortRef) -> Formula:
        if ref.loc == "dom":
            return self.dom
        if ref.loc == "cod":
            return self.cod
        dom, cod = self.cell_type(ref.cell)
        return dom if ref.loc == "cdom" else cod

    def _port_table(self) -> dict[PortRef, tuple[Sort | None, Polarity]]:
        table = object.__getattribute__(self, "_ports")
        if table is None:
            table = {}
            sides = [("dom", None, self.dom, True), ("cod", None, self.cod, False)]
            for cid, _ in self.cells:
                cdom, ccod = self.cell_type(cid)
                sides.append(("cdom", cid, cdom, False))
                sides.append(("ccod", cid, ccod, True))
            for loc, cid, f, flips in sides:
                kinds = leaves(f)
                for i, kind in enumerate(kinds):
                    p = polarity(f, i)
                    table[PortRef(loc, cid, i)] = (kind, p.flip() if flips else p)
            object.__setattr__(self, "_ports", table)
        return table

    def port_kind(self, ref: PortRef) -> Sort | None:
        entry = self._port_table().get(ref)
        if entry is None:
            raise NetError(f"dangling port reference {ref}")
        return entry[0]

    def global_polarity(self, ref: PortRef) -> Polarity:
        entry = self._port_table().get(ref)
        if entry is None:
            raise NetError(f"dangling port reference {ref}")
        return entry[1]

    def all_ports(self) -> list[PortRef]:
        return list(self._port_table())

    def negative_ports(self) -> list[PortRef]:
        return [p for p, (_, pol) in self._port_table().items() if pol is Polarity.NEGATIVE]

    def positive_ports(self) -> list[PortRef]:
        return [p for p, (_, pol) in self._port_table().items() if pol is Polarity.POSITIVE]

    def wires_from(self, src: PortRef) -> list[PortRef]:
        return sorted(t for s, t in self.wires if s == src)

    def wires_into(self, tgt: PortRef) -> list[PortRef]:
        return sorted(s for s, t in self.wires if t == tgt)

    def replace(self, cells=None, wires=None, dom=None, cod=None) -> "Net":
        return Net(
            self.theory,
            self.dom if dom is None else dom,
            self.cod if cod is None else cod,
            self.cells if cells is None else cells,
            self.wires if wires is None else wires,
        )

    def fresh_cell_id(self, taken: set[str] | None = None) -> str:
        taken = set(self._cells_dict) | (taken or set())
        i = 0
        while f"c{i}" in taken:
            i += 1
        return f"c{i}"

    # -- collapsed-representation views -----------------------------------

    def is_fanout_source(self, ref: PortRef) -> bool:
        """True when `ref` may legally carry several outgoing wires."""
        kind = self.port_kind(ref)
        return kind is not None and self.theory.comonoid_decl(kind) is not None

    def is_fanin_target(self, ref: PortRef) -> bool:
        """True when `ref` may receive any number of incoming sort wires."""
        kind = self.port_kind(ref)
        return kind is not None and self.theory.monoid_decl(kind) is not None


def global_polarity(net: Net, ref: PortRef) -> Polarity:
    return net.global_polarity(ref)


# -- well-formedness ---------------------------------------------------------


def check_wellformed(net: Net) -> None:
    """Raise NetError on the first violated invariant; partial wirings are
    allowed, so totality is not checked here."""
    sig = net.theory.signature
    for f, what in ((net.dom, "domain"), (net.cod, "codomain")):
        extra = sorts_of(f) - sig.sorts
        if extra:
            raise NetError(f"{what} uses sorts outside the signature: "
                           + ", ".join(sorted(s.name for s in extra)))
    for cid, op in net.cells:
        if not sig.has_op(op):
            raise NetError(f"cell {cid!r}: unknown operation {op!r}")
    sources_seen: dict[PortRef, int] = {}
    sort_in: dict[PortRef, int] = {}
    for src, tgt in net.wires:
        if net.global_polarity(src) is not Polarity.NEGATIVE:
            raise NetError(f"wire source {src} is not globally negative")
        if net.global_polarity(tgt) is not Polarity.POSITIVE:
            raise NetError(f"wire target {tgt} is not globally positive")
        skind = net.port_kind(src)
        tkind = net.port_kind(tgt)
        if skind is not None:
            if tkind != skind:
                raise NetError(
                    f"sort mismatch: wire {src} -> {tgt} sends {skind} into "
                    f"{'unit' if tkind is None else tkind}"
                )
            sort_in[tgt] = sort_in.get(tgt, 0) + 1
        sources_seen[src] = sources_seen.get(src, 0) + 1
    for src, n in sources_seen.items():
        if n > 1 and not net.is_fanout_source(src):
            raise NetError(f"duplicate wire source {src}")
    for tgt, n in sort_in.items():
        if n > 1 and not net.is_fanin_target(tgt):
            raise NetError(f"per-sort bijectivity failure: {tgt} receives {n} sort wires")


def is_wellformed(net: Net) -> bool:
    try:
        check_wellformed(net)
        return True
    except NetError:
        return False


# -- switchings ---------------------------------------------------------------


@lru_cache(maxsize=None)
def _tree_structure(c: ClassicalFormula):
    """Preorder-numbered switching structure of a classical tree: vertex
    count, fixed edges, par groups (each a pair of candidate edges) and the
    leaf vertex ids in leaf order."""
    fixed: list[tuple[int, int]] = []
    pars: list[tuple[tuple[int, int], tuple[int, int]]] = []
    leaves_out: list[int] = []
    counter = [0]

    def walk(node: ClassicalFormula) -> int:
        vid = counter[0]
        counter[0] += 1
        if isinstance(node, (PosAtom, NegAtom, One, Bottom)):
            leaves_out.append(vid)
            return vid
        lv = walk(node.left)
        rv = walk(node.right)
        if isinstance(node, CTensor):
            fixed.append((vid, lv))
            fixed.append((vid, rv))
        else:
            pars.append(((vid, lv), (vid, rv)))
        return vid

    walk(c)
    return counter[0], tuple(fixed), tuple(pars), tuple(leaves_out)


class SwitchingProblem:
    """The glued graph of a net, with choice groups for pars and fan-outs."""

    __slots__ = ("n_vertices", "fixed", "groups", "group_info", "port_vertex", "vertex_label")

    def __init__(self, net: Net):
        n = 0
        fixed: list[tuple[int, int]] = []
        groups: list[list[tuple[int, int]]] = []
        group_info: list[tuple] = []
        port_vertex: dict[PortRef, int] = {}
        vertex_label: list[str] = []

        def add_tree(c: ClassicalFormula, owner: str, port_of_leaf) -> None:
            nonlocal n
            size, tfixed, tpars, tleaves = _tree_structure(c)
            off = n
            n += size
            vertex_label.extend(f"{owner}#{i}" for i in range(size))
            fixed.extend((u + off, v + off) for u, v in tfixed)
            for (u1, v1), (u2, v2) in tpars:
                groups.append([(u1 + off, v1 + off), (u2 + off, v2 + off)])
                group_info.append(("par", owner, u1 + off))
            for leaf_index, vid in enumerate(tleaves):
                ref = port_of_leaf(leaf_index)
                port_vertex[ref] = vid + off
                vertex_label[vid + off] = str(ref)

        add_tree(classicalize(net.dom, True), "dom", lambda i: dom_port(i))
        add_tree(classicalize(net.cod, False), "cod", lambda i: cod_port(i))
        for cid, _ in net.cells:
            cdom, ccod = net.cell_type(cid)
            na = leaf_count(cdom)
            view = CTensor(classicalize(cdom, False), classicalize(ccod, True))
            add_tree(
                view,
                f"cell.{cid}",
                lambda i, cid=cid, na=na: cell_dom_port(cid, i) if i < na else cell_cod_port(cid, i - na),
            )

        by_source: dict[PortRef, list[PortRef]] = {}
        for src, tgt in sorted(net.wires):
            by_source.setdefault(src, []).append(tgt)
        for src, tgts in sorted(by_source.items()):
            if len(tgts) == 1:
                fixed.append((port_vertex[src], port_vertex[tgts[0]]))
            else:
                # a fan-out abbreviates a comultiplication tree: each
                # switching keeps exactly one branch attached to the source
                groups.append([(port_vertex[src], port_vertex[t]) for t in tgts])
                group_info.append(("fanout", str(src), port_vertex[src]))

        self.n_vertices = n
        self.fixed = fixed
        self.groups = groups
        self.group_info = group_info
        self.port_vertex = port_vertex
        self.vertex_label = vertex_label

    def run(self, max_switchings=dr.DEFAULT_MAX_SWITCHINGS):
        return dr.run_switchings(self.n_vertices, self.fixed, self.groups, max_switchings)


@dataclass(frozen=True)
class Switching:
    """One switching: the choice made for every par/fan-out group, and the
    resulting undirected glued graph."""

    choices: tuple[tuple[tuple, int], ...]  # (group descriptor, chosen branch)
    edges: frozenset[tuple[int, int]]
    vertex_labels: tuple[str, ...]


def switching_problem(net: Net) -> SwitchingProblem:
    return SwitchingProblem(net)


def switching_count(net: Net) -> int:
    problem = SwitchingProblem(net)
    total = 1
    for g in problem.groups:
        total *= len(g)
    return total


def switchings(net: Net, max_switchings: int | None = dr.DEFAULT_MAX_SWITCHINGS) -> Iterator[Switching]:
    """Enumerate every switching of `net` (2^k for k pars on strict nets)."""
    problem = SwitchingProblem(net)
    total = 1
    for g in problem.groups:
        total *= len(g)
    if max_switchings is not None and total > max_switchings:
        raise dr.SwitchingBudgetError(f"{total} switchings exceed {max_switchings}")
    for index in range(total):
        digits = dr.config_choices(problem.groups, index)
        edges = set(problem.fixed)
        for g, d in zip(problem.groups, digits):
            edges.add(g[d])
        yield Switching(
            choices=tuple(zip(problem.group_info, digits)),
            edges=frozenset(edges),
            vertex_labels=tuple(problem.vertex_label),
        )


# -- correctness ---------------------------------------------------------------


def structural_report(net: Net, pending_sources: frozenset = frozenset()) -> tuple[bool, str]:
    """The non-switching part of correctness: well-formedness, totality and
    per-sort bijectivity.  Ports in `pending_sources` are treated as if they
    already had an outgoing wire."""
    try:
        check_wellformed(net)
    except NetError as e:
        return False, f"not well-formed: {e}"
    out_count: dict[PortRef, int] = {}
    in_sort: dict[PortRef, int] = {}
    for src, tgt in net.wires:
        out_count[src] = out_count.get(src, 0) + 1
        if net.port_kind(src) is not None:
            in_sort[tgt] = in_sort.get(tgt, 0) + 1
    for p in net.negative_ports():
        if out_count.get(p, 0) == 0 and p not in pending_sources:
            return False, f"not total: negative port {p} has no wire"
    for p in net.positive_ports():
        kind = net.port_kind(p)
        if kind is None or net.is_fanin_target(p):
            continue
        if in_sort.get(p, 0) != 1:
            return False, f"positive {kind} port {p} receives {in_sort.get(p, 0)} sort wires"
    return True, "structurally sound"


def correctness_report(net: Net, max_switchings: int | None = dr.DEFAULT_MAX_SWITCHINGS) -> tuple[bool, str]:
    """Totality + per-sort bijectivity + the switching criterion.  Returns
    (ok, diagnostic); the diagnostic names the first failure."""
    ok, why = structural_report(net)
    if not ok:
        return ok, why
    problem = SwitchingProblem(net)
    status, index, total = problem.run(max_switchings)
    if status == dr.CYCLIC:
        return False, f"switching {index} of {total} contains a cycle"
    if status == dr.DISCONNECTED:
        return False, f"switching {index} of {total} is disconnected"
    return True, "correct"


def is_correct(net: Net, max_switchings: int | None = dr.DEFAULT_MAX_SWITCHINGS) -> bool:
    return correctness_report(net, max_switchings)[0]


def check_correct(net: Net, what: str = "net") -> Net:
    ok, why = correctness_report(net)
    if not ok:
        raise NetError(f"{what} is not correct: {why}")
    return net


# -- DOT export ---------------------------------------------------------------


def net_to_dot(net: Net) -> str:
    """Ports as nodes grouped by location; wires as directed edges; cells as
    record nodes."""

    def port_node(ref: PortRef) -> str:
        return '"' + str(ref) + '"'

    lines = ["digraph net {", "  rankdir=TB;"]
    kinds = leaves(net.dom)
    lines.append("  subgraph cluster_dom {")
    lines.append(f'    label="dom: {format_formula(net.dom)}";')
    for i, kind in enumerate(kinds):
        label = "I" if kind is None else kind.name
        lines.append(f'    {port_node(dom_port(i))} [shape=circle,label="{label}"];')
    lines.append("  }")
    kinds = leaves(net.cod)
    lines.append("  subgraph cluster_cod {")
    lines.append(f'    label="cod: {format_formula(net.cod)}";')
    for i, kind in enumerate(kinds):
        label = "I" if kind is None else kind.name
        lines.append(f'    {port_node(cod_port(i))} [shape=circle,label="{label}"];')
    lines.append("  }")
    for cid, op in net.cells:
        cdom, ccod = net.cell_type(cid)
        dports = "|".join(f"<d{i}> {('I' if k is None else k.name)}" for i, k in enumerate(leaves(cdom)))
        cports = "|".join(f"<c{i}> {('I' if k is None else k.name)}" for i, k in enumerate(leaves(ccod)))
        lines.append(
            f'  "cell.{cid}" [shape=record,label="{{{{{dports}}}|{op} ({cid})|{{{cports}}}}}"];'
        )
    def endpoint(ref: PortRef) -> str:
        if ref.loc == "cdom":
            return f'"cell.{ref.cell}":d{ref.index}'
        if ref.loc == "ccod":
            return f'"cell.{ref.cell}":c{ref.index}'
        return port_node(ref)
    for src, tgt in sorted(net.wires):
        lines.append(f"  {endpoint(src)} -> {endpoint(tgt)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
