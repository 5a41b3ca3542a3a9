"""The symmetric monoidal closed structure on nets: identities, composition
by glueing, tensor, structural morphisms, currying, the one-cell embedding of
an operation, and the modular cell-partition decomposition."""

from __future__ import annotations

import itertools

from .formula import Formula, Lollipop, Polarity, Tensor, UNIT, leaf_count, leaves, polarity, tensor_all
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
from .signature import Theory


def identity(theory: Theory, a: Formula) -> Net:
    """dom = cod = a with the i-th leaves wired negative-to-positive."""
    wires = []
    for i in range(leaf_count(a)):
        if polarity(a, i) is Polarity.POSITIVE:
            wires.append((dom_port(i), cod_port(i)))  # dom side is the flipped copy
        else:
            wires.append((cod_port(i), dom_port(i)))
    return Net(theory, a, a, (), wires)


def _shift_ref(ref: PortRef, dom_off: int, cod_off: int, cell_map: dict[str, str]) -> PortRef:
    if ref.loc == "dom":
        return dom_port(ref.index + dom_off)
    if ref.loc == "cod":
        return cod_port(ref.index + cod_off)
    return PortRef(ref.loc, cell_map[ref.cell], ref.index)


def tensor(f: Net, g: Net) -> Net:
    """Side-by-side union with reindexed boundary ports and fresh cell ids."""
    if f.theory is not g.theory and f.theory != g.theory:
        raise NetError("tensor of nets over different theories")
    fmap = {cid: f"c{i}" for i, (cid, _) in enumerate(f.cells)}
    gmap = {cid: f"c{len(fmap) + i}" for i, (cid, _) in enumerate(g.cells)}
    d_off, c_off = leaf_count(f.dom), leaf_count(f.cod)
    cells = [(fmap[cid], op) for cid, op in f.cells] + [(gmap[cid], op) for cid, op in g.cells]
    wires = [
        (_shift_ref(s, 0, 0, fmap), _shift_ref(t, 0, 0, fmap)) for s, t in f.wires
    ] + [
        (_shift_ref(s, d_off, c_off, gmap), _shift_ref(t, d_off, c_off, gmap)) for s, t in g.wires
    ]
    return Net(f.theory, Tensor(f.dom, g.dom), Tensor(f.cod, g.cod), cells, wires)


def compose(g: Net, f: Net) -> Net:
    """g after f.  Wires of the composite are the maximal directed paths of
    the glued graph; paths that start at a middle port with no incoming wire
    are dropped (they can only start at unit ports or collapsed-monoid ports,
    where dropping preserves correctness)."""
    if f.cod != g.dom:
        raise NetError("compose: middle boundary mismatch")
    if f.theory is not g.theory and f.theory != g.theory:
        raise NetError("compose: nets over different theories")
    fmap = {cid: f"c{i}" for i, (cid, _) in enumerate(f.cells)}
    gmap = {cid: f"c{len(fmap) + i}" for i, (cid, _) in enumerate(g.cells)}

    def f_ref(ref: PortRef):
        if ref.loc == "cod":
            return ("mid", ref.index)
        if ref.loc == "dom":
            return dom_port(ref.index)
        return PortRef(ref.loc, fmap[ref.cell], ref.index)

    def g_ref(ref: PortRef):
        if ref.loc == "dom":
            return ("mid", ref.index)
        if ref.loc == "cod":
            return cod_port(ref.index)
        return PortRef(ref.loc, gmap[ref.cell], ref.index)

    out_edges: dict[object, list[object]] = {}
    for s, t in sorted(f.wires):
        out_edges.setdefault(f_ref(s), []).append(f_ref(t))
    for s, t in sorted(g.wires):
        out_edges.setdefault(g_ref(s), []).append(g_ref(t))

    wires = []

    def trace(start, node, seen_mids):
        for nxt in out_edges.get(node, ()):  # middle ports relay to the other side
            if isinstance(nxt, PortRef):
                wires.append((start, nxt))
            else:
                if nxt in seen_mids:
                    raise NetError("internal: cycle through middle ports in composition")
                trace(start, nxt, seen_mids | {nxt})

    for node in list(out_edges):
        if isinstance(node, PortRef):
            trace(node, node, frozenset())

    cells = [(fmap[cid], op) for cid, op in f.cells] + [(gmap[cid], op) for cid, op in g.cells]
    return Net(f.theory, f.dom, g.cod, cells, wires)


# -- structural morphisms ------------------------------------------------------


def _pairing_net(theory: Theory, dom: Formula, cod: Formula, pairs, unit_sources=()) -> Net:
    """Net wiring dom leaf i to cod leaf j for each (i, j) in `pairs`
    (direction by polarity), with leftover negative unit ports attached to
    the first jointly correct targets."""
    wires = []
    for i, j in pairs:
        if polarity(dom, i) is Polarity.POSITIVE:
            wires.append((dom_port(i), cod_port(j)))
        else:
            wires.append((cod_port(j), dom_port(i)))
    net = Net(theory, dom, cod, (), wires)
    if unit_sources:
        net = attach_units(net, [dom_port(i) for i in unit_sources])
    return net


def attach_units(net: Net, sources: list[PortRef],
                 preferred: dict[PortRef, list[PortRef]] | None = None) -> Net:
    """Give each wire-less negative unit port in `sources` a target, trying
    candidates in a deterministic order (codomain leaves first, preferred
    targets before that) and returning the first assignment whose completed
    net is correct.  The switching problem is built once; candidates only
    add glue edges."""
    from .net import SwitchingProblem, structural_report
    from . import dr

    if not sources:
        return net
    ok, why = structural_report(net, frozenset(sources))
    if not ok:
        raise NetError(f"no unit-wire assignment can repair: {why}")
    base = [p for p in net.positive_ports()]
    base.sort(key=lambda p: ({"cod": 0, "dom": 1, "cdom": 2, "ccod": 3}[p.loc], p.cell or "", p.index))
    candidate_lists = []
    for src in sources:
        extra = (preferred or {}).get(src, [])
        candidate_lists.append(list(dict.fromkeys(extra + base)))
    problem = SwitchingProblem(net)
    for combo in itertools.product(*candidate_lists):
        extra_edges = [(problem.port_vertex[s], problem.port_vertex[t])
                       for s, t in zip(sources, combo)]
        status, _, _ = dr.run_switchings(
            problem.n_vertices, problem.fixed + extra_edges, problem.groups)
        if status == dr.OK:
            return net.replace(wires=list(net.wires) + list(zip(sources, combo)))
    raise NetError("no unit-wire assignment yields a correct net")


def sym(theory: Theory, a: Formula, b: Formula) -> Net:
    na, nb = leaf_count(a), leaf_count(b)
    pairs = [(i, nb + i) for i in range(na)] + [(na + j, j) for j in range(nb)]
    return _pairing_net(theory, Tensor(a, b), Tensor(b, a), pairs)


def assoc(theory: Theory, a: Formula, b: Formula, c: Formula) -> Net:
    """(a*b)*c -> a*(b*c); leaf order is unchanged, so this is leafwise."""
    dom = Tensor(Tensor(a, b), c)
    cod = Tensor(a, Tensor(b, c))
    n = leaf_count(dom)
    return _pairing_net(theory, dom, cod, [(i, i) for i in range(n)])


def assoc_inv(theory: Theory, a: Formula, b: Formula, c: Formula) -> Net:
    dom = Tensor(a, Tensor(b, c))
    cod = Tensor(Tensor(a, b), c)
    n = leaf_count(dom)
    return _pairing_net(theory, dom, cod, [(i, i) for i in range(n)])


def runit(theory: Theory, a: Formula) -> Net:
    """a*I -> a; the orphan unit wire targets the first positive leaf of a."""
    na = leaf_count(a)
    return _pairing_net(theory, Tensor(a, UNIT), a, [(i, i) for i in range(na)], unit_sources=[na])


def runit_inv(theory: Theory, a: Formula) -> Net:
    na = leaf_count(a)
    return _pairing_net(theory, a, Tensor(a, UNIT), [(i, i) for i in range(na)])


def lunit(theory: Theory, a: Formula) -> Net:
    na = leaf_count(a)
    return _pairing_net(theory, Tensor(UNIT, a), a, [(1 + i, i) for i in range(na)], unit_sources=[0])


def lunit_inv(theory: Theory, a: Formula) -> Net:
    na = leaf_count(a)
    return _pairing_net(theory, a, Tensor(UNIT, a), [(i, 1 + i) for i in range(na)])


def structural(theory: Theory, kind: str, *formulas: Formula) -> Net:
    builders = {
        "sym": sym, "assoc": assoc, "assoc_inv": assoc_inv,
        "lunit": lunit, "lunit_inv": lunit_inv, "runit": runit, "runit_inv": runit_inv,
    }
    if kind not in builders:
        raise NetError(f"unknown structural morphism {kind!r}")
    return builders[kind](theory, *formulas)


# -- operations as nets ---------------------------------------------------------


def embed_operation(theory: Theory, op: str) -> Net:
    """The one-cell net A -> B for an operation c : A -> B, each boundary
    port wired straight to the matching cell port."""
    a, b = theory.signature.op(op)
    cid = "c0"
    wires = []
    for i in range(leaf_count(a)):
        if polarity(a, i) is Polarity.POSITIVE:
            wires.append((dom_port(i), cell_dom_port(cid, i)))
        else:
            wires.append((cell_dom_port(cid, i), dom_port(i)))
    for j in range(leaf_count(b)):
        if polarity(b, j) is Polarity.POSITIVE:
            wires.append((cell_cod_port(cid, j), cod_port(j)))
        else:
            wires.append((cod_port(j), cell_cod_port(cid, j)))
    return Net(theory, a, b, [(cid, op)], wires)


def _name_wires(cell: str, a: Formula, b: Formula, cod_offset: int):
    """Wires between a cell c : A -> B and the leaves of an (A -o B) factor
    starting at `cod_offset` in the codomain."""
    wires = []
    na = leaf_count(a)
    for i in range(na):
        if polarity(a, i) is Polarity.POSITIVE:
            wires.append((cod_port(cod_offset + i), cell_dom_port(cell, i)))
        else:
            wires.append((cell_dom_port(cell, i), cod_port(cod_offset + i)))
    for j in range(leaf_count(b)):
        if polarity(b, j) is Polarity.POSITIVE:
            wires.append((cell_cod_port(cell, j), cod_port(cod_offset + na + j)))
        else:
            wires.append((cod_port(cod_offset + na + j), cell_cod_port(cell, j)))
    return wires


def operation_name(theory: Theory, op: str) -> Net:
    """The name of an operation: the one-cell net I -> (A -o B)."""
    a, b = theory.signature.op(op)
    cid = "c0"
    net = Net(theory, UNIT, Lollipop(a, b), [(cid, op)], _name_wires(cid, a, b, 0))
    return attach_units(net, [dom_port(0)])


def curry(f: Net) -> Net:
    """A*B -> C  becomes  A -> (B -o C); ports keep their global polarity so
    wires transfer under reindexing alone."""
    if not isinstance(f.dom, Tensor):
        raise NetError("curry: domain is not a tensor")
    a, b = f.dom.left, f.dom.right
    na, nb = leaf_count(a), leaf_count(b)

    def remap(ref: PortRef) -> PortRef:
        if ref.loc == "dom":
            return dom_port(ref.index) if ref.index < na else cod_port(ref.index - na)
        if ref.loc == "cod":
            return cod_port(nb + ref.index)
        return ref

    return Net(f.theory, a, Lollipop(b, f.cod), f.cells,
               [(remap(s), remap(t)) for s, t in f.wires])


def uncurry(f: Net) -> Net:
    """A -> (B -o C)  becomes  A*B -> C; inverse to curry on the nose."""
    if not isinstance(f.cod, Lollipop):
        raise NetError("uncurry: codomain is not a linear implication")
    b, c = f.cod.left, f.cod.right
    na, nb = leaf_count(f.dom), leaf_count(b)

    def remap(ref: PortRef) -> PortRef:
        if ref.loc == "dom":
            return dom_port(ref.index)
        if ref.loc == "cod":
            return dom_port(na + ref.index) if ref.index < nb else cod_port(ref.index - nb)
        return ref

    return Net(f.theory, Tensor(f.dom, b), c, f.cells,
               [(remap(s), remap(t)) for s, t in f.wires])


# -- modular decomposition -------------------------------------------------------


def decompose(f: Net, c1: set[str] | frozenset[str]) -> tuple[Net, Net]:
    """Split f : A -> B as f2 o f1 where f1 holds exactly the cells in `c1`
    (pulled out as their names, in cell-id order) and f2 the rest, through
    the middle formula (A1 -o B1) * ... * (Ak -o Bk) * A."""
    c1 = set(c1)
    unknown = c1 - {cid for cid, _ in f.cells}
    if unknown:
        raise NetError(f"decompose: not cells of the net: {sorted(unknown)}")
    pulled = [(cid, op) for cid, op in f.cells if cid in c1]
    kept = [(cid, op) for cid, op in f.cells if cid not in c1]
    types = {cid: f.theory.signature.op(op) for cid, op in f.cells}

    factors = [Lollipop(*types[cid]) for cid, _ in pulled]
    middle = tensor_all(factors + [f.dom])
    offsets = {}
    off = 0
    for cid, _ in pulled:
        offsets[cid] = off
        off += leaf_count(factors[len(offsets) - 1])
    dom_offset = off

    # f1 = (name of c for c in c1) tensor identity(A), built directly
    wires1 = []
    for i in range(leaf_count(f.dom)):
        if polarity(f.dom, i) is Polarity.POSITIVE:
            wires1.append((dom_port(i), cod_port(dom_offset + i)))
        else:
            wires1.append((cod_port(dom_offset + i), dom_port(i)))
    for cid, _ in pulled:
        a, b = types[cid]
        wires1.extend(_name_wires(cid, a, b, offsets[cid]))
    f1 = Net(f.theory, f.dom, middle, pulled, wires1)

    # f2 = f with the pulled cells' ports re-rooted at the middle boundary
    def remap(ref: PortRef) -> PortRef:
        if ref.loc == "dom":
            return dom_port(dom_offset + ref.index)
        if ref.cell in c1:
            a, _ = types[ref.cell]
            if ref.loc == "cdom":
                return dom_port(offsets[ref.cell] + ref.index)
            return dom_port(offsets[ref.cell] + leaf_count(a) + ref.index)
        return ref

    f2 = Net(f.theory, middle, f.cod, kept, [(remap(s), remap(t)) for s, t in f.wires])
    return f1, f2
