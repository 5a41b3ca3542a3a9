"""The interpretation of bigraphs as nets: bigraphical signatures become
theories over sorts {t, v} (processes and names), interfaces become formulae
(globals as a linear-implication prefix, one name-scoped t factor per
region), and a bigraph becomes a collapsed net: one cell per node, the place
forest as t-wires into parent argument ports, and one fan-out per name
source (an outer name, a binding port, or a restriction cell per free edge).

Desk-scale checks: faithfulness (distinct bigraphs translate to inequivalent
nets, plus a stored correct net with no preimage) and the closed-term
bijection against the ground-bigraph enumeration."""

from __future__ import annotations

from dataclasses import dataclass, field

from .bigraph import (
    BigSignature,
    Bigraph,
    BigraphError,
    Interface,
    bigraph_key,
    enumerate_bigraphs,
    enumerate_ground_bigraphs,
    make_bigsignature,
    make_interface,
)
from .calculi import enumerate_nets
from .equivalence import collapsed_equal, collapsed_key, unit_sources
from .formula import Atom, Formula, Lollipop, Sort, Tensor, UNIT, leaf_count, tensor_all
from .net import Net, NetError, PortRef, cell_cod_port, cell_dom_port, cod_port, dom_port, is_correct
from .signature import Theory, make_signature
from .smc import attach_units

_T = Atom(Sort("t"))
_V = Atom(Sort("v"))

STRUCTURAL_OPS = ("par", "nil", "c", "w", "nu")


def control_dom(nb: int, mf: int, atomic: bool) -> Formula:
    """Domain formula of a translated control: free names first, then the
    name-scoped continuation (dropped entirely for atomic controls)."""
    v, t = _V, _T
    if atomic:
        return tensor_all([v] * mf)
    scope = Lollipop(tensor_all([v] * nb), t) if nb else t
    return tensor_all([v] * mf + [scope])


def translate_signature(sig: BigSignature) -> Theory:
    """Two sorts t (processes, a commutative monoid) and v (names, a
    commutative comonoid with a restriction); one operation per control."""
    ops: dict[str, tuple[Formula, Formula]] = {}
    for name, nb, mf in sig.controls:
        if name in STRUCTURAL_OPS:
            raise BigraphError(f"control name {name!r} clashes with a structural operation")
        ops[name] = (control_dom(nb, mf, sig.is_atomic(name)), _T)
    ops["par"] = (Tensor(_T, _T), _T)
    ops["nil"] = (UNIT, _T)
    ops["c"] = (_V, Tensor(_V, _V))
    ops["w"] = (_V, UNIT)
    ops["nu"] = (UNIT, _V)
    return Theory(
        signature=make_signature({"t", "v"}, ops),
        monoid_sorts=((_T.sort, "par", "nil"),),
        comonoid_sorts=((_V.sort, "c", "w"),),
        nu_ops=(("nu", "w"),),
        name="bigraph",
    )


@dataclass(frozen=True)
class InterfaceLeaves:
    formula: Formula
    global_leaf: tuple[tuple[str, int], ...]            # global name -> v leaf
    located_leaf: tuple[tuple[tuple[int, str], int], ...]  # (region, name) -> v leaf
    region_t_leaf: tuple[tuple[int, int], ...]          # region -> t leaf

    @property
    def globals(self):
        return dict(self.global_leaf)

    @property
    def located(self):
        return dict(self.located_leaf)

    @property
    def region_t(self):
        return dict(self.region_t_leaf)


def translate_interface(u: Interface) -> InterfaceLeaves:
    """Globals (in name order) become a v^k prefix; each region becomes a
    v^(its located names) -o t factor, unit-normalised."""
    loc = u.loc
    globals_ = [x for x in u.names if loc[x] is None]
    factors = []
    located_order: list[tuple[int, str]] = []
    for i in range(u.width):
        local = [x for x in u.names if loc[x] == i]
        located_order.extend((i, x) for x in local)
        factors.append(Lollipop(tensor_all([_V] * len(local)), _T) if local else _T)
    body = tensor_all(factors, UNIT)
    formula = Lollipop(tensor_all([_V] * len(globals_)), body) if globals_ else body

    global_leaf = {x: i for i, x in enumerate(globals_)}
    off = len(globals_)
    located_leaf = {}
    region_t_leaf = {}
    for i in range(u.width):
        local = [x for x in u.names if loc[x] == i]
        for j, x in enumerate(local):
            located_leaf[(i, x)] = off + j
        region_t_leaf[i] = off + len(local)
        off += len(local) + 1
    return InterfaceLeaves(
        formula,
        tuple(sorted(global_leaf.items())),
        tuple(sorted(located_leaf.items())),
        tuple(sorted(region_t_leaf.items())),
    )


def translate_object(u: Interface) -> Formula:
    return translate_interface(u).formula


@dataclass(frozen=True)
class TranslationContext:
    bigsig: BigSignature
    theory: Theory

    @staticmethod
    def of(sig: BigSignature) -> "TranslationContext":
        return TranslationContext(sig, translate_signature(sig))


def translate_bigraph(b: Bigraph, ctx: TranslationContext | None = None) -> Net:
    """One cell per node; parent structure as fan-in t-wires; one fan-out per
    name source: outer names from the codomain leaves, bound edges from their
    binding port, free edges from a fresh restriction cell.  Sources with no
    uses are consumed by explicit counit cells."""
    ctx = ctx or TranslationContext.of(b.sig)
    theory = ctx.theory
    dom_il = translate_interface(b.dom)
    cod_il = translate_interface(b.cod)
    dom_loc = b.dom.loc

    cells: list[tuple[str, str]] = []
    wires: list[tuple[PortRef, PortRef]] = []
    preferred: dict[PortRef, list[PortRef]] = {}
    node_map = b.node_map

    for nid in sorted(node_map):
        cells.append((nid, node_map[nid]))

    def node_t_arg(nid: str) -> PortRef:
        control = node_map[nid]
        nb, mf = b.sig.arity(control)
        if b.sig.is_atomic(control):
            raise BigraphError(f"atomic node {nid} cannot host children")
        return cell_dom_port(nid, mf + nb)

    def port_target(port: tuple) -> PortRef:
        # free port (n, i) with i >= binding arity -> free leaf i - nb
        _, nid, i = port
        nb, _ = b.sig.arity(node_map[nid])
        if i < nb:
            raise BigraphError("binding ports receive no wires")
        return cell_dom_port(nid, i - nb)

    # place structure: each child hands its process to its parent
    for child, parent in b.parent:
        if parent[0] == "root":
            target = cod_port(cod_il.region_t[parent[1]])
        else:
            target = node_t_arg(parent[1])
        if child[0] == "node":
            wires.append((cell_cod_port(child[1], 0), target))
        else:
            wires.append((dom_port(dom_il.region_t[child[1]]), target))

    # name sources fan out to their peers
    link = b.link_map
    w_count = [0]

    def fan_out(source: PortRef, peers: list[tuple], scoped_hint: PortRef | None):
        targets = []
        for p in sorted(peers):
            if p[0] == "port":
                targets.append(port_target(p))
            else:
                x = p[1]
                loc = dom_loc[x]
                if loc is None:
                    targets.append(dom_port(dom_il.globals[x]))
                else:
                    targets.append(dom_port(dom_il.located[(loc, x)]))
        if not targets:
            wid = f"w{w_count[0]}"
            w_count[0] += 1
            cells.append((wid, "w"))
            targets = [cell_dom_port(wid, 0)]
            unit_out = cell_cod_port(wid, 0)
            if scoped_hint is not None:
                preferred[unit_out] = [scoped_hint]
        wires.extend((source, t) for t in targets)

    for y in b.cod.names:
        yloc = b.cod.loc[y]
        if yloc is None:
            source = cod_port(cod_il.globals[y])
        else:
            source = cod_port(cod_il.located[(yloc, y)])
        peers = [p for p, t in b.link if t == ("name", y)]
        fan_out(source, peers, None)

    binding = set(b.binding_ports())
    nu_count = [0]
    for e in sorted(b.edges):
        peers = b.peers(e)
        binders = [p for p in peers if p in binding]
        if binders:
            _, nid, i = binders[0]
            nb, mf = b.sig.arity(node_map[nid])
            source = cell_dom_port(nid, mf + i)
            rest = [p for p in peers if p != binders[0]]
            hint = None if b.sig.is_atomic(node_map[nid]) else node_t_arg(nid)
            fan_out(source, rest, hint)
        else:
            nuid = f"nu{nu_count[0]}"
            nu_count[0] += 1
            cells.append((nuid, "nu"))
            fan_out(cell_cod_port(nuid, 0), peers, None)

    net = Net(theory, dom_il.formula, cod_il.formula, cells, wires)
    missing = [p for p in unit_sources(net) if not net.wires_from(p)]
    net = attach_units(net, missing, preferred)
    ok = is_correct(net)
    if not ok:
        raise NetError("internal: translated bigraph is not a correct net")
    return net


# -- desk-scale theorem checks -------------------------------------------------------


@dataclass
class FaithfulnessReport:
    pairs_checked: int
    collisions: list[tuple]
    witness_correct: bool
    witness_matched: bool

    @property
    def ok(self) -> bool:
        return not self.collisions and self.witness_correct and not self.witness_matched


def default_interface_pairs() -> list[tuple[Interface, Interface]]:
    return [
        (make_interface(0), make_interface(1)),
        (make_interface(1), make_interface(1)),
        (make_interface(1, {"x": 0}), make_interface(1)),
        (make_interface(1, {"x": None}), make_interface(1, {"a": None})),
        (make_interface(2, {"x": 0, "y": None}), make_interface(1)),
    ]


def non_fullness_witness(ctx: TranslationContext) -> tuple[Interface, Interface, Net]:
    """A correct net between translated interfaces whose global inner name is
    fed by a binding port; the scope rule forbids any bigraph preimage
    because a bound edge's inner-name peers must be located below the binder,
    never global.  Requires a control with binding arity >= 1 and free
    arity >= 1 (the receive-like control)."""
    g = next(name for name, nb, mf in ctx.bigsig.controls if nb >= 1 and mf >= 1)
    nb, mf = ctx.bigsig.arity(g)
    dom_i = make_interface(1, {"x": None, "y": 0})
    cod_i = make_interface(1)
    dom_il = translate_interface(dom_i)
    cod_il = translate_interface(cod_i)
    cells = [("g0", g)]
    wires = [
        (cell_dom_port("g0", mf + 0), dom_port(dom_il.globals["x"])),  # binder captures the global
        (dom_port(dom_il.region_t[0]), cell_dom_port("g0", mf + nb)),  # the site sits inside g
        (cell_cod_port("g0", 0), cod_port(cod_il.region_t[0])),
    ]
    nu_i = 0

    def fresh_nu():
        nonlocal nu_i
        nuid = f"nu{nu_i}"
        nu_i += 1
        cells.append((nuid, "nu"))
        return cell_cod_port(nuid, 0)

    for j in range(mf):  # free ports fed by restrictions
        wires.append((fresh_nu(), cell_dom_port("g0", j)))
    for i in range(1, nb):  # extra binders consumed by counits
        wid = f"wx{i}"
        cells.append((wid, "w"))
        wires.append((cell_dom_port("g0", mf + i), cell_dom_port(wid, 0)))
    wires.append((fresh_nu(), dom_port(dom_il.located[(0, "y")])))  # y's source is a free edge
    net = Net(ctx.theory, dom_il.formula, cod_il.formula, cells, wires)
    missing = [p for p in unit_sources(net) if not net.wires_from(p)]
    return dom_i, cod_i, attach_units(net, missing)


def check_faithfulness(sig: BigSignature, max_nodes: int = 2,
                       interface_pairs=None) -> FaithfulnessReport:
    """Pairwise: non-support-equivalent bigraphs over each interface pair
    must have inequivalent translations; plus the stored witness must be
    correct and outside the translation image on its own interface pair."""
    ctx = TranslationContext.of(sig)
    pairs = interface_pairs if interface_pairs is not None else default_interface_pairs()
    w_dom, w_cod, witness = non_fullness_witness(ctx)
    if (w_dom, w_cod) not in [(d, c) for d, c in pairs]:
        pairs = list(pairs) + [(w_dom, w_cod)]

    collisions = []
    pairs_checked = 0
    witness_matched = False
    witness_key = collapsed_key(witness)
    for dom_i, cod_i in pairs:
        bigraphs = enumerate_bigraphs(sig, dom_i, cod_i, max_nodes)
        keys = []
        for bg in bigraphs:
            net = translate_bigraph(bg, ctx)
            key = collapsed_key(net)
            keys.append(key)
            if (dom_i, cod_i) == (w_dom, w_cod) and key == witness_key:
                witness_matched = True
        for i in range(len(bigraphs)):
            for j in range(i + 1, len(bigraphs)):
                pairs_checked += 1
                if keys[i] == keys[j]:
                    collisions.append((dom_i, cod_i, bigraphs[i], bigraphs[j]))
    return FaithfulnessReport(
        pairs_checked=pairs_checked,
        collisions=collisions,
        witness_correct=is_correct(witness),
        witness_matched=witness_matched,
    )


@dataclass
class ClosedTermReport:
    counts: list[tuple[int, int, int]]  # (budget, bigraph count, net count)
    bijective: bool

    @property
    def ok(self) -> bool:
        return self.bijective and all(b == n for _, b, n in self.counts)


def closed_net_budget(sig: BigSignature, max_nodes: int) -> int:
    """Cells of a translated ground bigraph: one per node, one restriction
    per free edge (at most one per free port), one counit per peerless
    binder (at most one per binding port)."""
    per_node = max((nb + mf for _, nb, mf in sig.controls), default=0)
    return max_nodes + max_nodes * per_node


def check_closed_term_iso(sig: BigSignature, max_nodes: int = 2) -> ClosedTermReport:
    """|ground bigraphs| == |closed nets| at every node budget, and
    translate is a bijection between the enumerated sets."""
    ctx = TranslationContext.of(sig)
    theory = ctx.theory
    controls = frozenset(name for name, _, _ in sig.controls)
    counts = []
    bijective = True
    for n in range(max_nodes + 1):
        bigraphs = enumerate_ground_bigraphs(sig, n)
        budget = min(closed_net_budget(sig, n), 12)
        nets = enumerate_nets(theory, UNIT, _T, budget, logical_max=(controls, n))
        counts.append((n, len(bigraphs), len(nets)))
        net_keys = {collapsed_key(net) for net in nets}
        image_keys = set()
        for bg in bigraphs:
            key = collapsed_key(translate_bigraph(bg, ctx))
            if key in image_keys:
                bijective = False  # faithfulness failure
            image_keys.add(key)
        if image_keys != net_keys:
            bijective = False
    return ClosedTermReport(counts=counts, bijective=bijective)
