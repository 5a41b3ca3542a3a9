"""Abstract binding bigraphs: signatures with binding/free arities,
interfaces with localised names, place forests and link maps, the binding
and scope rules, composition by plugging, and lean-support equivalence.

Place identifiers are ("site", k), ("node", id) and ("root", k); link points
are ports ("port", node, i) with indices below the binding arity binding,
and inner names ("name", x); link targets are ("edge", e) or outer names
("name", y)."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .formula import Sort


class BigraphError(ValueError):
    pass


@dataclass(frozen=True)
class BigSignature:
    controls: tuple[tuple[str, int, int], ...]  # (name, binding arity, free arity)
    atomic: frozenset[str] = frozenset()

    def __post_init__(self):
        seen = set()
        for name, b, f in self.controls:
            if name in seen:
                raise BigraphError(f"duplicate control {name!r}")
            seen.add(name)
            if b < 0 or f < 0:
                raise BigraphError(f"control {name!r} has negative arity")
            if name in self.atomic and b != 0:
                raise BigraphError(f"atomic control {name!r} must have binding arity 0")
        for name in self.atomic:
            if name not in seen:
                raise BigraphError(f"atomic declaration for unknown control {name!r}")

    def arity(self, control: str) -> tuple[int, int]:
        for name, b, f in self.controls:
            if name == control:
                return b, f
        raise BigraphError(f"unknown control {control!r}")

    def is_atomic(self, control: str) -> bool:
        return control in self.atomic


def make_bigsignature(controls: dict[str, tuple[int, int]], atomic: set[str] = frozenset()) -> BigSignature:
    return BigSignature(tuple((n, b, f) for n, (b, f) in controls.items()), frozenset(atomic))


@dataclass(frozen=True)
class Interface:
    width: int
    names: tuple[str, ...]                 # kept sorted (the name universe is ordered)
    locality: tuple[tuple[str, int | None], ...]  # name -> region index, None = global

    def __post_init__(self):
        if list(self.names) != sorted(set(self.names)):
            raise BigraphError("interface names must be distinct and sorted")
        loc = dict(self.locality)
        if set(loc) != set(self.names):
            raise BigraphError("locality must be total on the interface names")
        for x, i in loc.items():
            if i is not None and not 0 <= i < self.width:
                raise BigraphError(f"name {x!r} located at a region out of range")

    @property
    def loc(self) -> dict[str, int | None]:
        return dict(self.locality)

    def located_at(self, i: int) -> list[str]:
        return [x for x in self.names if dict(self.locality)[x] == i]

    def global_names(self) -> list[str]:
        loc = dict(self.locality)
        return [x for x in self.names if loc[x] is None]


def make_interface(width: int, locality: dict[str, int | None] | None = None) -> Interface:
    locality = locality or {}
    names = tuple(sorted(locality))
    return Interface(width, names, tuple((x, locality[x]) for x in names))


EMPTY = make_interface(0)
GROUND_COD = make_interface(1)


@dataclass(frozen=True)
class Bigraph:
    sig: BigSignature
    dom: Interface
    cod: Interface
    nodes: tuple[tuple[str, str], ...]           # (node id, control)
    parent: tuple[tuple[tuple, tuple], ...]      # place child -> place parent
    edges: frozenset[str]
    link: tuple[tuple[tuple, tuple], ...]        # point -> target

    @property
    def node_map(self) -> dict[str, str]:
        return dict(self.nodes)

    @property
    def parent_map(self) -> dict[tuple, tuple]:
        return dict(self.parent)

    @property
    def link_map(self) -> dict[tuple, tuple]:
        return dict(self.link)

    def ports(self) -> list[tuple]:
        out = []
        for nid, control in self.nodes:
            b, f = self.sig.arity(control)
            out += [("port", nid, i) for i in range(b + f)]
        return out

    def binding_ports(self) -> list[tuple]:
        out = []
        for nid, control in self.nodes:
            b, _ = self.sig.arity(control)
            out += [("port", nid, i) for i in range(b)]
        return out

    def points(self) -> list[tuple]:
        return self.ports() + [("name", x) for x in self.dom.names]

    def peers(self, edge: str) -> list[tuple]:
        return [p for p, t in self.link if t == ("edge", edge)]

    def children(self, place: tuple) -> list[tuple]:
        return sorted(c for c, p in self.parent if p == place)

    def node_ancestors(self, place: tuple) -> list[tuple]:
        pm = self.parent_map
        out = []
        cur = place
        while cur in pm:
            cur = pm[cur]
            out.append(cur)
        return out


def make_bigraph(sig, dom, cod, nodes, parent, edges, link) -> Bigraph:
    return Bigraph(
        sig, dom, cod,
        tuple(sorted(dict(nodes).items())),
        tuple(sorted(dict(parent).items())),
        frozenset(edges),
        tuple(sorted(dict(link).items())),
    )


def check_bigraph(b: Bigraph, require_lean: bool = True) -> None:
    """All structural invariants; raises BigraphError naming the offender.
    Leanness violations are reported separately (auto-repairable)."""
    node_map = b.node_map
    parent = b.parent_map
    places = {("site", k) for k in range(b.dom.width)} | {("node", n) for n in node_map}
    roots = {("root", k) for k in range(b.cod.width)}
    if set(parent) != places:
        raise BigraphError("parent map must be total on sites and nodes")
    for child, p in b.parent:
        if p not in places | roots:
            raise BigraphError(f"parent of {child} is not a node or root")
        if p[0] == "site":
            raise BigraphError(f"a site cannot be a parent: {p}")
    # forest: walking up must terminate at a root
    for start in places:
        seen = {start}
        cur = start
        while cur in parent:
            cur = parent[cur]
            if cur in seen:
                raise BigraphError(f"place cycle through {start}")
            seen.add(cur)
        if cur not in roots:
            raise BigraphError(f"place chain from {start} does not reach a root")
    for child, p in b.parent:
        if p[0] == "node" and b.sig.is_atomic(node_map[p[1]]):
            raise BigraphError(f"atomic node {p[1]} has a child")
    link = b.link_map
    points = set(b.points())
    if set(link) != points:
        raise BigraphError("link map must be total on ports and inner names")
    targets = {("edge", e) for e in b.edges} | {("name", y) for y in b.cod.names}
    for point, target in b.link:
        if target not in targets:
            raise BigraphError(f"link target of {point} is not an edge or outer name")
    # binding rule: binding ports go to edges
    binding = set(b.binding_ports())
    for p in binding:
        if link[p][0] != "edge":
            raise BigraphError(f"binding rule: port {p} is linked to a name")
    # one binder per edge, and the scope rule for its peers
    for e in sorted(b.edges):
        binders = [p for p in b.peers(e) if p in binding]
        if len(binders) > 1:
            raise BigraphError(f"edge {e} has {len(binders)} binding ports")
        if binders:
            binder_node = ("node", binders[0][1])
            for peer in b.peers(e):
                if peer == binders[0]:
                    continue
                if peer[0] == "port":
                    below = ("node", peer[1])
                    if binder_node not in b.node_ancestors(below):
                        raise BigraphError(
                            f"scope rule: peer {peer} of edge {e} is not strictly below its binder")
                else:
                    x = peer[1]
                    loc = b.dom.loc[x]
                    if loc is None:
                        raise BigraphError(
                            f"scope rule: inner name {x} on bound edge {e} is global")
                    site = ("site", loc)
                    if binder_node not in b.node_ancestors(site):
                        raise BigraphError(
                            f"scope rule: inner name {x} of edge {e} is not located below its binder")
    if require_lean:
        used = {t[1] for t in link.values() if t[0] == "edge"}
        idle = set(b.edges) - used
        if idle:
            raise BigraphError(f"idle edges (not lean): {sorted(idle)}")


def is_valid(b: Bigraph, require_lean: bool = True) -> bool:
    try:
        check_bigraph(b, require_lean)
        return True
    except BigraphError:
        return False


def lean_normalize(b: Bigraph) -> Bigraph:
    """Delete idle edges."""
    used = {t[1] for _, t in b.link if t[0] == "edge"}
    return Bigraph(b.sig, b.dom, b.cod, b.nodes, b.parent,
                   frozenset(e for e in b.edges if e in used), b.link)


def identity_bigraph(sig: BigSignature, u: Interface) -> Bigraph:
    parent = {("site", k): ("root", k) for k in range(u.width)}
    link = {("name", x): ("name", x) for x in u.names}
    return make_bigraph(sig, u, u, {}, parent, frozenset(), link)


def compose_bigraphs(g: Bigraph, f: Bigraph) -> Bigraph:
    """g after f: root i of f is grafted into site i of g; names of the
    shared interface connect the link maps; the result is lean."""
    if f.cod != g.dom:
        raise BigraphError("compose: interface mismatch")
    if f.sig != g.sig:
        raise BigraphError("compose: signature mismatch")
    fn = {nid: f"f{i}" for i, (nid, _) in enumerate(f.nodes)}
    gn = {nid: f"g{i}" for i, (nid, _) in enumerate(g.nodes)}
    fe = {e: f"ef{i}" for i, e in enumerate(sorted(f.edges))}
    ge = {e: f"eg{i}" for i, e in enumerate(sorted(g.edges))}

    def f_place(p):
        if p[0] == "node":
            return ("node", fn[p[1]])
        return p  # sites of f stay; roots handled below

    def g_place(p):
        if p[0] == "node":
            return ("node", gn[p[1]])
        return p

    nodes = {fn[n]: c for n, c in f.nodes}
    nodes.update({gn[n]: c for n, c in g.nodes})
    parent = {}
    g_parent = g.parent_map
    for child, p in f.parent:
        if p[0] == "root":
            p = g_parent[("site", p[1])]
            parent[f_place(child)] = g_place(p)
        else:
            parent[f_place(child)] = f_place(p)
    for child, p in g.parent:
        if child[0] == "site":
            continue  # replaced by f's trees
        parent[g_place(child)] = g_place(p)

    g_link = g.link_map

    def g_target(t):
        if t[0] == "edge":
            return ("edge", ge[t[1]])
        return t

    def resolve_f_target(t):
        if t[0] == "edge":
            return ("edge", fe[t[1]])
        return g_target(g_link[("name", t[1])])

    link = {}
    for point, t in f.link:
        p = ("port", fn[point[1]], point[2]) if point[0] == "port" else point
        link[p] = resolve_f_target(t)
    for point, t in g.link:
        if point[0] == "name":
            continue  # consumed by the composition
        link[("port", gn[point[1]], point[2])] = g_target(t)

    edges = set(fe.values()) | set(ge.values())
    out = make_bigraph(f.sig, f.dom, g.cod, nodes, parent, edges, link)
    return lean_normalize(out)


# -- support equivalence ----------------------------------------------------------


def _bigraph_key(b: Bigraph):
    """Canonical serialisation modulo renaming of nodes and edges, by colour
    refinement with individualisation (interfaces are fixed pointwise)."""
    node_ids = [n for n, _ in b.nodes]
    edge_ids = sorted(b.edges)
    node_map = b.node_map
    parent = b.parent_map
    link = b.link_map

    def refine(pins):
        colors = {n: (node_map[n], pins.get(n)) for n in node_ids}
        rank = {v: i for i, v in enumerate(sorted(set(colors.values()), key=repr))}
        colors = {n: rank[colors[n]] for n in node_ids}
        while True:
            # edge colour: multiset of incident (point kind / port index / node colour)
            ecol = {}
            for e in edge_ids:
                members = []
                for p, t in b.link:
                    if t == ("edge", e):
                        if p[0] == "port":
                            members.append(("p", colors[p[1]], p[2]))
                        else:
                            members.append(("x", p[1]))
                ecol[e] = tuple(sorted(members))
            sigs = {}
            for n in node_ids:
                par = parent[("node", n)]
                pkey = ("root", par[1]) if par[0] == "root" else ("node", colors[par[1]])
                lks = []
                b_ar, f_ar = b.sig.arity(node_map[n])
                for i in range(b_ar + f_ar):
                    t = link[("port", n, i)]
                    lks.append((i, ("e", ecol[t[1]]) if t[0] == "edge" else t))
                kids = sorted(
                    ("site", c[1]) if c[0] == "site" else ("node", colors[c[1]])
                    for c in b.children(("node", n))
                )
                sigs[n] = (colors[n], pkey, tuple(lks), tuple(kids))
            rank = {v: i for i, v in enumerate(sorted(set(sigs.values()), key=repr))}
            new = {n: rank[sigs[n]] for n in node_ids}
            if new == colors:
                return colors
            colors = new

    best = [None]

    def serialize(order):
        idx = {n: i for i, n in enumerate(order)}
        edge_members = {}
        for e in edge_ids:
            members = []
            for p, t in b.link:
                if t == ("edge", e):
                    members.append(("p", idx[p[1]], p[2]) if p[0] == "port" else ("x", p[1]))
            edge_members[e] = tuple(sorted(members))
        edge_order = sorted(edge_ids, key=lambda e: edge_members[e])
        eidx = {e: i for i, e in enumerate(edge_order)}
        par = []
        for child, p in sorted(b.parent, key=lambda cp: _place_key(cp[0], idx)):
            par.append((_place_key(child, idx), _place_key(p, idx)))
        lnk = []
        for point, t in b.link:
            pk = ("p", idx[point[1]], point[2]) if point[0] == "port" else ("x", point[1])
            tk = ("e", eidx[t[1]]) if t[0] == "edge" else ("y", t[1])
            lnk.append((pk, tk))
        return (
            tuple(node_map[n] for n in order),
            tuple(sorted(par)),
            tuple(sorted(lnk)),
        )

    def _place_key(p, idx):
        if p[0] == "node":
            return ("node", idx[p[1]])
        return p

    def rec(pins):
        colors = refine(pins)
        by = {}
        for n in node_ids:
            by.setdefault(colors[n], []).append(n)
        classes = [sorted(by[c]) for c in sorted(by)]
        branch = next((cls for cls in classes if len(cls) > 1), None)
        if branch is None:
            order = [cls[0] for cls in classes]
            ser = serialize(order)
            if best[0] is None or ser < best[0]:
                best[0] = ser
            return
        for n in branch:
            rec({**pins, n: ("pin", len(pins))})

    if not node_ids:
        return (b.dom, b.cod, serialize([]))
    rec({})
    return (b.dom, b.cod, best[0])


def support_iso(f: Bigraph, g: Bigraph) -> bool:
    """A control/place/link-preserving bijection of nodes and edges fixing
    both interfaces."""
    if f.sig != g.sig or f.dom != g.dom or f.cod != g.cod:
        return False
    if sorted(c for _, c in f.nodes) != sorted(c for _, c in g.nodes):
        return False
    if len(f.edges) != len(g.edges):
        return False
    return _bigraph_key(f) == _bigraph_key(g)


def bigraph_key(b: Bigraph):
    return _bigraph_key(b)


# -- enumeration -------------------------------------------------------------------


def _placements(sig: BigSignature, controls: list[str], n_sites: int, n_roots: int):
    """All parent maps: each node/site picks a parent among the non-atomic
    nodes or the roots; cyclic assignments are dropped (support equivalence
    deduplicates relabelings downstream)."""
    ids = [f"n{i}" for i in range(len(controls))]
    slots = [("node", i) for i in range(len(controls))] + [("site", k) for k in range(n_sites)]
    hosts = [("root", r) for r in range(n_roots)] + \
            [("node", ids[j]) for j in range(len(controls)) if not sig.is_atomic(controls[j])]

    def candidates(i_slot):
        kind, i = slots[i_slot]
        if kind == "node":
            return [h for h in hosts if h != ("node", ids[i])]
        return hosts

    for combo in itertools.product(*[candidates(s) for s in range(len(slots))]):
        parent = {}
        for (kind, i), p in zip(slots, combo):
            child = ("node", ids[i]) if kind == "node" else ("site", i)
            parent[child] = p
        # forest check: every chain must reach a root
        ok = True
        for child in parent:
            seen = {child}
            cur = child
            while cur in parent:
                cur = parent[cur]
                if cur in seen:
                    ok = False
                    break
                seen.add(cur)
            if not ok:
                break
        if ok:
            yield dict(zip(ids, controls)), parent


def enumerate_bigraphs(sig: BigSignature, dom: Interface, cod: Interface,
                       max_nodes: int) -> list[Bigraph]:
    """All valid lean bigraphs dom -> cod with at most `max_nodes` nodes,
    modulo support equivalence; deterministic order."""
    if max_nodes > 4:
        raise BigraphError("enumerate_bigraphs: node budget above the desk-scale bound")
    control_names = sorted(name for name, _, _ in sig.controls)
    seen = set()
    out = []
    for n in range(max_nodes + 1):
        for controls in itertools.combinations_with_replacement(control_names, n):
            for node_map, parent in _placements(sig, list(controls), dom.width, cod.width):
                nodes = dict(node_map)
                points = []
                for nid, c in sorted(nodes.items()):
                    b_ar, f_ar = sig.arity(c)
                    points += [("port", nid, i) for i in range(b_ar + f_ar)]
                points += [("name", x) for x in dom.names]
                binding = set()
                for nid, c in nodes.items():
                    b_ar, _ = sig.arity(c)
                    binding |= {("port", nid, i) for i in range(b_ar)}
                # each point goes to an outer name or joins an edge; edges are
                # represented by their lowest member's index (canonical blocks)
                for assignment in _link_assignments(points, binding, cod.names):
                    link = {}
                    edges = set()
                    for point, tgt in assignment.items():
                        if tgt[0] == "name":
                            link[point] = tgt
                        else:
                            e = f"e{tgt[1]}"
                            edges.add(e)
                            link[point] = ("edge", e)
                    b = make_bigraph(sig, dom, cod, nodes, parent, edges, link)
                    if not is_valid(b):
                        continue
                    key = _bigraph_key(b)
                    if key not in seen:
                        seen.add(key)
                        out.append(b)
    out.sort(key=_bigraph_key)
    return out


def _link_assignments(points, binding, outer_names):
    """Assign each point an outer name or an edge; edges are blocks of a set
    partition, canonically labelled by their least member index."""
    points = list(points)

    def rec(i, assignment, blocks):
        if i == len(points):
            yield dict(assignment)
            return
        p = points[i]
        if p not in binding:
            for y in outer_names:
                assignment[p] = ("name", y)
                yield from rec(i + 1, assignment, blocks)
                del assignment[p]
        for bi in range(len(blocks)):
            assignment[p] = ("block", blocks[bi])
            yield from rec(i + 1, assignment, blocks)
            del assignment[p]
        assignment[p] = ("block", i)
        blocks.append(i)
        yield from rec(i + 1, assignment, blocks)
        blocks.pop()
        del assignment[p]

    yield from rec(0, {}, [])


def enumerate_ground_bigraphs(sig: BigSignature, max_nodes: int) -> list[Bigraph]:
    """All lean ground bigraphs (no sites, no names, one root) with at most
    `max_nodes` nodes, modulo support equivalence."""
    return enumerate_bigraphs(sig, EMPTY, GROUND_COD, max_nodes)


# -- random generation (for property tests) -----------------------------------------


def random_bigraph(sig: BigSignature, dom: Interface, cod: Interface,
                   rng: random.Random, max_nodes: int = 4) -> Bigraph:
    """A random valid lean bigraph dom -> cod built constructively: random
    forest, then links whose bound edges respect the scope rule."""
    control_names = sorted(name for name, _, _ in sig.controls)
    n = rng.randint(0, max_nodes)
    nodes = {}
    parent = {}
    placed = []  # non-atomic node ids in placement order
    for i in range(n):
        c = rng.choice(control_names)
        nid = f"n{i}"
        nodes[nid] = c
        options = [("root", k) for k in range(cod.width)] + [("node", p) for p in placed]
        if not options:
            break
        parent[("node", nid)] = rng.choice(options)
        if not sig.is_atomic(c):
            placed.append(nid)
    nodes = {nid: c for nid, c in nodes.items() if ("node", nid) in parent}
    sites_options = [("root", k) for k in range(cod.width)] + [("node", p) for p in placed]
    for k in range(dom.width):
        parent[("site", k)] = rng.choice(sites_options)

    b0 = Bigraph(sig, dom, cod, tuple(sorted(nodes.items())), tuple(sorted(parent.items())),
                 frozenset(), ())

    link = {}
    edges = {}
    edge_n = [0]

    def new_edge():
        e = f"e{edge_n[0]}"
        edge_n[0] += 1
        edges[e] = True
        return e

    # binders first: each binding port gets a fresh edge
    bound_edge_of = {}
    for nid, c in sorted(nodes.items()):
        b_ar, f_ar = sig.arity(c)
        for i in range(b_ar):
            e = new_edge()
            link[("port", nid, i)] = ("edge", e)
            bound_edge_of[e] = nid

    def strictly_below(place, node):
        return ("node", node) in b0.node_ancestors(place)

    free_edges = []
    free_points = [("port", nid, i)
                   for nid, c in sorted(nodes.items())
                   for i in range(sig.arity(c)[0], sum(sig.arity(c)))]
    free_points += [("name", x) for x in dom.names]
    for point in free_points:
        place = ("node", point[1]) if point[0] == "port" else None
        if point[0] == "name":
            loc = dom.loc[point[1]]
            place = ("site", loc) if loc is not None else None
        # candidate targets: outer names, scoped bound edges, free edges, fresh
        cands = [("name", y) for y in cod.names]
        for e, binder in bound_edge_of.items():
            if place is not None and strictly_below(place, binder):
                cands.append(("edge", e))
        cands += [("edge", e) for e in free_edges]
        cands.append(("fresh", None))
        choice = rng.choice(cands)
        if choice[0] == "fresh":
            e = new_edge()
            free_edges.append(e)
            link[point] = ("edge", e)
        else:
            link[point] = choice
    out = make_bigraph(sig, dom, cod, nodes, parent, set(edges), link)
    return lean_normalize(out)


# -- DOT export ----------------------------------------------------------------------


def bigraph_to_dot(b: Bigraph) -> str:
    lines = ["digraph bigraph {", "  compound=true;"]

    def place_id(p):
        return f'"{p[0]}_{p[1]}"'

    def emit(place, indent):
        pad = "  " * indent
        if place[0] == "node":
            control = b.node_map[place[1]]
            lines.append(f"{pad}subgraph cluster_{place[1]} {{")
            lines.append(f'{pad}  label="{place[1]}:{control}";')
            lines.append(f"{pad}  {place_id(place)} [shape=point];")
            for child in b.children(place):
                emit(child, indent + 1)
            lines.append(f"{pad}}}")
        else:
            label = f"{place[0]} {place[1]}"
            lines.append(f'{pad}{place_id(place)} [shape=box,label="{label}"];')

    for k in range(b.cod.width):
        root = ("root", k)
        lines.append(f"  subgraph cluster_root{k} {{")
        lines.append(f'    label="root {k}";')
        lines.append(f"    {place_id(root)} [shape=point,style=invis];")
        for child in b.children(root):
            emit(child, 2)
        lines.append("  }")
    for e in sorted(b.edges):
        lines.append(f'  "edge_{e}" [shape=diamond,label="{e}"];')
    for y in b.cod.names:
        lines.append(f'  "outer_{y}" [shape=plaintext,label="{y}"];')
    for point, t in b.link:
        src = (f'"port_{point[1]}_{point[2]}"' if point[0] == "port"
               else f'"inner_{point[1]}"')
        if point[0] == "port":
            lines.append(f'  {src} [shape=circle,label="{point[2]}"];')
            lines.append(f"  {place_id(('node', point[1]))} -> {src} [style=dotted,arrowhead=none];")
        else:
            lines.append(f'  {src} [shape=plaintext,label="{point[1]}"];')
        tgt = f'"edge_{t[1]}"' if t[0] == "edge" else f'"outer_{t[1]}"'
        lines.append(f"  {src} -> {tgt} [arrowhead=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"
