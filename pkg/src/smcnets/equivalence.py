"""The three quotients on correct nets: rewiring of unit-sourced wires, the
equation-generated congruence of a theory (bounded search only), and the
economised representation that absorbs declared commutative-monoid structure
into fan-in and nonempty comultiplication trees into fan-out."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .formula import Polarity
from .iso import canonical_key, canonical_net, nets_isomorphic, _serialize
from .net import Net, NetError, PortRef, cell_cod_port, cell_dom_port, is_correct
from .signature import Theory
from .smc import attach_units


def unit_sources(net: Net) -> list[PortRef]:
    return [p for p in net.negative_ports() if net.port_kind(p) is None]


def rewiring_moves(net: Net) -> set[Net]:
    """All correct nets obtained by retargeting exactly one unit-sourced
    wire to a different globally positive port."""
    from .net import SwitchingProblem, structural_report
    from . import dr

    out = set()
    positives = net.positive_ports()
    for src in unit_sources(net):
        for tgt in net.wires_from(src):
            rest = [w for w in net.wires if w != (src, tgt)]
            base = net.replace(wires=rest)
            ok, _ = structural_report(base, frozenset({src}))
            if not ok:
                continue
            problem = SwitchingProblem(base)
            sv = problem.port_vertex[src]
            for cand in positives:
                if cand == tgt:
                    continue
                status, _, _ = dr.run_switchings(
                    problem.n_vertices, problem.fixed + [(sv, problem.port_vertex[cand])],
                    problem.groups)
                if status == dr.OK:
                    out.add(base.replace(wires=rest + [(src, cand)]))
    return out


class _UnitSpace:
    """The rewiring state space of a net: unit-wire targets vary over the
    fixed skeleton (everything except unit-sourced wires).  States are target
    tuples checked by the kernel over one shared switching problem."""

    def __init__(self, net: Net):
        from .net import SwitchingProblem
        self.net = net
        self.sources = sorted(unit_sources(net))
        self.skeleton_wires = [(s, t) for s, t in net.wires if s not in set(self.sources)]
        self.skeleton = net.replace(wires=self.skeleton_wires)
        self.start = tuple(self._target_of(net, s) for s in self.sources)
        self.problem = SwitchingProblem(self.skeleton)
        self.positives = sorted(self.skeleton.positive_ports())
        self._src_vertex = [self.problem.port_vertex[s] for s in self.sources]

    @staticmethod
    def _target_of(net, src):
        tgts = net.wires_from(src)
        if len(tgts) != 1:
            raise NetError(f"unit port {src} must carry exactly one wire")
        return tgts[0]

    def ok(self, config) -> bool:
        from . import dr
        extra = [(v, self.problem.port_vertex[t]) for v, t in zip(self._src_vertex, config)]
        status, _, _ = dr.run_switchings(
            self.problem.n_vertices, self.problem.fixed + extra, self.problem.groups,
            max_switchings=None)
        return status == dr.OK

    def realise(self, config) -> Net:
        return self.net.replace(wires=self.skeleton_wires + list(zip(self.sources, config)))

    def component(self, max_states: int = 50000) -> set:
        seen = {self.start}
        frontier = [self.start]
        while frontier:
            nxt = []
            for state in frontier:
                for i in range(len(self.sources)):
                    for cand in self.positives:
                        if cand == state[i]:
                            continue
                        new = state[:i] + (cand,) + state[i + 1:]
                        if new in seen or not self.ok(new):
                            continue
                        if len(seen) >= max_states:
                            raise NetError("rewiring component exceeds the state budget")
                        seen.add(new)
                        nxt.append(new)
            frontier = nxt
        return seen

    def path_between(self, start, goal) -> bool:
        """Greedy morphing start -> goal one coordinate at a time, over all
        orders of the differing coordinates.  A False is inconclusive (a
        detour might exist); True is definite."""
        import itertools as _it
        diff = [i for i in range(len(start)) if start[i] != goal[i]]
        if not diff:
            return True
        if len(diff) > 6:
            return False
        for order in _it.permutations(diff):
            cur = list(start)
            for i in order:
                cur[i] = goal[i]
                if not self.ok(tuple(cur)):
                    break
            else:
                return True
        return False


def rewiring_equivalent(f: Net, g: Net, max_states: int = 50000) -> bool:
    """Reachability in the rewiring-move graph.  Decided on the shared
    canonical skeleton: a greedy coordinate path first, then exhaustive
    search of the (finite) component."""
    if f.dom != g.dom or f.cod != g.cod:
        raise NetError("rewiring_equivalent: boundary mismatch")
    for F, G in _aligned_presentations(f, g):
        space = _UnitSpace(F)
        goal = tuple(_UnitSpace._target_of(G, s) for s in space.sources)
        if space.start == goal or space.path_between(space.start, goal):
            return True
        if goal in space.component(max_states):
            return True
    return False


def _aligned_presentations(f: Net, g: Net):
    """Pairs (F, G) of canonical cell renamings of f and g with identical
    skeletons (no unit wires); rewiring can only relate such pairs."""
    from .iso import canonical_orders, rename_cells

    fu, gu = set(unit_sources(f)), set(unit_sources(g))
    if sorted(op for _, op in f.cells) != sorted(op for _, op in g.cells):
        return
    fs = f.replace(wires=[(s, t) for s, t in f.wires if s not in fu])
    gs = g.replace(wires=[(s, t) for s, t in g.wires if s not in gu])
    f_orders = canonical_orders(fs)
    g_orders = canonical_orders(gs)
    F0 = rename_cells(f, f_orders[0])
    F0_skel = frozenset((s, t) for s, t in F0.wires if s not in set(unit_sources(F0)))
    for og in g_orders:
        G = rename_cells(g, og)
        G_skel = frozenset((s, t) for s, t in G.wires if s not in set(unit_sources(G)))
        if G_skel == F0_skel:
            yield F0, G


def rewiring_canonical(net: Net, max_states: int = 50000) -> Net:
    """The least member (canonical serialisation order over the skeleton,
    then the unit-wire map) of the rewiring component, cells renamed
    canonically."""
    from .iso import _serialize, canonical_orders, rename_cells

    space = _UnitSpace(net)
    if not space.sources:
        return canonical_net(net)
    orders = canonical_orders(space.skeleton)
    states = space.component(max_states)
    best = None
    best_net = None
    for order in orders:
        for state in states:
            # states are expressed over `net`'s labels; apply the renaming
            candidate = rename_cells(space.realise(state), order)
            ser = _serialize(candidate, [f"c{i}" for i in range(len(order))])
            if best is None or ser < best:
                best, best_net = ser, candidate
    return best_net


# -- economised representation -------------------------------------------------


def _retarget(wires: set, old: PortRef, new: PortRef):
    moved = {(s, t) for s, t in wires if t == old}
    wires -= moved
    wires |= {(s, new) for s, _ in moved}


def collapse(net: Net, theory: Theory | None = None, canonicalize_units: bool = False) -> Net:
    """Absorb declared monoid multiplications/units into fan-in, nonempty
    comultiplication trees into fan-out, drop counits on sources that still
    have uses, and drop restrictions that feed only counits.  Idempotent."""
    theory = theory or net.theory
    cells = dict(net._cells_dict)
    wires = set(net.wires)
    sig = theory.signature

    def cell_sort(op_name, which):
        dom, cod = sig.op(op_name)
        return dom, cod

    monoid_ops = {}
    for sort, m, e in theory.monoid_sorts:
        monoid_ops[m] = "m"
        monoid_ops[e] = "e"
    comonoid_c = {c for _, c, _ in theory.comonoid_sorts}
    counit_ops = set(theory.weakening_ops)
    restriction_ops = set(theory.restriction_ops)

    orphaned_units: list[PortRef] = []

    def out_of(port):
        return [(s, t) for s, t in wires if s == port]

    def into(port):
        return [(s, t) for s, t in wires if t == port]

    changed = True
    while changed:
        changed = False
        for cid, op in list(cells.items()):
            if op in monoid_ops:
                out = out_of(cell_cod_port(cid, 0))
                if not out:
                    raise NetError(f"collapse: monoid cell {cid} has no output wire")
                target = out[0][1]
                wires.discard(out[0])
                if monoid_ops[op] == "m":
                    for i in (0, 1):
                        _retarget(wires, cell_dom_port(cid, i), target)
                else:  # unit: incoming unit wires move to the output target
                    _retarget(wires, cell_dom_port(cid, 0), target)
                del cells[cid]
                changed = True
            elif op in comonoid_c:
                src_wires = into(cell_dom_port(cid, 0))
                outs0 = out_of(cell_cod_port(cid, 0))
                outs1 = out_of(cell_cod_port(cid, 1))
                if not outs0 or not outs1:
                    raise NetError(f"collapse: comultiplication cell {cid} has an unwired output")
                targets = [t for _, t in outs0 + outs1]
                for w in outs0 + outs1:
                    wires.discard(w)
                sort_source = None
                for s, t in list(src_wires):
                    wires.discard((s, t))
                    if _is_unit_port_of(net, theory, cells, s):
                        wires.add((s, targets[0]))
                    else:
                        sort_source = s
                if sort_source is None:
                    raise NetError(f"collapse: comultiplication cell {cid} has no input")
                for t in targets:
                    wires.add((sort_source, t))
                del cells[cid]
                changed = True
    # counit on a source that still has other uses = the counit law
    changed = True
    while changed:
        changed = False
        for cid, op in list(cells.items()):
            if op not in counit_ops:
                continue
            inw = into(cell_dom_port(cid, 0))
            srcs = [s for s, _ in inw]
            kill = False
            for s in srcs:
                others = [w for w in out_of(s) if w[1] != cell_dom_port(cid, 0)]
                if others:
                    kill = True
            if kill:
                for s, t in inw:
                    wires.discard((s, t))
                    if _is_unit_port_of(net, theory, cells, s):
                        orphaned_units.append(s)
                for w in out_of(cell_cod_port(cid, 0)):
                    wires.discard(w)
                del cells[cid]
                changed = True
    # restriction feeding only counits: w o nu = id
    for nu_op, w_op in theory.nu_ops:
        changed = True
        while changed:
            changed = False
            for cid, op in list(cells.items()):
                if op != nu_op:
                    continue
                outs = out_of(cell_cod_port(cid, 0))
                if not outs:
                    raise NetError(f"collapse: restriction cell {cid} has no output")
                w_cells = set()
                only_w = True
                for _, t in outs:
                    if t.loc == "cdom" and cells.get(t.cell) == w_op:
                        w_cells.add(t.cell)
                    else:
                        only_w = False
                if not only_w:
                    continue
                for w in outs:
                    wires.discard(w)
                for wc in w_cells:
                    for w in out_of(cell_cod_port(wc, 0)):
                        wires.discard(w)
                    for s, t in into(cell_dom_port(wc, 0)):
                        if s != cell_cod_port(cid, 0):
                            wires.discard((s, t))
                            if _is_unit_port_of(net, theory, cells, s):
                                orphaned_units.append(s)
                    del cells[wc]
                for s, t in into(cell_dom_port(cid, 0)):
                    wires.discard((s, t))
                    if _is_unit_port_of(net, theory, cells, s):
                        orphaned_units.append(s)
                del cells[cid]
                changed = True

    out = Net(net.theory, net.dom, net.cod, cells.items(), wires)
    orphaned_units = [s for s in orphaned_units
                      if s in {p for p in out.negative_ports()} and not out.wires_from(s)]
    if orphaned_units:
        out = attach_units(out, orphaned_units)
    if canonicalize_units:
        out = rewiring_canonical(out)
    return out


def _is_unit_port_of(net: Net, theory: Theory, cells: dict, ref: PortRef) -> bool:
    from .formula import leaves as _leaves
    if ref.cell is None:
        f = net.dom if ref.loc == "dom" else net.cod
    else:
        dom, cod = theory.signature.op(cells.get(ref.cell) or net.cell_op(ref.cell))
        f = dom if ref.loc == "cdom" else cod
    return _leaves(f)[ref.index] is None


def collapsed_equal(f: Net, g: Net, max_states: int = 50000) -> bool:
    """Rewiring equivalence of collapsed normal forms.  Sound for the
    declared structural theory; complete on the closed-term fragment."""
    if f.dom != g.dom or f.cod != g.cod:
        return False
    return rewiring_equivalent(collapse(f), collapse(g), max_states)


def collapsed_key(f: Net, max_states: int = 50000):
    """Dedup key for collapsed_equal classes (canonical member of the
    rewiring component of the collapsed form)."""
    return canonical_key(rewiring_canonical(collapse(f), max_states))


# -- equations ----------------------------------------------------------------


@dataclass(frozen=True)
class EquationOccurrence:
    equation_index: int
    direction: str  # "lr" matches the lhs (rewrites to rhs), "rl" the reverse
    cell_map: tuple[tuple[str, str], ...]       # pattern cell -> host cell
    boundary_map: tuple[tuple[PortRef, PortRef], ...]   # pattern boundary port -> host port
    claimed: frozenset


def _match_pattern(host: Net, pattern: Net):
    """All embeddings of `pattern` into `host`: op-preserving injections of
    cells such that every host wire at a matched cell is the image of a
    pattern wire, plus a consistent boundary-port assignment."""
    pcells = list(pattern.cells)
    results = []

    def extend(i, cmap, used):
        if i == len(pcells):
            finish(dict(cmap))
            return
        pid, pop = pcells[i]
        for hid, hop in host.cells:
            if hop != pop or hid in used:
                continue
            cmap.append((pid, hid))
            extend(i + 1, cmap, used | {hid})
            cmap.pop()
        return

    def map_cell_ref(ref: PortRef, cmap: dict):
        return PortRef(ref.loc, cmap[ref.cell], ref.index)

    def finish(cmap: dict):
        # wires fully inside / touching matched cells are forced
        psi: dict[PortRef, PortRef] = {}
        claimed: set = set()
        pending_bb = []  # boundary-to-boundary pattern wires
        for s, t in sorted(pattern.wires):
            if s.cell is not None and t.cell is not None:
                hw = (map_cell_ref(s, cmap), map_cell_ref(t, cmap))
                if hw not in host.wires or hw in claimed:
                    return
                claimed.add(hw)
            elif s.cell is not None:
                hs = map_cell_ref(s, cmap)
                cands = [(a, b) for a, b in host.wires if a == hs and (a, b) not in claimed]
                matched = False
                for hw in cands:
                    if psi.get(t, hw[1]) == hw[1]:
                        psi[t] = hw[1]
                        claimed.add(hw)
                        matched = True
                        break
                if not matched:
                    return
            elif t.cell is not None:
                ht = map_cell_ref(t, cmap)
                cands = [(a, b) for a, b in host.wires if b == ht and (a, b) not in claimed]
                matched = False
                for hw in cands:
                    if psi.get(s, hw[0]) == hw[0]:
                        psi[s] = hw[0]
                        claimed.add(hw)
                        matched = True
                        break
                if not matched:
                    return
            else:
                pending_bb.append((s, t))
        # boundary-to-boundary wires: try unclaimed host wires with the same kinds
        def solve_bb(k):
            if k == len(pending_bb):
                complete(dict(psi), set(claimed))
                return
            s, t = pending_bb[k]
            for hw in sorted(host.wires - claimed):
                hs, ht = hw
                if psi.get(s, hs) != hs or psi.get(t, ht) != ht:
                    continue
                if host.port_kind(hs) != pattern.port_kind(s):
                    continue
                old_s, old_t = psi.get(s), psi.get(t)
                psi[s], psi[t] = hs, ht
                claimed.add(hw)
                solve_bb(k + 1)
                claimed.discard(hw)
                if old_s is None:
                    del psi[s]
                else:
                    psi[s] = old_s
                if old_t is None:
                    del psi[t]
                else:
                    psi[t] = old_t

        def complete(psi, claimed):
            # every host wire at a matched cell must be claimed
            hcells = {h for _, h in cmap.items()}
            for s, t in host.wires:
                if (s.cell in hcells or t.cell in hcells) and (s, t) not in claimed:
                    return
            results.append((tuple(sorted(cmap.items())), tuple(sorted(psi.items())), frozenset(claimed)))

        solve_bb(0)

    extend(0, [], set())
    return results


def find_occurrences(net: Net, theory: Theory, equation_index: int, direction: str = "lr"):
    eq = theory.equations[equation_index]
    pattern = eq.lhs if direction == "lr" else eq.rhs
    return [
        EquationOccurrence(equation_index, direction, cmap, psi, claimed)
        for cmap, psi, claimed in _match_pattern(net, pattern)
    ]


def apply_equation(net: Net, theory: Theory, occ: EquationOccurrence) -> Net:
    """Replace the matched side by the other side of the equation through the
    boundary assignment of the occurrence."""
    eq = theory.equations[occ.equation_index]
    pattern = eq.lhs if occ.direction == "lr" else eq.rhs
    replacement = eq.rhs if occ.direction == "lr" else eq.lhs
    cmap = dict(occ.cell_map)
    psi = dict(occ.boundary_map)
    matched_cells = set(cmap.values())
    for s, t in occ.claimed:
        if (s, t) not in net.wires:
            raise NetError("stale occurrence")

    cells = [(cid, op) for cid, op in net.cells if cid not in matched_cells]
    taken = {cid for cid, _ in cells}
    new_ids = {}
    i = 0
    for pid, pop in replacement.cells:
        while f"e{i}" in taken:
            i += 1
        new_ids[pid] = f"e{i}"
        taken.add(f"e{i}")
        cells.append((f"e{i}", pop))

    wires = set(net.wires) - set(occ.claimed)
    orphans = []
    for s, t in replacement.wires:
        if s.cell is not None:
            hs = PortRef(s.loc, new_ids[s.cell], s.index)
        else:
            if s not in psi:
                raise NetError("occurrence does not determine a source attachment")
            hs = psi[s]
        if t.cell is not None:
            ht = PortRef(t.loc, new_ids[t.cell], t.index)
        elif t in psi:
            ht = psi[t]
        else:
            # target only reachable on positive unit ports never used by the
            # matched side; reattach by correctness search
            if replacement.port_kind(t) is not None:
                raise NetError("occurrence does not determine a sort-port attachment")
            orphans.append(hs)
            continue
        wires.add((hs, ht))
    out = Net(net.theory, net.dom, net.cod, cells, wires)
    if orphans:
        out = attach_units(out, orphans)
    return out


# -- bounded decision ------------------------------------------------------------


def _neighbours(net: Net, theory: Theory):
    for m in rewiring_moves(net):
        yield m
    for index in range(len(theory.equations)):
        for direction in ("lr", "rl"):
            for occ in find_occurrences(net, theory, index, direction):
                try:
                    candidate = apply_equation(net, theory, occ)
                except NetError:
                    continue
                if is_correct(candidate):
                    yield candidate


def theory_equivalent_bounded(f: Net, g: Net, theory: Theory, budget: int = 10000) -> str:
    """Bidirectional search over iso classes interleaving rewiring moves and
    equation applications.  Returns "equal", "distinct" (only when both
    classes were exhausted within budget) or "unknown"."""
    if f.dom != g.dom or f.cod != g.cod:
        raise NetError("theory_equivalent_bounded: boundary mismatch")
    kf, kg = canonical_key(f), canonical_key(g)
    if kf == kg:
        return "equal"
    sides = [({kf}, [f]), ({kg}, [g])]
    states = 2
    while any(front for _, front in sides):
        idx = 0 if (sides[0][1] and (len(sides[0][1]) <= len(sides[1][1]) or not sides[1][1])) else 1
        seen, frontier = sides[idx]
        other_seen = sides[1 - idx][0]
        new = []
        for n in frontier:
            for m in _neighbours(n, theory):
                k = canonical_key(m)
                if k in other_seen:
                    return "equal"
                if k not in seen:
                    seen.add(k)
                    new.append(m)
                    states += 1
                    if states > budget:
                        return "unknown"
        sides[idx] = (seen, new)
    return "distinct"
