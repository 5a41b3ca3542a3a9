"""Net isomorphism: equality modulo the choice of cell identifiers.

Canonical keys are computed by colour refinement on the wire graph with
individualisation on ties, so two nets are isomorphic iff their keys are
equal.  Intended for desk-scale nets (tens of cells)."""

from __future__ import annotations

from .formula import format_formula
from .net import Net, PortRef

_LOC_RANK = {"dom": 0, "cod": 1, "cdom": 2, "ccod": 3}


def _portkey(ref: PortRef, index_of: dict[str, int]):
    if ref.cell is None:
        return (_LOC_RANK[ref.loc], -1, ref.index)
    return (_LOC_RANK[ref.loc], index_of[ref.cell], ref.index)


def _serialize(net: Net, order: list[str]):
    # formulas as text so that whole keys are totally ordered
    index_of = {cid: i for i, cid in enumerate(order)}
    ops = net._cells_dict
    wires = tuple(sorted((_portkey(s, index_of), _portkey(t, index_of)) for s, t in net.wires))
    return (format_formula(net.dom), format_formula(net.cod), tuple(ops[cid] for cid in order), wires)


def _refine(net: Net, colors: dict[str, object]) -> dict[str, int]:
    # endpoint descriptors use current colours for cells, raw refs for the boundary
    cell_wires: dict[str, list] = {cid: [] for cid, _ in net.cells}
    for s, t in net.wires:
        if s.cell is not None:
            cell_wires[s.cell].append(("o", s.loc, s.index, t))
        if t.cell is not None:
            cell_wires[t.cell].append(("i", t.loc, t.index, s))

    def endpoint(ref: PortRef, colors):
        if ref.cell is None:
            return ("b", ref.loc, ref.index)
        return ("c", colors[ref.cell], ref.loc, ref.index)

    # normalise colour values to ranks each round so they stay comparable
    ranked = {cid: 0 for cid, _ in net.cells}
    current = {cid: (net._cells_dict[cid], colors.get(cid)) for cid, _ in net.cells}
    values = sorted(set(current.values()), key=repr)
    rank = {v: i for i, v in enumerate(values)}
    ranked = {cid: rank[v] for cid, v in current.items()}
    while True:
        sigs = {}
        for cid, _ in net.cells:
            sig = tuple(sorted(
                (d, loc, idx, endpoint(other, ranked))
                for d, loc, idx, other in cell_wires[cid]
            ))
            sigs[cid] = (ranked[cid], sig)
        values = sorted(set(sigs.values()), key=repr)
        rank = {v: i for i, v in enumerate(values)}
        new = {cid: rank[sigs[cid]] for cid in sigs}
        if new == ranked:
            return ranked
        ranked = new


def _canonical_search(net: Net, all_orders: bool = False):
    best: list = [None, None, []]  # (serialization, order, tying orders)

    def classes_of(colors):
        by: dict[int, list[str]] = {}
        for cid, c in colors.items():
            by.setdefault(c, []).append(cid)
        return [sorted(by[c]) for c in sorted(by)]

    def rec(pins: dict[str, object]):
        colors = _refine(net, pins)
        classes = classes_of(colors)
        branch = next((cls for cls in classes if len(cls) > 1), None)
        if branch is None:
            order = [cls[0] for cls in classes]
            ser = _serialize(net, order)
            if best[0] is None or ser < best[0]:
                best[0], best[1], best[2] = ser, order, [order]
            elif all_orders and ser == best[0] and order not in best[2]:
                best[2].append(order)
            return
        for cid in branch:
            new_pins = dict(pins)
            new_pins[cid] = ("pin", len(pins), colors[cid])
            rec(new_pins)

    if not net.cells:
        return _serialize(net, []), [], [[]]
    rec({})
    return best[0], best[1], best[2]


def canonical_orders(net: Net) -> list[list[str]]:
    """All cell orders achieving the minimal serialisation (one per skeleton
    automorphism class)."""
    _, _, orders = _canonical_search(net, all_orders=True)
    return orders


def canonical_key(net: Net):
    """Hashable key equal for exactly the nets isomorphic to `net`."""
    ser, _, _ = _canonical_search(net)
    return ser


def rename_cells(net: Net, order: list[str]) -> Net:
    """Rename cells to c0..cn following `order`."""
    rename = {cid: f"c{i}" for i, cid in enumerate(order)}

    def rn(ref: PortRef) -> PortRef:
        if ref.cell is None:
            return ref
        return PortRef(ref.loc, rename[ref.cell], ref.index)

    return net.replace(
        cells=[(rename[cid], op) for cid, op in net.cells],
        wires=[(rn(s), rn(t)) for s, t in net.wires],
    )


def canonical_net(net: Net) -> Net:
    """Rename cells to c0..cn in canonical order."""
    _, order, _ = _canonical_search(net)
    return rename_cells(net, order)


def nets_isomorphic(f: Net, g: Net) -> bool:
    """Net isomorphism: equal boundaries, equal operation multisets, and a
    cell renaming matching the wire sets."""
    if f.dom != g.dom or f.cod != g.cod:
        return False
    if sorted(op for _, op in f.cells) != sorted(op for _, op in g.cells):
        return False
    if len(f.wires) != len(g.wires):
        return False
    return canonical_key(f) == canonical_key(g)
