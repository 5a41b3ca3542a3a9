"""Pure-Python switching kernel.

A switching problem is a vertex count, a list of fixed undirected edges and a
list of choice groups; each group contributes exactly one of its edges.  A
configuration passes when the chosen graph is acyclic and connected.  The
kernel scans all configurations (mixed-radix order, first group fastest) and
reports the first failure.
"""

from __future__ import annotations

OK = 0
CYCLIC = 1
DISCONNECTED = 2

IMPL = "python"


def _find(parent: list[int], x: int) -> int:
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def count_configurations(groups: list[list[tuple[int, int]]]) -> int:
    total = 1
    for g in groups:
        total *= len(g)
    return total


def run_switchings(n_vertices, fixed, groups, connectivity=True):
    """Return (status, failing_config_index, total_configs).

    status OK means every configuration is a tree over the vertex set (a
    forest when connectivity checking is disabled); the failing index is in
    mixed-radix order with the first group varying fastest.
    """
    total = count_configurations(groups)
    base = list(range(n_vertices))
    base_merges = 0
    base_cyclic = False
    for u, v in fixed:
        ru, rv = _find(base, u), _find(base, v)
        if ru == rv:
            base_cyclic = True
            break
        base[ru] = rv
        base_merges += 1
    if base_cyclic:
        return CYCLIC, 0, total

    k = len(groups)
    radix = [len(g) for g in groups]
    digits = [0] * k
    for index in range(total):
        parent = base[:]
        merges = base_merges
        cyclic = False
        for gi in range(k):
            u, v = groups[gi][digits[gi]]
            ru, rv = _find(parent, u), _find(parent, v)
            if ru == rv:
                cyclic = True
                break
            parent[ru] = rv
            merges += 1
        if cyclic:
            return CYCLIC, index, total
        if connectivity and n_vertices - merges != 1:
            return DISCONNECTED, index, total
        # increment mixed-radix counter
        for gi in range(k):
            digits[gi] += 1
            if digits[gi] < radix[gi]:
                break
            digits[gi] = 0
    return OK, -1, total


def config_choices(groups, index):
    """Digits of `index` in the kernel's mixed-radix order."""
    out = []
    for g in groups:
        out.append(index % len(g))
        index //= len(g)
    return out
