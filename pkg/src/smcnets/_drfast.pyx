# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled switching kernel; mirrors _drpy.run_switchings exactly."""

from libc.stdlib cimport malloc, free

IMPL = "cython"

OK = 0
CYCLIC = 1
DISCONNECTED = 2


cdef inline int _find(int* parent, int x) nogil:
    cdef int root = x
    cdef int nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


def count_configurations(groups):
    total = 1
    for g in groups:
        total *= len(g)
    return total


def run_switchings(int n_vertices, fixed, groups, bint connectivity=True):
    """Return (status, failing_config_index, total_configs)."""
    cdef long long total = 1
    cdef int k = len(groups)
    cdef int gi, ei, i
    for g in groups:
        total *= len(g)

    # flatten groups
    cdef int n_edges = 0
    for g in groups:
        n_edges += len(g)
    cdef int* goff = <int*> malloc((k + 1) * sizeof(int))
    cdef int* gu = <int*> malloc(max(n_edges, 1) * sizeof(int))
    cdef int* gv = <int*> malloc(max(n_edges, 1) * sizeof(int))
    cdef int* radix = <int*> malloc(max(k, 1) * sizeof(int))
    cdef int* digits = <int*> malloc(max(k, 1) * sizeof(int))
    cdef int* base = <int*> malloc(max(n_vertices, 1) * sizeof(int))
    cdef int* parent = <int*> malloc(max(n_vertices, 1) * sizeof(int))
    if goff == NULL or gu == NULL or gv == NULL or radix == NULL or digits == NULL or base == NULL or parent == NULL:
        raise MemoryError()

    cdef int c_ok = 0, c_cyclic = 1, c_disconnected = 2
    cdef long long index = 0
    cdef int status = c_ok
    cdef long long failing = -1
    cdef int base_merges = 0
    cdef int merges, ru, rv, u, v
    cdef bint cyclic = False

    try:
        ei = 0
        goff[0] = 0
        for gi in range(k):
            g = groups[gi]
            radix[gi] = len(g)
            digits[gi] = 0
            for (pu, pv) in g:
                gu[ei] = pu
                gv[ei] = pv
                ei += 1
            goff[gi + 1] = ei

        for i in range(n_vertices):
            base[i] = i
        for (pu, pv) in fixed:
            ru = _find(base, <int> pu)
            rv = _find(base, <int> pv)
            if ru == rv:
                return CYCLIC, 0, total
            base[ru] = rv
            base_merges += 1

        with nogil:
            while index < total:
                for i in range(n_vertices):
                    parent[i] = base[i]
                merges = base_merges
                cyclic = False
                for gi in range(k):
                    ei = goff[gi] + digits[gi]
                    u = gu[ei]
                    v = gv[ei]
                    ru = _find(parent, u)
                    rv = _find(parent, v)
                    if ru == rv:
                        cyclic = True
                        break
                    parent[ru] = rv
                    merges += 1
                if cyclic:
                    status = c_cyclic
                    failing = index
                    break
                if connectivity and n_vertices - merges != 1:
                    status = c_disconnected
                    failing = index
                    break
                for gi in range(k):
                    digits[gi] += 1
                    if digits[gi] < radix[gi]:
                        break
                    digits[gi] = 0
                index += 1

        if status == c_ok:
            return OK, -1, total
        return status, failing, total
    finally:
        free(goff)
        free(gu)
        free(gv)
        free(radix)
        free(digits)
        free(base)
        free(parent)


def config_choices(groups, index):
    out = []
    for g in groups:
        out.append(index % len(g))
        index //= len(g)
    return out
