# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled node-weighted Dijkstra over a CSR adjacency."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


cdef inline bint _less(double ka, Py_ssize_t ia, double kb, Py_ssize_t ib) noexcept nogil:
    return ka < kb or (ka == kb and ia < ib)


cdef void _sift_up(double[::1] keys, Py_ssize_t[::1] items, Py_ssize_t pos) noexcept nogil:
    cdef double k = keys[pos]
    cdef Py_ssize_t it = items[pos]
    cdef Py_ssize_t parent
    while pos > 0:
        parent = (pos - 1) >> 1
        if _less(k, it, keys[parent], items[parent]):
            keys[pos] = keys[parent]
            items[pos] = items[parent]
            pos = parent
        else:
            break
    keys[pos] = k
    items[pos] = it


cdef void _sift_down(double[::1] keys, Py_ssize_t[::1] items, Py_ssize_t size) noexcept nogil:
    cdef Py_ssize_t pos = 0
    cdef double k = keys[0]
    cdef Py_ssize_t it = items[0]
    cdef Py_ssize_t child
    while True:
        child = 2 * pos + 1
        if child >= size:
            break
        if child + 1 < size and _less(keys[child + 1], items[child + 1], keys[child], items[child]):
            child += 1
        if _less(keys[child], items[child], k, it):
            keys[pos] = keys[child]
            items[pos] = items[child]
            pos = child
        else:
            break
    keys[pos] = k
    items[pos] = it


def node_dijkstra(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                  const double[::1] weight, const cnp.int64_t[::1] sources):
    """Shortest node-weighted distances from a set of source nodes.

    ``dist[v]`` is the least total weight of a walk ``s, ..., v`` with ``s`` a
    source, counting both endpoints. ``pred[v]`` is -1 for nodes reached as
    sources and for unreachable nodes. Ties are resolved towards the smaller
    node index.
    """
    cdef Py_ssize_t n = weight.shape[0]
    cdef Py_ssize_t cap = indices.shape[0] + sources.shape[0] + 1
    dist_arr = np.full(n, np.inf)
    pred_arr = np.full(n, -1, dtype=np.int64)
    cdef double[::1] dist = dist_arr
    cdef cnp.int64_t[::1] pred = pred_arr
    cdef cnp.uint8_t[::1] done = np.zeros(n, dtype=np.uint8)
    cdef double[::1] hkeys = np.empty(cap)
    cdef Py_ssize_t[::1] hitems = np.empty(cap, dtype=np.intp)
    cdef Py_ssize_t size = 0
    cdef Py_ssize_t i, s, v, u, e
    cdef double dv, nd

    with nogil:
        for i in range(sources.shape[0]):
            s = sources[i]
            if weight[s] < dist[s]:
                dist[s] = weight[s]
                pred[s] = -1
                hkeys[size] = dist[s]
                hitems[size] = s
                _sift_up(hkeys, hitems, size)
                size += 1
        while size > 0:
            dv = hkeys[0]
            v = hitems[0]
            size -= 1
            if size > 0:
                hkeys[0] = hkeys[size]
                hitems[0] = hitems[size]
                _sift_down(hkeys, hitems, size)
            if done[v]:
                continue
            done[v] = 1
            for e in range(indptr[v], indptr[v + 1]):
                u = indices[e]
                if done[u]:
                    continue
                nd = dv + weight[u]
                if nd < dist[u]:
                    dist[u] = nd
                    pred[u] = v
                    hkeys[size] = nd
                    hitems[size] = u
                    _sift_up(hkeys, hitems, size)
                    size += 1
    return dist_arr, pred_arr
