"""Pure-Python node-weighted Dijkstra.

Same contract as the compiled kernel. Weights may be any ordered numbers
(floats or :class:`fractions.Fraction`), which is what exact mode relies on.
"""

import heapq

import numpy as np


def node_dijkstra(indptr, indices, weight, sources):
    n = len(weight)
    exact = not isinstance(weight, np.ndarray) or weight.dtype == object
    inf = float("inf")
    dist = [inf] * n
    pred = [-1] * n
    done = [False] * n
    heap = []
    for s in sources:
        s = int(s)
        if weight[s] < dist[s]:
            dist[s] = weight[s]
            heap.append((weight[s], s))
    heapq.heapify(heap)
    indptr = [int(i) for i in indptr]
    indices = [int(i) for i in indices]
    while heap:
        dv, v = heapq.heappop(heap)
        if done[v]:
            continue
        done[v] = True
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if done[u]:
                continue
            nd = dv + weight[u]
            if nd < dist[u]:
                dist[u] = nd
                pred[u] = v
                heapq.heappush(heap, (nd, u))
    if exact:
        return np.array(dist, dtype=object), np.array(pred, dtype=np.int64)
    return np.array(dist, dtype=float), np.array(pred, dtype=np.int64)
