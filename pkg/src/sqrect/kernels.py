"""Hot-loop kernels with a compiled core and a pure-Python fallback.

The compiled extension is used when it was built and ``SQRECT_PURE_PYTHON``
is unset. Exact (object-dtype) weights always take the Python path.
"""

import os

import numpy as np

from . import _dijkstra_py

try:
    if os.environ.get("SQRECT_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _dijkstra as _compiled
except ImportError:
    _compiled = None

HAVE_COMPILED = _compiled is not None
BACKEND = "cython" if HAVE_COMPILED else "python"


def node_dijkstra(indptr, indices, weight, sources, backend=None):
    """Multi-source node-weighted shortest paths on a CSR graph.

    Returns ``(dist, pred)``. Source distances include the source weight.
    ``backend`` forces ``"cython"`` or ``"python"``; by default the compiled
    kernel handles float weights.
    """
    exact = not isinstance(weight, np.ndarray) or weight.dtype == object
    if backend is None:
        backend = "python" if exact or not HAVE_COMPILED else "cython"
    if backend not in ("cython", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "cython":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernels are not available")
        if exact:
            raise TypeError("the compiled kernel needs float weights")
        return _compiled.node_dijkstra(
            np.ascontiguousarray(indptr, dtype=np.int64),
            np.ascontiguousarray(indices, dtype=np.int64),
            np.ascontiguousarray(weight, dtype=np.float64),
            np.ascontiguousarray(sources, dtype=np.int64),
        )
    return _dijkstra_py.node_dijkstra(indptr, indices, weight, sources)


def trace_path(pred, node):
    """Node list from a source to ``node`` following ``pred`` links."""
    path = [int(node)]
    while pred[path[-1]] >= 0:
        path.append(int(pred[path[-1]]))
    path.reverse()
    return path
