"""Compare the compiled and pure-Python shortest-path kernels.

    python benchmarks/bench_dijkstra.py [--sizes 16 32 64] [--repeat 5]

Both backends run on the same random weights over square grids; the script
checks that they agree before reporting timings.
"""

import argparse
import time

import numpy as np

from sqrect import kernels
from sqrect.grid import rectangle


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64, 128])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not kernels.HAVE_COMPILED:
        print("compiled kernel not built; only the Python backend is available")
    rng = np.random.default_rng(args.seed)
    print(f"{'grid':>8} {'tiles':>7} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for k in args.sizes:
        c = rectangle(k, k)
        indptr, indices = c.fat_graph
        w = rng.random(len(c))
        src = c.arc_indices("top")
        run_py = lambda: kernels.node_dijkstra(indptr, indices, w, src, backend="python")
        t_py = _time(run_py, args.repeat)
        if kernels.HAVE_COMPILED:
            run_cy = lambda: kernels.node_dijkstra(indptr, indices, w, src, backend="cython")
            d_py, _ = run_py()
            d_cy, _ = run_cy()
            assert np.allclose(d_py, d_cy, rtol=0, atol=1e-12), "backends disagree"
            t_cy = _time(run_cy, args.repeat)
            print(f"{k:>4}x{k:<3} {len(c):>7} {t_py:>10.5f} {t_cy:>10.5f} {t_py / t_cy:>7.1f}x")
        else:
            print(f"{k:>4}x{k:<3} {len(c):>7} {t_py:>10.5f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
