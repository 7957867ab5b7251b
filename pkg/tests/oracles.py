"""Independent reference computations used by the tests.

Nothing here imports the solver, phi or layout code; the oracles work from
tile sets and plain rationals so that agreement with the package is a real
cross-check.
"""

from fractions import Fraction
from itertools import product

import networkx as nx
import numpy as np
import sympy


# ---------------------------------------------------------------------------
# grids


def fat_graph(tiles):
    g = nx.Graph()
    g.add_nodes_from(tiles)
    for (x, y) in tiles:
        for u in ((x + 1, y), (x, y + 1)):
            if u in tiles:
                g.add_edge((x, y), u)
    return g


def skinny_graph(tiles):
    g = nx.Graph()
    g.add_nodes_from(tiles)
    for (x, y) in tiles:
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                u = (x + dx, y + dy)
                if u != (x, y) and u in tiles:
                    g.add_edge((x, y), u)
    return g


def skinny_hops(tiles, A, B):
    """One less than the fewest tiles in a vertex-adjacent chain from A to B."""
    if not A or not B:
        return float("inf")
    dist = nx.multi_source_dijkstra_path_length(skinny_graph(tiles), set(A))
    hits = [dist[b] for b in B if b in dist]
    return min(hits) if hits else float("inf")


def euler_characteristic(tiles):
    V, E = set(), set()
    for x, y in tiles:
        V |= {(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)}
        E |= {((x, y), (x + 1, y)), ((x, y + 1), (x + 1, y + 1)), ((x, y), (x, y + 1)), ((x + 1, y), (x + 1, y + 1))}
    return len(V) - len(E) + len(tiles)


def arc_tiles(c, name):
    """Tiles owning an edge of the named arc, from the edge geometry alone."""
    tiles = set(c.tiles)
    out = set()
    for (x0, y0), (x1, y1) in c.arcs[name]:
        x, y = min(x0, x1), min(y0, y1)
        cands = ((x, y), (x, y - 1)) if y0 == y1 else ((x, y), (x - 1, y))
        owners = [t for t in cands if t in tiles]
        assert len(owners) == 1, "arc edge is not a boundary edge"
        out.add(owners[0])
    return out


def crossing_paths(c):
    """All simple fat paths from a top tile to a bottom tile, as tile sets.

    Only minimal ones matter for the constraints, so any path containing
    another as a subset is dropped.
    """
    g = fat_graph(set(c.tiles))
    top, bottom = arc_tiles(c, "top"), arc_tiles(c, "bottom")
    found = set()
    for s in top:
        if s in bottom:
            found.add(frozenset([s]))
            continue
        for t in bottom:
            for p in nx.all_simple_paths(g, s, t):
                found.add(frozenset(p))
    minimal = [p for p in found if not any(q < p for q in found)]
    return sorted(minimal, key=lambda p: sorted(p))


def qp_modulus(c, paths):
    """Minimise the area subject to every path having length >= 1 (cvxpy)."""
    import cvxpy as cp

    idx = {t: i for i, t in enumerate(c.tiles)}
    x = cp.Variable(len(c.tiles))
    cons = [x >= 0] + [sum(x[idx[t]] for t in p) >= 1 for p in paths]
    prob = cp.Problem(cp.Minimize(cp.sum_squares(x)), cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    w = np.maximum(np.asarray(x.value), 0)
    return 1.0 / float(w @ w), w


# ---------------------------------------------------------------------------
# weight vectors


def phi_kkt_holds(x, y):
    """Exact KKT check that ``y`` minimises the area among vectors compatible with ``x``.

    In prefix-sum coordinates the problem is a strictly convex quadratic over
    a box, so the sign conditions on the gradient at each interior knot are
    necessary and sufficient.
    """
    n = len(x)
    p = [Fraction(0)]
    for v in x:
        p.append(p[-1] + v)
    q = [Fraction(0)]
    for v in y:
        q.append(q[-1] + v)
    if q[n] != p[n] or any(v < 0 for v in y):
        return False
    for k in range(1, n):
        lo, hi = p[k - 1], p[k + 1]
        if not lo <= q[k] <= hi:
            return False
        grad = 2 * (q[k] - q[k - 1]) - 2 * (q[k + 1] - q[k])
        if lo < q[k] < hi and grad != 0:
            return False
        if q[k] == lo and q[k] < hi and grad < 0:
            return False
        if q[k] == hi and q[k] > lo and grad > 0:
            return False
    return True


def phi_by_enumeration(x):
    """Minimal-area compatible vector by trying every knot status (small n only)."""
    n = len(x)
    p = [Fraction(0)]
    for v in x:
        p.append(p[-1] + v)
    best = None
    for status in product("fLU", repeat=n - 1):
        q = [None] * (n + 1)
        q[0], q[n] = Fraction(0), p[n]
        for k, s in enumerate(status, start=1):
            if s == "L":
                q[k] = p[k - 1]
            elif s == "U":
                q[k] = p[k + 1]
        # free knots interpolate linearly between pinned neighbours
        k = 1
        while k < n:
            if q[k] is None:
                a = k - 1
                b = k
                while q[b] is None:
                    b += 1
                for j in range(a + 1, b):
                    q[j] = q[a] + (q[b] - q[a]) * (j - a) / (b - a)
                k = b
            k += 1
        if any(not (p[k - 1] <= q[k] <= p[k + 1]) for k in range(1, n)):
            continue
        area = sum((q[k] - q[k - 1]) ** 2 for k in range(1, n + 1))
        if best is None or area < best[0]:
            best = (area, tuple(q[k] - q[k - 1] for k in range(1, n + 1)))
    return best[1]


def extension_qp(x, m):
    """Least-area n-by-m matrix with first column ``x`` over the monotone-cut polytope.

    Solved numerically with every constraint written out, then made exact by
    solving the equality system of the active constraints in rationals.
    Returns the columns as tuples of Fractions.
    """
    from cvxopt import matrix, solvers

    x = [Fraction(v) for v in x]
    n = len(x)
    h = sum(x)
    nv = n * (m - 1)

    def var(i, j):  # row i, column j >= 1
        return (j - 1) * n + i

    eq, ineq = [], []  # rows as (coef dict, const): sum coef*v + const (== 0 | <= 0)
    for j in range(1, m):
        eq.append(({var(i, j): 1 for i in range(n)}, -h))

    def prefix(j, k):
        """Coefficients and constant of sum_{i<k} column j."""
        if j == 0:
            return {}, sum(x[:k])
        return {var(i, j): 1 for i in range(k)}, Fraction(0)

    for j in range(m - 1):
        for k in range(1, n):
            for a, b in ((j, j + 1), (j + 1, j)):
                ca, ka = prefix(a, k)
                cb, kb = prefix(b, k + 1)
                coef = dict(ca)
                for key, v in cb.items():
                    coef[key] = coef.get(key, 0) - v
                ineq.append((coef, ka - kb))
    for v in range(nv):
        ineq.append(({v: -1}, Fraction(0)))

    def dense(rows):
        M = np.zeros((len(rows), nv))
        b = np.zeros(len(rows))
        for r, (coef, const) in enumerate(rows):
            for key, v in coef.items():
                M[r, key] = float(v)
            b[r] = -float(const)
        return M, b

    G, g = dense(ineq)
    E, e = dense(eq)
    solvers.options.update({"show_progress": False, "abstol": 1e-13, "reltol": 1e-13, "feastol": 1e-13})
    sol = solvers.qp(matrix(2 * np.eye(nv)), matrix(np.zeros(nv)), matrix(G), matrix(g), matrix(E), matrix(e))
    v = np.array(sol["x"]).ravel()
    z = np.array(sol["z"]).ravel()
    active = [r for r in range(len(ineq)) if z[r] > 1e-7 * max(1.0, z.max())]
    rows = eq + [ineq[r] for r in active]
    M = sympy.Matrix([[sympy.Rational(str(c.get(k, 0))) for k in range(nv)] for c, _ in rows])
    b = sympy.Matrix([-sympy.Rational(str(const)) for _, const in rows])
    y, params = (M * M.T).gauss_jordan_solve(b)
    y = y.subs({t: 0 for t in params})
    exact = M.T * y
    vals = [Fraction(int(sympy.fraction(t)[0]), int(sympy.fraction(t)[1])) for t in exact]
    for coef, const in ineq:
        if sum(c * vals[k] for k, c in coef.items()) + const > 0:
            raise AssertionError("exact active-set point is infeasible")
    if np.abs(np.array([float(t) for t in vals]) - v).max() > 1e-6:
        raise AssertionError("exact active-set point drifted from the numerical optimum")
    cols = [tuple(x)]
    for j in range(1, m):
        cols.append(tuple(vals[var(i, j)] for i in range(n)))
    return cols
