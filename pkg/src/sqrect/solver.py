"""Fat flow optimal weight functions.

The optimum minimises ``sum(rho**2)`` subject to every fat top-to-bottom path
having rho-length at least 1. :func:`solve_optimal` generates path constraints
lazily with a shortest-path separation step and solves each restricted QP with
Clarabel. :func:`brute_force_optimal` enumerates every path up front and uses
cvxopt, as an independent cross-check for small complexes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.optimize import nnls

from . import exact as xla
from . import kernels
from .grid import GridComplex, weight_array

log = logging.getLogger(__name__)

NORMALIZATIONS = ("height-one", "integer")


class SolverError(RuntimeError):
    pass


class MaxIterationsExceeded(SolverError):
    """Raised with the best iterate attached as ``.best``."""

    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


class TooManyPaths(SolverError):
    pass


class ExactRefinementFailed(SolverError):
    pass


class WeightFunction:
    """Nonnegative weights on the tiles of a complex, float or exact."""

    def __init__(self, tiles, values, exact: bool = False):
        self.tiles = tuple(tiles)
        if exact:
            vals = tuple(Fraction(v) for v in values)
            if any(v < 0 for v in vals):
                raise ValueError("weights must be nonnegative")
            if not any(vals):
                raise ValueError("a weight function cannot vanish identically")
            self.values = vals
        else:
            vals = np.asarray(values, dtype=float)
            if vals.shape != (len(self.tiles),):
                raise ValueError("one weight per tile required")
            if (vals < 0).any():
                raise ValueError("weights must be nonnegative")
            if not vals.any():
                raise ValueError("a weight function cannot vanish identically")
            self.values = vals
        self.exact = exact
        self._index = None

    @classmethod
    def from_mapping(cls, c: GridComplex, mapping: Mapping, exact=None):
        vals = [mapping[t] for t in c.tiles]
        if exact is None:
            exact = any(isinstance(v, Fraction) for v in vals)
        return cls(c.tiles, vals, exact=exact)

    def __len__(self):
        return len(self.tiles)

    def __getitem__(self, tile):
        if self._index is None:
            self._index = {t: i for i, t in enumerate(self.tiles)}
        return self.values[self._index[tuple(tile)]]

    def items(self):
        return zip(self.tiles, self.values)

    def as_array(self, c: GridComplex = None) -> np.ndarray:
        if c is None or c.tiles == self.tiles:
            vals = self.values
        else:
            vals = [self[t] for t in c.tiles]
        if self.exact:
            return np.array(list(vals), dtype=object)
        return np.asarray(vals, dtype=float)

    def as_floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])

    def scaled(self, r):
        if self.exact:
            r = Fraction(r)
            return WeightFunction(self.tiles, [v * r for v in self.values], exact=True)
        return WeightFunction(self.tiles, self.as_floats() * float(r))


def height(c: GridComplex, rho, backend=None):
    """Least rho-length of a fat path joining the top and bottom arcs."""
    w = weight_array(c, rho)
    indptr, indices = c.fat_graph
    dist, _ = kernels.node_dijkstra(indptr, indices, w, c.arc_indices("top"), backend=backend)
    return min(dist[i] for i in c.arc_indices("bottom"))


def area(rho):
    vals = rho.values if isinstance(rho, WeightFunction) else (
        list(rho.values()) if isinstance(rho, Mapping) else list(np.asarray(rho).ravel())
    )
    if vals and isinstance(vals[0], Fraction):
        return sum((v * v for v in vals), Fraction(0))
    return float(np.sum(np.square(np.asarray(vals, dtype=float))))


@dataclass
class ModulusResult:
    rho: WeightFunction
    height: float
    area: float
    modulus: float
    active_paths: list = field(default_factory=list)
    iterations: int = 0
    residual: float = 0.0
    kkt: float = 0.0
    exact: Optional[WeightFunction] = None
    normalization: str = "height-one"

    def to_json(self) -> dict:
        weights = []
        for i, t in enumerate(self.rho.tiles):
            entry = {"tile": list(t), "w": float(self.rho.values[i])}
            if self.exact is not None:
                entry["w_exact"] = str(self.exact.values[i])
            weights.append(entry)
        doc = {
            "height": float(self.height),
            "area": float(self.area),
            "modulus": float(self.modulus),
            "normalization": self.normalization,
            "iterations": self.iterations,
            "residual": float(self.residual),
            "kkt": float(self.kkt),
            "weights": weights,
        }
        if self.exact is not None:
            h, a = height_exact(self), area(self.exact)
            doc["height_exact"] = str(h)
            doc["area_exact"] = str(a)
            if h is not None and a:
                doc["modulus_exact"] = str(h * h / a)
        return doc


def height_exact(r: ModulusResult):
    if r.exact is None or not r.active_paths:
        return None
    return min(sum_path(r.exact, p) for p in r.active_paths)


def sum_path(rho: WeightFunction, path):
    zero = Fraction(0) if rho.exact else 0.0
    return sum((rho[t] for t in path), zero)


# ---------------------------------------------------------------------------
# shared plumbing


def _two_sided(c: GridComplex, w: np.ndarray):
    indptr, indices = c.fat_graph
    dt, pt = kernels.node_dijkstra(indptr, indices, w, c.arc_indices("top"))
    db, pb = kernels.node_dijkstra(indptr, indices, w, c.arc_indices("bottom"))
    return dt, pt, db, pb


def _through_path(pt, pb, t):
    up = kernels.trace_path(pt, t)  # top ... t
    down = kernels.trace_path(pb, t)  # bottom ... t
    seq = up + down[-2::-1]
    seen, out = set(), []
    for v in seq:
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def _incidence(paths, n):
    rows, cols = [], []
    for k, p in enumerate(paths):
        rows.extend([k] * len(p))
        cols.extend(p)
    return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(paths), n))


def _min_norm_on(A_S: sp.csr_matrix, lam0: np.ndarray, G=None):
    """Least-norm ``rho`` with ``A_S rho = 1`` and multipliers near ``lam0``.

    ``lam0 + G^+ (1 - G lam0)`` solves ``G lam = 1`` for the Gram matrix
    ``G = A_S A_S^T`` even when the rows are dependent, and ``A_S^T lam`` is
    then the least-norm point of the affine set.
    """
    if G is None:
        G = _gram(A_S)
    r = 1.0 - G @ lam0
    # the system is consistent, so a slightly regularised factorisation plus
    # refinement reaches a solution even for singular G; every solution gives
    # the same rho
    eps = 1e-10 * max(float(np.diag(G).max(initial=1.0)), 1.0)
    delta = None
    try:
        fac = scipy.linalg.cho_factor(G + eps * np.eye(len(G)), check_finite=False)
        delta = np.zeros_like(r)
        for _ in range(8):
            res = r - G @ delta
            if np.abs(res).max(initial=0.0) <= 1e-13:
                break
            delta += scipy.linalg.cho_solve(fac, res, check_finite=False)
    except scipy.linalg.LinAlgError:
        delta = None
    if delta is None or not np.allclose(G @ delta, r, rtol=0, atol=1e-12):
        delta = scipy.linalg.lstsq(G, r, lapack_driver="gelsy")[0]
    lam = lam0 + delta
    return A_S.T @ lam, lam


def _gram(A_S):
    return (A_S @ A_S.T).toarray()


def _kkt(A_S, rho, lam, floor: float = 1e-9):
    """Stationarity, dual feasibility and tightness on the rows with ``lam > floor``.

    Multipliers below ``floor`` count as zero, so interior-point residue on
    inactive rows shows up as a stationarity error rather than being hidden
    in a small complementarity product.
    """
    on = lam > floor * max(lam.max(initial=0.0), 1e-300)
    lam_on = np.where(on, lam, 0.0)
    stat = np.abs(A_S.T @ lam_on - rho).max(initial=0.0)
    dual = max(0.0, -lam.min(initial=0.0))
    tight = np.abs((A_S @ rho - 1.0)[on]).max(initial=0.0)
    return max(stat, dual, tight)


def _polish(A, rho_qp, lam_qp, slack_tol: float = 1e-6, rounds: int = 20):
    """Least-norm point of the numerically tight rows, dropping negative multipliers.

    Taking every tight row (not just the multiplier support) matters when
    the optimum is degenerate: a tight path that passes through an extra
    zero-weight tile then pins that tile to zero.
    """
    rows = np.flatnonzero(A @ rho_qp - 1.0 <= slack_tol)
    lam0 = lam_qp[rows]
    for _ in range(rounds):
        if not len(rows):
            return None
        A_S = A[rows]
        rho, lam = _min_norm_on(A_S, lam0)
        neg = lam < -1e-12
        if not neg.any():
            break
        if _ < rounds - 1:
            rows, lam0 = rows[~neg], lam[~neg]
    return np.maximum(rho, 0.0), A_S, lam, rows


def _active_set(c, paths, keys, rows, lam, tol_feas, solves: int = 200):
    """Refine a polished point by adding violated paths as tight rows.

    Near the optimum the interior-point tight set misses paths that carry
    very little flow. This is a nonnegative least-squares style ascent on
    the dual: violated through-paths enter with zero multiplier, and a ratio
    test moves towards the equality solution only until some multiplier hits
    zero, so the dual objective never decreases and the loop cannot cycle.
    """
    n = len(c)
    rows = list(rows)
    lam = np.maximum(np.asarray(lam, dtype=float), 0.0)
    A_S = _incidence(rows, n)
    G = _gram(A_S)
    rho = A_S.T @ lam
    for _ in range(solves):
        target_rho, target = _min_norm_on(A_S, lam, G)
        if target.min(initial=0.0) >= -1e-14:
            lam, rho = np.maximum(target, 0.0), np.maximum(target_rho, 0.0)
        else:
            neg = target < 0
            t = float(np.min(lam[neg] / (lam[neg] - target[neg])))
            lam = lam + t * (target - lam)
            # only rows that reached zero while heading negative leave
            keep = (lam > 1e-15 * max(lam.max(initial=0.0), 1e-300)) | ~neg
            log.debug("ratio step t %.3g drops %d of %d", t, int((~keep).sum()), len(rows))
            rows = [r for r, k in zip(rows, keep) if k]
            lam = np.maximum(lam[keep], 0.0)
            A_S = A_S[keep]
            G = G[np.ix_(keep, keep)]
            rho = A_S.T @ lam
            continue
        dt, pt, db, pb = _two_sided(c, rho)
        through = dt + db - rho
        bad = np.flatnonzero(through < 1 - tol_feas)
        log.debug("active set: rows %d violated %d min %.3e", len(rows), len(bad), through.min())
        if not len(bad):
            break
        have = {frozenset(r) for r in rows}
        new = []
        for t in bad:
            p = _through_path(pt, pb, int(t))
            key = frozenset(p)
            if key not in have:
                have.add(key)
                new.append(p)
                if key not in keys:
                    keys.add(key)
                    paths.append(p)
        if not new:
            break
        rows.extend(new)
        lam = np.concatenate([lam, np.zeros(len(new))])
        A_new = _incidence(new, n)
        cross = (A_S @ A_new.T).toarray()
        G = np.block([[G, cross], [cross.T, _gram(A_new)]])
        A_S = sp.vstack([A_S, A_new]).tocsr()
    return rho, A_S, lam


def _finish(c, rho, *, iterations, residual, kkt, normalization, exact, tol_active=1e-9):
    rho = np.where(rho < 1e-14 * max(rho.max(), 1.0), 0.0, rho)
    dt, pt, db, pb = _two_sided(c, rho)
    bottom = c.arc_indices("bottom")
    H = float(min(dt[i] for i in bottom))
    rho = rho / H
    dt, db = dt / H, db / H
    through = dt + db - rho
    active, seen = [], set()
    for t in np.argsort(through, kind="stable"):
        if through[t] > 1 + tol_active:
            break
        p = _through_path(pt, pb, int(t))
        key = frozenset(p)
        if key not in seen:
            seen.add(key)
            active.append([c.tiles[i] for i in p])
    wf = WeightFunction(c.tiles, rho)
    ex = None
    if exact or normalization == "integer":
        ex = refine_exact(c, wf, active)
    res = ModulusResult(
        rho=wf,
        height=1.0,
        area=float(np.dot(rho, rho)),
        modulus=1.0 / float(np.dot(rho, rho)),
        active_paths=active,
        iterations=iterations,
        residual=residual,
        kkt=kkt,
        exact=ex,
        normalization="height-one",
    )
    return normalize(res, normalization)


def normalize(r: ModulusResult, mode: str) -> ModulusResult:
    """Rescale a height-one result; ``"integer"`` clears denominators of the exact weights."""
    if mode not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {mode!r}")
    if mode == "height-one" or r.normalization == mode:
        return r
    if r.exact is None:
        raise ExactRefinementFailed("integer normalization needs exact weights")
    lcd = 1
    for v in r.exact.values:
        lcd = lcd * v.denominator // math.gcd(lcd, v.denominator)
    g = 0
    for v in r.exact.values:
        g = math.gcd(g, (v * lcd).numerator)
    scale = Fraction(lcd, g or 1)
    ex = r.exact.scaled(scale)
    s = float(scale)
    return ModulusResult(
        rho=r.rho.scaled(s),
        height=r.height * s,
        area=r.area * s * s,
        modulus=r.modulus,
        active_paths=r.active_paths,
        iterations=r.iterations,
        residual=r.residual,
        kkt=r.kkt,
        exact=ex,
        normalization=mode,
    )


# ---------------------------------------------------------------------------
# cutting plane


def _clarabel_qp(A: sp.csr_matrix, n: int, tol: float):
    import clarabel

    K = A.shape[0]
    P = sp.identity(n, format="csc")
    q = np.zeros(n)
    # rho >= 0 is implied: at the optimum rho = A^T lam with lam >= 0
    Ac = (-A).tocsc()
    b = -np.ones(K)
    st = clarabel.DefaultSettings()
    st.verbose = False
    st.tol_gap_abs = st.tol_gap_rel = st.tol_feas = tol
    st.tol_ktratio = 1e-10
    st.max_iter = 500
    solver = clarabel.DefaultSolver(P, q, Ac, b, [clarabel.NonnegativeConeT(K)], st)
    sol = solver.solve()
    if str(sol.status) not in ("Solved", "AlmostSolved", "SolverStatus.Solved", "SolverStatus.AlmostSolved"):
        raise SolverError(f"restricted QP returned status {sol.status}")
    rho = np.maximum(np.asarray(sol.x), 0.0)
    lam = np.maximum(np.asarray(sol.z)[:K], 0.0)
    return rho, lam


def flow_warm_start(c: GridComplex, tol: float = 1e-10):
    """Approximate optimum from the dual min-energy flow: ``(rho, paths)`` or ``None``.

    The Lagrangian dual of the path-constrained QP maximises the flow value
    minus half the sum of squared tile throughputs, over top-to-bottom flows
    on the tile graph. It has one variable per adjacency, so a single solve
    is cheap. The throughputs approximate rho and the flow's path
    decomposition approximates the active path set.
    """
    import clarabel

    n = len(c)
    indptr, indices = c.fat_graph
    tails = np.repeat(np.arange(n), np.diff(indptr))
    heads = np.asarray(indices, dtype=np.int64)
    top, bottom = c.arc_indices("top"), c.arc_indices("bottom")
    m_in = len(tails)
    m = m_in + len(top) + len(bottom)
    # arcs: tile->tile, source->top tile, bottom tile->sink
    into = sp.csr_matrix(
        (np.ones(m_in + len(top)), (np.concatenate([heads, top]), np.arange(m_in + len(top)))), shape=(n, m)
    )
    out_cols = np.concatenate([np.arange(m_in), m_in + len(top) + np.arange(len(bottom))])
    out = sp.csr_matrix((np.ones(m_in + len(bottom)), (np.concatenate([tails, bottom]), out_cols)), shape=(n, m))
    P = sp.triu(into.T @ into).tocsc()
    q = np.zeros(m)
    q[m_in + len(top):] = -1.0
    Ac = sp.vstack([into - out, -sp.identity(m)]).tocsc()
    b = np.zeros(n + m)
    st = clarabel.DefaultSettings()
    st.verbose = False
    st.tol_gap_abs = st.tol_gap_rel = st.tol_feas = tol
    sol = clarabel.DefaultSolver(P, q, Ac, b, [clarabel.ZeroConeT(n), clarabel.NonnegativeConeT(m)], st).solve()
    if "Solved" not in str(sol.status):
        log.debug("flow warm start returned %s", sol.status)
        return None
    x = np.maximum(np.asarray(sol.x), 0.0)
    rho = into @ x
    if not rho.any():
        return None
    paths = _decompose_flow(n, tails, heads, x[:m_in], top, x[m_in:m_in + len(top)],
                            bottom, x[m_in + len(top):])
    return rho, paths


def _decompose_flow(n, tails, heads, arc_flow, top, src_flow, bottom, sink_flow, rel_eps=1e-7):
    """Greedy widest-next-arc path decomposition of a (noisy) tile flow."""
    total = src_flow.sum()
    eps = rel_eps * max(total, 1e-300)
    arc_flow = np.where(arc_flow > eps, arc_flow, 0.0)
    src = {int(t): f for t, f in zip(top, src_flow) if f > eps}
    sink = {int(t): f for t, f in zip(bottom, sink_flow) if f > eps}
    outs = [[] for _ in range(n)]
    for a in np.flatnonzero(arc_flow):
        outs[tails[a]].append(int(a))
    paths = []
    for _ in range(4 * len(outs) + 4 * len(arc_flow)):
        live = [t for t, f in src.items() if f > eps]
        if not live:
            break
        s = max(live, key=lambda t: (src[t], -t))
        path, arcs, on = [s], [], {s}
        while not (path[-1] in sink and sink[path[-1]] > eps):
            v = path[-1]
            nxt = [a for a in outs[v] if arc_flow[a] > eps and heads[a] not in on]
            if not nxt:
                break
            a = max(nxt, key=lambda a: (arc_flow[a], -a))
            arcs.append(a)
            path.append(int(heads[a]))
            on.add(path[-1])
        end = path[-1]
        if not (end in sink and sink[end] > eps):
            # dead end from solver noise: drop the last arc (or the source) and retry
            if arcs:
                arc_flow[arcs[-1]] = 0.0
            else:
                src[s] = 0.0
            continue
        width = min([src[s], sink[end]] + [arc_flow[a] for a in arcs])
        src[s] -= width
        sink[end] -= width
        for a in arcs:
            arc_flow[a] -= width
        paths.append(path)
    return paths


def solve_optimal(
    c: GridComplex,
    tol_feas: float = 1e-10,
    tol_kkt: float = 1e-9,
    max_iter: int = 100,
    normalization: str = "height-one",
    exact: bool = False,
    margin: float = 0.0,
    warm_start: bool = True,
) -> ModulusResult:
    """Optimal weight function by cutting planes over fat paths.

    Each round adds, for every tile whose cheapest crossing path through it
    is shorter than ``1 + margin``, that path. With ``margin = 0`` only
    violated paths are added.
    """
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    if tol_feas <= 0 or tol_kkt <= 0:
        raise ValueError("tolerances must be positive")
    n = len(c)
    paths: list[list[int]] = []
    keys: set = set()

    def add_through(w, tiles):
        _, pt, _, pb = _two_sided(c, w)
        added = 0
        for t in tiles:
            p = _through_path(pt, pb, int(t))
            key = frozenset(p)
            if key not in keys:
                keys.add(key)
                paths.append(p)
                added += 1
        return added

    add_through(np.ones(n), range(n))
    if warm_start:
        guess = flow_warm_start(c)
        if guess is not None:
            rho_guess, flow_paths = guess
            for p in flow_paths:
                key = frozenset(p)
                if key not in keys:
                    keys.add(key)
                    paths.append(p)
            add_through(rho_guess, range(n))
    best = None
    for it in range(1, max_iter + 1):
        A = _incidence(paths, n)
        rho_qp, lam_qp = _clarabel_qp(A, n, tol=1e-12)
        candidates = []
        polished = _polish(A, rho_qp, lam_qp)
        tight = None
        if polished is not None:
            _, _, lam_p, rows_p = polished
            tight = [paths[i] for i in rows_p]
        # forget constraints that are slack with zero multiplier; the restricted
        # optimum does not change, so the objective still increases monotonically
        keep = (lam_qp > 1e-10 * lam_qp.max()) | (A @ rho_qp < 1 + 1e-7)
        if not keep.all():
            paths[:] = [p for p, k in zip(paths, keep) if k]
            keys.clear()
            keys.update(frozenset(p) for p in paths)
        n_before = len(paths)
        if tight is not None:
            # multipliers here come from an equality solve on tight rows, so
            # small positive ones are genuine and need no floor
            candidates.append(_active_set(c, paths, keys, tight, lam_p, tol_feas) + (0.0,))
        candidates.append((rho_qp, A, lam_qp, 1e-9))
        added = len(paths) - n_before
        for rho, A_S, lam, floor in candidates:
            if not rho.any():
                continue
            dt, _, db, _ = _two_sided(c, rho)
            through = dt + db - rho
            H = float(through.min())
            residual = max(0.0, 1.0 - H)
            kkt = _kkt(A_S, rho, lam, floor)
            log.debug("iter %d paths %d H %.3e kkt %.3e", it, len(paths), H, kkt)
            if best is None or (residual, kkt) < best[:2]:
                best = (residual, kkt, rho, it)
            if residual <= tol_feas and kkt <= tol_kkt:
                return _finish(
                    c, rho, iterations=it, residual=residual, kkt=kkt,
                    normalization=normalization, exact=exact,
                )
            if not added:
                # separate on the first (polished) candidate only; the QP point adds near-duplicates
                near = through < 1 + margin if residual > tol_feas else through < 1 - tol_feas
                added += add_through(rho, np.flatnonzero(near))
        if not added:
            break
    residual, kkt, rho, it = best
    msg = f"no certified optimum after {it} iterations (residual {residual:.2e}, kkt {kkt:.2e})"
    raise MaxIterationsExceeded(
        msg,
        best=_finish(c, rho, iterations=it, residual=residual, kkt=kkt,
                     normalization="height-one", exact=False),
    )


# ---------------------------------------------------------------------------
# exact refinement


def _exact_dijkstra_height(c, vals):
    indptr, indices = c.fat_graph
    w = np.array(vals, dtype=object)
    dt, _ = kernels.node_dijkstra(indptr, indices, w, c.arc_indices("top"), backend="python")
    db, _ = kernels.node_dijkstra(indptr, indices, w, c.arc_indices("bottom"), backend="python")
    return dt, db


def refine_exact(c: GridComplex, rho: WeightFunction, active_paths) -> WeightFunction:
    """Rational weights from the active constraints, certified optimal exactly.

    A nonnegative multiplier support is found numerically, the equality
    system ``A_S A_S^T lam = 1`` is solved in rationals on independent rows,
    and the result is checked for ``lam >= 0`` and exact feasibility.
    """
    index = c.index
    paths = [[index[t] for t in p] for p in active_paths]
    if not paths:
        raise ExactRefinementFailed("no active paths to refine from")
    A = _incidence(paths, len(c)).toarray()
    lam, _ = nnls(A.T, rho.as_floats())
    order = np.argsort(-lam, kind="stable")
    support = [int(k) for k in order if lam[k] > 1e-12 * lam.max()]
    keep = [support[j] for j in xla.independent_columns(sorted(paths[k]) for k in support)]
    rows = [sorted(paths[k]) for k in keep]
    G = xla.gram(rows)
    lam_q = xla.solve(G, [1] * len(rows))
    if any(v < 0 for v in lam_q):
        raise ExactRefinementFailed("exact multipliers are not all nonnegative")
    vals = [Fraction(0)] * len(c)
    for l, p in zip(lam_q, rows):
        for i in p:
            vals[i] += l
    dt, db = _exact_dijkstra_height(c, vals)
    H = min(dt[i] for i in c.arc_indices("bottom"))
    if H != 1:
        raise ExactRefinementFailed(f"refined weights have height {H}, not 1")
    return WeightFunction(c.tiles, vals, exact=True)


# ---------------------------------------------------------------------------
# brute force oracle


def enumerate_crossing_paths(c: GridComplex, cap: int = 200_000) -> list[list[int]]:
    """Simple fat paths from a top tile to a bottom tile.

    A path stops at the first bottom tile it meets and never re-enters a top
    tile; longer paths contain one of these and add no constraint. The
    search also gives up after ``100 * cap`` steps, since on large complexes
    dead-end branches can dominate long before ``cap`` paths are found.
    """
    indptr, indices = c.fat_graph
    top = set(int(i) for i in c.arc_indices("top"))
    bottom = set(int(i) for i in c.arc_indices("bottom"))
    out: list[list[int]] = []
    steps = [0]

    def grow(path, on):
        steps[0] += 1
        if steps[0] > 100 * cap:
            raise TooManyPaths(f"crossing path search exceeded {100 * cap} steps")
        v = path[-1]
        if v in bottom:
            out.append(list(path))
            if len(out) > cap:
                raise TooManyPaths(f"more than {cap} crossing paths")
            return
        for u in indices[indptr[v]:indptr[v + 1]]:
            u = int(u)
            if u in on or u in top:
                continue
            path.append(u)
            on.add(u)
            grow(path, on)
            on.discard(u)
            path.pop()

    for s in sorted(top):
        grow([s], {s})
    return out


def brute_force_optimal(c: GridComplex, cap: int = 20_000, exact: bool = False) -> ModulusResult:
    """Solve the path-constrained QP with every crossing path enumerated."""
    import cvxopt
    import cvxopt.solvers

    n = len(c)
    paths = enumerate_crossing_paths(c, cap)
    K = len(paths)
    A = np.zeros((K, n))
    for k, p in enumerate(paths):
        A[k, p] = 1.0
    G = cvxopt.matrix(np.vstack([-A, -np.eye(n)]))
    h = cvxopt.matrix(np.concatenate([-np.ones(K), np.zeros(n)]))
    P = cvxopt.matrix(np.eye(n))
    q = cvxopt.matrix(np.zeros(n))
    opts = {"show_progress": False, "abstol": 1e-13, "reltol": 1e-13, "feastol": 1e-13, "maxiters": 200}
    sol = cvxopt.solvers.qp(P, q, G, h, options=opts)
    rho = np.maximum(np.array(sol["x"]).ravel(), 0.0)
    lam = np.maximum(np.array(sol["z"]).ravel()[:K], 0.0)
    # polish on the tight rows: the optimum is the least-norm point of that affine set
    tight = np.flatnonzero(lam > 1e-8 * lam.max())
    A_T = A[tight]
    polished = np.linalg.lstsq(A_T, np.ones(len(tight)), rcond=None)[0]
    if (A @ polished).min() >= 1 - 1e-12 and polished.min() >= -1e-12:
        rho = np.maximum(polished, 0.0)
    lengths = A @ rho
    H = lengths.min()
    rho = rho / H
    lengths = lengths / H
    mult, _ = nnls(A_T.T, rho)
    kkt = float(np.abs(A_T.T @ mult - rho).max())
    active = [[c.tiles[i] for i in paths[k]] for k in np.flatnonzero(lengths <= 1 + 1e-9)]
    wf = WeightFunction(c.tiles, rho)
    ex = refine_exact(c, wf, active) if exact else None
    a = float(rho @ rho)
    return ModulusResult(
        rho=wf, height=1.0, area=a, modulus=1.0 / a, active_paths=active,
        iterations=1, residual=0.0, kkt=kkt, exact=ex,
    )


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Certificate:
    support_ok: bool
    flow_ok: Optional[bool]  # None when the instance is too large to check
    gap: Optional[float]  # |M - brute force M|, None when not computed
    details: str = ""

    @property
    def ok(self) -> bool:
        return self.support_ok and self.flow_ok is not False and (self.gap is None or self.gap <= 1e-8)


def _rationalize(v: float) -> Fraction:
    return Fraction(v).limit_denominator(10**9)


def certify(c: GridComplex, r: ModulusResult, tol: float = 1e-9, flow_limit: int = 12,
            oracle_cap: int = 20_000, oracle_limit: int = 200) -> Certificate:
    """Independent optimality checks on a solver result.

    The brute-force gap is computed only for complexes of at most
    ``oracle_limit`` tiles whose crossing paths fit under ``oracle_cap``.
    """
    rho = r.rho.as_floats()
    H = float(height(c, rho))
    dt, _, db, _ = _two_sided(c, rho)
    through = dt + db - rho
    pos = rho > tol * rho.max()
    off = np.flatnonzero(pos & (through > H * (1 + tol)))
    support_ok = len(off) == 0
    details = [] if support_ok else [f"positive weight off minimal paths at {[c.tiles[i] for i in off[:5]]}"]

    flow_ok = None
    gap = None
    if len(c) <= flow_limit:
        flow_ok = _flow_decomposes(c, r, H, tol)
        if not flow_ok:
            details.append("weights are not a nonnegative combination of minimal paths")
    if len(c) <= oracle_limit:
        try:
            oracle = brute_force_optimal(c, cap=oracle_cap)
            gap = abs(r.modulus - oracle.modulus)
        except TooManyPaths:
            pass
    return Certificate(support_ok, flow_ok, gap, "; ".join(details))


def _flow_decomposes(c, r, H, tol) -> bool:
    paths = enumerate_crossing_paths(c)
    if r.exact is not None:
        vals = list(r.exact.values)
    else:
        vals = [_rationalize(v) for v in r.rho.as_floats()]
    A = np.zeros((len(paths), len(c)))
    for k, p in enumerate(paths):
        A[k, p] = 1.0
    lengths = A @ np.array([float(v) for v in vals])
    Hq = min(lengths)
    minimal = [sorted(paths[k]) for k in np.flatnonzero(lengths <= Hq * (1 + tol))]
    if not minimal:
        return False
    M = np.zeros((len(c), len(minimal)))
    for k, p in enumerate(minimal):
        M[p, k] = 1.0
    lam, _ = nnls(M, np.array([float(v) for v in vals]))
    support = [k for k in range(len(minimal)) if lam[k] > 1e-12]
    if not support:
        return False
    cols = [minimal[k] for k in support]
    keep = xla.independent_columns(cols)
    cols = [cols[j] for j in keep]
    # exact least squares on the chosen columns, then an exact equality check
    G = xla.gram(cols)
    rhs = [sum((vals[i] for i in col), Fraction(0)) for col in cols]
    lam_q = xla.solve(G, rhs)
    if any(v < 0 for v in lam_q):
        return False
    recon = [Fraction(0)] * len(c)
    for l, col in zip(lam_q, cols):
        for i in col:
            recon[i] += l
    return recon == vals
