"""Matching graph of large items, matching polytope tools, and the matching configuration LP.

The polytope side works with explicit convex decompositions: a fractional
edge vector is certified to lie in the matching polytope by writing it as a
convex combination of matchings (column generation over matchings, priced by
a maximum-weight matching).  Non-membership is reported with a violated
degree or odd-set constraint when one exists within the search caps.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Sequence

import networkx as nx
import numpy as np

from .config_lp import PTAS_EPS, FractionalSolution, HighsMaster, price, repair_coverage, _INF
from .core import FEAS_EPS, Instance, classify, first_fit, validate_delta
from .errors import InputError, MembershipError, ParameterError, SolverError, UnsupportedDimensionError

log = logging.getLogger(__name__)

ODD_CAP = 7
ODD_SEARCH_MAX_VERTICES = 24
MLP_MAX_SEPARATIONS = 500
ODD_ROUNDS_BEFORE_BLOCK = 20
_TOL = 1e-9

Edge = tuple  # (i, j) with i < j


@dataclass(frozen=True)
class MatchingGraph:
    vertices: tuple          # large items, ascending
    edges: tuple             # sorted (i, j) pairs, i < j

    def __post_init__(self):
        edges = tuple(sorted(tuple(sorted(e)) for e in self.edges))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))

    @property
    def edge_index(self) -> dict:
        cached = self.__dict__.get("_ei")
        if cached is None:
            cached = {e: k for k, e in enumerate(self.edges)}
            object.__setattr__(self, "_ei", cached)
        return cached

    def neighbors(self, v: int) -> set:
        return {b if a == v else a for a, b in self.edges if v in (a, b)}

    def closed_neighborhood(self, v: int) -> set:
        return self.neighbors(v) | {v}

    def to_nx(self, weights: Sequence[float] | None = None, keep=None) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        for k, e in enumerate(self.edges):
            if keep is not None and not keep[k]:
                continue
            g.add_edge(*e, weight=1.0 if weights is None else float(weights[k]), key=k)
        return g

    def edge_of(self, conf) -> Edge | None:
        """The unique edge contained in ``conf``, if any."""
        big = [i for i in conf if i in self._vertex_set]
        if len(big) != 2:
            return None
        e = (big[0], big[1]) if big[0] < big[1] else (big[1], big[0])
        return e if e in self._edge_set else None

    @property
    def _vertex_set(self) -> frozenset:
        cached = self.__dict__.get("_vs")
        if cached is None:
            cached = frozenset(self.vertices)
            object.__setattr__(self, "_vs", cached)
        return cached

    @property
    def _edge_set(self) -> frozenset:
        cached = self.__dict__.get("_es")
        if cached is None:
            cached = frozenset(self.edges)
            object.__setattr__(self, "_es", cached)
        return cached

    @classmethod
    def from_edges(cls, edges: Sequence[Edge], vertices: Sequence[int] | None = None) -> "MatchingGraph":
        if vertices is None:
            vertices = sorted({v for e in edges for v in e})
        return cls(tuple(vertices), tuple(edges))


@dataclass(frozen=True)
class EdgeFractional:
    graph: MatchingGraph
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).reshape(len(self.graph.edges))
        if np.any(vals < -1e-12) or np.any(vals > 1 + 1e-12):
            raise InputError("edge values must lie in [0, 1]")
        object.__setattr__(self, "values", np.clip(vals, 0.0, 1.0))


@dataclass(frozen=True)
class MatchingDecomposition:
    """Convex combination of matchings (tuples of edges) with weights summing to one."""

    matchings: tuple
    weights: np.ndarray

    def reconstruct(self, graph: MatchingGraph) -> np.ndarray:
        idx = graph.edge_index
        out = np.zeros(len(graph.edges))
        for m, w in zip(self.matchings, self.weights):
            for e in m:
                out[idx[e]] += w
        return out


@dataclass(frozen=True)
class NotMember:
    """A violated constraint: ``kind`` is 'degree' (vertex) or 'odd-set' (vertex set)."""

    kind: str
    vertices: tuple
    lhs: float
    rhs: float


@dataclass(frozen=True)
class Undecided:
    """Membership not settled by degree/odd-set search within the caps.

    ``cut`` is a valid inequality ``sum_e coef_e p_e <= rhs`` for the matching
    polytope violated by the point, as (coef array, rhs), when one is known.
    """

    reason: str
    cut: tuple | None = None


def build_matching_graph(instance: Instance, delta: float) -> MatchingGraph:
    """Large items as vertices; an edge joins two large items forming a class-2 configuration."""
    if instance.d != 2:
        raise UnsupportedDimensionError("the matching graph is defined for d=2")
    cls = classify(instance, delta)
    if cls.huge:
        raise InputError(f"instance has delta-huge items {cls.huge[:5]}; split them off first")
    large = cls.large
    v = instance.volumes
    edges = []
    for a, b in itertools.combinations(large, 2):
        tot = v[a] + v[b]
        if np.all(tot <= 1.0 + FEAS_EPS) and np.all(tot > 1.0 - delta):
            edges.append((a, b))
    return MatchingGraph(tuple(large), tuple(edges))


def _nx_matching(graph: MatchingGraph, weights: np.ndarray, keep=None) -> list:
    g = graph.to_nx(weights, keep=keep if keep is not None else weights > 0)
    mate = nx.max_weight_matching(g, maxcardinality=False)
    return sorted(tuple(sorted(e)) for e in mate)


def max_weight_matching(graph: MatchingGraph, weights: Sequence[float], tie_break: str = "lex") -> list:
    """Maximum-weight matching (blossom algorithm); edges of nonpositive weight are never used.

    With ``tie_break='lex'`` the lexicographically smallest optimal edge list
    is returned, by fixing edges greedily in sorted order.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (len(graph.edges),):
        raise InputError("one weight per edge is required")
    best = _nx_matching(graph, w)
    if tie_break != "lex":
        return best
    idx = graph.edge_index
    target = sum(w[idx[e]] for e in best)
    tol = 1e-9 * max(1.0, abs(target))
    alive = w > 0
    chosen: list = []
    gained = 0.0
    for k, e in enumerate(graph.edges):
        if not alive[k]:
            continue
        trial = alive.copy()
        for kk, f in enumerate(graph.edges):
            if trial[kk] and (f[0] in e or f[1] in e):
                trial[kk] = False
        rest = _nx_matching(graph, w, keep=trial)
        if gained + w[k] + sum(w[idx[f]] for f in rest) >= target - tol:
            chosen.append(e)
            gained += w[k]
            alive = trial
        else:
            alive[k] = False
    return chosen


def is_matching(edges: Sequence[Edge]) -> bool:
    seen = set()
    for a, b in edges:
        if a in seen or b in seen or a == b:
            return False
        seen.update((a, b))
    return True


def _degree_violation(graph: MatchingGraph, p: np.ndarray) -> NotMember | None:
    deg: dict = {}
    for (a, b), val in zip(graph.edges, p):
        deg[a] = deg.get(a, 0.0) + val
        deg[b] = deg.get(b, 0.0) + val
    worst = max(deg.items(), key=lambda kv: (kv[1], -kv[0]), default=None)
    if worst is not None and worst[1] > 1.0 + _TOL:
        return NotMember("degree", (worst[0],), worst[1], 1.0)
    return None


def _connected_odd_sets(graph: MatchingGraph, keep: np.ndarray, cap: int):
    """Vertex sets of odd size 3..cap that induce a connected subgraph of the kept edges."""
    adj: dict = {}
    for k, (a, b) in enumerate(graph.edges):
        if keep[k]:
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
    seen = set()
    frontier = [frozenset((v,)) for v in sorted(adj)]
    for size in range(2, cap + 1):
        nxt = set()
        for s in frontier:
            low = min(s)
            for v in s:
                for u in adj[v]:
                    if u > low and u not in s:
                        nxt.add(s | {u})
        frontier = [s for s in nxt if s not in seen]
        seen.update(frontier)
        if size % 2 == 1:
            yield from sorted(frontier, key=lambda s: sorted(s))


def odd_set_violations(graph: MatchingGraph, p: np.ndarray, cap: int = ODD_CAP, limit: int | None = None) -> list:
    """All violated odd-set constraints on connected sets up to ``cap`` vertices, worst first."""
    keep = p > _TOL
    val = {e: p[k] for k, e in enumerate(graph.edges) if keep[k]}
    out = []
    for s in _connected_odd_sets(graph, keep, cap):
        mass = sum(val.get(pair, 0.0) for pair in itertools.combinations(sorted(s), 2))
        bound = (len(s) - 1) // 2
        if mass > bound + _TOL:
            out.append(NotMember("odd-set", tuple(sorted(s)), float(mass), float(bound)))
    out.sort(key=lambda c: (-(c.lhs - c.rhs), c.vertices))
    return out[:limit] if limit else out


def _greedy_decompose(graph: MatchingGraph, p: np.ndarray) -> MatchingDecomposition | None:
    residual = p.copy()
    left = 1.0
    mats, wts = [], []
    idx = graph.edge_index
    for _ in range(4 * len(graph.edges) + 4):
        keep = residual > 1e-12
        if not keep.any():
            break
        m = _nx_matching(graph, residual, keep=keep)
        covered = {v for e in m for v in e}
        deg: dict = {}
        for k, (a, b) in enumerate(graph.edges):
            if keep[k]:
                deg[a] = deg.get(a, 0.0) + residual[k]
                deg[b] = deg.get(b, 0.0) + residual[k]
        outside = max((d for v, d in deg.items() if v not in covered), default=0.0)
        coef = min(min(residual[idx[e]] for e in m), left - outside)
        if coef <= 1e-12:
            return None
        for e in m:
            residual[idx[e]] -= coef
        left -= coef
        mats.append(tuple(m))
        wts.append(coef)
    else:
        return None
    if np.any(np.abs(residual) > 1e-9) or left < -1e-9:
        return None
    if left > 1e-15:
        mats.append(())
        wts.append(left)
    return MatchingDecomposition(tuple(mats), np.array(wts))


def _lp_decompose(graph: MatchingGraph, p: np.ndarray, max_rounds: int = 2000):
    """Max total mass of a sub-convex combination of matchings dominated by p.

    Returns a decomposition when p is reached, otherwise the violated cut from
    the optimal duals.
    """
    edges = [k for k in range(len(graph.edges)) if p[k] > 1e-12]
    if not edges:
        return MatchingDecomposition(((),), np.array([1.0]))
    row_of = {k: r for r, k in enumerate(edges)}
    master = HighsMaster()
    master.add_rows(np.full(len(edges), -_INF), p[edges])
    conv = master.add_rows([-_INF], [1.0])

    def add(m) -> bool:
        ks = [graph.edge_index[e] for e in m]
        return master.add_column(tuple(m), [row_of[k] for k in ks] + [conv], cost=-float(len(m)))

    for k in edges:
        add((graph.edges[k],))
    keep = np.zeros(len(graph.edges), dtype=bool)
    keep[edges] = True
    for _ in range(max_rounds):
        val, x, y = master.solve()
        edge_duals = np.zeros(len(graph.edges))
        edge_duals[edges] = y[: len(edges)]
        conv_dual = y[conv]
        w = 1.0 + edge_duals
        m = _nx_matching(graph, w, keep=keep & (w > 1e-12))
        gain = sum(w[graph.edge_index[e]] for e in m)
        if gain <= -conv_dual + 1e-10 or not add(m):
            break
    else:
        raise SolverError("matching decomposition did not converge")
    total = -val
    if total >= p[edges].sum() - 1e-9:
        mats, wts = [], []
        for m, wt in zip(master.columns, x):
            if wt > 1e-13:
                mats.append(m)
                wts.append(float(wt))
        wts = np.array(wts)
        rec = MatchingDecomposition(tuple(mats), wts).reconstruct(graph)
        # absorb solver noise on the edges so the reconstruction is tight
        if np.max(np.abs(rec - p)) > 1e-7 or wts.sum() > 1 + 1e-9:
            raise SolverError("matching decomposition is not tight")
        left = 1.0 - wts.sum()
        if left > 1e-15:
            mats.append(())
            wts = np.append(wts, left)
        wts = wts / wts.sum() if wts.sum() > 1.0 else wts
        return MatchingDecomposition(tuple(mats), wts)
    u = -edge_duals  # >= 0
    coef = np.zeros(len(graph.edges))
    coef[edges] = 1.0 - u[edges]
    rhs = -conv_dual
    return Undecided("not a convex combination of matchings", (coef, float(rhs)))


def decompose(graph: MatchingGraph, p, odd_cap: int = ODD_CAP):
    """Convex decomposition of ``p`` into matchings, or a certificate that none exists.

    Returns :class:`MatchingDecomposition`, :class:`NotMember` or
    :class:`Undecided`.
    """
    vals = p.values if isinstance(p, EdgeFractional) else EdgeFractional(graph, p).values
    bad = _degree_violation(graph, vals)
    if bad is not None:
        return bad
    dec = _greedy_decompose(graph, vals)
    if dec is not None and np.max(np.abs(dec.reconstruct(graph) - vals), initial=0.0) <= 1e-9:
        return dec
    res = _lp_decompose(graph, vals)
    if isinstance(res, MatchingDecomposition):
        return res
    if len(graph.vertices) <= ODD_SEARCH_MAX_VERTICES:
        viol = odd_set_violations(graph, vals, cap=odd_cap, limit=1)
        if viol:
            return viol[0]
    return res


def shrink_decomposition(graph: MatchingGraph, mats: Sequence, weights: Sequence[float],
                         p) -> MatchingDecomposition | None:
    """Decompose ``p`` given matchings whose combination dominates it edgewise.

    Removing an edge from a matching keeps it a matching, so surplus on each
    edge is peeled off by splitting matchings that use it.
    """
    p = np.asarray(p, dtype=float)
    idx = graph.edge_index
    pairs = [(frozenset(m), float(w)) for m, w in zip(mats, weights) if w > 0]
    total = sum(w for _, w in pairs)
    if total > 1 + 1e-9:
        return None
    if total < 1:
        pairs.append((frozenset(), 1.0 - total))
    q = np.zeros(len(graph.edges))
    for m, w in pairs:
        for e in m:
            q[idx[e]] += w
    if np.any(p > q + 1e-8):
        return None
    for k, e in enumerate(graph.edges):
        surplus = q[k] - p[k]
        if surplus <= 0:
            continue
        nxt = []
        for m, w in pairs:
            if surplus > 0 and e in m:
                t = min(w, surplus)
                surplus -= t
                if w - t > 0:
                    nxt.append((m, w - t))
                nxt.append((m - {e}, t))
            else:
                nxt.append((m, w))
        pairs = nxt
    merged: dict = {}
    for m, w in pairs:
        key = tuple(sorted(m))
        merged[key] = merged.get(key, 0.0) + w
    keys = sorted(merged)
    dec = MatchingDecomposition(tuple(keys), np.array([merged[k] for k in keys]))
    if np.max(np.abs(dec.reconstruct(graph) - p), initial=0.0) > 1e-7:
        return None
    return dec


def sample_matching(p: EdgeFractional, gamma: float, rng: np.random.Generator,
                    decomposition: MatchingDecomposition | None = None) -> list:
    """Random matching with Pr(e in M) = (1 - gamma) p_e.

    Draws one matching of the convex decomposition by weight, then drops each
    of its edges independently with probability ``gamma``.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma must lie in [0, 1], got {gamma}")
    dec = decomposition if decomposition is not None else decompose(p.graph, p)
    if not isinstance(dec, MatchingDecomposition):
        raise MembershipError(f"point is not in the matching polytope: {dec}")
    w = np.asarray(dec.weights, dtype=float)
    m = dec.matchings[int(rng.choice(len(w), p=w / w.sum()))]
    keep = rng.random(len(m)) >= gamma
    return [e for e, k in zip(m, keep) if k]


@dataclass
class MLPResult:
    x: FractionalSolution
    value: float
    graph: MatchingGraph
    projection: np.ndarray
    decomposition: MatchingDecomposition | None
    status: str  # "verified" or "unverified"
    rounds: int = 0
    cuts: list = field(default_factory=list)


class _MLPMaster:
    """Coverage rows, degree rows, lazy odd-set cuts and an optional matching block.

    The matching block adds one row per edge, sum_{C containing e} x_C <=
    sum_M mu_M [e in M], and a convexity row sum_M mu_M <= 1, with matching
    columns mu_M priced by maximum-weight matching.
    """

    def __init__(self, instance: Instance, graph: MatchingGraph):
        self.instance = instance
        self.graph = graph
        self.master = HighsMaster()
        self.master.add_rows(np.ones(instance.n), np.full(instance.n, _INF))
        self.deg_row = {}
        first = self.master.add_rows(np.full(len(graph.vertices), -_INF), np.ones(len(graph.vertices)))
        for r, v in enumerate(graph.vertices):
            self.deg_row[v] = first + r
        self.cuts: list = []      # (coef per edge index, rhs, row)
        self.col_edge: list = []  # edge index, -1 (no edge) or -2 (matching column) per column
        self.link_row: list | None = None
        self.conv_row = -1

    def _rows(self, conf):
        e = self.graph.edge_of(conf)
        rows, vals = list(conf), [1.0] * len(conf)
        k = -1
        if e is not None:
            k = self.graph.edge_index[e]
            rows += [self.deg_row[e[0]], self.deg_row[e[1]]]
            vals += [1.0, 1.0]
            for coef, _, row in self.cuts:
                if coef[k] != 0.0:
                    rows.append(row)
                    vals.append(coef[k])
            if self.link_row is not None:
                rows.append(self.link_row[k])
                vals.append(1.0)
        return rows, vals, k

    def add(self, conf) -> bool:
        conf = tuple(sorted(conf))
        if conf in self.master.index:
            return False
        rows, vals, k = self._rows(conf)
        self.master.add_column(conf, rows, vals)
        self.col_edge.append(k)
        return True

    def add_cut(self, coef: np.ndarray, rhs: float):
        cols, vals = [], []
        for c, k in enumerate(self.col_edge):
            if k >= 0 and coef[k] != 0.0:
                cols.append(c)
                vals.append(coef[k])
        row = self.master.add_row(-_INF, rhs, cols, vals)
        self.cuts.append((coef, rhs, row))

    def enable_block(self):
        if self.link_row is not None:
            return
        self.link_row = []
        for k in range(len(self.graph.edges)):
            cols = [c for c, kk in enumerate(self.col_edge) if kk == k]
            self.link_row.append(self.master.add_row(-_INF, 0.0, cols, [1.0] * len(cols)))
        self.conv_row = self.master.add_row(-_INF, 1.0, [], [])

    def add_matching(self, m) -> bool:
        key = ("matching", tuple(sorted(m)))
        if key in self.master.index:
            return False
        rows = [self.link_row[self.graph.edge_index[e]] for e in key[1]] + [self.conv_row]
        vals = [-1.0] * len(key[1]) + [1.0]
        self.master.add_column(key, rows, vals, cost=0.0)
        self.col_edge.append(-2)
        return True

    def price_matching(self, y: np.ndarray) -> bool:
        """Add the maximum-weight matching under the link duals if its reduced cost is negative."""
        w = np.array([-y[r] for r in self.link_row])
        if not np.any(w > _TOL):
            return False
        m = max_weight_matching(self.graph, w, tie_break="none")
        gain = sum(w[self.graph.edge_index[e]] for e in m)
        return gain > -y[self.conv_row] + 1e-9 and self.add_matching(m)

    def matching_weights(self, x: np.ndarray) -> tuple[list, list]:
        mats, wts = [], []
        for key, val in zip(self.master.columns, x):
            if isinstance(key[0], str) and val > 1e-13:
                mats.append(key[1])
                wts.append(float(val))
        return mats, wts

    def edge_duals(self, y: np.ndarray) -> np.ndarray:
        """beta_e: degree, cut and link duals folded onto each edge (nonnegative)."""
        beta = np.zeros(len(self.graph.edges))
        for k, (a, b) in enumerate(self.graph.edges):
            beta[k] = -y[self.deg_row[a]] - y[self.deg_row[b]]
            for coef, _, row in self.cuts:
                beta[k] += -y[row] * coef[k]
            if self.link_row is not None:
                beta[k] += -y[self.link_row[k]]
        return np.maximum(beta, 0.0)


def mlp_column_generation(instance: Instance, delta: float, pricer: str = "exact",
                          odd_cap: int = ODD_CAP, eps: float = PTAS_EPS) -> MLPResult:
    """Matching configuration LP by column generation with lazy polytope cuts.

    Pricing follows three column families: small items only; one large item
    j plus items outside its closed neighbourhood; an edge e plus small
    items, charged against the edge dual.
    """
    validate_delta(delta)
    graph = build_matching_graph(instance, delta)
    n = instance.n
    if n == 0:
        return MLPResult(FractionalSolution(()), 0.0, graph, np.zeros(0), MatchingDecomposition(((),), np.ones(1)),
                         "verified")
    cls = classify(instance, delta)
    large = cls.large
    small = [i for i in range(n) if not cls.is_large[i]]
    mm = _MLPMaster(instance, graph)
    for b in first_fit(instance).bins:
        mm.add(b)
    for i in range(n):
        mm.add((i,))
    theta = 1.0 + delta ** 2 / 2.0
    v = instance.volumes
    lam = np.zeros(n)
    outside = {j: [i for i in range(n) if i not in graph.closed_neighborhood(j)] for j in large}
    rounds = 0
    status = "unverified"
    cuts_added: list = []
    mats: list = []
    wts: list = []
    for sep in range(MLP_MAX_SEPARATIONS):
        while True:
            rounds += 1
            if rounds > 10_000:
                raise SolverError("MLP column generation hit its round cap")
            z, x, y = mm.master.solve()
            lam[:] = np.maximum(y[:n], 0.0)
            beta = mm.edge_duals(y)
            added = 0
            for greedy_only in (True, False):
                new = []
                cols, _ = price(instance, small, lam, None, theta, pricer, greedy_only=greedy_only, eps=eps)
                new += cols
                for j in large:
                    budget = np.clip(1.0 - v[j], 0.0, 1.0)
                    cols, _ = price(instance, outside[j], lam, budget, theta, pricer, base=lam[j],
                                    greedy_only=greedy_only, eps=eps)
                    new += [tuple(sorted(c + (j,))) for c in cols]
                for k, (a, b) in enumerate(graph.edges):
                    budget = np.clip(1.0 - v[a] - v[b], 0.0, 1.0)
                    limit = theta * (1.0 + beta[k])
                    cols, _ = price(instance, small, lam, budget, limit, pricer, base=lam[a] + lam[b],
                                    greedy_only=greedy_only, eps=eps)
                    new += [tuple(sorted(c + (a, b))) for c in cols]
                added = sum(mm.add(c) for c in new)
                if mm.link_row is not None and mm.price_matching(y):
                    added += 1
                if added:
                    break
            if not added:
                break
        raw = {}
        for conf, w in zip(mm.master.columns, x):
            if w > 1e-12 and not isinstance(conf[0], str):
                raw[conf] = raw.get(conf, 0.0) + float(w)
        p = FractionalSolution.from_dict(raw).edge_projection(graph.edges)
        if mm.link_row is not None:
            # p is dominated by a convex combination of matching columns
            mats, wts = mm.matching_weights(x)
            if shrink_decomposition(graph, mats, wts, np.clip(p, 0.0, 1.0)) is not None:
                status = "verified"
                break
        viol = []
        if len(graph.vertices) <= ODD_SEARCH_MAX_VERTICES:
            viol = odd_set_violations(graph, p, cap=odd_cap, limit=20)
        if viol and sep < ODD_ROUNDS_BEFORE_BLOCK:
            for c in viol:
                coef = np.array([1.0 if (a in c.vertices and b in c.vertices) else 0.0 for a, b in graph.edges])
                mm.add_cut(coef, c.rhs)
                cuts_added.append(c)
            continue
        if mm.link_row is None:
            res = decompose(graph, np.clip(p, 0.0, 1.0), odd_cap=odd_cap)
            if isinstance(res, MatchingDecomposition):
                status = "verified"
                break
            if isinstance(res, NotMember) and sep < ODD_ROUNDS_BEFORE_BLOCK:
                coef = np.array([1.0 if (a in res.vertices and b in res.vertices) else 0.0 for a, b in graph.edges])
                mm.add_cut(coef, res.rhs)
                cuts_added.append(res)
                continue
            # no small odd-set certificate: switch to matching columns
            mm.enable_block()
            continue
        break
    else:
        log.warning("MLP separation cap reached; membership unverified")

    fixed = repair_coverage(raw, np.ones(n))
    xs = FractionalSolution.from_dict(fixed)
    proj = xs.edge_projection(graph.edges)
    dec = None
    if mm.link_row is not None:
        dec = shrink_decomposition(graph, mats, wts, np.clip(proj, 0.0, 1.0))
    if dec is None:
        dec = decompose(graph, np.clip(proj, 0.0, 1.0), odd_cap=odd_cap)
    if not isinstance(dec, MatchingDecomposition):
        status, dec = "unverified", None
    return MLPResult(xs, xs.norm, graph, proj, dec, status, rounds, cuts_added)


def solve_mlp(instance: Instance, delta: float, pricer: str = "exact",
              eps: float = PTAS_EPS) -> tuple[FractionalSolution, float]:
    res = mlp_column_generation(instance, delta, pricer=pricer, eps=eps)
    return res.x, res.value
