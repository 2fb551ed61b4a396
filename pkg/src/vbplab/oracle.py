"""Exact ground truth for small instances.

Everything here works by brute-force enumeration over bitmasks and is
deliberately independent of the column-generation code it is used to check.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.optimize import linprog

from .core import FEAS_EPS, Instance, Packing
from .errors import CapacityError, InputError, SolverError

OPT_CAP = 16
LP_CAP = 12
MLP_CAP = 10
MLP_LARGE_CAP = 8
BNB_CAP = 12


def subset_volumes(instance: Instance) -> np.ndarray:
    """(2^n, d) array: row ``mask`` holds the volume of the items in ``mask``."""
    vol = np.zeros((1, instance.d))
    for i in range(instance.n):
        vol = np.vstack([vol, vol + instance.volumes[i]])
    return vol


def feasible_masks(instance: Instance) -> np.ndarray:
    """Bitmasks of all nonempty configurations, ascending."""
    vol = subset_volumes(instance)
    ok = np.all(vol <= 1.0 + FEAS_EPS, axis=1)
    ok[0] = False
    return np.flatnonzero(ok)


def _bits(mask: int) -> tuple:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def exact_opt(instance: Instance) -> tuple[int, Packing]:
    """Minimum number of bins, by dynamic programming over item subsets.

    f(S) = 1 + min f(S \\ C) over configurations C inside S that contain the
    lowest item of S.
    """
    n = instance.n
    if n > OPT_CAP:
        raise CapacityError(f"exact_opt handles n <= {OPT_CAP}, got {n}")
    if n == 0:
        return 0, Packing((), frozenset())
    masks = feasible_masks(instance)
    low = np.array([(int(m) & -int(m)).bit_length() - 1 for m in masks])
    by_low = [masks[low == i] for i in range(n)]
    full = (1 << n) - 1
    f = np.full(full + 1, n + 1, dtype=np.int64)
    choice = np.zeros(full + 1, dtype=np.int64)
    f[0] = 0
    for s in range(1, full + 1):
        i = (s & -s).bit_length() - 1
        cands = by_low[i]
        cands = cands[(cands & ~s) == 0]
        vals = f[s ^ cands]
        k = int(np.argmin(vals))
        f[s] = vals[k] + 1
        choice[s] = cands[k]
    bins = []
    s = full
    while s:
        c = int(choice[s])
        bins.append(_bits(c))
        s ^= c
    return int(f[full]), Packing(tuple(bins), frozenset(range(n)))


def exact_opt_bnb(instance: Instance) -> int:
    """Minimum number of bins by branch and bound (cross-check for :func:`exact_opt`)."""
    n = instance.n
    if n > BNB_CAP:
        raise CapacityError(f"exact_opt_bnb handles n <= {BNB_CAP}, got {n}")
    if n == 0:
        return 0
    v = instance.volumes
    order = sorted(range(n), key=lambda i: (-v[i].max(), i))
    lb = int(math.ceil(v.sum(axis=0).max() - FEAS_EPS))
    best = n

    def go(k: int, loads: list):
        nonlocal best
        if len(loads) >= best:
            return
        if k == n:
            best = len(loads)
            return
        vi = v[order[k]]
        seen = set()
        for b in range(len(loads)):
            key = tuple(np.round(loads[b], 12))
            if key in seen:
                continue
            seen.add(key)
            new = loads[b] + vi
            if np.all(new <= 1.0 + FEAS_EPS):
                loads[b] = new
                go(k + 1, loads)
                loads[b] = new - vi
                if best <= lb:
                    return
        loads.append(vi.copy())
        go(k + 1, loads)
        loads.pop()

    go(0, [])
    return best


def _demand(instance: Instance, demand) -> np.ndarray:
    if demand is None:
        return np.ones(instance.n)
    if isinstance(demand, (set, frozenset)):
        out = np.zeros(instance.n)
        out[list(demand)] = 1.0
        return out
    out = np.asarray(demand, dtype=float)
    if out.shape != (instance.n,) or np.any(out < 0) or np.any(out > 1):
        raise InputError("demand must be a vector in [0, 1]^n")
    return out


def _incidence(masks: np.ndarray, n: int) -> np.ndarray:
    return ((masks[None, :] >> np.arange(n)[:, None]) & 1).astype(float)


def exact_config_lp(instance: Instance, demand=None) -> float:
    """Optimum of the configuration LP over every feasible configuration (coverage equalities)."""
    n = instance.n
    if n > LP_CAP:
        raise CapacityError(f"exact_config_lp handles n <= {LP_CAP}, got {n}")
    dem = _demand(instance, demand)
    if n == 0 or not dem.any():
        return 0.0
    masks = feasible_masks(instance)
    a = _incidence(masks, n)
    res = linprog(np.ones(len(masks)), A_eq=a, b_eq=dem, bounds=(0, None), method="highs")
    if res.status != 0:
        raise SolverError(f"exact configuration LP failed: {res.message}")
    return float(res.fun)


def all_matchings(edges: list) -> list:
    """Every matching (including the empty one) of the graph with the given edge list."""
    out = []

    def go(k: int, used: frozenset, cur: tuple):
        if k == len(edges):
            out.append(cur)
            return
        go(k + 1, used, cur)
        a, b = edges[k]
        if a not in used and b not in used:
            go(k + 1, used | {a, b}, cur + (edges[k],))

    go(0, frozenset(), ())
    return out


def in_matching_polytope(edges: list, p) -> bool:
    """Exact membership test: is ``p`` a convex combination of matchings?"""
    p = np.asarray(p, dtype=float)
    mats = all_matchings(list(edges))
    a = np.zeros((len(edges) + 1, len(mats)))
    for c, m in enumerate(mats):
        for e in m:
            a[edges.index(e), c] = 1.0
    a[-1] = 1.0
    res = linprog(np.zeros(len(mats)), A_eq=a, b_eq=np.append(p, 1.0), bounds=(0, None), method="highs")
    return res.status == 0


def _large_and_edges(instance: Instance, delta: float) -> tuple[list, list]:
    v = instance.volumes
    large = [i for i in range(instance.n) if (v[i] > delta).any()]
    if any((v[i] >= 1.0 - delta).all() for i in large):
        raise InputError("exact_mlp needs a huge-free instance")
    edges = []
    for a, b in itertools.combinations(large, 2):
        s = v[a] + v[b]
        if (s <= 1.0 + FEAS_EPS).all() and (s > 1.0 - delta).all():
            edges.append((a, b))
    return large, edges


def exact_mlp(instance: Instance, delta: float) -> float:
    """Optimum of the matching configuration LP by full enumeration.

    Variables: one per configuration plus one convex weight per matching;
    the edge projection of x must equal the combination of matchings.
    """
    n = instance.n
    if instance.d != 2:
        raise InputError("exact_mlp is defined for d=2")
    if n > MLP_CAP:
        raise CapacityError(f"exact_mlp handles n <= {MLP_CAP}, got {n}")
    if n == 0:
        return 0.0
    large, edges = _large_and_edges(instance, delta)
    if len(large) > MLP_LARGE_CAP:
        raise CapacityError(f"exact_mlp handles at most {MLP_LARGE_CAP} large items, got {len(large)}")
    masks = feasible_masks(instance)
    mats = all_matchings(edges)
    nc, nm = len(masks), len(mats)
    cover = np.hstack([_incidence(masks, n), np.zeros((n, nm))])
    proj = np.zeros((len(edges), nc + nm))
    for k, (a, b) in enumerate(edges):
        pair = (1 << a) | (1 << b)
        proj[k, :nc] = ((masks & pair) == pair).astype(float)
    for c, m in enumerate(mats):
        for e in m:
            proj[edges.index(e), nc + c] = -1.0
    conv = np.zeros((1, nc + nm))
    conv[0, nc:] = 1.0
    a_eq = np.vstack([cover, proj, conv])
    b_eq = np.concatenate([np.ones(n), np.zeros(len(edges)), [1.0]])
    cost = np.concatenate([np.ones(nc), np.zeros(nm)])
    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        raise SolverError(f"exact MLP failed: {res.message}")
    return float(res.fun)
