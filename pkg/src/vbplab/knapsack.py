"""d-dimensional 0/1 knapsack solvers used for column pricing.

Four solvers share the :class:`KnapsackProblem` input:

* :func:`knapsack_approx` -- anchor enumeration + LP vertex rounding for
  d >= 2, profit-scaling dynamic program for d = 1.
* :func:`knapsack_exact` -- branch and bound, the reference for tests.
* :func:`knapsack_milp` -- exact, via the HiGHS MIP solver; fast enough for
  a few hundred candidates, which is what column generation needs.
  :func:`knapsack_above` answers the pricing question (is anything above a
  target?) and usually stops on the dual bound before optimality.
* :func:`knapsack_greedy` -- several density-greedy packings, no guarantee.

Items with nonpositive profit are never selected.  Among optimal sets the
exact solver returns the lexicographically smallest sorted index tuple.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linprog, milp

from .core import FEAS_EPS, Instance
from .errors import CapacityError, InputError, ParameterError, SolverError

EXACT_CAP = 22
_TIE = 1e-12


@dataclass(frozen=True, eq=False)
class KnapsackProblem:
    items: tuple           # original item ids, ascending
    volumes: np.ndarray    # (m, d)
    profits: np.ndarray    # (m,)
    budget: np.ndarray     # (d,)

    def __post_init__(self):
        bud = np.asarray(self.budget, dtype=float).reshape(-1)
        vol = np.asarray(self.volumes, dtype=float).reshape(len(self.items), -1 if self.items else bud.size)
        prof = np.asarray(self.profits, dtype=float).reshape(len(self.items))
        if np.any(prof < 0):
            raise InputError("knapsack profits must be nonnegative")
        if np.any(bud < -FEAS_EPS) or np.any(bud > 1.0 + FEAS_EPS):
            raise InputError(f"budget coordinates must lie in [0, 1], got {bud.tolist()}")
        if vol.shape[0] and vol.shape[1] != bud.size:
            raise InputError("budget dimension does not match the volumes")
        object.__setattr__(self, "volumes", vol)
        object.__setattr__(self, "profits", prof)
        object.__setattr__(self, "budget", bud)

    @classmethod
    def over(cls, instance: Instance, candidates: Iterable[int], profits, budget=None) -> "KnapsackProblem":
        """Build a problem on a subset of ``instance``; ``profits`` is indexed by item id."""
        cand = tuple(sorted(instance.check_indices(candidates)))
        if isinstance(profits, Mapping):
            prof = np.array([profits.get(i, 0.0) for i in cand], dtype=float)
        else:
            prof = np.asarray(profits, dtype=float)[list(cand)] if cand else np.zeros(0)
        bud = np.ones(instance.d) if budget is None else np.clip(np.asarray(budget, dtype=float), 0.0, 1.0)
        vol = instance.volumes[list(cand)] if cand else np.zeros((0, instance.d))
        return cls(cand, vol, prof, bud)

    @property
    def m(self) -> int:
        return len(self.items)

    @property
    def d(self) -> int:
        return self.budget.size

    def fits(self, local: Sequence[int]) -> bool:
        if not len(local):
            return True
        return bool(np.all(self.volumes[list(local)].sum(axis=0) <= self.budget + FEAS_EPS))

    def profit(self, local: Sequence[int]) -> float:
        return float(sum(self.profits[j] for j in local))

    def _result(self, local: Iterable[int]) -> tuple[tuple, float]:
        local = sorted(local)
        return tuple(self.items[j] for j in local), self.profit(local)


def _useful(problem: KnapsackProblem) -> list[int]:
    """Local indices with positive profit that fit on their own."""
    ok = (problem.profits > 0) & np.all(problem.volumes <= problem.budget + FEAS_EPS, axis=1)
    return [int(j) for j in np.flatnonzero(ok)]


def _better(p: float, key: tuple, best_p: float, best_key: tuple) -> bool:
    if p > best_p + _TIE:
        return True
    return abs(p - best_p) <= _TIE and key < best_key


def fractional_bound(problem: KnapsackProblem) -> float:
    """Upper bound on the optimum: the smallest single-dimension fractional knapsack value."""
    cand = _useful(problem)
    if not cand:
        return 0.0
    vol = problem.volumes[cand]
    prof = problem.profits[cand]
    best = math.inf
    for t in range(problem.d):
        w = vol[:, t]
        free = w <= 0
        total = prof[free].sum()
        w, p = w[~free], prof[~free]
        order = np.argsort(-(p / w), kind="stable")
        cum = np.cumsum(w[order])
        room = problem.budget[t] + FEAS_EPS
        k = int(np.searchsorted(cum, room, side="right"))
        total += p[order[:k]].sum()
        if k < len(order):
            prev = cum[k - 1] if k else 0.0
            total += p[order[k]] * (room - prev) / w[order[k]]
        best = min(best, total)
    return float(best)


def knapsack_exact(problem: KnapsackProblem, cap: int = EXACT_CAP) -> tuple[tuple, float]:
    """Exact optimum by depth-first branch and bound.

    The bound is the smallest of the per-dimension fractional knapsack
    bounds, each of which relaxes all other dimensions.
    """
    if problem.m > cap:
        raise CapacityError(f"{problem.m} candidates exceed the exact knapsack cap {cap}")
    cand = _useful(problem)
    if not cand:
        return (), 0.0
    vol = problem.volumes[cand]
    prof = problem.profits[cand]
    bud = problem.budget + FEAS_EPS
    m, d = vol.shape
    # density order per dimension for the fractional bounds
    orders = []
    for t in range(d):
        dens = np.where(vol[:, t] > 0, prof / np.maximum(vol[:, t], 1e-300), np.inf)
        orders.append(sorted(range(m), key=lambda j: -dens[j]))

    def bound(depth: int, cur: float, room: np.ndarray) -> float:
        best = math.inf
        for t in range(d):
            cap_t = room[t]
            total = cur
            for j in orders[t]:
                if j < depth:
                    continue
                w = vol[j, t]
                if w <= cap_t:
                    cap_t -= w
                    total += prof[j]
                else:
                    total += prof[j] * cap_t / w
                    break
            best = min(best, total)
        return best

    best_p = 0.0
    best_key: tuple = ()
    chosen: list[int] = []

    def dfs(depth: int, cur: float, room: np.ndarray):
        nonlocal best_p, best_key
        key = tuple(cand[j] for j in chosen)
        if _better(cur, key, best_p, best_key):
            best_p, best_key = cur, key
        if depth == m:
            return
        if bound(depth, cur, room) < best_p - _TIE:
            return
        if np.all(vol[depth] <= room):
            chosen.append(depth)
            dfs(depth + 1, cur + prof[depth], room - vol[depth])
            chosen.pop()
        dfs(depth + 1, cur, room)

    dfs(0, 0.0, bud.copy())
    return problem._result(best_key)


def _milp(problem: KnapsackProblem, cand: list[int], gap: float) -> tuple[list[int], float]:
    """Solve over ``cand``; returns (chosen indices, upper bound on the optimum)."""
    vol = problem.volumes[cand]
    prof = problem.profits[cand]
    rhs = problem.budget + FEAS_EPS / 2
    bound = None
    # HiGHS tolerates ~1e-6 row violation; tighten the row by the excess and retry
    for _ in range(4):
        res = milp(
            -prof,
            constraints=LinearConstraint(vol.T, -np.inf, rhs),
            integrality=np.ones(len(cand)),
            bounds=Bounds(0, 1),
            options={"mip_rel_gap": gap},
        )
        if res.x is None:
            raise SolverError(f"knapsack MIP failed: {res.message}")
        if bound is None:
            bound = -float(res.mip_dual_bound) if res.mip_dual_bound is not None else math.inf
        local = [cand[j] for j in np.flatnonzero(res.x > 0.5)]
        if problem.fits(local):
            return local, bound
        excess = problem.volumes[local].sum(axis=0) - problem.budget
        rhs = rhs - np.maximum(excess, 0.0) - 1e-7
    raise SolverError("knapsack MIP returned an over-budget set")


def knapsack_milp(problem: KnapsackProblem) -> tuple[tuple, float]:
    """Exact optimum through HiGHS branch and cut."""
    cand = _useful(problem)
    if not cand:
        return (), 0.0
    local, _ = _milp(problem, cand, 1e-9)
    return problem._result(local)


def knapsack_above(problem: KnapsackProblem, target: float, gap: float = 4e-3) -> tuple[tuple, float] | None:
    """A feasible set with profit above ``target``, or None if none exists.

    Runs branch and cut with a loose gap first; the dual bound usually
    settles the question without proving optimality.
    """
    cand = _useful(problem)
    if not cand:
        return None if target >= 0 else ((), 0.0)
    local, bound = _milp(problem, cand, gap)
    conf, val = problem._result(local)
    if val > target:
        return conf, val
    if bound <= target:
        return None
    conf, val = knapsack_milp(problem)
    return (conf, val) if val > target else None


def _fptas_1d(problem: KnapsackProblem, cand: list[int], eps: float) -> list[int]:
    prof = problem.profits[cand]
    size = problem.volumes[cand, 0]
    m = len(cand)
    scale = eps * prof.max() / m
    scaled = np.floor(prof / scale).astype(np.int64)
    top = int(scaled.sum())
    INF = math.inf
    # min size to reach each scaled profit using a prefix of the items
    best = [0.0] + [INF] * top
    take = np.zeros((m, top + 1), dtype=bool)
    for j in range(m):
        pj, wj = int(scaled[j]), size[j]
        if pj == 0:
            continue
        for q in range(top, pj - 1, -1):
            cand_w = best[q - pj] + wj
            if cand_w < best[q]:
                best[q] = cand_w
                take[j, q] = True
    cap = problem.budget[0] + FEAS_EPS
    q = max(q for q in range(top + 1) if best[q] <= cap)
    chosen = []
    for j in range(m - 1, -1, -1):
        if q > 0 and take[j, q]:
            chosen.append(cand[j])
            q -= int(scaled[j])
    return sorted(chosen)


def _lp_round(problem: KnapsackProblem, anchor: tuple, rest: list[int]) -> list[int]:
    """Integral part of a vertex of the LP relaxation on ``rest`` with the residual budget."""
    room = problem.budget - (problem.volumes[list(anchor)].sum(axis=0) if anchor else 0.0)
    if not rest:
        return []
    vol = problem.volumes[rest]
    res = linprog(
        -problem.profits[rest],
        A_ub=vol.T,
        b_ub=np.maximum(room, 0.0) + FEAS_EPS / 2,
        bounds=(0, 1),
        method="highs-ds",
    )
    if res.x is None:
        raise SolverError(f"knapsack LP relaxation failed: {res.message}")
    return [rest[j] for j in np.flatnonzero(res.x >= 1.0 - 1e-9)]


def _greedy_fill(problem: KnapsackProblem, chosen: list[int], pool: Iterable[int]) -> list[int]:
    room = problem.budget + FEAS_EPS - (problem.volumes[chosen].sum(axis=0) if chosen else 0.0)
    out = list(chosen)
    taken = set(chosen)
    for j in sorted(pool, key=lambda j: (-problem.profits[j], j)):
        if j in taken:
            continue
        if np.all(problem.volumes[j] <= room):
            room = room - problem.volumes[j]
            out.append(j)
            taken.add(j)
    return sorted(out)


def knapsack_approx(problem: KnapsackProblem, eps: float, max_anchor: int | None = None) -> tuple[tuple, float]:
    """(1 - eps)-approximate knapsack.

    d = 1 uses the profit-scaling dynamic program.  For d >= 2 every anchor
    set of at most ``ceil(d / eps)`` items is tried; the items no more
    profitable than the cheapest anchor are packed by the integral part of an
    LP vertex (at most d fractional variables are dropped), then topped up
    greedily.  ``max_anchor`` caps the anchor size, trading the guarantee for
    speed.
    """
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    cand = _useful(problem)
    if not cand:
        return (), 0.0
    if problem.d == 1:
        return problem._result(_fptas_1d(problem, cand, eps))
    q = math.ceil(problem.d / eps)
    if max_anchor is not None:
        q = min(q, max_anchor)
    q = min(q, len(cand))
    best_key: tuple = ()
    best_p = 0.0
    for size in range(1, q + 1):
        for anchor in itertools.combinations(cand, size):
            if not problem.fits(anchor):
                continue
            floor_p = min(problem.profits[j] for j in anchor)
            rest = [j for j in cand if j not in anchor and problem.profits[j] <= floor_p]
            local = sorted(anchor + tuple(_lp_round(problem, anchor, rest)))
            local = _greedy_fill(problem, local, rest)
            p = problem.profit(local)
            key = tuple(problem.items[j] for j in local)
            if _better(p, key, best_p, best_key):
                best_p, best_key = p, key
    local = [problem.items.index(i) for i in best_key]
    return problem._result(local)


def knapsack_greedy(problem: KnapsackProblem, starts: int = 6) -> list[tuple]:
    """Density-greedy packings (three density measures, a few forced first items).

    Returns distinct feasible item-id tuples; no optimality guarantee.
    """
    cand = _useful(problem)
    if not cand:
        return []
    vol = problem.volumes[cand]
    prof = problem.profits[cand]
    room0 = problem.budget + FEAS_EPS
    keys = (
        prof / np.maximum(vol.sum(axis=1), 1e-12),
        prof / np.maximum(vol.max(axis=1), 1e-12),
        prof,
    )
    found = set()
    out = []
    for key in keys:
        order = np.argsort(-key, kind="stable")
        for s in range(min(starts, len(order))):
            first = order[s]
            room = room0 - vol[first]
            sel = [first]
            for j in order:
                if j == first:
                    continue
                if np.all(vol[j] <= room):
                    room = room - vol[j]
                    sel.append(j)
            conf = tuple(sorted(problem.items[cand[j]] for j in sel))
            if conf not in found:
                found.add(conf)
                out.append(conf)
    return out
