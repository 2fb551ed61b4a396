"""Configuration LP over a demand vector, solved by column generation.

The restricted master keeps covering rows ``sum_C x_C C(i) >= d_i`` for the
items of positive demand.  Its duals price new columns through a knapsack
over those items.  Column generation stops once no configuration has dual
value above ``1 + delta**2 / 2``; by LP duality the master value is then
within that factor of the optimum (when the certifying pricer is exact).
Over-covered items are finally split off configurations so that coverage
equals demand exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import highspy
import numpy as np

from .core import FEAS_EPS, Configuration, Instance, first_fit, validate_delta
from .errors import EmptyDistributionError, InputError, SolverError
from .knapsack import KnapsackProblem, fractional_bound, knapsack_approx, knapsack_exact, knapsack_above, knapsack_greedy

log = logging.getLogger(__name__)

MAX_ROUNDS = 10_000
STALL_ROUNDS = 200
PTAS_EPS = 1.0 / 8.0
PTAS_ANCHOR = 3
_INF = highspy.kHighsInf


@dataclass(frozen=True)
class FractionalSolution:
    """Sparse nonnegative weights on configurations, columns sorted."""

    weights: tuple  # tuple of (configuration, weight) pairs, sorted by configuration

    @classmethod
    def from_dict(cls, mapping: Mapping[Configuration, float], drop: float = 0.0) -> "FractionalSolution":
        pairs = []
        for conf, w in mapping.items():
            if w < 0:
                raise InputError(f"negative weight {w} on {conf}")
            if w > drop:
                pairs.append((tuple(sorted(conf)), float(w)))
        pairs.sort()
        return cls(tuple(pairs))

    @property
    def norm(self) -> float:
        return float(sum(w for _, w in self.weights))

    @property
    def support(self) -> list:
        return [c for c, _ in self.weights]

    def as_dict(self) -> dict:
        return dict(self.weights)

    def __len__(self) -> int:
        return len(self.weights)

    def coverage(self, n: int) -> np.ndarray:
        cov = np.zeros(n)
        for conf, w in self.weights:
            for i in conf:
                cov[i] += w
        return cov

    def edge_projection(self, edges: Sequence[tuple]) -> np.ndarray:
        """Mass of configurations containing each edge."""
        pos = {e: k for k, e in enumerate(edges)}
        out = np.zeros(len(edges))
        for conf, w in self.weights:
            s = set(conf)
            for e in pos:
                if e[0] in s and e[1] in s:
                    out[pos[e]] += w
        return out


def as_demand(instance: Instance, demand) -> np.ndarray:
    """Accept a demand array, an ``{item: demand}`` map, or a set of items (unit demand)."""
    n = instance.n
    if demand is None:
        return np.ones(n)
    if isinstance(demand, (set, frozenset)):
        vec = np.zeros(n)
        vec[instance.check_indices(demand)] = 1.0
        return vec
    if isinstance(demand, Mapping):
        vec = np.zeros(n)
        for i, val in demand.items():
            vec[instance.check_indices([i])[0]] = val
    else:
        vec = np.asarray(demand, dtype=float)
        if vec.shape != (n,):
            raise InputError(f"demand must have length {n}, got shape {vec.shape}")
    if np.any(vec < 0) or np.any(vec > 1) or not np.all(np.isfinite(vec)):
        raise InputError("demand entries must lie in [0, 1]")
    return vec.astype(float)


def indicator(n: int, items: Iterable[int]) -> np.ndarray:
    vec = np.zeros(n)
    vec[list(items)] = 1.0
    return vec


class HighsMaster:
    """Restricted master LP ``min c.x, x >= 0`` with incremental rows and columns (warm re-solves)."""

    def __init__(self):
        self.h = highspy.Highs()
        self.h.setOptionValue("output_flag", False)
        self.h.setOptionValue("threads", 1)
        self.h.setOptionValue("primal_feasibility_tolerance", 1e-10)
        self.h.setOptionValue("dual_feasibility_tolerance", 1e-10)
        self.n_rows = 0
        self.columns: list = []
        self.index: dict = {}

    def add_rows(self, lower: Sequence[float], upper: Sequence[float]) -> int:
        k = len(lower)
        first = self.n_rows
        if k:
            self.h.addRows(k, np.asarray(lower, float), np.asarray(upper, float), 0,
                           np.zeros(0, np.int32), np.zeros(0, np.int32), np.zeros(0))
            self.n_rows += k
        return first

    def add_row(self, lower: float, upper: float, cols: Sequence[int], coefs: Sequence[float]) -> int:
        idx = np.asarray(cols, dtype=np.int32)
        self.h.addRow(lower, upper, len(idx), idx, np.asarray(coefs, float))
        self.n_rows += 1
        return self.n_rows - 1

    def add_column(self, key, rows: Sequence[int], coefs: Sequence[float] | None = None,
                   cost: float = 1.0) -> bool:
        if key in self.index:
            return False
        idx = np.asarray(rows, dtype=np.int32)
        vals = np.ones(len(idx)) if coefs is None else np.asarray(coefs, float)
        self.h.addCol(cost, 0.0, _INF, len(idx), idx, vals)
        self.index[key] = len(self.columns)
        self.columns.append(key)
        return True

    def solve(self) -> tuple[float, np.ndarray, np.ndarray]:
        self.h.run()
        status = self.h.getModelStatus()
        if status != highspy.HighsModelStatus.kOptimal:
            raise SolverError(f"master LP not optimal: {self.h.modelStatusToString(status)}")
        sol = self.h.getSolution()
        z = self.h.getInfo().objective_function_value
        return float(z), np.array(sol.col_value), np.array(sol.row_dual)


def price(instance: Instance, items: Sequence[int], duals: np.ndarray, budget, threshold: float,
          pricer: str, base: float = 0.0, greedy_only: bool = False,
          eps: float = PTAS_EPS) -> tuple[list, bool]:
    """Columns on ``items`` whose dual value plus ``base`` exceeds ``threshold``.

    Returns (columns, certified).  ``certified`` is True when the absence of
    columns is proven (exact pricer), False for heuristic pricers.  With
    ``greedy_only`` only the density-greedy candidates are tried.
    """
    prob = KnapsackProblem.over(instance, items, duals, budget)
    if pricer not in ("exact", "ptas", "bnb"):
        raise InputError(f"unknown pricer {pricer!r}")
    if pricer == "exact" or greedy_only:
        cols = [c for c in knapsack_greedy(prob) if base + sum(duals[i] for i in c) > threshold]
        if cols or greedy_only:
            return cols, False
    if base + fractional_bound(prob) <= threshold:
        return [], pricer != "ptas"
    if pricer == "exact":
        if prob.m <= 12:
            conf, val = knapsack_exact(prob)
            return ([conf] if base + val > threshold else []), True
        hit = knapsack_above(prob, threshold - base)
        return ([hit[0]] if hit else []), True
    if pricer == "ptas":
        conf, val = knapsack_approx(prob, eps, max_anchor=PTAS_ANCHOR)
        return ([conf] if base + val > threshold else []), False
    conf, val = knapsack_exact(prob)
    return ([conf] if base + val > threshold else []), True


@dataclass
class LPSolve:
    x: FractionalSolution
    z: float
    pool: list = field(default_factory=list)
    rounds: int = 0
    certified: bool = True


def repair_coverage(weights: dict, demand: np.ndarray, protect=None) -> dict:
    """Split over-covered items off configurations until coverage equals demand.

    Mass ``w`` moved from C to C minus {i} lowers the coverage of i only, and
    never adds a column, so the norm does not grow.  ``protect(conf, i)``
    may veto removing i from conf (used to keep matching edges intact when
    possible); vetoed columns are used last.
    """
    weights = {c: w for c, w in weights.items() if w > 0}
    n = demand.size
    cov = np.zeros(n)
    holders: dict[int, list] = {}
    for conf, w in weights.items():
        for i in conf:
            cov[i] += w
            holders.setdefault(i, []).append(conf)
    for i in range(n):
        excess = cov[i] - demand[i]
        if excess <= 1e-12:
            continue
        confs = sorted(holders.get(i, []), key=lambda c: (protect(c, i) if protect else False, c))
        for conf in confs:
            if excess <= 1e-12:
                break
            w = weights.get(conf, 0.0)
            if w <= 0:
                continue
            move = min(w, excess)
            rest = tuple(j for j in conf if j != i)
            if move >= w - 1e-15:
                del weights[conf]
            else:
                weights[conf] = w - move
            if rest:
                if rest not in weights:
                    for j in rest:
                        holders.setdefault(j, []).append(rest)
                weights[rest] = weights.get(rest, 0.0) + move
            excess -= move
            cov[i] -= move
    return weights


def column_generation(instance: Instance, demand, delta: float, pool: Iterable[Configuration] = (),
                      pricer: str = "exact", eps: float = PTAS_EPS) -> LPSolve:
    validate_delta(delta)
    dem = as_demand(instance, demand)
    support = [int(i) for i in np.flatnonzero(dem > 0)]
    if not support:
        return LPSolve(FractionalSolution(()), 0.0, [], 0, True)
    sup_set = set(support)
    row_of = {i: r for r, i in enumerate(support)}
    master = HighsMaster()
    master.add_rows(dem[support], np.full(len(support), _INF))

    def add(conf) -> bool:
        return master.add_column(conf, [row_of[i] for i in conf])

    for b in first_fit(instance, support).bins:
        add(b)
    for conf in pool:
        kept = tuple(i for i in conf if i in sup_set)
        if kept:
            add(kept)

    threshold = 1.0 + delta ** 2 / 2.0
    duals = np.zeros(instance.n)
    best_z = np.inf
    stall = 0
    certified = True
    for rounds in range(1, MAX_ROUNDS + 1):
        z, xval, ydual = master.solve()
        duals[:] = 0.0
        duals[support] = np.maximum(ydual, 0.0)
        cols, certified = price(instance, support, duals, None, threshold, pricer, eps=eps)
        added = sum(add(c) for c in cols)
        if not cols:
            break
        if not added:
            # pricing keeps proposing pooled columns: the master duals are at tolerance
            log.debug("column generation: no new column after %d rounds", rounds)
            break
        if z < best_z - 1e-9:
            best_z, stall = z, 0
        else:
            stall += 1
            if stall >= STALL_ROUNDS:
                log.warning("column generation stalled at z=%.9g", z)
                certified = False
                break
    else:
        raise SolverError(f"column generation hit the {MAX_ROUNDS} round cap")

    raw = {}
    for conf, w in zip(master.columns, xval):
        if w > 1e-12:
            raw[conf] = raw.get(conf, 0.0) + float(w)
    fixed = repair_coverage(raw, dem)
    x = FractionalSolution.from_dict(fixed)
    return LPSolve(x, x.norm, list(master.columns), rounds, certified)


def solve_config_lp(instance: Instance, demand=None, delta: float = 0.1, pool: Iterable[Configuration] = (),
                    pricer: str = "exact", eps: float = PTAS_EPS) -> tuple[FractionalSolution, float]:
    """(1 + delta^2)-approximate solution of the configuration LP with the given demand.

    ``demand`` defaults to all ones; a set of items means unit demand on them.
    """
    res = column_generation(instance, demand, delta, pool=pool, pricer=pricer, eps=eps)
    return res.x, res.z


def _probabilities(x: FractionalSolution) -> np.ndarray:
    w = np.array([w for _, w in x.weights], dtype=float)
    total = w.sum()
    if not len(w) or total <= 0:
        raise EmptyDistributionError("cannot sample from a zero fractional solution")
    return w / total


def sample_configuration(x: FractionalSolution, rng: np.random.Generator) -> Configuration:
    """Draw C with probability x_C / ||x||."""
    p = _probabilities(x)
    return x.weights[int(rng.choice(len(p), p=p))][0]


def sample_configurations(x: FractionalSolution, rng: np.random.Generator, count: int) -> list:
    """``count`` independent draws from x (with replacement)."""
    if count <= 0:
        return []
    p = _probabilities(x)
    picks = rng.choice(len(p), size=count, p=p)
    return [x.weights[int(k)][0] for k in picks]


def check_fractional(instance: Instance, x: FractionalSolution, demand, tol: float = 1e-7) -> list[str]:
    """Problems with ``x`` as a solution of the demand LP (empty list if none)."""
    dem = as_demand(instance, demand)
    problems = []
    for conf, w in x.weights:
        if w < 0:
            problems.append(f"negative weight on {conf}")
        if np.any(instance.volume(conf) > 1.0 + FEAS_EPS):
            problems.append(f"infeasible column {conf}")
        if any(dem[i] <= 0 for i in conf):
            problems.append(f"column {conf} uses an item without demand")
    gap = np.abs(x.coverage(instance.n) - dem)
    if gap.size and gap.max() > tol:
        problems.append(f"coverage off by {gap.max():.3g} at item {int(gap.argmax())}")
    return problems
