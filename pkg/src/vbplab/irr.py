"""Iterative randomized rounding.

Each of ``k`` rounds solves the configuration LP on the items still
uncovered, samples ``ceil(alpha * z)`` configurations from the LP solution
and removes the items they cover.  What is left after ``k`` rounds goes to
First-Fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .config_lp import column_generation, indicator, sample_configurations
from .core import Instance, Packing, dedup_cover, first_fit, validate_delta


@dataclass(frozen=True)
class IrrParams:
    delta: float = 0.1
    seed: int = 0
    pricer: str = "exact"

    def __post_init__(self):
        validate_delta(self.delta)

    @property
    def alpha(self) -> float:
        return -math.log(1.0 - self.delta)

    @property
    def k(self) -> int:
        return math.ceil(math.log(self.delta) / math.log(1.0 - self.delta))


@dataclass
class IterationRecord:
    j: int
    z: float
    rho: int
    sampled: list
    residual: int  # |S_j|


@dataclass
class IrrTrace:
    s0: int
    iterations: list = field(default_factory=list)
    rho_star: int = 0
    ff_bins: tuple = ()
    residuals: list = field(default_factory=list)  # S_0, S_1, ..., as sorted tuples

    @property
    def sampled_total(self) -> int:
        return sum(rec.rho for rec in self.iterations)

    def survival(self, k: int) -> np.ndarray:
        """|S_j| / |S_0| for j = 0..k (zero after an early exit)."""
        out = np.zeros(k + 1)
        if self.s0 == 0:
            return out
        for j, s in enumerate(self.residuals[: k + 1]):
            out[j] = len(s) / self.s0
        return out


def _stream(seed: int, j: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(j)]))


def run_irr(instance: Instance, s0: Iterable[int] | None = None, params: IrrParams = IrrParams(),
            lp_cache: dict | None = None) -> tuple[Packing, IrrTrace]:
    """Pack ``s0`` (default: all items).

    ``lp_cache`` maps a frozen item set to the first-round LP solve on it.
    That solve starts from an empty pool and is deterministic, so sharing it
    across trials leaves every trace unchanged.
    """
    items = sorted(set(range(instance.n) if s0 is None else instance.check_indices(s0)))
    alpha, k = params.alpha, params.k
    trace = IrrTrace(s0=len(items), residuals=[tuple(items)])
    residual = set(items)
    pool: list = []
    bins: list = []
    for j in range(1, k + 1):
        if not residual:
            break
        cacheable = lp_cache is not None and j == 1
        key = (frozenset(residual), params.delta, params.pricer)
        solved = lp_cache.get(key) if cacheable else None
        if solved is None:
            solved = column_generation(instance, indicator(instance.n, residual), params.delta,
                                       pool=pool, pricer=params.pricer)
            if cacheable:
                lp_cache[key] = solved
        z = solved.z
        rho = math.ceil(alpha * z)
        sampled = sample_configurations(solved.x, _stream(params.seed, j), rho)
        for conf in sampled:
            residual.difference_update(conf)
        bins.extend(sampled)
        # warm pool for the next round: the previous columns cut down to what is left
        pool = [c for c in (tuple(i for i in conf if i in residual) for conf in solved.pool) if c]
        trace.iterations.append(IterationRecord(j, z, rho, sampled, len(residual)))
        trace.residuals.append(tuple(sorted(residual)))
    ff = first_fit(instance, residual)
    trace.rho_star = len(ff)
    trace.ff_bins = ff.bins
    packing = dedup_cover(bins + list(ff.bins), items)
    return packing, trace


@dataclass
class SurvivalStats:
    delta: float
    trials: int
    mean: np.ndarray       # j = 0..k
    stderr: np.ndarray
    envelope: np.ndarray   # (1 - delta)^j

    def passes(self, sigmas: float = 3.0) -> np.ndarray:
        return self.mean <= self.envelope + sigmas * self.stderr + 1e-12


def survival_stats(instance: Instance, params: IrrParams = IrrParams(), trials: int = 30,
                   s0: Iterable[int] | None = None) -> SurvivalStats:
    """Monte-Carlo survival fraction |S_j|/|S_0| against the (1 - delta)^j envelope.

    Trial ``t`` runs with seed ``(params.seed, t)`` so trials are
    independent and reproducible.
    """
    if trials < 30:
        raise ValueError("survival_stats needs at least 30 trials")
    k = params.k
    cache: dict = {}
    rows = np.zeros((trials, k + 1))
    for t in range(trials):
        seed = int(np.random.SeedSequence([params.seed, t]).generate_state(1)[0])
        trial_params = IrrParams(params.delta, seed, params.pricer)
        _, trace = run_irr(instance, s0, trial_params, lp_cache=cache)
        rows[t] = trace.survival(k)
    mean = rows.mean(axis=0)
    stderr = rows.std(axis=0, ddof=1) / math.sqrt(trials)
    envelope = (1.0 - params.delta) ** np.arange(k + 1)
    return SurvivalStats(params.delta, trials, mean, stderr, envelope)
