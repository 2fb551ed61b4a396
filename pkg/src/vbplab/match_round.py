"""Match & Round for two-dimensional instances.

Solve the matching configuration LP, sample a matching from the edge
projection of its solution (each edge kept with probability
``(1 - delta^4) p_e``), pack every matched pair into its own bin and hand
the rest to iterative randomized rounding.  :func:`run_2vbp` first gives
every huge item a bin of its own.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import Instance, Packing, classify, dedup_cover, recombine, split_huge, validate_delta
from .errors import UnsupportedDimensionError
from .irr import IrrParams, IrrTrace, run_irr
from .matching import EdgeFractional, mlp_column_generation, sample_matching

log = logging.getLogger(__name__)


@dataclass
class MatchRoundReport:
    gamma: float
    matching: list
    mlp_value: float
    class_mass: dict            # h -> x . 1_{C_h}
    irr: IrrTrace | None
    size: int
    mlp_status: str = "verified"
    warnings: list = field(default_factory=list)

    @property
    def matched(self) -> int:
        return len(self.matching)

    @property
    def raw_size(self) -> int:
        """|M| + sum of rho_j + rho*, before dedup."""
        if self.irr is None:
            return self.matched
        return self.matched + self.irr.sampled_total + self.irr.rho_star


def run_match_round(instance: Instance, delta: float, rng: np.random.Generator,
                    pricer: str = "exact") -> tuple[Packing, MatchRoundReport]:
    if instance.d != 2:
        raise UnsupportedDimensionError(f"Match & Round needs d=2, got d={instance.d}")
    validate_delta(delta)
    gamma = delta ** 4
    if instance.n == 0:
        return Packing((), frozenset()), MatchRoundReport(gamma, [], 0.0, {}, None, 0)

    mlp = mlp_column_generation(instance, delta, pricer=pricer)
    warnings = []
    if mlp.status != "verified":
        warnings.append("matching polytope membership unverified; sampling from the best available decomposition")
        log.warning(warnings[-1])

    cls = classify(instance, delta)
    mass: dict = {}
    for conf, w in mlp.x.weights:
        h = cls.class_of(conf)
        mass[h] = mass.get(h, 0.0) + w

    matching: list = []
    if mlp.graph.edges:
        if mlp.decomposition is not None:
            p = EdgeFractional(mlp.graph, mlp.decomposition.reconstruct(mlp.graph))
            matching = sample_matching(p, gamma, rng, decomposition=mlp.decomposition)
        else:
            # nothing certified: fall back to an empty matching, which is always safe
            warnings.append("no matching decomposition; skipping the matching step")

    matched = {i for e in matching for i in e}
    s0 = [i for i in range(instance.n) if i not in matched]
    seed = int(rng.integers(0, 2 ** 63 - 1))
    irr_packing, trace = run_irr(instance, s0, IrrParams(delta, seed, pricer))
    assert not (irr_packing.covered & matched), "matched items reached the IRR phase"
    packing = dedup_cover([tuple(e) for e in matching] + list(irr_packing.bins), range(instance.n))
    report = MatchRoundReport(gamma, matching, mlp.value, mass, trace, packing.size, mlp.status, warnings)
    return packing, report


def run_2vbp(instance: Instance, delta: float, rng: np.random.Generator, pricer: str = "exact") -> Packing:
    """Huge items get one bin each; Match & Round packs the rest."""
    huge, residual = split_huge(instance, delta)
    if not residual:
        return recombine(Packing((), frozenset()), huge)
    sub, index_map = instance.subset(residual)
    packing, _ = run_match_round(sub, delta, rng, pricer=pricer)
    return recombine(packing, huge, index_map)
