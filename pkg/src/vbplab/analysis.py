"""Fractional grouping, slack relaxations of configurations, and lemma verifiers.

Relaxation weights are kept as exact fractions.  Item volumes are floats,
i.e. dyadic rationals, so coverage and slack can be checked without any
rounding by lifting volumes to :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

import numpy as np

from .config_lp import solve_config_lp
from .core import (FEAS_EPS, Instance, MultiConfiguration, check_configuration, classify, first_fit,
                   first_fit_bound, validate_delta)
from .errors import ClassError, InputError, ParameterError, UnsupportedDimensionError
from .irr import IrrParams, run_irr, survival_stats
from .matching import EdgeFractional, MatchingGraph, decompose, sample_matching


# -- fractional grouping ---------------------------------------------------

@dataclass(frozen=True)
class Grouping:
    groups: tuple    # tuple of tuples of ground elements, in order
    xi: int

    @property
    def tau(self) -> int:
        return len(self.groups)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(float(x))


def fractional_grouping(ground: Sequence[Hashable], gamma: Sequence[float], xi: int) -> Grouping:
    """Split an ordered ground set into consecutive blocks of balanced gamma-mass.

    Each block ends at the first element where its running mass exceeds
    ||gamma|| / xi; the last block takes whatever remains.
    """
    ground = list(ground)
    if not ground:
        raise InputError("ground set must be nonempty")
    if len(gamma) != len(ground):
        raise InputError("one weight per ground element is required")
    if int(xi) != xi or xi < 1:
        raise ParameterError(f"xi must be a positive integer, got {xi}")
    g = [_frac(x) for x in gamma]
    if any(x < 0 or x > 1 for x in g):
        raise InputError("weights must lie in [0, 1]")
    total = sum(g, Fraction(0))
    if total == 0:
        return Grouping((tuple(ground),), int(xi))
    cut = total / int(xi)
    groups = []
    start = 0
    while start < len(ground):
        run = Fraction(0)
        end = len(ground) - 1
        for e in range(start, len(ground)):
            run += g[e]
            if run > cut:
                end = e
                break
        groups.append(tuple(ground[start:end + 1]))
        start = end + 1
    return Grouping(tuple(groups), int(xi))


def grouping_violations(grouping: Grouping, ground: Sequence, gamma: Sequence[float]) -> list[str]:
    """Check the three grouping properties (order, lower mass, upper mass) and tau <= xi."""
    ground = list(ground)
    pos = {e: k for k, e in enumerate(ground)}
    weight = {e: _frac(x) for e, x in zip(ground, gamma)}
    total = sum(weight.values(), Fraction(0))
    cut = total / grouping.xi
    out = []
    flat = [e for grp in grouping.groups for e in grp]
    if sorted(flat, key=pos.__getitem__) != ground or len(flat) != len(ground):
        out.append("groups do not partition the ground set")
        return out
    if any(not grp for grp in grouping.groups):
        out.append("empty group")
    for a, b in itertools.combinations(range(grouping.tau), 2):
        if max(pos[e] for e in grouping.groups[a]) > min(pos[e] for e in grouping.groups[b]):
            out.append(f"groups {a + 1} and {b + 1} are out of order")
    for k, grp in enumerate(grouping.groups):
        mass = sum((weight[e] for e in grp), Fraction(0))
        if k < grouping.tau - 1 and mass < cut:
            out.append(f"group {k + 1} mass {float(mass):.6g} below {float(cut):.6g}")
        if mass > cut + 1:
            out.append(f"group {k + 1} mass {float(mass):.6g} above {float(cut + 1):.6g}")
    if grouping.tau > grouping.xi:
        out.append(f"tau={grouping.tau} exceeds xi={grouping.xi}")
    return out


def all_groupings(ground: Sequence, gamma: Sequence[float], xi: int) -> list[Grouping]:
    """Brute force: every ordered partition into consecutive blocks that satisfies the properties.

    Order-respecting blocks are necessarily consecutive, so enumerating the
    2^(n-1) compositions covers every candidate.
    """
    ground = list(ground)
    n = len(ground)
    found = []
    for cuts in itertools.product((False, True), repeat=max(n - 1, 0)):
        groups, cur = [], [ground[0]]
        for k, c in enumerate(cuts):
            if c:
                groups.append(tuple(cur))
                cur = []
            cur.append(ground[k + 1])
        groups.append(tuple(cur))
        cand = Grouping(tuple(groups), xi)
        if not grouping_violations(cand, ground, gamma):
            found.append(cand)
    return found


# -- relaxations -------------------------------------------------------------

@dataclass
class Relaxation:
    """Weights on multi-configurations (exact fractions)."""

    weights: dict = field(default_factory=dict)   # MultiConfiguration -> Fraction

    @property
    def norm(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))

    def coverage(self) -> dict:
        cov: dict = {}
        for mc, w in self.weights.items():
            for i, c in mc.multiplicities:
                cov[i] = cov.get(i, Fraction(0)) + w * c
        return cov

    def add(self, mc: MultiConfiguration, w: Fraction):
        if len(mc):
            self.weights[mc] = self.weights.get(mc, Fraction(0)) + w


def _exact_delta(delta: float) -> Fraction:
    return Fraction(1, validate_delta(delta))


def _exact_volume(instance: Instance, mc: MultiConfiguration) -> list[Fraction]:
    total = [Fraction(0)] * instance.d
    for i, c in mc.multiplicities:
        for t in range(instance.d):
            total[t] += c * Fraction(float(instance.volumes[i, t]))
    return total


def has_slack(instance: Instance, mc: MultiConfiguration, delta: float) -> bool:
    """Some coordinate of the volume is at most 1 - delta (exact arithmetic)."""
    limit = 1 - _exact_delta(delta)
    return any(x <= limit for x in _exact_volume(instance, mc))


def relaxation_violations(instance: Instance, conf: Iterable[int], relax: Relaxation, delta: float,
                          psi: float | Fraction) -> list[str]:
    """Check slack, exact coverage of ``conf`` and the norm bound ``psi``."""
    out = []
    conf = set(conf)
    for mc in relax.weights:
        if not has_slack(instance, mc, delta):
            out.append(f"{mc.multiplicities} has no slack")
        if any(x > 1 for x in _exact_volume(instance, mc)):
            out.append(f"{mc.multiplicities} exceeds the bin")
    cov = relax.coverage()
    for i in conf | set(cov):
        want = 1 if i in conf else 0
        if cov.get(i, 0) != want:
            out.append(f"item {i} covered {cov.get(i, 0)} instead of {want}")
    if relax.norm > _frac(psi):
        out.append(f"norm {relax.norm} exceeds {psi}")
    return out


def _prepare(instance: Instance, conf, delta: float):
    if instance.d != 2:
        raise UnsupportedDimensionError("relaxations are defined for d=2")
    conf = tuple(sorted(instance.check_indices(conf)))
    if len(set(conf)) != len(conf):
        raise InputError("a configuration cannot repeat an item")
    if conf and not check_configuration(instance, conf):
        raise InputError(f"{conf} is not a configuration")
    cls = classify(instance, delta)
    if any(cls.is_huge[i] for i in conf):
        raise InputError("relaxations need a huge-free configuration")
    return conf, cls


def relax_c0(instance: Instance, conf, delta: float) -> Relaxation:
    """(1 + 4 delta)-relaxation of a class-0 configuration.

    Strip an inclusion-minimal set S of small items so that C \\ S has slack;
    C \\ S gets weight 1 and kappa copies of S get weight 1/kappa.
    """
    conf, cls = _prepare(instance, conf, delta)
    if cls.class_of(conf) != 0:
        raise ClassError(f"{conf} has class {cls.class_of(conf)}, expected 0")
    inv = validate_delta(delta)
    kappa = (inv - 1) // 2
    slack = lambda items: has_slack(instance, MultiConfiguration.from_set(items), delta)  # noqa: E731
    small = [i for i in conf if not cls.is_large[i]]
    strip: list = []
    rest = set(conf)
    for i in small:
        if slack(rest):
            break
        strip.append(i)
        rest.discard(i)
    if not slack(rest):
        raise ClassError(f"{conf} cannot gain slack by removing small items")
    # drop items that turned out unnecessary, latest first; one pass leaves S minimal
    for i in reversed(list(strip)):
        if slack(rest | {i}):
            strip.remove(i)
            rest.add(i)
    assert all(not slack(rest | {i}) for i in strip), "strip set is not inclusion-minimal"
    out = Relaxation()
    out.add(MultiConfiguration.from_set(rest), Fraction(1))
    if strip:
        out.add(MultiConfiguration.from_set(strip, kappa), Fraction(1, kappa))
    return out


def relax_ch(instance: Instance, conf, delta: float) -> Relaxation:
    """h/(h-1)-relaxation of a class-h configuration: drop each large item in turn."""
    conf, cls = _prepare(instance, conf, delta)
    h = cls.class_of(conf)
    if h < 2:
        raise ClassError(f"{conf} has class {h}, expected 2 or more")
    big = cls.large_part(conf)
    w = Fraction(1, h - 1)
    out = Relaxation()
    for i in big[:-1]:
        out.add(MultiConfiguration.from_set([j for j in conf if j != i]), w)
    out.add(MultiConfiguration.from_set(big[:-1]), w)
    return out


def relax_small(instance: Instance, conf, delta: float) -> Relaxation:
    """4 delta-relaxation of a configuration of volume at most (delta, delta): kappa copies at weight 1/kappa."""
    conf, _ = _prepare(instance, conf, delta)
    d = _exact_delta(delta)
    vol = _exact_volume(instance, MultiConfiguration.from_set(conf))
    if any(x > d for x in vol):
        raise InputError(f"{conf} has volume above ({delta}, {delta})")
    kappa = math.ceil(validate_delta(delta) / 2)
    out = Relaxation()
    if conf:
        out.add(MultiConfiguration.from_set(conf, kappa), Fraction(1, kappa))
    return out


# -- lemma verifiers ---------------------------------------------------------

@dataclass(frozen=True)
class LemmaRow:
    lemma: str
    status: str          # "pass", "fail" or "report"
    checked: int
    violations: int
    value: float
    detail: str


def verify_first_fit(instances: Iterable[Instance]) -> LemmaRow:
    checked = bad = 0
    worst = -math.inf
    for inst in instances:
        pk = first_fit(inst)
        bound = first_fit_bound(inst, range(inst.n))
        checked += 1
        bad += int(not pk.is_valid(inst) or pk.size > bound + FEAS_EPS)
        worst = max(worst, pk.size - bound)
    return LemmaRow("first_fit", "pass" if bad == 0 else "fail", checked, bad, worst,
                    "bins <= 2*sum_t v_t(S) + 1; value = max(bins - bound)")


def verify_survival(instance: Instance, params: IrrParams, trials: int) -> LemmaRow:
    st = survival_stats(instance, params, trials)
    ok = st.passes(3.0)
    margin = float(np.max(st.mean - st.envelope - 3.0 * st.stderr))
    return LemmaRow("survival", "pass" if ok.all() else "fail", len(ok), int((~ok).sum()), margin,
                    f"mean |S_j|/|S_0| <= (1-delta)^j + 3 stderr for j=0..{params.k}; value = max excess")


def verify_marginals(graph: MatchingGraph, p, gamma: float, draws: int, seed: int, name: str) -> LemmaRow:
    ef = EdgeFractional(graph, p)
    dec = decompose(graph, ef)
    rng = np.random.default_rng(seed)
    counts = np.zeros(len(graph.edges))
    idx = graph.edge_index
    invalid = 0
    for _ in range(draws):
        m = sample_matching(ef, gamma, rng, decomposition=dec)
        seen = set()
        for e in m:
            if e[0] in seen or e[1] in seen:
                invalid += 1
                break
            seen.update(e)
            counts[idx[e]] += 1
    target = (1.0 - gamma) * ef.values
    sigma = np.sqrt(target * (1.0 - target) / draws)
    dev = np.abs(counts / draws - target)
    bad = int(np.sum(dev > 3.0 * sigma + 1e-12)) + invalid
    zmax = float(np.max(np.where(sigma > 0, dev / np.where(sigma > 0, sigma, 1), 0.0), initial=0.0))
    return LemmaRow(f"marginals:{name}", "pass" if bad == 0 else "fail", len(graph.edges), bad, zmax,
                    f"|Pr(e in M) - (1-gamma) p_e| <= 3 sigma over {draws} draws; value = max z")


def verify_rho_star(instance: Instance, params: IrrParams) -> LemmaRow:
    _, trace = run_irr(instance, None, params)
    _, z = solve_config_lp(instance, None, params.delta, pricer=params.pricer)
    bound = 8 * instance.d * params.delta * z + 1
    return LemmaRow("rho_star", "report", 1, 0, float(trace.rho_star),
                    f"First-Fit bins after IRR; asymptotic reference 8*d*delta*OPT_f+1 = {bound:.6g}")


def marginal_fixtures() -> list:
    """(name, graph, p) triples: single edge, path on four vertices, planted pairs."""
    edge = MatchingGraph.from_edges([(0, 1)])
    path = MatchingGraph.from_edges([(0, 1), (1, 2), (2, 3)])
    planted = {(0, 1): 0.7, (2, 3): 0.6, (4, 5): 0.8, (1, 2): 0.3, (3, 4): 0.2}
    pairs = MatchingGraph.from_edges(list(planted))
    return [
        ("single-edge", edge, [1.0]),
        ("path-p4", path, [0.5, 0.5, 0.5]),
        ("planted-pairs", pairs, [planted[e] for e in pairs.edges]),
    ]


def verify_lemmas(instances: Sequence[Instance], params: IrrParams = IrrParams(), trials: int = 100,
                  draws: int = 10_000, survival_instance: Instance | None = None) -> list[LemmaRow]:
    """First-Fit, survival, matching-marginal and rho* rows.

    Deterministic rows are asserted, statistical rows use 3-sigma bands and
    the rho* row is informational.
    """
    if trials < 100:
        raise ParameterError("statistical rows need at least 100 trials")
    rows = [verify_first_fit(instances)]
    surv = survival_instance
    if surv is None:
        surv = next((inst for inst in instances if inst.d == 2 and inst.n), None)
    if surv is not None:
        rows.append(verify_survival(surv, params, trials))
        rows.append(verify_rho_star(surv, params))
    gamma = params.delta ** 4
    for k, (name, graph, p) in enumerate(marginal_fixtures()):
        rows.append(verify_marginals(graph, p, gamma, draws, params.seed + k, name))
    return rows
