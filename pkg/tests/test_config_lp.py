import numpy as np
import pytest
from scipy.stats import chisquare

from vbplab.config_lp import (
    FractionalSolution, check_fractional, column_generation, repair_coverage, sample_configuration,
    sample_configurations, solve_config_lp,
)
from vbplab.core import Instance, check_configuration
from vbplab.errors import EmptyDistributionError, InputError
from vbplab.oracle import exact_config_lp, exact_opt

DELTA = 0.1


def test_single_item():
    inst = Instance.from_items([[0.5]])
    x, z = solve_config_lp(inst)
    assert x.as_dict() == {(0,): pytest.approx(1.0)}
    assert z == pytest.approx(1.0)


def test_three_halves():
    inst = Instance.from_items([[0.5]] * 3)
    x, z = solve_config_lp(inst)
    assert z == pytest.approx(1.5)
    assert not check_fractional(inst, x, None)


def test_zero_demand():
    inst = Instance.from_items([[0.5]] * 3)
    x, z = solve_config_lp(inst, np.zeros(3))
    assert len(x) == 0 and z == 0.0


def test_demand_validation():
    inst = Instance.from_items([[0.5]] * 2)
    with pytest.raises(InputError):
        solve_config_lp(inst, np.array([0.5, 1.5]))


def test_fractional_demand_equality():
    rng = np.random.default_rng(3)
    inst = Instance(rng.uniform(0.05, 0.7, size=(10, 2)))
    dem = rng.uniform(0, 1, size=10)
    x, z = solve_config_lp(inst, dem)
    assert np.allclose(x.coverage(10), dem, atol=1e-7)
    assert z <= (1 + DELTA ** 2) * exact_config_lp(inst, dem) + 1e-6


def test_subset_demand_stays_in_support():
    rng = np.random.default_rng(4)
    inst = Instance(rng.uniform(0.05, 0.7, size=(12, 3)))
    s = {1, 4, 5, 9}
    x, z = solve_config_lp(inst, s)
    for conf in x.support:
        assert set(conf) <= s
        assert check_configuration(inst, conf)
    assert np.allclose(x.coverage(12), [1.0 if i in s else 0.0 for i in range(12)], atol=1e-7)


@pytest.mark.parametrize("seed", range(12))
def test_against_oracle(seed):
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(1, 11))
    d = int(rng.integers(1, 4))
    inst = Instance(rng.uniform(0.02, 0.8, size=(n, d)))
    x, z = solve_config_lp(inst)
    ref = exact_config_lp(inst)
    assert ref - 1e-6 <= z <= (1 + DELTA ** 2) * ref + 1e-6
    assert ref <= exact_opt(inst)[0] + 1e-9
    assert not check_fractional(inst, x, None)


def test_warm_pool_does_not_change_contract():
    rng = np.random.default_rng(7)
    inst = Instance(rng.uniform(0.05, 0.6, size=(20, 2)))
    cold = column_generation(inst, None, DELTA)
    warm = column_generation(inst, None, DELTA, pool=cold.pool[:10])
    assert warm.z == pytest.approx(cold.z, rel=DELTA ** 2)


def test_repair_splits_overcoverage():
    fixed = repair_coverage({(0, 1): 1.0, (1, 2): 1.0}, np.ones(3))
    cov = np.zeros(3)
    for conf, w in fixed.items():
        for i in conf:
            cov[i] += w
    assert np.allclose(cov, 1.0)
    assert sum(fixed.values()) <= 2.0 + 1e-12


def test_sample_point_mass():
    x = FractionalSolution.from_dict({(0, 1): 2.5})
    rng = np.random.default_rng(0)
    assert all(sample_configuration(x, rng) == (0, 1) for _ in range(20))


@pytest.mark.parametrize("weights, p", [((1.0, 1.0), 0.5), ((3.0, 1.0), 0.75)])
def test_sample_frequencies(weights, p):
    x = FractionalSolution.from_dict({(0,): weights[0], (1,): weights[1]})
    draws = sample_configurations(x, np.random.default_rng(1), 10_000)
    freq = sum(c == (0,) for c in draws) / 10_000
    assert abs(freq - p) <= 0.02


def test_sample_chi_square():
    x = FractionalSolution.from_dict({(0,): 0.2, (1,): 0.5, (2, 3): 1.3})
    draws = sample_configurations(x, np.random.default_rng(2), 100_000)
    keys = [c for c, _ in x.weights]
    observed = [sum(1 for c in draws if c == k) for k in keys]
    expected = [100_000 * w / x.norm for _, w in x.weights]
    assert chisquare(observed, expected).pvalue > 1e-3


def test_sample_empty_distribution():
    with pytest.raises(EmptyDistributionError):
        sample_configuration(FractionalSolution(()), np.random.default_rng(0))
