import numpy as np
import pytest

from vbplab.core import Instance
from vbplab.errors import CapacityError
from vbplab.oracle import (
    all_matchings, exact_config_lp, exact_mlp, exact_opt, exact_opt_bnb, feasible_masks, in_matching_polytope,
)

DELTA = 0.1


def test_opt_examples():
    assert exact_opt(Instance.from_items([[0.6]] * 3))[0] == 3
    size, pk = exact_opt(Instance.from_items([[0.5, 0.5]] * 4))
    assert size == 2 and pk.size == 2
    assert exact_opt(Instance.empty(2))[0] == 0


@pytest.mark.parametrize("seed", range(15))
def test_opt_matches_bnb(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    inst = Instance(rng.uniform(0.05, 0.9, size=(8, d)))
    size, pk = exact_opt(inst)
    assert pk.is_valid(inst, range(8)) and pk.size == size
    assert exact_opt_bnb(inst) == size


def test_caps():
    with pytest.raises(CapacityError):
        exact_opt(Instance(np.full((17, 1), 0.1)))
    with pytest.raises(CapacityError):
        exact_config_lp(Instance(np.full((13, 1), 0.1)))
    with pytest.raises(CapacityError):
        exact_mlp(Instance(np.full((11, 2), 0.05)), DELTA)
    with pytest.raises(CapacityError):
        exact_mlp(Instance(np.full((9, 2), 0.3)), DELTA)


def test_feasible_masks_are_feasible():
    inst = Instance(np.random.default_rng(3).uniform(0.1, 0.7, size=(6, 2)))
    masks = feasible_masks(inst)
    for m in masks:
        idx = [i for i in range(6) if int(m) >> i & 1]
        assert (inst.volumes[idx].sum(axis=0) <= 1 + 1e-9).all()


def test_config_lp_examples():
    halves = Instance.from_items([[0.5]] * 3)
    assert exact_config_lp(halves) == pytest.approx(1.5)
    assert exact_config_lp(halves, np.zeros(3)) == pytest.approx(0.0)
    assert exact_config_lp(Instance.from_items([[0.7, 0.2]])) == pytest.approx(1.0)


def test_mlp_examples():
    pair = Instance.from_items([[0.5, 0.45], [0.45, 0.5]])
    assert exact_mlp(pair, DELTA) == pytest.approx(1.0)
    small = Instance(np.random.default_rng(4).uniform(0.01, 0.1, size=(8, 2)))
    assert exact_mlp(small, DELTA) == pytest.approx(exact_config_lp(small))
    tri = Instance.from_items([[0.5, 0.45], [0.45, 0.5], [0.48, 0.48]])
    # config LP would pair everything at 1.5; the odd-set bound forces 2
    assert exact_config_lp(tri) == pytest.approx(1.5)
    assert exact_mlp(tri, DELTA) == pytest.approx(2.0)


@pytest.mark.parametrize("seed", range(10))
def test_restriction_chain(seed):
    rng = np.random.default_rng(30 + seed)
    a = rng.uniform(0.2, 0.8, size=(3, 2))
    inst = Instance(np.vstack([a, 1 - a - 0.01, rng.uniform(0.01, 0.1, size=(3, 2))]))
    lp, mlp, opt = exact_config_lp(inst), exact_mlp(inst, DELTA), exact_opt(inst)[0]
    assert lp <= mlp + 1e-9 <= opt + 2e-9


def test_matching_enumeration():
    path = [(0, 1), (1, 2), (2, 3)]
    assert sorted(all_matchings(path)) == sorted([(), ((0, 1),), ((1, 2),), ((2, 3),), ((0, 1), (2, 3))])
    assert in_matching_polytope(path, [0.5, 0.5, 0.5])
    tri = [(0, 1), (0, 2), (1, 2)]
    assert not in_matching_polytope(tri, [0.5, 0.5, 0.5])
    assert in_matching_polytope(tri, [1 / 3] * 3)
