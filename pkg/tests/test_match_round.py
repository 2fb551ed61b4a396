import numpy as np
import pytest

from vbplab.core import Instance, split_huge, volume_lower_bound
from vbplab.errors import UnsupportedDimensionError
from vbplab.match_round import run_2vbp, run_match_round
from vbplab.matching import build_matching_graph, is_matching
from vbplab.oracle import exact_opt

DELTA = 0.1
PAIR = Instance.from_items([[0.5, 0.45], [0.45, 0.5]])


def test_two_item_edge():
    rng = np.random.default_rng(0)
    sizes = []
    for _ in range(50):
        pk, rep = run_match_round(PAIR, DELTA, rng)
        assert pk.is_valid(PAIR, range(2))
        sizes.append(pk.size)
        if rep.matched:
            assert pk.bins == ((0, 1),)
    assert rep.gamma == DELTA ** 4
    # matched with probability 1 - 1e-4
    assert sizes.count(1) >= 48


def test_small_items_only():
    inst = Instance(np.random.default_rng(1).uniform(0.01, 0.1, size=(20, 2)))
    pk, rep = run_match_round(inst, DELTA, np.random.default_rng(2))
    assert rep.matching == []
    assert pk.is_valid(inst, range(20))
    assert rep.irr is not None and rep.irr.residuals[0] == tuple(range(20))


def test_empty_instance():
    pk, rep = run_match_round(Instance.empty(2), DELTA, np.random.default_rng(0))
    assert pk.size == 0 and rep.size == 0


def test_dimension_check():
    with pytest.raises(UnsupportedDimensionError):
        run_match_round(Instance.from_items([[0.5]]), DELTA, np.random.default_rng(0))


def planted(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.15, 0.85, size=(n // 2, 2))
    return Instance(np.round(np.vstack([a, 1 - a]), 9))


@pytest.mark.parametrize("seed", range(5))
def test_report_invariants(seed):
    inst = planted(seed, 16)
    pk, rep = run_match_round(inst, DELTA, np.random.default_rng(seed))
    assert pk.is_valid(inst, range(inst.n))
    g = build_matching_graph(inst, DELTA)
    assert is_matching(rep.matching) and set(rep.matching) <= set(g.edges)
    for e in rep.matching:
        assert tuple(e) in pk.bins
    assert rep.size == pk.size <= rep.raw_size
    assert pk.size >= volume_lower_bound(inst)
    assert sum(rep.class_mass.values()) == pytest.approx(rep.mlp_value)


def test_same_seed_same_packing():
    inst = planted(9, 12)
    a, _ = run_match_round(inst, DELTA, np.random.default_rng(4))
    b, _ = run_match_round(inst, DELTA, np.random.default_rng(4))
    assert a == b


def test_all_huge():
    inst = Instance.from_items([[0.95, 0.95], [0.92, 0.99], [0.9, 0.9]])
    pk = run_2vbp(inst, DELTA, np.random.default_rng(0))
    assert sorted(pk.bins) == [(0,), (1,), (2,)]


def test_mixed_composition():
    inst = Instance.from_items([[0.95, 0.95], [0.5, 0.45], [0.45, 0.5], [0.93, 0.97]])
    pk = run_2vbp(inst, DELTA, np.random.default_rng(3))
    huge, rest = split_huge(inst, DELTA)
    sub, _ = inst.subset(rest)
    mr, _ = run_match_round(sub, DELTA, np.random.default_rng(3))
    assert pk.size == len(huge) + mr.size
    assert pk.is_valid(inst, range(4))


def test_huge_free_matches_match_round():
    inst = planted(2, 10)
    a = run_2vbp(inst, DELTA, np.random.default_rng(8))
    b, _ = run_match_round(inst, DELTA, np.random.default_rng(8))
    assert a == b


@pytest.mark.parametrize("seed", range(8))
def test_never_beats_opt(seed):
    rng = np.random.default_rng(200 + seed)
    inst = Instance(rng.uniform(0.02, 1.0, size=(8, 2)))
    opt = exact_opt(inst)[0]
    for _ in range(3):
        pk = run_2vbp(inst, DELTA, rng)
        assert pk.is_valid(inst, range(8))
        assert pk.size >= opt
