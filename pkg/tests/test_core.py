import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vbplab.core import (
    Instance, MultiConfiguration, Packing, check_configuration, classify, dedup_cover, first_fit,
    first_fit_bound, make_configuration, recombine, split_huge, validate_delta, volume_lower_bound,
)
from vbplab.errors import InputError, ParameterError, UnsupportedDimensionError
from vbplab.oracle import exact_opt


def test_instance_rejects_out_of_range_volumes():
    with pytest.raises(InputError):
        Instance.from_items([[0.5, 0.0]])
    with pytest.raises(InputError):
        Instance.from_items([[1.2]])
    assert Instance.from_items([[1.0, 1.0]]).n == 1


def test_instance_round_trip(tmp_path):
    inst = Instance.from_items([[0.25, 0.5], [0.125, 1.0]])
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(inst.to_dict()))
    back = Instance.load(path)
    assert back.d == 2 and np.array_equal(back.volumes, inst.volumes)


def test_empty_instance():
    inst = Instance.from_dict({"d": 3, "items": []})
    assert inst.n == 0 and inst.d == 3
    assert first_fit(inst).size == 0


def test_check_configuration_examples():
    inst = Instance.from_items([[0.5, 0.2], [0.4, 0.9]])
    assert not check_configuration(inst, [0, 1])      # dim 2 sums to 1.1
    assert check_configuration(inst, [])
    one_d = Instance.from_items([[0.6], [0.4]])
    assert check_configuration(one_d, [0, 1])          # exactly 1.0


def test_check_configuration_bad_index():
    inst = Instance.from_items([[0.5]])
    with pytest.raises(InputError):
        check_configuration(inst, [3])
    with pytest.raises(InputError):
        make_configuration(inst, [0, 0])


def test_multiconfiguration_volume():
    inst = Instance.from_items([[0.1, 0.2], [0.05, 0.05]])
    mc = MultiConfiguration.of({0: 3, 1: 2})
    assert np.allclose(mc.volume(inst), [0.4, 0.7])
    assert mc.is_feasible(inst)
    assert mc[0] == 3 and mc[5] == 0
    assert not MultiConfiguration.from_set([0], 6).is_feasible(inst)


def test_delta_validation():
    assert validate_delta(0.1) == 10
    assert validate_delta(0.05) == 20
    for bad in (0.0, 0.3, 0.07, -0.1):
        with pytest.raises(ParameterError):
            validate_delta(bad)


def test_classify_examples():
    inst = Instance.from_items([[0.5, 0.45], [0.45, 0.5], [0.95, 0.92], [0.05, 0.05]])
    cls = classify(inst, 0.1)
    assert cls.large == [0, 1, 2]
    assert cls.huge == [2]
    assert cls.class_of((0, 1)) == 2
    assert cls.class_of((0, 3)) == 0
    assert cls.class_of((3,)) == 0


def test_large_is_strict():
    inst = Instance.from_items([[0.1, 0.1]])
    assert classify(inst, 0.1).large == []


def test_first_fit_examples():
    inst = Instance.from_items([[0.6], [0.6], [0.6]])
    pk = first_fit(inst)
    assert pk.size == 3
    assert pk.size <= first_fit_bound(inst, range(3))  # 4.6
    inst2 = Instance.from_items([[0.5, 0.2], [0.4, 0.9]])
    assert first_fit(inst2).bins == ((0,), (1,))
    assert first_fit(inst2, []).size == 0


def test_first_fit_hand_trace():
    inst = Instance.from_items([[0.5], [0.7], [0.3], [0.2], [0.4]])
    # 0.5 -> bin0; 0.7 -> bin1; 0.3 -> bin0 (0.8); 0.2 -> bin0 (1.0); 0.4 -> bin2
    assert first_fit(inst).bins == ((0, 2, 3), (1,), (4,))


def test_first_fit_decreasing_orders_by_max_coordinate():
    inst = Instance.from_items([[0.2, 0.1], [0.3, 0.9], [0.6, 0.2]])
    pk = first_fit(inst, decreasing=True)
    assert pk.is_valid(inst, range(3))
    assert pk.bins[0][0] == 1 or 1 in pk.bins[0]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.lists(st.floats(0.001, 1.0), min_size=0, max_size=60), st.data())
def test_first_fit_bound_property(d, flat, data):
    n = len(flat) // d
    if n == 0:
        return
    inst = Instance(np.array(flat[: n * d]).reshape(n, d))
    subset = data.draw(st.sets(st.integers(0, n - 1)))
    pk = first_fit(inst, subset)
    assert pk.is_valid(inst, subset)
    assert pk.size <= first_fit_bound(inst, subset) + 1e-9


def test_first_fit_deterministic():
    rng = np.random.default_rng(5)
    inst = Instance(rng.uniform(0.01, 1, size=(50, 3)))
    assert first_fit(inst).bins == first_fit(inst).bins


def test_packing_violations():
    inst = Instance.from_items([[0.6], [0.6], [0.3]])
    bad = Packing(((0, 1), (2,)))
    assert any("overflows" in p for p in bad.violations(inst))
    dup = Packing(((0, 2), (2,)))
    assert any("bins" in p for p in dup.violations(inst))
    ok = Packing(((0, 2), (1,)))
    assert ok.is_valid(inst, [0, 1, 2])
    assert not ok.is_valid(inst, [0, 1])


def test_packing_round_trip():
    pk = Packing(((0, 2), (1,)))
    assert Packing.from_dict(json.loads(json.dumps(pk.to_dict()))) == pk


def test_dedup_cover_keeps_first_occurrence():
    pk = dedup_cover([(0, 1), (1, 2), (1,), (3,)], [0, 1, 2])
    assert pk.bins == ((0, 1), (2,))


def test_split_huge_examples():
    inst = Instance.from_items([[0.95, 0.95], [0.3, 0.3]])
    assert split_huge(inst, 0.1) == ([0], [1])
    inst2 = Instance.from_items([[0.3, 0.3], [0.2, 0.5]])
    assert split_huge(inst2, 0.1) == ([], [0, 1])
    with pytest.raises(UnsupportedDimensionError):
        split_huge(Instance.from_items([[0.95]]), 0.1)


def test_recombine_all_huge():
    inst = Instance.from_items([[0.95, 0.91], [0.92, 0.99]])
    huge, rest = split_huge(inst, 0.1)
    pk = recombine(Packing(()), huge)
    assert pk.bins == ((0,), (1,))
    assert pk.is_valid(inst, range(2))


def test_huge_count_below_opt():
    rng = np.random.default_rng(11)
    for _ in range(10):
        v = rng.uniform(0.05, 1.0, size=(7, 2))
        inst = Instance(v)
        huge, _ = split_huge(inst, 0.1)
        assert len(huge) <= exact_opt(inst)[0]


def test_volume_lower_bound():
    inst = Instance.from_items([[0.5, 0.1], [0.5, 0.1], [0.5, 0.1]])
    assert volume_lower_bound(inst) == 2
    assert volume_lower_bound(Instance.from_items([[0.5], [0.5]])) == 1
