from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dyadic import class0_config, classh_config, small_config
from vbplab.analysis import (
    Grouping, all_groupings, fractional_grouping, grouping_violations, marginal_fixtures, relax_c0, relax_ch,
    relax_small, relaxation_violations, verify_first_fit, verify_lemmas, verify_marginals,
)
from vbplab.core import Instance, MultiConfiguration
from vbplab.errors import ClassError, InputError
from vbplab.irr import IrrParams

DELTA = 0.1
PSI_C0 = 1 + 4 * Fraction(1, 10)
PSI_SMALL = 4 * Fraction(1, 10)


def test_grouping_examples():
    g = fractional_grouping("abc", [1, 1, 1], 3)
    assert g.groups == (("a", "b"), ("c",)) and g.tau == 2
    assert fractional_grouping("abc", [0, 0, 0], 2).groups == (("a", "b", "c"),)
    assert fractional_grouping(["x"], [0.4], 5).groups == (("x",),)
    with pytest.raises(InputError):
        fractional_grouping([], [], 2)


def test_grouping_checker_rejects_bad():
    ok = Grouping((("a",), ("b", "c")), 3)   # valid: first mass equals the cut
    assert not grouping_violations(ok, "abc", [1, 1, 1])
    swapped = Grouping((("b",), ("a", "c")), 3)
    assert grouping_violations(swapped, "abc", [1, 1, 1])
    light = Grouping((("a",), ("b", "c")), 2)   # cut 1.5, first group has 1
    assert grouping_violations(light, "abc", [1, 1, 1])


weights = st.lists(st.fractions(0, 1, max_denominator=16), min_size=1, max_size=8)


@settings(max_examples=150, deadline=None)
@given(weights, st.integers(1, 10))
def test_grouping_is_among_brute_force(gamma, xi):
    ground = list(range(len(gamma)))
    g = fractional_grouping(ground, gamma, xi)
    assert not grouping_violations(g, ground, gamma)
    assert g in all_groupings(ground, gamma, xi)


def test_c0_already_slack():
    inst = Instance.from_items([[0.5, 0.25], [0.0625, 0.0625]])
    r = relax_c0(inst, [0, 1], DELTA)
    assert r.weights == {MultiConfiguration.from_set([0, 1]): 1}


def test_c0_one_strip_item():
    inst = Instance.from_items([[0.5, 0.5]] + [[0.09375, 0.09375]] * 5)
    r = relax_c0(inst, range(6), DELTA)
    assert r.norm == Fraction(5, 4)
    assert r.weights[MultiConfiguration.from_set([1], 4)] == Fraction(1, 4)
    assert not relaxation_violations(inst, range(6), r, DELTA, PSI_C0)


def test_c0_rejects_class_two():
    inst = Instance.from_items([[0.5, 0.45], [0.45, 0.5]])
    with pytest.raises(ClassError):
        relax_c0(inst, [0, 1], DELTA)


@pytest.mark.parametrize("seed", range(30))
def test_c0_random(seed):
    inst, conf = class0_config(np.random.default_rng(seed))
    r = relax_c0(inst, conf, DELTA)
    assert not relaxation_violations(inst, conf, r, DELTA, PSI_C0)


def test_ch_pair():
    inst = Instance.from_items([[0.5, 0.45], [0.45, 0.5]])
    r = relax_ch(inst, [0, 1], DELTA)
    assert r.weights == {MultiConfiguration.from_set([1]): 1, MultiConfiguration.from_set([0]): 1}
    assert r.norm == 2


@pytest.mark.parametrize("seed", range(30))
def test_ch_random(seed):
    inst, conf, h = classh_config(np.random.default_rng(seed))
    r = relax_ch(inst, conf, DELTA)
    assert r.norm == Fraction(h, h - 1)
    assert not relaxation_violations(inst, conf, r, DELTA, Fraction(h, h - 1))


def test_ch_three():
    inst, conf, _ = classh_config(np.random.default_rng(1), h=3)
    assert relax_ch(inst, conf, DELTA).norm == Fraction(3, 2)
    with pytest.raises(ClassError):
        relax_ch(Instance.from_items([[0.05, 0.05]]), [0], DELTA)


def test_small_examples():
    inst = Instance.from_items([[0.03125, 0.0625], [0.0625, 0.03125]])
    r = relax_small(inst, [0, 1], DELTA)
    assert r.norm == Fraction(1, 5)
    (mc,) = r.weights
    assert dict(mc.multiplicities) == {0: 5, 1: 5}
    assert not relaxation_violations(inst, [0, 1], r, DELTA, PSI_SMALL)
    assert relax_small(inst, [], DELTA).norm == 0
    with pytest.raises(InputError):
        relax_small(Instance.from_items([[0.5, 0.05]]), [0], DELTA)


@pytest.mark.parametrize("seed", range(30))
def test_small_random(seed):
    inst, conf = small_config(np.random.default_rng(seed))
    r = relax_small(inst, conf, DELTA)
    assert not relaxation_violations(inst, conf, r, DELTA, PSI_SMALL)


def test_violation_checker_catches_bad_coverage():
    inst = Instance.from_items([[0.5, 0.45], [0.45, 0.5]])
    r = relax_ch(inst, [0, 1], DELTA)
    r.add(MultiConfiguration.from_set([0]), Fraction(1, 2))
    assert relaxation_violations(inst, [0, 1], r, DELTA, 3)


def test_first_fit_row():
    rng = np.random.default_rng(0)
    row = verify_first_fit(Instance(rng.uniform(0.01, 1, size=(30, 2))) for _ in range(50))
    assert row.status == "pass" and row.checked == 50 and row.violations == 0


def test_marginal_rows():
    for k, (name, g, p) in enumerate(marginal_fixtures()):
        row = verify_marginals(g, p, DELTA ** 4, 10_000, k, name)
        assert row.status == "pass", row


def test_verify_lemmas_table():
    rng = np.random.default_rng(1)
    insts = [Instance(rng.uniform(0.01, 1, size=(20, 2))) for _ in range(10)]
    rows = verify_lemmas(insts, IrrParams(0.1, seed=3), trials=100, draws=2000)
    kinds = {r.lemma: r.status for r in rows}
    assert kinds["first_fit"] == "pass" and kinds["survival"] == "pass"
    assert kinds["rho_star"] == "report"
    assert all(v == "pass" for k, v in kinds.items() if k.startswith("marginals"))
