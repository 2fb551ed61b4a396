import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vbplab.core import Instance
from vbplab.errors import CapacityError, InputError, ParameterError
from vbplab.knapsack import (
    KnapsackProblem, fractional_bound, knapsack_above, knapsack_approx, knapsack_exact, knapsack_greedy,
    knapsack_milp,
)


def brute_force(prob):
    best, best_set = 0.0, ()
    for r in range(prob.m + 1):
        for sub in itertools.combinations(range(prob.m), r):
            if prob.fits(sub):
                p = prob.profit(sub)
                key = tuple(prob.items[j] for j in sub)
                if p > best + 1e-12 or (abs(p - best) <= 1e-12 and key < best_set):
                    best, best_set = p, key
    return best_set, best


def one_d():
    inst = Instance.from_items([[0.6], [0.5], [0.4]])
    return KnapsackProblem.over(inst, [0, 1, 2], [0.6, 0.5, 0.4])


def two_d():
    inst = Instance.from_items([[0.6, 0.2], [0.5, 0.9]])
    return KnapsackProblem.over(inst, [0, 1], [2.0, 3.0])


@pytest.mark.parametrize("solve", [
    lambda p: knapsack_approx(p, 0.1),
    knapsack_exact,
    knapsack_milp,
])
def test_spec_examples(solve):
    conf, val = solve(one_d())
    assert conf == (0, 2) and val == pytest.approx(1.0)
    conf, val = solve(two_d())
    assert conf == (1,) and val == pytest.approx(3.0)


def test_empty_and_degenerate():
    inst = Instance.from_items([[0.5, 1.0]])
    empty = KnapsackProblem.over(inst, [], [])
    assert knapsack_approx(empty, 0.5) == ((), 0.0)
    assert knapsack_exact(empty) == ((), 0.0)
    zero = KnapsackProblem.over(inst, [0], [0.0])
    assert knapsack_exact(zero) == ((), 0.0)
    too_big = KnapsackProblem.over(inst, [0], [1.0], budget=[1.0, 0.5])
    assert knapsack_exact(too_big) == ((), 0.0)


def test_validation():
    inst = Instance.from_items([[0.5]])
    with pytest.raises(InputError):
        KnapsackProblem((0,), np.array([[0.5]]), np.array([-1.0]), np.array([1.0]))
    with pytest.raises(InputError):
        KnapsackProblem((0,), np.array([[0.5]]), np.array([1.0]), np.array([1.5]))
    with pytest.raises(ParameterError):
        knapsack_approx(KnapsackProblem.over(inst, [0], [1.0]), 1.0)
    big = Instance(np.full((30, 1), 0.1))
    with pytest.raises(CapacityError):
        knapsack_exact(KnapsackProblem.over(big, range(30), np.ones(30)))


def test_exact_breaks_ties_lexicographically():
    inst = Instance.from_items([[0.5], [0.5], [0.5]])
    prob = KnapsackProblem.over(inst, [0, 1, 2], [1.0, 1.0, 1.0])
    assert knapsack_exact(prob) == ((0, 1), 2.0)


problems = st.integers(1, 3).flatmap(lambda d: st.tuples(
    st.just(d),
    st.lists(st.tuples(st.lists(st.floats(0.01, 1.0), min_size=d, max_size=d), st.floats(0.0, 5.0)),
             min_size=0, max_size=9),
    st.lists(st.floats(0.2, 1.0), min_size=d, max_size=d),
))


def make(spec):
    d, rows, budget = spec
    if not rows:
        inst = Instance.empty(d)
        return KnapsackProblem.over(inst, [], [], budget)
    inst = Instance(np.array([r[0] for r in rows]))
    return KnapsackProblem.over(inst, range(len(rows)), [r[1] for r in rows], budget)


@settings(max_examples=80, deadline=None)
@given(problems)
def test_exact_matches_brute_force(spec):
    prob = make(spec)
    conf, val = knapsack_exact(prob)
    ref_conf, ref_val = brute_force(prob)
    assert val == pytest.approx(ref_val, abs=1e-9)
    assert prob.fits([prob.items.index(i) for i in conf])


@settings(max_examples=40, deadline=None)
@given(problems)
def test_milp_matches_exact(spec):
    prob = make(spec)
    assert knapsack_milp(prob)[1] == pytest.approx(knapsack_exact(prob)[1], abs=1e-7)


@settings(max_examples=30, deadline=None)
@given(problems, st.sampled_from([0.3, 0.5, 0.9]))
def test_approx_guarantee(spec, eps):
    prob = make(spec)
    conf, val = knapsack_approx(prob, eps)
    assert prob.fits([prob.items.index(i) for i in conf])
    assert val >= (1 - eps) * knapsack_exact(prob)[1] - 1e-9


@settings(max_examples=40, deadline=None)
@given(problems)
def test_greedy_is_feasible_and_bound_is_upper(spec):
    prob = make(spec)
    for conf in knapsack_greedy(prob):
        assert prob.fits([prob.items.index(i) for i in conf])
    assert fractional_bound(prob) >= knapsack_exact(prob)[1] - 1e-9


@settings(max_examples=40, deadline=None)
@given(problems, st.floats(0.0, 0.5))
def test_budget_monotone(spec, grow):
    prob = make(spec)
    bigger = KnapsackProblem(prob.items, prob.volumes, prob.profits, np.minimum(prob.budget + grow, 1.0))
    assert knapsack_exact(bigger)[1] >= knapsack_exact(prob)[1] - 1e-12


@settings(max_examples=60, deadline=None)
@given(problems, st.floats(0.0, 6.0))
def test_above_decides_like_exact(spec, target):
    prob = make(spec)
    best = knapsack_exact(prob)[1]
    hit = knapsack_above(prob, target)
    if best > target + 1e-9:
        assert hit is not None and hit[1] > target
        assert prob.fits([prob.items.index(i) for i in hit[0]])
    elif best <= target - 1e-9:
        assert hit is None
