import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import all_policies, naive_dual, naive_integral, naive_optimum, random_instance
from lyapopt.bruteforce import enumerate_integrals, relaxed_value, solve_exact, value_exact
from lyapopt.constraints import Ball, Singleton
from lyapopt.exceptions import BudgetError, InvalidArgumentError
from lyapopt.scenario import load_fixture

S1, S3 = load_fixture("S1"), load_fixture("S3")
seeds = st.integers(0, 2**32 - 1)


def test_s1():
    ex = solve_exact(S1)
    assert ex.optimum == 0.125 and ex.optimal_policies == ((1, 1, 0, 0),)
    assert ex.n_policies == 16 and ex.feasible_count == 6


def test_s3():
    ex = solve_exact(S3)
    assert ex.optimum == 0.0 and ex.optimal_policies == ((1,),)


def test_s1_infeasible():
    ex = solve_exact(S1.with_constraint(Singleton([0.3])))
    assert not ex.feasible and math.isinf(ex.optimum) and ex.optimal_policies == ()


def test_value_exact():
    assert value_exact(S1, [-0.25]).optimum == pytest.approx(1 / 32)
    assert value_exact(S1, [0.5]).optimum == pytest.approx(0.5)
    assert value_exact(S1, [0.0]) == solve_exact(S1)


def test_budget():
    with pytest.raises(BudgetError):
        solve_exact(S1, budget=15)


def test_enumeration_order_is_lexicographic():
    digits, costs, loads = enumerate_integrals(S1)
    assert [tuple(r) for r in digits] == list(all_policies(S1))


def test_all_minimizers_listed_in_order():
    s = load_fixture("S2").refine(2)
    ex = solve_exact(s)
    expect = [u for u in all_policies(s) if s.constraint.contains(naive_integral(s, u)[1])
              and abs(naive_integral(s, u)[0] - ex.optimum) <= 1e-12]
    assert list(ex.optimal_policies) == expect


@given(seeds)
def test_agrees_with_naive(seed):
    rng = np.random.default_rng(seed)
    s = random_instance(rng, max_atoms=7)
    ex = solve_exact(s)
    assert ex.optimum == pytest.approx(naive_optimum(s), abs=1e-12)
    for u in ex.optimal_policies:
        c, y = naive_integral(s, u)
        assert s.constraint.contains(y) and c == pytest.approx(ex.optimum, abs=1e-12)


@given(seeds)
def test_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    s = random_instance(rng, max_atoms=7, lattice=False)
    order = rng.permutation(s.n_atoms)
    assert solve_exact(s.permute(order)).optimum == solve_exact(s).optimum


@given(seeds)
def test_relaxed_value_dominates_dual(seed):
    rng = np.random.default_rng(seed)
    s = random_instance(rng, max_atoms=7)
    R, lam = relaxed_value(s)
    assert R <= solve_exact(s).optimum + 1e-9
    for _ in range(5):
        assert naive_dual(s, rng.normal(scale=3, size=s.dim)) <= R + 1e-9
    assert all(abs(r.sum() - 1) <= 1e-9 for r in lam)


def test_relaxed_value_s3():
    R, lam = relaxed_value(S3)
    assert R == pytest.approx(-0.25)


def test_relaxed_rejects_ball():
    with pytest.raises(InvalidArgumentError):
        relaxed_value(S1.with_constraint(Ball([0.5], 0.1)))
