"""Exhaustive oracles: enumerate every pure policy of a small instance.

These routines deliberately share no code with the Hamiltonian or dual
modules, so they can serve as independent references in tests.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import BudgetError, InvalidArgumentError

DEFAULT_BUDGET = 10**7
_CHUNK = 1 << 17


@dataclass(frozen=True)
class ExactSolution:
    optimum: float  # +inf when no policy is feasible
    optimal_policies: tuple
    feasible_count: int
    n_policies: int

    @property
    def feasible(self):
        return self.feasible_count > 0


def _check_budget(s, budget):
    total = math.prod(len(m) for m in s.menus)
    if total > budget:
        raise BudgetError(f"{total} policies exceed the enumeration budget {budget}")
    return total


def iter_policy_blocks(s, budget=DEFAULT_BUDGET, chunk=_CHUNK):
    """Yield ``(digits, costs, loads)`` blocks over all policies.

    Policies are enumerated lexicographically with atom 0 most significant;
    ``digits`` is the ``(B, N)`` block of entry indices.
    """
    total = _check_budget(s, budget)
    sizes = np.array([len(m) for m in s.menus], dtype=np.int64)
    strides = np.ones_like(sizes)
    if sizes.size:
        strides[:-1] = np.cumprod(sizes[::-1])[::-1][1:]
    w = s.space.w
    for start in range(0, total, chunk):
        k = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = (k[:, None] // strides[None, :]) % sizes[None, :]
        costs = np.zeros(k.size)
        loads = np.zeros((k.size, s.dim))
        for i, m in enumerate(s.menus):
            costs += w[i] * m.costs[digits[:, i]]
            loads += w[i] * m.loads[digits[:, i]]
        yield digits, costs, loads


def enumerate_integrals(s, budget=DEFAULT_BUDGET):
    """All policies with their ``(cost, load)`` integrals, as stacked arrays."""
    blocks = list(iter_policy_blocks(s, budget))
    if not blocks:
        return np.zeros((1, 0), dtype=np.int64), np.zeros(1), np.zeros((1, s.dim))
    return (np.concatenate([b[0] for b in blocks]), np.concatenate([b[1] for b in blocks]),
            np.concatenate([b[2] for b in blocks]))


def _exact_cost(s, u):
    return math.fsum(float(s.space.w[i]) * float(m.costs[j]) for i, (m, j) in enumerate(zip(s.menus, u)))


def solve_exact(s, budget=DEFAULT_BUDGET):
    """Minimum cost over all policies whose load integral lies in ``C``."""
    total = _check_budget(s, budget)
    C = s.constraint
    scale = math.fsum(float(w) * float(np.max(np.abs(m.costs))) for w, m in zip(s.space.w, s.menus))
    tie = 1e-12 * (1.0 + scale)
    best = math.inf
    winners = []
    feasible = 0
    for digits, costs, loads in iter_policy_blocks(s, budget):
        ok = C.contains_many(loads)
        feasible += int(np.count_nonzero(ok))
        if not np.any(ok):
            continue
        c = np.where(ok, costs, np.inf)
        m = float(np.min(c))
        if m < best - tie:
            best = m
            winners = []
        if m <= best + tie:
            best = min(best, m)
            winners.extend(tuple(int(v) for v in row) for row in digits[c <= best + tie])
    # drop entries that were within tolerance of an earlier, larger minimum
    if winners:
        exact = [(_exact_cost(s, u), u) for u in winners]
        lo = min(e for e, _ in exact)
        winners = [u for e, u in exact if e <= lo + tie]
        best = _exact_cost(s, winners[0])
    return ExactSolution(best, tuple(winners), feasible, total)


def value_exact(s, x, budget=DEFAULT_BUDGET):
    """:func:`solve_exact` on the problem with constraint set ``C + x``."""
    from .scenario import perturb_constraint

    return solve_exact(perturb_constraint(s, x), budget)


def relaxed_value(s):
    """Optimal value of the convexified (relaxed-control) problem, by linear programming.

    By LP duality this equals the maximum of the Lagrangian dual function.
    Returns ``(value, weights)`` with ``weights[i]`` the optimal mixture on
    atom ``i``; ``value`` is ``+inf`` when the relaxation is infeasible.
    Ball constraints are not polyhedral and are rejected.
    """
    from scipy.optimize import linprog

    from .constraints import Ball, Box

    C = s.constraint
    if isinstance(C, Ball):
        raise InvalidArgumentError("relaxed_value supports polyhedral constraint sets only")
    sizes = [len(m) for m in s.menus]
    nv = sum(sizes)
    w = s.space.w
    c = np.concatenate([w[i] * m.costs for i, m in enumerate(s.menus)])
    L = np.concatenate([w[i] * m.loads for i, m in enumerate(s.menus)]).T  # (n, nv)
    conv = np.zeros((len(sizes), nv))
    off = 0
    for i, k in enumerate(sizes):
        conv[i, off:off + k] = 1.0
        off += k
    if isinstance(C, Box):
        A_eq, b_eq = conv, np.ones(len(sizes))
        A_ub = np.vstack([L, -L])
        b_ub = np.concatenate([C.hi, -C.lo])
        cost = c
        nmu = 0
    else:
        V = C.vertices()
        nmu = V.shape[0]
        A_eq = np.block([[conv, np.zeros((len(sizes), nmu))],
                         [L, -V.T],
                         [np.zeros((1, nv)), np.ones((1, nmu))]])
        b_eq = np.concatenate([np.ones(len(sizes)), np.zeros(s.dim), [1.0]])
        A_ub = b_ub = None
        cost = np.concatenate([c, np.zeros(nmu)])
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status == 2:
        return math.inf, None
    if res.status != 0:
        raise RuntimeError(f"linear program failed: {res.message}")
    lam = res.x[:nv]
    out, off = [], 0
    for k in sizes:
        out.append(lam[off:off + k])
        off += k
    return float(res.fun), out
