"""Pointwise Hamiltonian maximization and integrals of policies.

For an adjoint ``x`` the Hamiltonian of atom ``i`` is the best value of
``<x, load> - cost`` over that atom's menu. A policy satisfies the maximum
principle when it attains this maximum on every atom.
"""

import math

import numpy as np

from ._validation import check_adjoint, check_policy, check_vector


def tie_tol(value):
    return 1e-12 * (1.0 + abs(value))


def hamiltonian_at(menu, adj):
    """Hamiltonian value of one atom menu and its (sorted) argmax entry indices."""
    adj = check_vector(adj, menu.loads.shape[1], "adjoint")
    vals = menu.loads @ adj - menu.costs
    value = float(np.max(vals))
    argmax = tuple(int(j) for j in np.flatnonzero(vals >= value - tie_tol(value)))
    return value, argmax


def atom_values(s, adj):
    """``<x, load> - cost`` for every (atom, entry); ``-inf`` on padding."""
    with np.errstate(invalid="ignore"):
        return s.padded_loads @ adj - s.padded_costs


def hamiltonian(s, adj):
    """Per-atom Hamiltonian values, tie-broken argmax choice, and the argmax mask."""
    adj = check_adjoint(s, adj)
    vals = atom_values(s, adj)
    H = np.max(vals, axis=1)
    tol = 1e-12 * (1.0 + np.abs(H))
    ties = vals >= (H - tol)[:, None]
    choice = np.argmax(ties, axis=1)
    return H, choice, ties


def integral_point(s, u):
    """``(integral of cost, integral of load)`` of a pure policy.

    Sums are exactly rounded (``math.fsum``), so the result does not depend
    on atom order.
    """
    u = check_policy(s, u)
    rows = np.arange(s.n_atoms)
    w = s.weights
    cost = math.fsum((w * s.padded_costs[rows, u]).tolist())
    wl = w[:, None] * s.padded_loads[rows, u]
    load = np.array([math.fsum(wl[:, d].tolist()) for d in range(s.dim)])
    return cost, load


def mp_gaps(s, u, adj):
    """Per-atom shortfall ``H_i - (<x, load_i> - cost_i)`` of a policy (all >= 0)."""
    u = check_policy(s, u)
    H, _, ties = hamiltonian(s, adj)
    rows = np.arange(s.n_atoms)
    achieved = atom_values(s, check_adjoint(s, adj))[rows, u]
    return np.where(ties[rows, u], 0.0, np.maximum(H - achieved, 0.0))


def mp_residual(s, u, adj):
    """Mass-weighted maximum-principle residual; zero iff ``u`` attains H on every atom."""
    return math.fsum((s.weights * mp_gaps(s, u, adj)).tolist())


def mp_residual_max(s, u, adj):
    return float(np.max(mp_gaps(s, u, adj), initial=0.0))


def integrated_hamiltonian(s, adj):
    H, _, _ = hamiltonian(s, adj)
    return math.fsum((s.weights * H).tolist())
