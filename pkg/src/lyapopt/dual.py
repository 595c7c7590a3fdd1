"""Lagrangian dual of the integral-constrained problem.

The dual function

    G(x) = -sum_i w_i H_i(x) - sigma_C(-x)

is concave and piecewise linear, and ``G(x) <= cost(u)`` for every feasible
policy ``u``. :func:`ascend` maximizes it by supergradient ascent and
recovers a pure policy from the Hamiltonian argmax at the best iterate. The
maximizer is reported directly as the adjoint (no sign flip).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_adjoint, check_positive_int
from .hamiltonian import hamiltonian, integral_point


def _oracle(s, adj):
    adj = check_adjoint(s, adj)
    H, choice, _ = hamiltonian(s, adj)
    sigma, c_star = s.constraint.support(-adj)
    G = -math.fsum((s.weights * H).tolist()) - sigma + 0.0
    rows = np.arange(s.n_atoms)
    wl = s.weights[:, None] * s.padded_loads[rows, choice]
    load = np.array([math.fsum(wl[:, d].tolist()) for d in range(s.dim)])
    return G, c_star - load, choice


def dual_value(s, adj):
    """``G(x) = -integral of H(., x) - sigma_C(-x)``; a lower bound on the optimum."""
    return _oracle(s, adj)[0]


def dual_supergradient(s, adj):
    """``c* - integral of load(a*)`` with ``a*`` the tie-broken argmax and ``c*`` the
    support point of ``C`` in direction ``-x``."""
    return _oracle(s, adj)[1]


@dataclass
class Recovery:
    policy: np.ndarray
    feasible: bool
    cost: float
    load: np.ndarray
    distance: float
    exchanges: int


def _distances(C, Y):
    kind = C.kind
    if kind == "singleton":
        return np.linalg.norm(Y - C.x, axis=1)
    if kind == "box":
        return np.linalg.norm(Y - np.clip(Y, C.lo, C.hi), axis=1)
    if kind == "ball":
        return np.maximum(np.linalg.norm(Y - C.center, axis=1) - C.radius, 0.0)
    return np.array([C.distance(y) for y in Y])


def recover_primal(s, adj, start=None):
    """Pure policy from the Hamiltonian argmax, repaired toward feasibility.

    While the load integral misses ``C``, apply the single-atom entry switch
    that most reduces the distance to ``C``; ties go to the smaller cost
    increase, then to the lexicographically smaller policy. Stops at
    membership or when no switch improves the distance.
    """
    adj = check_adjoint(s, adj)
    if start is None:
        _, u, _ = hamiltonian(s, adj)
    else:
        u = np.asarray(start, dtype=np.int64)
    u = u.astype(np.int64).copy()
    C = s.constraint
    tol = C.feas_tol()
    w = s.weights
    rows = np.arange(s.n_atoms)
    mask = s.menu_mask
    L = s.padded_loads
    Cst = s.padded_costs
    load = np.sum(w[:, None] * L[rows, u], axis=0)
    dist = float(_distances(C, load[None, :])[0])
    exchanges = 0
    max_steps = 4 * int(mask.sum()) + 10
    while dist > tol and exchanges < max_steps:
        delta = w[:, None, None] * (L - L[rows, u][:, None, :])  # (N, M, n)
        cand = load + delta
        d = _distances(C, cand.reshape(-1, s.dim)).reshape(mask.shape)
        d = np.where(mask, d, np.inf)
        d[rows, u] = np.inf
        best = float(np.min(d))
        if not best < dist - 1e-15 * (1.0 + dist):
            break
        near = d <= best + 1e-12 * (1.0 + best)
        dc = np.where(near, w[:, None] * (Cst - Cst[rows, u][:, None]), np.inf)
        dcmin = float(np.min(dc))
        ii, jj = np.nonzero(dc <= dcmin + 1e-12 * (1.0 + abs(dcmin)))
        # lexicographically smallest resulting policy: the lowest atom that
        # lowers its entry wins, else the highest atom that raises it
        lower = jj < u[ii]
        if np.any(lower):
            k = np.flatnonzero(lower)
            pick = k[np.lexsort((jj[k], ii[k]))[0]]
        else:
            pick = np.lexsort((jj, -ii))[0]
        i, j = int(ii[pick]), int(jj[pick])
        u[i] = j
        exchanges += 1
        load = np.sum(w[:, None] * L[rows, u], axis=0)
        dist = float(_distances(C, load[None, :])[0])
    cost, load = integral_point(s, u)
    dist = C.distance(load)
    return Recovery(u, dist <= tol, cost, load, dist, exchanges)


@dataclass
class DualReport:
    adjoint: np.ndarray
    dual_value: float
    iterations: int
    history: list = field(repr=False)
    primal: np.ndarray
    primal_cost: float
    primal_feasible: bool
    gap: float
    status: str  # "solved", "gapOpen" or "infeasible"
    reason: str


def gap_tol(cost):
    return 1e-9 * (1.0 + abs(cost)) if math.isfinite(cost) else 0.0


def ascend(s, x0=None, max_iter=500, step_rule="auto", tol=1e-10, patience=5):
    """Supergradient ascent on the dual function.

    Parameters
    ----------
    s : Scenario
    x0 : array_like, optional
        Starting adjoint (zeros by default).
    max_iter : int
    step_rule : {"auto", "polyak", "diminishing"}
        ``"auto"`` uses the Polyak step toward the best known feasible cost
        once one is available and ``a / (k + b)`` (normalized direction,
        ``a = 1 + |x0|``, ``b = 10``) before that. The Polyak step is damped
        by halving after ``patience`` iterations without dual improvement.
    tol : float
        Stop when the supergradient norm falls below it.

    Returns
    -------
    DualReport
    """
    max_iter = check_positive_int(max_iter, "max_iter")
    if step_rule not in ("auto", "polyak", "diminishing"):
        raise ValueError(f"unknown step rule {step_rule!r}")
    x = np.zeros(s.dim) if x0 is None else check_adjoint(s, x0).copy()
    a, b = 1.0 + float(np.linalg.norm(x)), 10.0
    best_G, best_x = -math.inf, x.copy()
    U, best_u = math.inf, None
    gamma, stall = 1.0, 0
    history = []
    reason = "max_iter"
    # greedy recovery depends only on the starting argmax policy
    recovered = {}
    k = 0
    for k in range(max_iter):
        G, g, choice = _oracle(s, x)
        gnorm = float(np.linalg.norm(g))
        history.append((x.copy(), G, gnorm))
        if G > best_G:
            best_G, best_x, stall = G, x.copy(), 0
        else:
            stall += 1
            if stall >= patience:
                gamma, stall = gamma / 2.0, 0
        key = choice.tobytes()
        if key not in recovered:
            recovered[key] = recover_primal(s, x, start=choice)
        rec = recovered[key]
        if rec.feasible and rec.cost < U:
            U, best_u = rec.cost, rec.policy.copy()
        if U - best_G <= gap_tol(U):
            reason = "gap_closed"
            break
        if gnorm <= tol:
            reason = "stationary"
            break
        if step_rule == "diminishing" or (step_rule == "auto" and not math.isfinite(U)):
            step = a / (k + b) / gnorm
        else:
            target = U if math.isfinite(U) else best_G + 1.0
            step = gamma * max(target - G, 0.0) / gnorm**2
        if step * gnorm <= 1e-13 * (1.0 + float(np.linalg.norm(x))):
            reason = "step_collapse"
            break
        x = x + step * g
    rec = recover_primal(s, best_x)
    if rec.feasible and rec.cost <= U:
        U, best_u = rec.cost, rec.policy.copy()
    if best_u is None:
        primal, feasible, gap, status = rec.policy, False, math.inf, "infeasible"
    else:
        primal, feasible = best_u, True
        gap = U - best_G
        status = "solved" if gap <= gap_tol(U) else "gapOpen"
    return DualReport(best_x, best_G, k + 1, history, primal, U, feasible, gap, status, reason)
