"""Random instance generators and brute-force reference computations for tests.

Everything here is written from definitions (loops over enumerated
policies) rather than through the library's Hamiltonian/dual kernels.
"""

import itertools
import math

import numpy as np

from scipy.spatial import ConvexHull, Delaunay, cKDTree

from lyapopt.constraints import Box, Singleton
from lyapopt.measure import MeasureSpace, uniform_space
from lyapopt.scenario import Scenario
from lyapopt.valuefn import ValueSweep


def random_space(rng, n):
    if rng.random() < 0.5:
        return uniform_space(n)
    w = rng.integers(1, 5, size=n) / 8.0
    return MeasureSpace((2 * np.arange(n) + 1) / (2 * n), w)


def random_instance(rng, max_atoms=10, max_menu=3, max_dim=2, kinds=("singleton", "box"), lattice=True):
    """Random table scenario whose constraint set contains an achievable load.

    With ``lattice`` the loads sit on a half-integer grid so that many
    policies share load values and the feasible set is rich.
    """
    n = int(rng.integers(1, max_atoms + 1))
    dim = int(rng.integers(1, max_dim + 1))
    space = random_space(rng, n)
    costs, loads = [], []
    for _ in range(n):
        m = int(rng.integers(1, max_menu + 1))
        costs.append(np.round(rng.normal(size=m), 3))
        if lattice:
            loads.append(rng.integers(-2, 3, size=(m, dim)) / 2.0)
        else:
            loads.append(np.round(rng.normal(size=(m, dim)), 3))
    u = [int(rng.integers(len(c))) for c in costs]
    y = sum(space.w[i] * loads[i][u[i]] for i in range(n))
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "singleton":
        C = Singleton(y)
    else:
        lo = y - rng.integers(0, 3, size=dim) / 4.0
        hi = y + rng.integers(0, 3, size=dim) / 4.0
        C = Box(lo, hi)
    return Scenario.from_menus(space, costs, loads, C)


def all_policies(s):
    return itertools.product(*[range(len(m)) for m in s.menus])


def naive_integral(s, u):
    cost = sum(float(s.space.w[i]) * float(s.menus[i].costs[j]) for i, j in enumerate(u))
    load = sum(s.space.w[i] * s.menus[i].loads[j] for i, j in enumerate(u))
    return cost, np.asarray(load, dtype=float).reshape(s.dim)


def naive_optimum(s):
    """Minimum over feasible policies by plain iteration; ``inf`` if none."""
    best = math.inf
    for u in all_policies(s):
        c, y = naive_integral(s, u)
        if s.constraint.contains(y):
            best = min(best, c)
    return best


def naive_dual(s, x):
    """``-sum_i w_i max_j (<x, l_ij> - c_ij) - sigma_C(-x)`` by loops."""
    x = np.asarray(x, dtype=float).reshape(s.dim)
    total = 0.0
    for i, m in enumerate(s.menus):
        total += s.space.w[i] * max(float(x @ m.loads[j]) - float(m.costs[j]) for j in range(len(m)))
    C = s.constraint
    if isinstance(C, Singleton):
        sigma = float(-x @ C.x)
    elif isinstance(C, Box):
        sigma = float(np.sum(np.where(-x > 0, -x * C.hi, -x * C.lo)))
    else:
        sigma = max(float(-x @ v) for v in C.vertices())
    return -total - sigma


def brute_value_sweep(s):
    """Exact value function on every perturbation ``load(v) - c`` with ``v`` a
    policy and ``c`` a vertex of ``C``, plus ``x = 0``.

    For polyhedral ``C`` these points suffice to decide the subgradient
    inequality everywhere: its tightest instances pair a policy with the
    vertex of ``C`` minimizing ``<x*, c>``.
    """
    pol = {}
    for u in all_policies(s):
        c, y = naive_integral(s, u)
        key = tuple(np.round(y, 12))
        pol[key] = min(pol.get(key, math.inf), c)
    ys = np.array(list(pol.keys()), dtype=float).reshape(-1, s.dim)
    cs = np.array(list(pol.values()))
    verts = s.constraint.vertices()
    xs = {tuple(np.zeros(s.dim))}
    for y in ys:
        for v in verts:
            xs.add(tuple(np.round(y - v, 12)))
    xs = sorted(xs)
    tol = s.constraint.feas_tol()
    C = s.constraint
    upper = []
    for x in xs:
        Cx = C.translate(np.array(x))
        ok = Cx.contains_many(ys, tol)
        upper.append(float(np.min(cs[ok])) if np.any(ok) else math.inf)
    upper = np.array(upper)
    status = np.where(np.isfinite(upper), "solved", "infeasible")
    return ValueSweep(np.array(xs), upper, upper, status)


def concave_table_instance(rng, n_atoms):
    """Table instance with ``Phi = a`` on the grid ``{0, 1/2, 1}``, ``C = {1/2}``,
    and per-atom costs concave in ``a``."""
    c0, c1 = rng.uniform(-1, 1, size=(2, n_atoms))
    bump = rng.uniform(0, 0.5, size=n_atoms)
    mid = 0.5 * (c0 + c1) + bump
    costs = [np.array([c0[i], mid[i], c1[i]]) for i in range(n_atoms)]
    loads = [np.array([[0.0], [0.5], [1.0]]) for _ in range(n_atoms)]
    return Scenario.from_menus(uniform_space(n_atoms), costs, loads, Singleton([0.5]))


def lattice_deficit_bounds(P, h):
    """Two-sided bracket on the covering radius of a planar cloud.

    Scores lattice points inside the hull plus samples along hull edges; any
    hull point is within ``h * (sqrt 2 + 1/2)`` of a scored point.
    """
    hull = ConvexHull(P)
    lo, hi = P.min(axis=0), P.max(axis=0)
    gx = np.arange(lo[0], hi[0] + h, h)
    gy = np.arange(lo[1], hi[1] + h, h)
    G = np.array(np.meshgrid(gx, gy)).reshape(2, -1).T
    G = G[Delaunay(P[hull.vertices]).find_simplex(G) >= 0]
    edge = []
    for a, b in hull.simplices:
        k = int(np.ceil(np.linalg.norm(P[b] - P[a]) / h)) + 1
        edge.append(P[a] + np.linspace(0, 1, k + 1)[:, None] * (P[b] - P[a]))
    S = np.vstack([G.reshape(-1, 2)] + edge)
    d, _ = cKDTree(P).query(S)
    L = float(d.max())
    return L, L + h * (math.sqrt(2) + 0.5)


# acceptance results, printed by the terminal-summary hook in conftest
RESULTS = {}
