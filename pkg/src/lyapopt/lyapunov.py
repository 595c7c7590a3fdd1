"""Vector-measure ranges, discrete Aumann integrals, selection and purification.

On a finite space the range of ``A -> sum_{i in A} w_i f_i`` and the set of
integrals of pure policies are finite and generally nonconvex; their
convexity deficit (see :mod:`lyapopt.geometry`) shrinks as atoms are
refined. :func:`sf_round` turns a relaxed (mixed) policy into a pure policy
with the same integral by a Shapley–Folkman reduction followed by atom
splitting.
"""

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_relaxed_policy, check_vector
from .exceptions import BudgetError, InvalidArgumentError
from .geometry import covering_deficit, dedupe
from .measure import MeasureSpace
from .scenario import Scenario


@dataclass(frozen=True)
class RangeCloud:
    points: np.ndarray  # deduplicated, lexicographically sorted
    dim: int
    atom_count: int


def range_cloud(space, f, guard=20):
    """All subset sums ``m(A) = sum_{i in A} w_i f_i`` of a finite space."""
    n = len(space)
    if n > guard:
        raise BudgetError(f"range enumeration over {n} atoms exceeds guard {guard}")
    F = np.asarray(f, dtype=float)
    if F.ndim == 1:
        F = F[:, None]
    if F.shape[0] != n:
        raise InvalidArgumentError("need one vector per atom")
    P = np.zeros((1, F.shape[1]))
    for i in range(n):
        P = dedupe(np.vstack([P, P + space.w[i] * F[i]]))
    return RangeCloud(P, F.shape[1], n)


def convexity_deficit(cloud, seed=None, n_samples=20000, return_count=False):
    """Largest distance from a point of the convex hull to the cloud.

    Exact up to affine dimension 3, Monte Carlo (``n_samples`` random convex
    combinations) above; with ``return_count`` the sample count (0 when
    exact) is returned as well.
    """
    pts = cloud.points if isinstance(cloud, RangeCloud) else np.atleast_2d(np.asarray(cloud, dtype=float))
    if pts.size == 0:
        raise InvalidArgumentError("empty cloud")
    value, count = covering_deficit(pts, rng=seed, n_samples=n_samples)
    return (value, count) if return_count else value


def augmented_menus(s):
    """Per-atom ``(m_i, 1 + n)`` arrays of ``(cost, load)`` points."""
    return [np.column_stack([m.costs, m.loads]) for m in s.menus]


@dataclass(frozen=True)
class AumannSum:
    points: np.ndarray  # one row per pure policy, lexicographic policy order
    distinct: np.ndarray
    deficit: float
    sample_count: int

    @property
    def n_policies(self):
        return self.points.shape[0]


def aumann_sum(s, guard=10**7, seed=None):
    """Discrete Aumann integral ``{sum_i w_i z_i : z_i in menu_i}`` in ``R^(1+n)``."""
    total = s.n_policies
    if total > guard:
        raise BudgetError(f"{total} policies exceed the Aumann-sum guard {guard}")
    P = np.zeros((1, 1 + s.dim))
    for w, Z in zip(s.weights, augmented_menus(s)):
        P = (P[:, None, :] + w * Z[None, :, :]).reshape(-1, 1 + s.dim)
    D = dedupe(P)
    deficit, count = covering_deficit(D, rng=seed)
    return AumannSum(P, D, deficit, count)


@dataclass(frozen=True)
class Selection:
    policy: tuple  # None when the target is not representable
    distance: float  # distance from the target to the selected / nearest integral
    exhaustive: bool  # True when a negative answer was certified by full search

    @property
    def representable(self):
        return self.policy is not None


def filippov_select(s, target, tol=1e-9, budget=10**7):
    """Find a pure policy whose ``(cost, load)`` integral is within ``tol`` of ``target``.

    Depth-first search over atoms in index order with interval pruning on
    the remaining atoms' reachable sums; the first hit in lexicographic
    order is returned. If nothing qualifies, the nearest achievable integral
    is located by enumeration when the policy count is within ``budget``.
    """
    target = check_vector(target, 1 + s.dim, "target")
    Z = [s.weights[i] * M for i, M in enumerate(augmented_menus(s))]
    n = len(Z)
    lo = np.zeros((n + 1, 1 + s.dim))
    hi = np.zeros((n + 1, 1 + s.dim))
    for i in range(n - 1, -1, -1):
        lo[i] = lo[i + 1] + Z[i].min(axis=0)
        hi[i] = hi[i + 1] + Z[i].max(axis=0)
    choice = [0] * n
    visited = 0

    def dfs(i, partial):
        nonlocal visited
        visited += 1
        if visited > budget:
            raise BudgetError(f"selection search exceeded {budget} nodes")
        rest = target - partial
        if np.any(rest < lo[i] - tol) or np.any(rest > hi[i] + tol):
            return False
        if i == n:
            return float(np.linalg.norm(rest)) <= tol
        for j in range(Z[i].shape[0]):
            choice[i] = j
            if dfs(i + 1, partial + Z[i][j]):
                return True
        return False

    if dfs(0, np.zeros(1 + s.dim)):
        u = tuple(choice)
        from .hamiltonian import integral_point

        c, l = integral_point(s, u)
        return Selection(u, float(np.linalg.norm(np.concatenate([[c], l]) - target)), True)
    if s.n_policies <= budget:
        pts = aumann_sum(s, guard=budget).distinct
        return Selection(None, float(np.min(np.linalg.norm(pts - target, axis=1))), True)
    return Selection(None, math.nan, False)


# -- purification -------------------------------------------------------------


def relaxed_integral(s, rp):
    """``(cost, load)`` integral of a relaxed policy."""
    rp = check_relaxed_policy(s, rp)
    Z = augmented_menus(s)
    terms = np.array([s.weights[i] * (rp[i] @ Z[i]) for i in range(s.n_atoms)])
    return np.array([math.fsum(terms[:, d].tolist()) for d in range(1 + s.dim)])


def _null_vector(A):
    """A nonzero ``x`` with ``A x = 0`` by Gaussian elimination with partial pivoting."""
    R = A.astype(float).copy()
    rows, cols = R.shape
    tol = 1e-12 * max(1.0, float(np.max(np.abs(R))))
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(R[r:, c])))
        if abs(R[p, c]) <= tol:
            continue
        R[[r, p]] = R[[p, r]]
        R[r] /= R[r, c]
        others = np.arange(rows) != r
        R[others] -= np.outer(R[others, c], R[r])
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    if not free:
        return None
    f = free[0]
    x = np.zeros(cols)
    x[f] = 1.0
    for k, c in enumerate(pivots):
        x[c] = -R[k, f]
    return x


@dataclass
class Rounding:
    scenario: Scenario
    policy: tuple
    split_atoms: list
    relaxed_integral: np.ndarray
    pure_integral: np.ndarray
    pivots: int
    reduced_weights: list = field(repr=False)


def _fractional(lam, eps):
    return [i for i, r in enumerate(lam) if np.count_nonzero(r > eps) > 1]


def sf_round(s, rp, max_pivots=None):
    """Purify a relaxed policy without changing its ``(cost, load)`` integral.

    Stage 1 repeatedly takes the ``n + 2`` lowest-index fractional atoms,
    finds a null direction of their convexity and moment constraints, and
    moves along it until some mixture weight vanishes; the aggregate integral
    is invariant along that direction. The loop stops once at most ``n + 1``
    atoms remain fractional. Stage 2 splits each of those into sub-atoms with
    masses proportional to the mixture, each playing one pure entry.
    """
    lam = [r.copy() for r in check_relaxed_policy(s, rp)]
    target = relaxed_integral(s, lam)
    d = 1 + s.dim
    Z = augmented_menus(s)
    scale = 1.0 + max(float(np.max(np.abs(z))) for z in Z)
    eps = 1e-15
    frac = _fractional(lam, eps)
    if not frac:
        u = tuple(int(np.argmax(r)) for r in lam)
        return Rounding(s, u, [], target, target.copy(), 0, lam)
    pivots = 0
    limit = max_pivots if max_pivots is not None else sum(len(r) for r in lam) + 1
    while len(frac) > d and pivots < limit:
        group = frac[: d + 1]
        cols = [(i, j) for i in group for j in np.flatnonzero(lam[i] > eps)]
        A = np.zeros((len(group) + d, len(cols)))
        for c, (i, j) in enumerate(cols):
            A[group.index(i), c] = 1.0
            A[len(group):, c] = s.weights[i] * Z[i][j] / scale
        delta = _null_vector(A)
        if delta is None:
            break
        cur = np.array([lam[i][j] for i, j in cols])
        neg = delta < 0
        ratios = np.full(len(cols), np.inf)
        ratios[neg] = cur[neg] / -delta[neg]
        theta = float(np.min(ratios))
        step = cur + theta * delta
        leaving = ratios <= theta * (1 + 1e-12)
        step[leaving] = 0.0
        step = np.maximum(step, 0.0)
        for c, (i, j) in enumerate(cols):
            lam[i][j] = step[c]
        pivots += 1
        frac = _fractional(lam, eps)
    for r in lam:
        r[r <= eps] = 0.0
    # stage 2: split the remaining fractional atoms
    h = s.space.cells()
    ts, ws, costs, loads, policy = [], [], [], [], []
    for i in range(s.n_atoms):
        m = s.menus[i]
        if i not in frac:
            ts.append(s.space.t[i])
            ws.append(s.space.w[i])
            costs.append(m.costs)
            loads.append(m.loads)
            policy.append(int(np.argmax(lam[i])))
            continue
        js = np.flatnonzero(lam[i] > 0)
        share = lam[i][js] / lam[i][js].sum()
        edges = s.space.t[i] - h[i] + 2 * h[i] * np.concatenate([[0.0], np.cumsum(share)])
        for k, j in enumerate(js):
            ts.append(0.5 * (edges[k] + edges[k + 1]))
            ws.append(s.space.w[i] * lam[i][j])
            costs.append(m.costs)
            loads.append(m.loads)
            policy.append(int(j))
    refined = Scenario.from_menus(MeasureSpace(ts, ws), costs, loads, s.constraint)
    from .hamiltonian import integral_point

    c, l = integral_point(refined, policy)
    return Rounding(refined, tuple(policy), list(frac), target, np.concatenate([[c], l]), pivots, lam)


# -- refinement sweeps --------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    level: int
    atom_count: int
    deficit: float
    sample_count: int


def refinement_sweep(s, levels, factor=2, guard=10**7, seed=None):
    """Aumann-sum deficit of ``s.refine(factor**level)`` for ``level = 0 .. levels-1``."""
    rows = []
    for level in range(levels):
        sk = s.refine(factor**level)
        a = aumann_sum(sk, guard=guard, seed=seed)
        rows.append(SweepRow(level, sk.n_atoms, a.deficit, a.sample_count))
    return rows


def range_sweep(sizes, density, guard=20, seed=None):
    """Range-cloud deficit on ``uniform_space(N)`` with per-atom vectors ``density(t)``."""
    from .measure import uniform_space

    rows = []
    for level, n in enumerate(sizes):
        sp = uniform_space(n)
        cloud = range_cloud(sp, np.array([density(t) for t in sp.t]), guard=guard)
        value, count = convexity_deficit(cloud, seed=seed, return_count=True)
        rows.append(SweepRow(level, n, value, count))
    return rows


def sweep_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["level", "atomCount", "deficit", "sampleCount"])
    for r in rows:
        w.writerow([r.level, r.atom_count, format(r.deficit + 0.0, ".17g"), r.sample_count])
    return buf.getvalue()
