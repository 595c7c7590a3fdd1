"""Value function of the perturbed problems: sampling, convexity, subgradients.

``V(x)`` is the optimal cost when the constraint set is translated to
``C + x``. Each sample stores a two-sided bracket ``lower <= V(x) <= upper``
(best dual value, best feasible cost); ``upper`` is ``inf`` where no feasible
policy is known.
"""

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_vector
from .bruteforce import solve_exact
from .dual import ascend, gap_tol
from .exceptions import InsufficientDataError, InvalidArgumentError
from .scenario import perturb_constraint

SOLVED, INFEASIBLE, GAP_OPEN = "solved", "infeasible", "gapOpen"


@dataclass(frozen=True)
class ValueSample:
    x: tuple
    lower: float
    upper: float
    status: str


class ValueSweep:
    """Column store of value samples (``xs``, ``lower``, ``upper``, ``status``)."""

    def __init__(self, xs, lower, upper, status):
        self.xs = np.atleast_2d(np.asarray(xs, dtype=float))
        self.lower = np.asarray(lower, dtype=float).reshape(-1)
        self.upper = np.asarray(upper, dtype=float).reshape(-1)
        self.status = np.asarray(status, dtype=object).reshape(-1)
        k = self.xs.shape[0]
        if not (self.lower.size == self.upper.size == self.status.size == k):
            raise InvalidArgumentError("sample columns must have equal length")

    @classmethod
    def from_samples(cls, samples):
        samples = list(samples)
        if not samples:
            raise InsufficientDataError("no samples")
        return cls([s.x for s in samples], [s.lower for s in samples],
                   [s.upper for s in samples], [s.status for s in samples])

    def __len__(self):
        return self.xs.shape[0]

    def __getitem__(self, k):
        return ValueSample(tuple(float(v) for v in self.xs[k]), float(self.lower[k]),
                           float(self.upper[k]), str(self.status[k]))

    def __iter__(self):
        return (self[k] for k in range(len(self)))

    @property
    def solved(self):
        return self.status == SOLVED

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = self.xs.shape[1]
        w.writerow([f"x{d + 1}" for d in range(n)] + ["lower", "upper", "status"])
        for k in range(len(self)):
            w.writerow([_num(v) for v in self.xs[k]] + [_num(self.lower[k]), _num(self.upper[k]), self.status[k]])
        return buf.getvalue()


def _num(v):
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v + 0.0, ".17g")


def _solve_one(s, x, budget, max_iter):
    sx = perturb_constraint(s, x)
    rep = ascend(sx, max_iter=max_iter)
    lower = rep.dual_value
    upper = rep.primal_cost if rep.primal_feasible else math.inf
    exact = None
    if sx.n_policies <= budget:
        exact = solve_exact(sx, budget=budget)
        if not exact.feasible:
            return lower, math.inf, INFEASIBLE
        upper = exact.optimum
    if not math.isfinite(upper):
        return lower, math.inf, GAP_OPEN
    status = SOLVED if upper - lower <= gap_tol(upper) else GAP_OPEN
    return lower, upper, status


def value_sweep(s, grid, budget=10**5, max_iter=500, n_jobs=1):
    """Bracket ``V`` at every perturbation in ``grid``.

    Each point is solved by dual ascent; when the perturbed instance has at
    most ``budget`` policies, exhaustive enumeration also fixes ``V`` exactly
    (and certifies infeasibility).
    """
    xs = [check_vector(x, s.dim, "perturbation") for x in grid]
    if not xs:
        raise InvalidArgumentError("empty perturbation grid")
    job = lambda x: _solve_one(s, x, budget, max_iter)  # noqa: E731
    if n_jobs and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            rows = list(pool.map(job, xs))
    else:
        rows = [job(x) for x in xs]
    return ValueSweep(np.array(xs), [r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows])


def _as_sweep(samples):
    return samples if isinstance(samples, ValueSweep) else ValueSweep.from_samples(samples)


@dataclass
class CheckReport:
    passed: bool
    checked: int
    worst_margin: float
    violations: list = field(default_factory=list)


def convexity_check(samples, tol=1e-9):
    """Test ``V(lam*y + (1-lam)*z) <= lam*V(y) + (1-lam)*V(z)`` on collinear sample triples.

    Only solved samples take part; bracket widths of the three samples are
    added to the slack. ``violations`` lists ``(i_x, i_y, i_z, excess)``.
    """
    sw = _as_sweep(samples)
    idx = np.flatnonzero(sw.solved)
    if idx.size < 3:
        raise InsufficientDataError(f"convexity check needs >= 3 solved samples, got {idx.size}")
    X = sw.xs[idx]
    up = sw.upper[idx]
    width = np.maximum(sw.upper[idx] - sw.lower[idx], 0.0)
    scale = 1.0 + float(np.max(np.abs(X)))
    checked, worst, bad = 0, math.inf, []
    for a in range(idx.size):
        for b in range(a + 1, idx.size):
            d = X[a] - X[b]
            dd = float(d @ d)
            if dd == 0.0:
                continue
            lam = (X - X[b]) @ d / dd
            resid = np.linalg.norm(X - (X[b] + lam[:, None] * d), axis=1)
            inside = (resid <= 1e-12 * scale) & (lam > 1e-12) & (lam < 1 - 1e-12)
            for c in np.flatnonzero(inside):
                l = lam[c]
                rhs = l * up[a] + (1 - l) * up[b] + tol + width[a] + width[b] + width[c]
                margin = rhs - up[c]
                checked += 1
                worst = min(worst, margin)
                if margin < 0:
                    bad.append((int(idx[c]), int(idx[a]), int(idx[b]), float(-margin)))
    return CheckReport(not bad, checked, worst, bad)


def subgradient_check(samples, adj, tol=1e-9):
    """Test ``upper(x) - lower(0) >= <adj, x> - tol`` over the solved samples.

    Requires a solved sample at ``x = 0``. ``violations`` lists
    ``(sample index, margin)``.
    """
    sw = _as_sweep(samples)
    adj = check_vector(adj, sw.xs.shape[1], "adjoint")
    zero = np.flatnonzero(np.all(sw.xs == 0.0, axis=1) & sw.solved)
    if zero.size == 0:
        raise InvalidArgumentError("subgradient check needs a solved sample at x = 0")
    v0 = float(sw.lower[zero[0]])
    idx = np.flatnonzero(sw.solved)
    margins = sw.upper[idx] - v0 - sw.xs[idx] @ adj
    bad = [(int(idx[k]), float(margins[k])) for k in np.flatnonzero(margins < -tol)]
    return CheckReport(not bad, int(idx.size), float(np.min(margins)), bad)
