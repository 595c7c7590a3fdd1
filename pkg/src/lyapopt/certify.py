"""Optimality certificates from the maximum principle and the normal cone.

For a feasible policy ``u`` and any adjoint ``x`` the identity

    cost(u) - G(x) = mp_residual(u, x) + normal_cone_residual(load(u), x)

holds exactly, so the sum of the two residuals bounds the suboptimality of
``u``, and both vanish precisely when ``(u, x)`` is an optimal primal-dual pair.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from ._validation import check_vector
from .dual import dual_value
from .exceptions import InfeasiblePointError
from .hamiltonian import integral_point, mp_residual, mp_residual_max


def residual_tol(cost_scale):
    return 1e-7 * (1.0 + abs(cost_scale))


def normal_cone_residual(C, y, adj):
    """``sigma_C(-x) - <-x, y>``; zero iff ``-x`` is normal to ``C`` at ``y``.

    Raises :class:`InfeasiblePointError` if ``y`` is not in ``C``.
    """
    y = check_vector(y, C.dim, "y")
    adj = check_vector(adj, C.dim, "adjoint")
    feas = C.distance(y)
    if feas > C.feas_tol():
        raise InfeasiblePointError(feas)
    sigma, _ = C.support(-adj)
    return max(sigma + float(adj @ y), 0.0)


@dataclass
class Certificate:
    mp_residual: float
    mp_residual_max: float
    nc_residual: float
    feas_residual: float
    dual_value: float
    cost: float
    duality_gap: float
    suboptimality_bound: float
    verdict: str  # "optimal", "eps-optimal" or "rejected"

    def to_dict(self):
        return asdict(self)


def certificate(s, u, adj, tol=None, eps=None):
    """Certify a feasible policy against an adjoint.

    Parameters
    ----------
    tol : float, optional
        Residual tolerance for the ``"optimal"`` verdict; defaults to
        ``1e-7 * (1 + cost scale)``.
    eps : float, optional
        If given, a bound at most ``eps`` earns ``"eps-optimal"``.
    """
    cost, load = integral_point(s, u)
    feas = s.constraint.distance(load)
    if feas > s.constraint.feas_tol():
        raise InfeasiblePointError(feas, f"policy misses C by {feas:.6g}; no certificate for infeasible policies")
    mp = mp_residual(s, u, adj)
    nc = normal_cone_residual(s.constraint, load, adj)
    G = dual_value(s, adj)
    bound = mp + nc
    if tol is None:
        tol = residual_tol(s.cost_scale)
    if mp <= tol and nc <= tol:
        verdict = "optimal"
    elif eps is not None and bound <= eps:
        verdict = "eps-optimal"
    else:
        verdict = "rejected"
    return Certificate(mp, mp_residual_max(s, u, adj), nc, feas, G, cost, cost - G, bound, verdict)
