"""scikit-learn style wrappers around the functional API.

The "data" passed to ``fit`` is a :class:`~lyapopt.scenario.Scenario`;
hyperparameters live on the estimator so ``get_params``/``set_params`` and
``sklearn.base.clone`` work as usual.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_relaxed_policy
from .certify import certificate
from .dual import ascend, recover_primal
from .exceptions import InvalidArgumentError
from .lyapunov import sf_round
from .scenario import Scenario
from .valuefn import convexity_check, subgradient_check, value_sweep


def check_scenario(X):
    if not isinstance(X, Scenario):
        raise InvalidArgumentError(f"expected a Scenario, got {type(X).__name__}")
    return X


class DualAscentSolver(BaseEstimator):
    """Maximize the Lagrangian dual and recover a pure policy.

    Fitted attributes: ``adjoint_``, ``dual_value_``, ``policy_``,
    ``primal_cost_``, ``gap_``, ``status_``, ``n_iter_``, ``report_`` and
    ``certificate_`` (``None`` when no feasible policy was found).
    """

    def __init__(self, max_iter=500, step_rule="auto", tol=1e-10, x0=None):
        self.max_iter = max_iter
        self.step_rule = step_rule
        self.tol = tol
        self.x0 = x0

    def fit(self, X, y=None):
        s = check_scenario(X)
        rep = ascend(s, self.x0, max_iter=self.max_iter, step_rule=self.step_rule, tol=self.tol)
        self.report_ = rep
        self.adjoint_ = rep.adjoint
        self.dual_value_ = rep.dual_value
        self.policy_ = rep.primal
        self.primal_cost_ = rep.primal_cost
        self.gap_ = rep.gap
        self.status_ = rep.status
        self.n_iter_ = rep.iterations
        self.certificate_ = certificate(s, rep.primal, rep.adjoint) if rep.primal_feasible else None
        return self

    def predict(self, X):
        """Policy recovered from the fitted adjoint on (possibly another) scenario."""
        check_is_fitted(self, "adjoint_")
        return recover_primal(check_scenario(X), self.adjoint_).policy

    def score(self, X, y=None):
        """Negative duality gap of the fitted adjoint and the policy it induces on ``X``."""
        check_is_fitted(self, "adjoint_")
        s = check_scenario(X)
        rec = recover_primal(s, self.adjoint_)
        if not rec.feasible:
            return -np.inf
        return -certificate(s, rec.policy, self.adjoint_).duality_gap


class ValueFunctionSampler(BaseEstimator):
    """Bracket the value function on a grid of perturbations."""

    def __init__(self, grid=None, budget=10**5, max_iter=500, n_jobs=1):
        self.grid = grid
        self.budget = budget
        self.max_iter = max_iter
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        s = check_scenario(X)
        grid = [np.zeros(s.dim)] if self.grid is None else self.grid
        self.samples_ = value_sweep(s, grid, budget=self.budget, max_iter=self.max_iter, n_jobs=self.n_jobs)
        return self

    def convexity(self, tol=1e-9):
        check_is_fitted(self, "samples_")
        return convexity_check(self.samples_, tol)

    def subgradient(self, adj, tol=1e-9):
        check_is_fitted(self, "samples_")
        return subgradient_check(self.samples_, adj, tol)


class ShapleyFolkmanPurifier(TransformerMixin, BaseEstimator):
    """Map relaxed policies on a fitted scenario to pure policies on a refined one."""

    def fit(self, X, y=None):
        self.scenario_ = check_scenario(X)
        return self

    def transform(self, X):
        """``X`` is a relaxed policy; returns ``(refined scenario, pure policy)``."""
        check_is_fitted(self, "scenario_")
        r = sf_round(self.scenario_, check_relaxed_policy(self.scenario_, X))
        self.rounding_ = r
        return r.scenario, r.policy
