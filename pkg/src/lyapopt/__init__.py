"""Integral-constrained optimization on finite measure spaces.

Separable problems ``min sum_i w_i phi(t_i, a_i)`` subject to
``sum_i w_i Phi(t_i, a_i) in C`` with finite control menus per atom:
Lagrangian dual ascent, maximum-principle certificates, value-function
sweeps, Lyapunov-range deficits, Shapley–Folkman purification and an
exhaustive reference solver.
"""

from .bruteforce import ExactSolution, relaxed_value, solve_exact, value_exact
from .certify import Certificate, certificate, normal_cone_residual
from .constraints import Ball, Box, ConstraintSet, Singleton, VPolytope, constraint_from_dict
from .dual import DualReport, Recovery, ascend, dual_supergradient, dual_value, recover_primal
from .estimators import DualAscentSolver, ShapleyFolkmanPurifier, ValueFunctionSampler
from .exceptions import (
    BudgetError,
    EvaluationError,
    InfeasiblePointError,
    InsufficientDataError,
    InvalidArgumentError,
    LyapoptError,
    SchemaError,
)
from .hamiltonian import hamiltonian, integral_point, mp_residual
from .lyapunov import (
    aumann_sum,
    convexity_deficit,
    filippov_select,
    range_cloud,
    range_sweep,
    refinement_sweep,
    sf_round,
)
from .measure import MeasureSpace, refine, uniform_space
from .scenario import (
    Scenario,
    load_fixture,
    load_scenario,
    perturb_constraint,
    save_scenario,
    scenario_from_dict,
    validate_hypotheses,
)
from .valuefn import ValueSample, ValueSweep, convexity_check, subgradient_check, value_sweep

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
