"""Command-line driver.

Subcommands::

    lyapopt solve <scenario> [--out PATH] [--max-iter K] [--tol T] [--oracle]
    lyapopt certify <scenario> <policy.json> [--out PATH]
    lyapopt sweep value <scenario> --grid SPEC [--out PATH] [--budget B]
    lyapopt sweep lyapunov <scenario> --levels L [--out PATH] [--seed S]
    lyapopt round <scenario> <relaxed.json> [--out PATH]
    lyapopt demo
    lyapopt fixtures <dir>

Reports are JSON with sorted keys; sweep tables are CSV. Exit codes: 0 on
success (``solved`` / ``optimal``), 2 on bad input, 3 on an open gap or a
non-optimal certificate, 4 on infeasibility. ``LYAPOPT_WORKERS`` sets the
worker count for value sweeps.
"""

import argparse
import itertools
import json
import math
import os
import re
import sys

import numpy as np

from .bruteforce import solve_exact
from .certify import certificate
from .dual import ascend
from .exceptions import BudgetError, InfeasiblePointError, LyapoptError
from .lyapunov import refinement_sweep, sf_round, sweep_csv
from .scenario import FIXTURE_DIR, load_fixture, load_scenario
from .valuefn import value_sweep

EXIT_OK, EXIT_USAGE, EXIT_GAP, EXIT_INFEASIBLE = 0, 2, 3, 4
WORKERS_ENV = "LYAPOPT_WORKERS"


class UsageError(Exception):
    pass


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj) + 0.0
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def dumps(obj):
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _camel(name):
    head, *rest = name.split("_")
    return head + "".join(p.capitalize() for p in rest)


def certificate_json(cert):
    return {_camel(k): v for k, v in cert.to_dict().items()}


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path):
    if not os.path.exists(path):
        raise UsageError(f"cannot read scenario {path!r}: no such file")
    return load_scenario(path)


def _read_json(path, what):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {what} {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} {path!r} is not valid JSON: {exc}") from None


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_RANGE = re.compile(rf"^({_NUM}):({_NUM}):({_NUM})$")
_SINGLE = re.compile(rf"^{_NUM}$")


def parse_grid(spec, dim):
    """``start:step:stop`` (stop inclusive) per dimension, comma separated.

    A bare number is a one-point axis. The grid is the cartesian product with
    the first dimension varying slowest.
    """
    parts = [p.strip() for p in spec.split(",")]
    if len(parts) != dim:
        raise UsageError(f"grid spec {spec!r} has {len(parts)} axes, scenario has dimension {dim}")
    axes = []
    for p in parts:
        m = _RANGE.match(p)
        if m:
            start, step, stop = (float(g) for g in m.groups())
            if step <= 0 or stop < start:
                raise UsageError(f"bad grid axis {p!r}: need step > 0 and stop >= start")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            if count > 10**6:
                raise UsageError(f"grid axis {p!r} has too many points")
            axes.append([start + k * step for k in range(count)])
        elif _SINGLE.match(p):
            axes.append([float(p)])
        else:
            raise UsageError(f"bad grid axis {p!r}: expected start:step:stop or a number")
    return [np.array(pt) for pt in itertools.product(*axes)]


def _workers():
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(n, 1)


# -- subcommands ----------------------------------------------------------------


def solve_report(s, max_iter=500, tol=1e-10, oracle=False, budget=10**7):
    """Run ascent, recovery and certification; returns ``(report dict, exit code)``."""
    rep = ascend(s, max_iter=max_iter, tol=tol)
    out = {
        "status": rep.status,
        "iterations": rep.iterations,
        "dualValue": rep.dual_value,
        "primalCost": rep.primal_cost if rep.primal_feasible else None,
        "gap": rep.gap if rep.primal_feasible else None,
        "adjoint": rep.adjoint,
        "policy": rep.primal,
        "primalFeasible": rep.primal_feasible,
        "certificate": None,
    }
    if rep.primal_feasible:
        out["certificate"] = certificate_json(certificate(s, rep.primal, rep.adjoint))
    if oracle:
        try:
            ex = solve_exact(s, budget=budget)
            out["oracleOptimum"] = ex.optimum if ex.feasible else None
            out["oracleFeasible"] = ex.feasible
            out["oraclePolicyCount"] = ex.n_policies
        except BudgetError as exc:
            out["oracleOptimum"] = None
            out["oracleError"] = str(exc)
    code = {"solved": EXIT_OK, "gapOpen": EXIT_GAP, "infeasible": EXIT_INFEASIBLE}[rep.status]
    return out, code


def cmd_solve(args):
    s = _load(args.scenario)
    report, code = solve_report(s, args.max_iter, args.tol, args.oracle)
    _emit(dumps(report), args.out)
    return code


def cmd_certify(args):
    s = _load(args.scenario)
    doc = _read_json(args.policy, "policy file")
    if not isinstance(doc, dict) or "policy" not in doc or "adjoint" not in doc:
        raise UsageError("policy file must be an object with 'policy' and 'adjoint'")
    try:
        cert = certificate(s, doc["policy"], doc["adjoint"])
    except InfeasiblePointError as exc:
        _emit(dumps({"verdict": "infeasible", "feasResidual": exc.feas_residual}), args.out)
        return EXIT_INFEASIBLE
    _emit(dumps(certificate_json(cert)), args.out)
    return EXIT_OK if cert.verdict == "optimal" else EXIT_GAP


def cmd_sweep_value(args):
    s = _load(args.scenario)
    grid = parse_grid(args.grid, s.dim)
    sw = value_sweep(s, grid, budget=args.budget, max_iter=args.max_iter, n_jobs=_workers())
    _emit(sw.to_csv(), args.out)
    return EXIT_OK


def cmd_sweep_lyapunov(args):
    s = _load(args.scenario)
    if args.levels < 1:
        raise UsageError("--levels must be >= 1")
    rows = refinement_sweep(s, args.levels, factor=args.factor, seed=args.seed)
    _emit(sweep_csv(rows), args.out)
    return EXIT_OK


def cmd_round(args):
    s = _load(args.scenario)
    doc = _read_json(args.relaxed, "relaxed-policy file")
    weights = doc.get("weights") if isinstance(doc, dict) else doc
    if weights is None:
        raise UsageError("relaxed-policy file must be a list of mixtures or an object with 'weights'")
    r = sf_round(s, weights)
    report = {
        "policy": r.policy,
        "splitAtoms": r.split_atoms,
        "pivots": r.pivots,
        "relaxedIntegral": r.relaxed_integral,
        "pureIntegral": r.pure_integral,
        "scenario": r.scenario.to_dict(),
    }
    _emit(dumps(report), args.out)
    return EXIT_OK


def cmd_demo(args):
    lines = []
    cases = [(name, load_fixture(name)) for name in ("S1", "S2", "S3")]
    cases.append(("S3 refined x2", load_fixture("S3").refine(2)))
    for name, s in cases:
        report, _ = solve_report(s, oracle=True)
        lines.append(
            f"{name}: atoms={s.n_atoms} status={report['status']} dual={report['dualValue']!r} "
            f"primal={report['primalCost']!r} gap={report['gap']!r} oracle={report['oracleOptimum']!r} "
            f"policy={list(map(int, report['policy']))}"
        )
    rows = refinement_sweep(load_fixture("S3"), 3)
    lines.append("S3 Aumann deficit by level: " + ", ".join(f"{r.deficit:.6g}" for r in rows))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_fixtures(args):
    os.makedirs(args.dir, exist_ok=True)
    for name in ("S1", "S2", "S3"):
        with open(FIXTURE_DIR / f"{name}.json", encoding="utf-8") as src:
            text = src.read()
        with open(os.path.join(args.dir, f"{name}.json"), "w", encoding="utf-8") as dst:
            dst.write(text)
    return EXIT_OK


# -- parser -------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="lyapopt", description="Dual solves, certificates and sweeps for integral-constrained problems.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("solve", help="dual ascent + primal recovery + certificate")
    sp.add_argument("scenario")
    sp.add_argument("--out")
    sp.add_argument("--max-iter", type=int, default=500)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--oracle", action="store_true", help="cross-check against exhaustive enumeration")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("certify", help="certificate for a policy/adjoint pair")
    sp.add_argument("scenario")
    sp.add_argument("policy", help="JSON object with 'policy' and 'adjoint'")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_certify)

    sw = sub.add_parser("sweep", help="value-function or refinement sweeps (CSV)")
    ssub = sw.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    sv = ssub.add_parser("value")
    sv.add_argument("scenario")
    sv.add_argument("--grid", required=True, help="start:step:stop per dimension, comma separated")
    sv.add_argument("--budget", type=int, default=10**5)
    sv.add_argument("--max-iter", type=int, default=500)
    sv.add_argument("--out")
    sv.set_defaults(func=cmd_sweep_value)
    sl = ssub.add_parser("lyapunov")
    sl.add_argument("scenario")
    sl.add_argument("--levels", type=int, required=True)
    sl.add_argument("--factor", type=int, default=2)
    sl.add_argument("--seed", type=int, default=0, help="seed for sampled deficits (dimension > 3)")
    sl.add_argument("--out")
    sl.set_defaults(func=cmd_sweep_lyapunov)

    sp = sub.add_parser("round", help="purify a relaxed policy")
    sp.add_argument("scenario")
    sp.add_argument("relaxed", help="JSON list of per-atom mixtures, or {'weights': [...]}")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_round)

    sp = sub.add_parser("demo", help="run the bundled fixtures end to end")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_demo)

    sp = sub.add_parser("fixtures", help="copy the bundled fixture scenarios to a directory")
    sp.add_argument("dir")
    sp.set_defaults(func=cmd_fixtures)
    return p


def _join_option_values(argv, options=("--grid",)):
    """Glue ``--grid -0.5:...`` into ``--grid=-0.5:...`` so negative starts parse."""
    out, k = [], 0
    while k < len(argv):
        if argv[k] in options and k + 1 < len(argv):
            out.append(f"{argv[k]}={argv[k + 1]}")
            k += 2
        else:
            out.append(argv[k])
            k += 1
    return out


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(_join_option_values(argv))
        return args.func(args)
    except UsageError as exc:
        print(f"lyapopt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LyapoptError, ValueError) as exc:
        print(f"lyapopt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"lyapopt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
