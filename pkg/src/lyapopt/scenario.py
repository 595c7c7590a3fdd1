"""Problem primitives, their per-atom menus, and the scenario file format.

A scenario fixes the cost integrand, the constraint map, the control grid and
the convex target set. Evaluating the primitives at every atom's sample point
gives one finite menu of ``(cost, load)`` pairs per atom; everything
downstream works on those menus.

Primitive components come in two forms:

* ``poly`` -- a finite sum of terms ``c * t**pt * a**pa`` (``pa`` is a list of
  exponents when controls are vectors);
* ``table`` -- explicit per-atom value arrays, treated as piecewise constant
  in ``t`` (refinement copies a parent's row to its children).
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import check_positive_int, check_vector
from .constraints import ConstraintSet, constraint_from_dict
from .exceptions import EvaluationError, InvalidArgumentError, SchemaError
from .measure import MeasureSpace, parent_index, refine, uniform_space


@dataclass(frozen=True)
class MenuEntry:
    label: str
    cost: float
    load: tuple


@dataclass(frozen=True, eq=False)
class AtomMenu:
    atom_index: int
    costs: np.ndarray
    loads: np.ndarray
    labels: tuple

    def __len__(self):
        return self.costs.size

    @property
    def entries(self):
        return [
            MenuEntry(lab, float(c), tuple(float(v) for v in l))
            for lab, c, l in zip(self.labels, self.costs, self.loads)
        ]

    def __eq__(self, other):
        if not isinstance(other, AtomMenu):
            return NotImplemented
        return (
            self.atom_index == other.atom_index
            and self.labels == other.labels
            and np.array_equal(self.costs, other.costs)
            and np.array_equal(self.loads, other.loads)
        )


# -- primitive families -------------------------------------------------------


@dataclass(frozen=True)
class PolyFamily:
    """``sum_k c_k * t**pt_k * prod_j a_j**pa_kj``."""

    terms: tuple

    def evaluate(self, t, grid):
        a = np.asarray(grid, dtype=float)
        out = np.zeros(a.shape[0])
        for c, pt, pa in self.terms:
            if a.ndim == 1:
                if isinstance(pa, tuple):
                    if len(pa) != 1:
                        raise InvalidArgumentError("exponent list length must match control dimension")
                    pa = pa[0]
                ap = np.power(a, pa)
            else:
                if not isinstance(pa, tuple):
                    pa = (pa,) * a.shape[1] if pa == 0 else None
                if pa is None or len(pa) != a.shape[1]:
                    raise InvalidArgumentError("vector controls need one exponent per component")
                ap = np.prod(np.power(a, np.asarray(pa, dtype=float)), axis=1)
            out = out + c * (t**pt) * ap
        return out

    def to_dict(self):
        return {
            "type": "poly",
            "terms": [{"c": c, "pt": pt, "pa": list(pa) if isinstance(pa, tuple) else pa} for c, pt, pa in self.terms],
        }


@dataclass(frozen=True)
class TableFamily:
    values: tuple  # one tuple of floats per atom

    def to_dict(self):
        return {"type": "table", "values": [list(row) for row in self.values]}


def _family_from_dict(doc, field_name):
    if not isinstance(doc, dict) or "type" not in doc:
        raise SchemaError(field_name, "must be an object with a 'type'")
    if doc["type"] == "poly":
        if "terms" not in doc:
            raise SchemaError(f"{field_name}.terms", "missing field")
        terms = []
        for k, term in enumerate(doc["terms"]):
            if not isinstance(term, dict) or "c" not in term:
                raise SchemaError(f"{field_name}.terms[{k}].c", "missing field")
            pa = term.get("pa", 0)
            pa = tuple(int(p) for p in pa) if isinstance(pa, (list, tuple)) else int(pa)
            terms.append((float(term["c"]), int(term.get("pt", 0)), pa))
        return PolyFamily(tuple(terms))
    if doc["type"] == "table":
        if "values" not in doc:
            raise SchemaError(f"{field_name}.values", "missing field")
        return TableFamily(tuple(tuple(float(v) for v in row) for row in doc["values"]))
    raise SchemaError(f"{field_name}.type", f"unknown primitive type {doc['type']!r}")


@dataclass(frozen=True)
class Primitive:
    """Cost family, ``dim`` constraint-map families and the control grids."""

    phi: object
    Phi: tuple
    grids: tuple  # one grid per atom; each grid is a tuple of scalars or tuples
    shared_grid: bool = True

    def refine(self, k, n_atoms):
        parents = np.repeat(np.arange(n_atoms), k)

        def rep(fam):
            if isinstance(fam, TableFamily):
                return TableFamily(tuple(fam.values[p] for p in parents))
            return fam

        return Primitive(rep(self.phi), tuple(rep(f) for f in self.Phi),
                         tuple(self.grids[p] for p in parents), self.shared_grid)

    def controls_dict(self):
        if self.shared_grid:
            return {"grid": _grid_to_json(self.grids[0])}
        return {"grids": [_grid_to_json(g) for g in self.grids]}


def _grid_to_json(grid):
    return [list(a) if isinstance(a, tuple) else a for a in grid]


def _grid_from_json(grid, field_name):
    if not isinstance(grid, list) or len(grid) == 0:
        raise SchemaError(field_name, "control grid must be a nonempty list")
    out = []
    for a in grid:
        if isinstance(a, (list, tuple)):
            out.append(tuple(float(v) for v in a))
        else:
            out.append(float(a))
    kinds = {isinstance(a, tuple) for a in out}
    if len(kinds) > 1:
        raise SchemaError(field_name, "grid mixes scalar and vector controls")
    return tuple(out)


def _label(a):
    if isinstance(a, tuple):
        return "(" + ", ".join(format(v, "g") for v in a) + ")"
    return format(a, "g")


# -- scenario -------------------------------------------------------------------


class Scenario:
    """An evaluated instance: measure space, menus, constraint set, primitives.

    Use :func:`load_scenario`, :func:`scenario_from_dict` or
    :meth:`Scenario.from_menus` rather than the constructor.
    """

    def __init__(self, space, dim, menus, constraint, primitive):
        self.space = space
        self.dim = int(dim)
        self.menus = tuple(menus)
        self.constraint = constraint
        self.primitive = primitive
        if len(self.menus) != len(space):
            raise InvalidArgumentError("need exactly one menu per atom")
        if constraint.dim != self.dim:
            raise InvalidArgumentError("constraint dimension does not match scenario dimension")
        sizes = np.array([len(m) for m in self.menus], dtype=np.int64)
        if np.any(sizes == 0):
            raise InvalidArgumentError("every atom needs a nonempty menu")
        width = int(sizes.max()) if sizes.size else 1
        costs = np.full((len(sizes), width), np.inf)
        loads = np.zeros((len(sizes), width, self.dim))
        for i, m in enumerate(self.menus):
            if m.loads.shape != (len(m), self.dim):
                raise InvalidArgumentError(f"atom {i}: loads must have dimension {self.dim}")
            costs[i, : len(m)] = m.costs
            loads[i, : len(m)] = m.loads
        mask = np.arange(width)[None, :] < sizes[:, None]
        for arr in (sizes, costs, loads, mask):
            arr.flags.writeable = False
        self._sizes, self._costs, self._loads, self._mask = sizes, costs, loads, mask

    # padded views used by the vectorized kernels
    @property
    def menu_sizes(self):
        return self._sizes

    @property
    def padded_costs(self):
        return self._costs

    @property
    def padded_loads(self):
        return self._loads

    @property
    def menu_mask(self):
        return self._mask

    @property
    def n_atoms(self):
        return len(self.space)

    @property
    def weights(self):
        return self.space.w

    @property
    def n_policies(self):
        return math.prod(int(m) for m in self._sizes)

    @property
    def cost_scale(self):
        return float(np.max(np.abs(self._costs[self._mask]), initial=0.0))

    @classmethod
    def from_menus(cls, space, costs, loads, constraint):
        """Build a scenario straight from per-atom tables.

        ``costs[i]`` is a length-``m_i`` sequence and ``loads[i]`` an
        ``(m_i, n)`` array. Controls are labelled by entry index.
        """
        n = constraint.dim
        costs = [np.asarray(c, dtype=float).reshape(-1) for c in costs]
        loads = [np.asarray(l, dtype=float).reshape(len(c), n) for c, l in zip(costs, loads)]
        grids = tuple(tuple(float(j) for j in range(len(c))) for c in costs)
        prim = Primitive(
            TableFamily(tuple(tuple(c.tolist()) for c in costs)),
            tuple(TableFamily(tuple(tuple(l[:, d].tolist()) for l in loads)) for d in range(n)),
            grids,
            shared_grid=False,
        )
        return cls(space, n, build_menus(prim, space), constraint, prim)

    def with_constraint(self, constraint):
        return Scenario(self.space, self.dim, self.menus, constraint, self.primitive)

    def refine(self, k):
        """Scenario on ``refine(space, k)`` with primitives re-evaluated."""
        k = check_positive_int(k, "k")
        if k == 1:
            return self
        space = refine(self.space, k)
        prim = self.primitive.refine(k, self.n_atoms)
        return Scenario(space, self.dim, build_menus(prim, space), self.constraint, prim)

    def permute(self, order):
        """Relabel atoms: new atom ``i`` is old atom ``order[i]``."""
        order = [int(i) for i in order]
        if sorted(order) != list(range(self.n_atoms)):
            raise InvalidArgumentError("order must be a permutation of the atoms")
        space = MeasureSpace(self.space.t[order], self.space.w[order])
        costs = [self.menus[i].costs for i in order]
        loads = [self.menus[i].loads for i in order]
        return Scenario.from_menus(space, costs, loads, self.constraint)

    def to_dict(self):
        n = self.n_atoms
        if n >= 1 and self.space == uniform_space(n):
            space = {"uniform": n}
        else:
            space = {"atoms": [{"t": float(t), "w": float(w)} for t, w in zip(self.space.t, self.space.w)]}
        return {
            "dim": self.dim,
            "space": space,
            "controls": self.primitive.controls_dict(),
            "phi": self.primitive.phi.to_dict(),
            "Phi": [f.to_dict() for f in self.primitive.Phi],
            "C": self.constraint.to_dict(),
        }

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.space == other.space
            and self.constraint == other.constraint
            and self.menus == other.menus
            and self.to_dict() == other.to_dict()
        )

    __hash__ = None

    def __repr__(self):
        return f"Scenario(n_atoms={self.n_atoms}, dim={self.dim}, C={self.constraint.kind})"


def _evaluate_family(fam, space, grids, name):
    out = []
    if isinstance(fam, TableFamily):
        if len(fam.values) != len(space):
            raise SchemaError(f"{name}.values", f"need {len(space)} per-atom rows, got {len(fam.values)}")
        for i, (row, grid) in enumerate(zip(fam.values, grids)):
            if len(row) != len(grid):
                raise SchemaError(f"{name}.values[{i}]", f"need {len(grid)} values, got {len(row)}")
            out.append(np.asarray(row, dtype=float))
        return out
    for i, (t, grid) in enumerate(zip(space.t, grids)):
        try:
            with np.errstate(all="ignore"):
                out.append(fam.evaluate(float(t), grid))
        except InvalidArgumentError as exc:
            raise SchemaError(name, str(exc)) from None
    return out


def build_menus(primitive, space):
    """Evaluate ``(cost, load)`` for every atom and grid point, in grid order."""
    if len(primitive.grids) != len(space):
        raise InvalidArgumentError("need one control grid per atom")
    for g in primitive.grids:
        if len(g) == 0:
            raise InvalidArgumentError("control grids must be nonempty")
    costs = _evaluate_family(primitive.phi, space, primitive.grids, "phi")
    comps = [_evaluate_family(f, space, primitive.grids, f"Phi[{d}]") for d, f in enumerate(primitive.Phi)]
    menus = []
    for i, grid in enumerate(primitive.grids):
        c = np.array(costs[i], dtype=float)
        l = np.stack([comp[i] for comp in comps], axis=1) if comps else np.zeros((len(grid), 0))
        if not np.all(np.isfinite(c)) or not np.all(np.isfinite(l)):
            raise EvaluationError(i, "primitive evaluated to a non-finite value")
        c.flags.writeable = False
        l.flags.writeable = False
        menus.append(AtomMenu(i, c, l, tuple(_label(a) for a in grid)))
    return menus


def _require(doc, key, prefix=""):
    if key not in doc:
        raise SchemaError(prefix + key, "missing field")
    return doc[key]


def scenario_from_dict(doc):
    if not isinstance(doc, dict):
        raise SchemaError("<root>", "scenario must be a JSON object")
    dim = _require(doc, "dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise SchemaError("dim", "must be a positive integer")
    sdoc = _require(doc, "space")
    try:
        if isinstance(sdoc, dict) and "uniform" in sdoc:
            space = uniform_space(sdoc["uniform"])
        elif isinstance(sdoc, dict) and "atoms" in sdoc:
            atoms = sdoc["atoms"]
            if not atoms:
                raise SchemaError("space.atoms", "must be nonempty")
            space = MeasureSpace([_require(a, "t", "space.atoms[].") for a in atoms],
                                 [_require(a, "w", "space.atoms[].") for a in atoms])
        else:
            raise SchemaError("space", "expected {'uniform': N} or {'atoms': [...]}")
    except InvalidArgumentError as exc:
        raise SchemaError("space", str(exc)) from None
    cdoc = _require(doc, "controls")
    if not isinstance(cdoc, dict):
        raise SchemaError("controls", "must be an object")
    if "grid" in cdoc:
        g = _grid_from_json(cdoc["grid"], "controls.grid")
        grids, shared = tuple([g] * len(space)), True
    elif "grids" in cdoc:
        if len(cdoc["grids"]) != len(space):
            raise SchemaError("controls.grids", "need one grid per atom")
        grids = tuple(_grid_from_json(g, f"controls.grids[{i}]") for i, g in enumerate(cdoc["grids"]))
        shared = False
    else:
        raise SchemaError("controls.grid", "missing field")
    phi = _family_from_dict(_require(doc, "phi"), "phi")
    Phi_doc = _require(doc, "Phi")
    if not isinstance(Phi_doc, list) or len(Phi_doc) != dim:
        raise SchemaError("Phi", f"must list exactly dim={dim} components")
    Phi = tuple(_family_from_dict(f, f"Phi[{d}]") for d, f in enumerate(Phi_doc))
    C = constraint_from_dict(_require(doc, "C"), dim)
    prim = Primitive(phi, Phi, grids, shared)
    return Scenario(space, dim, build_menus(prim, space), C, prim)


def load_scenario(path):
    """Read and evaluate a scenario JSON file."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError("<root>", f"invalid JSON: {exc}") from None
    return scenario_from_dict(doc)


def save_scenario(s, path):
    Path(path).write_text(json.dumps(s.to_dict(), indent=2) + "\n", encoding="utf-8")


def perturb_constraint(s, x):
    """The perturbed problem: same primitives, constraint set ``C + x``."""
    x = check_vector(x, s.dim, "x")
    return s.with_constraint(s.constraint.translate(x))


def support(C: ConstraintSet, p):
    return C.support(p)


FIXTURE_DIR = Path(__file__).with_name("fixtures")


def fixture_path(name):
    """Path of a shipped fixture (``"S1"``, ``"S2"``, ``"S3"``)."""
    p = FIXTURE_DIR / f"{name}.json"
    if not p.exists():
        raise InvalidArgumentError(f"unknown fixture {name!r}")
    return p


def load_fixture(name):
    return load_scenario(fixture_path(name))


@dataclass
class HypothesisReport:
    menus_ok: bool
    feasible: bool
    method: str  # "exhaustive" or "heuristic"
    witness: tuple = None
    witness_load: tuple = None
    notes: list = field(default_factory=list)


def validate_hypotheses(s, budget=10**6):
    """Check the finitely verifiable hypotheses.

    Menus must be nonempty and finite-valued. Feasibility asks whether some
    policy's load integral lands in ``C``; it is decided exactly by
    enumeration when the policy count is within ``budget`` and otherwise
    probed heuristically by greedy primal recovery (a negative heuristic
    answer is inconclusive).
    """
    from .bruteforce import solve_exact
    from .dual import recover_primal
    from .hamiltonian import integral_point

    notes = []
    menus_ok = all(len(m) > 0 and np.all(np.isfinite(m.costs)) and np.all(np.isfinite(m.loads)) for m in s.menus)
    if not menus_ok:
        notes.append("menus empty or non-finite")
    if s.n_policies <= budget:
        ex = solve_exact(s, budget=budget)
        if ex.feasible:
            u = ex.optimal_policies[0]
            return HypothesisReport(menus_ok, True, "exhaustive", u, tuple(integral_point(s, u)[1]), notes)
        notes.append("no policy reaches C at this discretization")
        return HypothesisReport(menus_ok, False, "exhaustive", notes=notes)
    rec = recover_primal(s, np.zeros(s.dim))
    if rec.feasible:
        return HypothesisReport(menus_ok, True, "heuristic", tuple(rec.policy), tuple(rec.load), notes)
    notes.append("heuristic probe found no feasible policy (inconclusive)")
    return HypothesisReport(menus_ok, False, "heuristic", notes=notes)
