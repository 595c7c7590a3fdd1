"""Input validation helpers shared by the functional and estimator APIs."""

import numpy as np

from .exceptions import InvalidArgumentError


def check_positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise InvalidArgumentError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_vector(x, dim, name="x"):
    """Return ``x`` as a finite float vector of length ``dim``.

    Scalars are accepted when ``dim == 1``.
    """
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1 or arr.shape[0] != dim:
        raise InvalidArgumentError(f"{name} must have dimension {dim}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f"{name} must be finite")
    return arr


def check_adjoint(scenario, adj):
    return check_vector(adj, scenario.dim, "adjoint")


def check_policy(scenario, u):
    """Return a policy as an int array, validating every index against its menu."""
    arr = np.asarray(u)
    if arr.ndim != 1 or arr.shape[0] != scenario.n_atoms:
        raise InvalidArgumentError(
            f"policy must have one entry per atom ({scenario.n_atoms}), got shape {arr.shape}"
        )
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.round(arr)):
            raise InvalidArgumentError("policy entries must be integers")
        arr = arr.astype(np.int64)
    arr = arr.astype(np.int64)
    sizes = scenario.menu_sizes
    bad = (arr < 0) | (arr >= sizes)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise InvalidArgumentError(f"policy index {arr[i]} invalid for atom {i} (menu size {sizes[i]})")
    return arr


def check_relaxed_policy(scenario, weights, atol=1e-9):
    """Return a relaxed policy as a list of per-atom probability vectors."""
    if len(weights) != scenario.n_atoms:
        raise InvalidArgumentError(
            f"relaxed policy must have one row per atom ({scenario.n_atoms}), got {len(weights)}"
        )
    rows = []
    for i, (row, m) in enumerate(zip(weights, scenario.menu_sizes)):
        r = np.asarray(row, dtype=float)
        if r.shape != (m,):
            raise InvalidArgumentError(f"relaxed weights for atom {i} must have length {m}")
        if np.any(r < -atol) or abs(r.sum() - 1.0) > atol:
            raise InvalidArgumentError(f"relaxed weights for atom {i} must be a probability vector")
        r = np.clip(r, 0.0, None)
        rows.append(r / r.sum())
    return rows
