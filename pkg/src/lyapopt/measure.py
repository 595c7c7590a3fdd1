"""Finite weighted-atom discretizations of a nonatomic measure space on [0, 1].

A :class:`MeasureSpace` is an ordered list of atoms, each carrying a sample
point ``t`` and a positive mass ``w``. Integrands are evaluated at the sample
point (midpoint rule). Refining a space splits every atom into equal-mass
children, which drives the largest atom weight to zero.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_int
from .exceptions import InvalidArgumentError


@dataclass(frozen=True)
class Atom:
    index: int
    t: float
    w: float


class MeasureSpace:
    """Immutable sequence of weighted atoms.

    Parameters
    ----------
    t : array_like
        Sample points in [0, 1], pairwise distinct.
    w : array_like
        Strictly positive atom masses.
    """

    __slots__ = ("_t", "_w", "_total")

    def __init__(self, t, w):
        t = np.array(t, dtype=float).reshape(-1)
        w = np.array(w, dtype=float).reshape(-1)
        if t.shape != w.shape:
            raise InvalidArgumentError("t and w must have the same length")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(w)):
            raise InvalidArgumentError("atom data must be finite")
        if np.any(w <= 0):
            raise InvalidArgumentError("atom weights must be strictly positive")
        if np.any((t < 0) | (t > 1)):
            raise InvalidArgumentError("sample points must lie in [0, 1]")
        if np.unique(t).size != t.size:
            raise InvalidArgumentError("sample points must be distinct")
        t.flags.writeable = False
        w.flags.writeable = False
        self._t = t
        self._w = w
        self._total = float(np.sum(w)) if w.size else 0.0

    @classmethod
    def from_atoms(cls, atoms):
        atoms = list(atoms)
        return cls([a.t for a in atoms], [a.w for a in atoms])

    @property
    def t(self):
        return self._t

    @property
    def w(self):
        return self._w

    @property
    def total_mass(self):
        return self._total

    @property
    def atoms(self):
        return tuple(Atom(i, float(t), float(w)) for i, (t, w) in enumerate(zip(self._t, self._w)))

    def __len__(self):
        return self._t.size

    def __iter__(self):
        return iter(self.atoms)

    def __eq__(self, other):
        if not isinstance(other, MeasureSpace):
            return NotImplemented
        return np.array_equal(self._t, other._t) and np.array_equal(self._w, other._w)

    def __hash__(self):
        return hash((self._t.tobytes(), self._w.tobytes()))

    def __repr__(self):
        return f"MeasureSpace(n_atoms={len(self)}, total_mass={self._total!r})"

    def cells(self):
        """Half-widths of the cells each atom stands for.

        An atom's cell is centred on its sample point, with width equal to its
        mass fraction, shrunk if needed so that cells neither overlap nor leave
        [0, 1]. For uniform spaces the cells are exactly the equipartition.
        """
        n = len(self)
        if n == 0:
            return np.zeros(0)
        h = self._w / (2.0 * self._total)
        order = np.argsort(self._t)
        ts = self._t[order]
        room = np.empty(n)
        room[:] = np.minimum(ts, 1.0 - ts)
        if n > 1:
            gaps = np.diff(ts) / 2.0
            room[:-1] = np.minimum(room[:-1], gaps)
            room[1:] = np.minimum(room[1:], gaps)
        out = np.empty(n)
        out[order] = np.minimum(h[order], room)
        return out


def uniform_space(n):
    """Equipartition of [0, 1] into ``n`` atoms of mass ``1/n`` at cell midpoints."""
    n = check_positive_int(n, "N")
    i = np.arange(n)
    return MeasureSpace((2 * i + 1) / (2.0 * n), np.full(n, 1.0 / n))


def refine(space, k):
    """Split every atom into ``k`` children of mass ``w/k``.

    Children equipartition the parent's cell (see :meth:`MeasureSpace.cells`)
    and are listed contiguously in parent order.
    """
    k = check_positive_int(k, "k")
    if k == 1:
        return space
    h = space.cells()
    if np.any(h <= 0):
        raise InvalidArgumentError("cannot refine an atom sitting on the boundary of [0, 1]")
    lo = space.t - h
    j = np.arange(k)
    t = lo[:, None] + (2 * j[None, :] + 1) * (2 * h[:, None]) / (2.0 * k)
    t = t.reshape(-1)
    if np.unique(t).size != t.size:
        raise InvalidArgumentError(f"atoms are too close together to split into {k} distinct children")
    return MeasureSpace(t, np.repeat(space.w / k, k))


def parent_index(space, k):
    """Parent atom of each child in ``refine(space, k)``."""
    return np.repeat(np.arange(len(space)), check_positive_int(k, "k"))


def max_atom_weight(space):
    if len(space) == 0:
        raise InvalidArgumentError("measure space is empty")
    return float(np.max(space.w))
