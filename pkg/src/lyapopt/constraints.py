"""Convex constraint-set oracles: membership, support function, projection.

All variants are bounded, so the support function is always finite. Every
variant can be translated, which is how the perturbed problems are built.
"""

import numpy as np

from ._validation import check_vector
from .exceptions import InvalidArgumentError, SchemaError


class ConstraintSet:
    """Base class. Subclasses implement ``support``, ``project`` and ``translate``."""

    kind = None

    @property
    def dim(self):
        raise NotImplementedError

    @property
    def scale(self):
        """Magnitude of the set's parameters, used to scale tolerances."""
        raise NotImplementedError

    def feas_tol(self):
        return 1e-9 * (1.0 + self.scale)

    def support(self, p):
        """Return ``(sigma_C(p), maximizer)``."""
        raise NotImplementedError

    def project(self, y):
        raise NotImplementedError

    def translate(self, x):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    def distance(self, y):
        y = check_vector(y, self.dim, "y")
        return float(np.linalg.norm(y - self.project(y)))

    def contains(self, y, tol=None):
        if tol is None:
            tol = self.feas_tol()
        return self.distance(y) <= tol

    def contains_many(self, Y, tol=None):
        """Row-wise membership test for an ``(k, n)`` array of points."""
        if tol is None:
            tol = self.feas_tol()
        return np.array([self.distance(y) <= tol for y in np.asarray(Y, dtype=float)], dtype=bool)

    def vertices(self):
        """Extreme points, for polyhedral variants; ``None`` otherwise."""
        return None

    def __eq__(self, other):
        return type(self) is type(other) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))

    def __repr__(self):
        return f"{type(self).__name__}({self.to_dict()})"


class Singleton(ConstraintSet):
    kind = "singleton"

    def __init__(self, x):
        self.x = np.array(np.atleast_1d(np.asarray(x, dtype=float)))
        if self.x.ndim != 1 or not np.all(np.isfinite(self.x)):
            raise InvalidArgumentError("singleton point must be a finite vector")

    @property
    def dim(self):
        return self.x.size

    @property
    def scale(self):
        return float(np.max(np.abs(self.x), initial=0.0))

    def support(self, p):
        p = check_vector(p, self.dim, "p")
        return float(p @ self.x), self.x.copy()

    def project(self, y):
        return self.x.copy()

    def contains_many(self, Y, tol=None):
        tol = self.feas_tol() if tol is None else tol
        return np.linalg.norm(np.asarray(Y, dtype=float) - self.x, axis=1) <= tol

    def translate(self, x):
        return Singleton(self.x + check_vector(x, self.dim))

    def vertices(self):
        return self.x[None, :].copy()

    def to_dict(self):
        return {"type": self.kind, "x": self.x.tolist()}


class Box(ConstraintSet):
    kind = "box"

    def __init__(self, lo, hi):
        self.lo = np.array(np.atleast_1d(np.asarray(lo, dtype=float)))
        self.hi = np.array(np.atleast_1d(np.asarray(hi, dtype=float)))
        if self.lo.shape != self.hi.shape or self.lo.ndim != 1:
            raise InvalidArgumentError("box bounds must be vectors of equal length")
        if not (np.all(np.isfinite(self.lo)) and np.all(np.isfinite(self.hi))):
            raise InvalidArgumentError("box bounds must be finite")
        if np.any(self.lo > self.hi):
            raise InvalidArgumentError("box requires lo <= hi componentwise")

    @property
    def dim(self):
        return self.lo.size

    @property
    def scale(self):
        return float(max(np.max(np.abs(self.lo), initial=0.0), np.max(np.abs(self.hi), initial=0.0)))

    def support(self, p):
        p = check_vector(p, self.dim, "p")
        c = np.where(p > 0, self.hi, self.lo)
        return float(p @ c), c

    def project(self, y):
        return np.clip(check_vector(y, self.dim, "y"), self.lo, self.hi)

    def contains_many(self, Y, tol=None):
        tol = self.feas_tol() if tol is None else tol
        Y = np.asarray(Y, dtype=float)
        return np.linalg.norm(Y - np.clip(Y, self.lo, self.hi), axis=1) <= tol

    def translate(self, x):
        x = check_vector(x, self.dim)
        return Box(self.lo + x, self.hi + x)

    def vertices(self):
        corners = np.array(np.meshgrid(*[[0, 1]] * self.dim, indexing="ij")).reshape(self.dim, -1).T
        v = np.where(corners == 1, self.hi, self.lo)
        return np.unique(v, axis=0)

    def to_dict(self):
        return {"type": self.kind, "lo": self.lo.tolist(), "hi": self.hi.tolist()}


class Ball(ConstraintSet):
    kind = "ball"

    def __init__(self, center, radius):
        self.center = np.array(np.atleast_1d(np.asarray(center, dtype=float)))
        self.radius = float(radius)
        if self.center.ndim != 1 or not np.all(np.isfinite(self.center)):
            raise InvalidArgumentError("ball center must be a finite vector")
        if not np.isfinite(self.radius) or self.radius < 0:
            raise InvalidArgumentError("ball radius must be finite and >= 0")

    @property
    def dim(self):
        return self.center.size

    @property
    def scale(self):
        return float(np.max(np.abs(self.center), initial=0.0) + self.radius)

    def support(self, p):
        p = check_vector(p, self.dim, "p")
        norm = float(np.linalg.norm(p))
        if norm == 0.0:
            return 0.0, self.center.copy()
        return float(p @ self.center) + self.radius * norm, self.center + self.radius * p / norm

    def project(self, y):
        y = check_vector(y, self.dim, "y")
        d = y - self.center
        norm = float(np.linalg.norm(d))
        if norm <= self.radius:
            return y
        return self.center + self.radius * d / norm

    def contains_many(self, Y, tol=None):
        tol = self.feas_tol() if tol is None else tol
        return np.linalg.norm(np.asarray(Y, dtype=float) - self.center, axis=1) - self.radius <= tol

    def translate(self, x):
        return Ball(self.center + check_vector(x, self.dim), self.radius)

    def to_dict(self):
        return {"type": self.kind, "center": self.center.tolist(), "radius": self.radius}


class VPolytope(ConstraintSet):
    """Convex hull of a finite vertex list."""

    kind = "vpolytope"

    def __init__(self, vertices):
        v = np.array(vertices, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] < 1:
            raise InvalidArgumentError("vpolytope needs at least one vertex")
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("vpolytope vertices must be finite")
        self._v = v

    @property
    def dim(self):
        return self._v.shape[1]

    @property
    def scale(self):
        return float(np.max(np.abs(self._v)))

    def vertices(self):
        return self._v.copy()

    def support(self, p):
        p = check_vector(p, self.dim, "p")
        vals = self._v @ p
        j = int(np.argmax(vals))
        return float(vals[j]), self._v[j].copy()

    def project(self, y):
        y = check_vector(y, self.dim, "y")
        return y + min_norm_point(self._v - y)

    def contains_many(self, Y, tol=None):
        tol = self.feas_tol() if tol is None else tol
        Y = np.asarray(Y, dtype=float)
        lo, hi = self._v.min(axis=0) - tol, self._v.max(axis=0) + tol
        out = np.all((Y >= lo) & (Y <= hi), axis=1)
        for k in np.flatnonzero(out):
            out[k] = self.distance(Y[k]) <= tol
        return out

    def translate(self, x):
        return VPolytope(self._v + check_vector(x, self.dim))

    def to_dict(self):
        return {"type": self.kind, "vertices": self._v.tolist()}


def min_norm_point(points, max_iter=1000):
    """Minimum-norm point of the convex hull of the rows of ``points`` (Wolfe's method)."""
    P = np.asarray(points, dtype=float)
    scale = max(1.0, float(np.max(np.sum(P * P, axis=1))))
    eps = 1e-14 * scale
    i0 = int(np.argmin(np.sum(P * P, axis=1)))
    S = [i0]
    lam = np.array([1.0])
    x = P[i0].copy()
    for _ in range(max_iter):
        j = int(np.argmin(P @ x))
        if x @ x - P[j] @ x <= eps or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            Q = P[S]
            k = len(S)
            A = np.zeros((k + 1, k + 1))
            A[:k, :k] = Q @ Q.T
            A[:k, k] = 1.0
            A[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            alpha = np.linalg.lstsq(A, rhs, rcond=None)[0][:k]
            if np.all(alpha > 1e-15):
                lam = alpha
                break
            neg = alpha <= 1e-15
            ratios = lam[neg] / (lam[neg] - alpha[neg])
            theta = float(np.min(ratios)) if ratios.size else 1.0
            lam = lam + theta * (alpha - lam)
            keep = lam > 1e-15
            S = [s for s, kp in zip(S, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
        x = lam @ P[S]
    return x


_KINDS = {cls.kind: cls for cls in (Singleton, Box, Ball, VPolytope)}


def constraint_from_dict(doc, dim=None, field="C"):
    if not isinstance(doc, dict) or "type" not in doc:
        raise SchemaError(field, "must be an object with a 'type'")
    kind = doc["type"]
    try:
        if kind == "singleton":
            c = Singleton(doc["x"])
        elif kind == "box":
            c = Box(doc["lo"], doc["hi"])
        elif kind == "ball":
            c = Ball(doc["center"], doc["radius"])
        elif kind == "vpolytope":
            c = VPolytope(doc["vertices"])
        else:
            raise SchemaError(f"{field}.type", f"unknown constraint type {kind!r}")
    except KeyError as exc:
        raise SchemaError(f"{field}.{exc.args[0]}", "missing field") from None
    except InvalidArgumentError as exc:
        raise SchemaError(field, str(exc)) from None
    if dim is not None and c.dim != dim:
        raise SchemaError(field, f"dimension {c.dim} does not match dim={dim}")
    return c


def support(C, p):
    """Support function of ``C`` at ``p`` and an attaining point."""
    return C.support(p)
