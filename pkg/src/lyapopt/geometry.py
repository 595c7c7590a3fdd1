"""Covering radius of a finite point cloud inside its own convex hull.

The deficit of a cloud ``P`` is ``max_{y in conv P} min_{p in P} |y - p|``.
Inside the Voronoi cell of ``p`` the distance to the cloud is the convex
function ``|y - p|``, so its maximum over ``conv P`` sits at a vertex of some
``cell ∩ conv P``. Those vertices are Voronoi vertices (Delaunay
circumcentres), hull vertices, and intersections of lower-dimensional Voronoi
faces with hull faces; every such candidate lying in the hull is scored with
a nearest-neighbour query. Clouds are first reduced to their affine hull.
Exact for affine dimension <= 3; Monte Carlo beyond.
"""

import numpy as np
from scipy.spatial import ConvexHull, Delaunay, cKDTree
from scipy.spatial import QhullError


def dedupe(points, rel_tol=1e-12):
    """Sorted unique rows of ``points`` up to ``rel_tol * scale``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.shape[0] == 0:
        return P
    scale = 1.0 + float(np.max(np.abs(P)))
    q = rel_tol * scale
    keys = np.round(P / q).astype(np.int64)
    _, first = np.unique(keys, axis=0, return_index=True)
    U = P[np.sort(first)]
    return U[np.lexsort(U.T[::-1])]


def affine_coordinates(points, rel_tol=1e-10):
    """Isometric coordinates of ``points`` in their affine hull."""
    P = np.asarray(points, dtype=float)
    c = P.mean(axis=0)
    Q = P - c
    if Q.shape[0] == 1:
        return np.zeros((1, 0))
    _, sv, Vt = np.linalg.svd(Q, full_matrices=False)
    scale = max(1.0, float(np.max(np.abs(P))))
    r = int(np.sum(sv > rel_tol * scale * max(1.0, np.sqrt(P.shape[0]))))
    return Q @ Vt[:r].T


def _circumcenters(Y, simplices):
    """Circumcentres of full-dimensional simplices given as index rows."""
    A = Y[simplices[:, 1:]] - Y[simplices[:, :1]]  # (m, d, d)
    b = 0.5 * np.sum(A * A, axis=2)
    ok = np.abs(np.linalg.det(A)) > 1e-300
    out = np.full((simplices.shape[0], Y.shape[1]), np.nan)
    if np.any(ok):
        out[ok] = Y[simplices[ok, 0]] + np.linalg.solve(A[ok], b[ok][..., None])[..., 0]
    return out[ok]


def _edges(simplices):
    k = simplices.shape[1]
    pairs = [(a, b) for a in range(k) for b in range(a + 1, k)]
    E = np.concatenate([simplices[:, [a, b]] for a, b in pairs])
    return np.unique(np.sort(E, axis=1), axis=0)


def _faces(simplices, size):
    from itertools import combinations

    k = simplices.shape[1]
    F = np.concatenate([simplices[:, list(c)] for c in combinations(range(k), size)])
    return np.unique(np.sort(F, axis=1), axis=0)


def _inside(hull_eq, Y, tol):
    return np.all(Y @ hull_eq[:, :-1].T + hull_eq[:, -1] <= tol, axis=1)


def _bisector_hull_edge_hits(Y, pairs, hull_edges):
    """Points where bisector hyperplanes of ``pairs`` cross hull edge segments."""
    p, q = Y[pairs[:, 0]], Y[pairs[:, 1]]
    nrm = q - p
    off = 0.5 * (np.sum(q * q, axis=1) - np.sum(p * p, axis=1))
    a, b = Y[hull_edges[:, 0]], Y[hull_edges[:, 1]]
    num = off[:, None] - nrm @ a.T  # (E, H)
    den = nrm @ (b - a).T
    with np.errstate(divide="ignore", invalid="ignore"):
        s = num / den
    ok = np.isfinite(s) & (s >= 0) & (s <= 1)
    ei, hi = np.nonzero(ok)
    return a[hi] + s[ei, hi][:, None] * (b - a)[hi]


def _exact_deficit(Y):
    d = Y.shape[1]
    scale = 1.0 + float(np.max(np.abs(Y)))
    tol = 1e-10 * scale
    hull = ConvexHull(Y)
    tri = Delaunay(Y)
    cands = [Y[hull.vertices]]
    cc = _circumcenters(Y, tri.simplices)
    cands.append(cc[_inside(hull.equations, cc, tol)])
    hull_edges = _edges(hull.simplices) if d == 3 else hull.simplices
    cands.append(_bisector_hull_edge_hits(Y, _edges(tri.simplices), hull_edges))
    if d == 3:
        # Voronoi edges are lines normal to Delaunay triangles through their circumcentres
        T = _faces(tri.simplices, 3)
        p0, p1, p2 = Y[T[:, 0]], Y[T[:, 1]], Y[T[:, 2]]
        u, v = p1 - p0, p2 - p0
        nrm = np.cross(u, v)
        nn = np.sum(nrm * nrm, axis=1)
        good = nn > 1e-300
        u, v, nrm, nn, p0 = u[good], v[good], nrm[good], nn[good], p0[good]
        uu = np.sum(u * u, axis=1)
        vv = np.sum(v * v, axis=1)
        centre = p0 + (np.cross(nrm, u) * vv[:, None] + np.cross(v, nrm) * uu[:, None]) / (2 * nn[:, None])
        fn, fo = hull.equations[:, :-1], hull.equations[:, -1]
        with np.errstate(divide="ignore", invalid="ignore"):
            s = -(centre @ fn.T + fo) / (nrm @ fn.T)
        ti, fi = np.nonzero(np.isfinite(s))
        hits = centre[ti] + s[ti, fi][:, None] * nrm[ti]
        cands.append(hits[_inside(hull.equations, hits, tol)])
    C = np.concatenate([c for c in cands if c.size])
    C = C[_inside(hull.equations, C, tol)]
    dist, _ = cKDTree(Y).query(C)
    return float(np.max(dist, initial=0.0))


def covering_deficit(points, rng=None, n_samples=20000):
    """Return ``(deficit, sample_count)``; ``sample_count`` is 0 when exact."""
    P = dedupe(points)
    if P.shape[0] <= 1:
        return 0.0, 0
    Y = affine_coordinates(P)
    r = Y.shape[1]
    if r == 0:
        return 0.0, 0
    if r == 1:
        y = np.sort(Y[:, 0])
        return float(np.max(np.diff(y)) / 2.0), 0
    if r <= 3:
        try:
            return _exact_deficit(Y), 0
        except QhullError:
            pass
    rng = np.random.default_rng(rng)
    k = min(r + 1, Y.shape[0])
    idx = np.array([rng.choice(Y.shape[0], size=k, replace=False) for _ in range(n_samples)])
    lam = rng.dirichlet(np.ones(k), size=n_samples)
    S = np.einsum("sk,skd->sd", lam, Y[idx])
    dist, _ = cKDTree(Y).query(S)
    return float(np.max(dist)), n_samples
