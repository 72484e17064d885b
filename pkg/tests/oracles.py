"""Brute-force reference computations that share no code with the library.

The cell comes from scipy's half-space intersection over every lattice
point in a generous ball, and ``g`` is rebuilt from an explicit dual
enumeration with a least-squares identity decomposition.
"""

import itertools
import math

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection


def _points(B, R):
    k = np.array([p for p in itertools.product(range(-R, R + 1), repeat=2) if any(p)], dtype=float)
    return k, k @ B.T


def cell_vertices(basis_rows, R=6):
    """Voronoi-cell vertices (counter-clockwise) of the lattice with the given basis rows."""
    B = np.asarray(basis_rows, dtype=float).T
    _, P = _points(B, R)
    # half-spaces x.p - |p|^2/2 <= 0 in scipy's A x + b <= 0 form
    hs = np.column_stack([P, -0.5 * np.sum(P * P, axis=1)])
    V = HalfspaceIntersection(hs, np.zeros(2)).intersections
    hull = ConvexHull(V)
    return V[hull.vertices]


def distortion_function(basis_rows, R=4):
    """``g`` built from the shortest dual vector of each nonzero coset mod 2L*."""
    B = np.asarray(basis_rows, dtype=float).T
    Bd = np.linalg.inv(B).T
    k, U = _points(Bd, R)
    best = {}
    for kk, u in zip(k.astype(int), U):
        c = (kk[0] % 2, kk[1] % 2)
        if c == (0, 0):
            continue
        if c not in best or u @ u < best[c] @ best[c] - 1e-12:
            best[c] = u
    U = np.array([best[c] for c in sorted(best)])
    A = 4 * math.pi**2 * np.array([U[:, 0] ** 2, U[:, 0] * U[:, 1], U[:, 1] ** 2])
    z = np.linalg.lstsq(A, np.array([1.0, 0.0, 1.0]), rcond=None)[0]

    def g(X):
        X = np.atleast_2d(X)
        den = 2 * (1 - np.cos(2 * math.pi * X @ U.T)) @ z
        return np.sum(X * X, axis=1) / den

    return g


def grid_maximum(basis_rows, n=2000, chunk=1_000_000):
    """Max of ``g`` on an ``n``-subdivision barycentric grid of each fan triangle (0, v_i, v_i+1).

    Vertices and edges are grid points, so boundary maxima are hit exactly;
    the origin is skipped.
    """
    V = cell_vertices(basis_rows)
    g = distortion_function(basis_rows)
    i, j = np.triu_indices(n + 1)
    a, b = (n - j) / n, i / n  # a + b <= 1 over all pairs with i <= j
    keep = (a + b) > 0
    a, b = a[keep], b[keep]
    best, arg = -math.inf, None
    for p, q in zip(V, np.roll(V, -1, axis=0)):
        for s in range(0, len(a), chunk):
            X = np.outer(a[s:s + chunk], p) + np.outer(b[s:s + chunk], q)
            vals = g(X)
            m = int(np.argmax(vals))
            if vals[m] > best:
                best, arg = float(vals[m]), X[m]
    return best, arg
