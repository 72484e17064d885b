"""Lattices, duality, Lagrange reduction and 2D Voronoi cells.

Bases are stored column-wise: ``basis[:, i]`` is the i-th basis vector.
Cartesian vectors are plain 1D numpy arrays; integer coordinates with
respect to a basis are tuples or integer arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

MAX_CONDITION = 1e8
TIE_RTOL = 1e-9
COORD_TOL = 1e-9
CONTAINS_TOL = 1e-12


class LatticeError(ValueError):
    pass


class SingularBasis(LatticeError):
    pass


class DimensionMismatch(LatticeError):
    pass


class UnsupportedDimension(LatticeError):
    pass


class NotALatticeVector(LatticeError):
    pass


class VoronoiConsistencyError(RuntimeError):
    """Half-plane intersection produced neither a rectangle nor a hexagon."""


@dataclass(frozen=True, eq=False)
class Lattice:
    """Full-rank lattice ``B @ Z^n``.

    ``factors`` is non-empty only for lattices assembled by
    :func:`orthogonal_sum`; it lets dimension >= 3 quantities be computed
    factor by factor.
    """

    basis: np.ndarray
    factors: tuple["Lattice", ...] = field(default=(), repr=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @cached_property
    def gram(self) -> np.ndarray:
        return self.basis.T @ self.basis

    @cached_property
    def det(self) -> float:
        return float(abs(np.linalg.det(self.basis)))

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.basis)

    def coords(self, x) -> np.ndarray:
        """Real coordinates of ``x`` (shape ``(..., n)``) in this basis."""
        return np.asarray(x, dtype=float) @ self.inverse.T

    def point(self, k) -> np.ndarray:
        """Cartesian vector(s) for integer coordinates ``k``."""
        return np.asarray(k, dtype=float) @ self.basis.T

    def integer_coords(self, x, tol: float = COORD_TOL) -> np.ndarray:
        """Integer coordinates of the lattice vector ``x``.

        Raises NotALatticeVector if ``x`` is off the lattice by more than
        ``tol`` in some coordinate.
        """
        c = self.coords(x)
        k = np.rint(c)
        if np.any(np.abs(c - k) > tol * np.maximum(1.0, np.abs(c))):
            raise NotALatticeVector(f"{np.asarray(x).tolist()} is not a lattice vector")
        return k.astype(np.int64)

    def contains_point(self, x, tol: float = COORD_TOL) -> bool:
        try:
            self.integer_coords(x, tol)
        except NotALatticeVector:
            return False
        return True

    def scaled(self, c: float) -> "Lattice":
        return _make(c * self.basis, tuple(f.scaled(c) for f in self.factors))

    def transformed(self, m) -> "Lattice":
        """Image under the linear map ``m`` (factors are dropped)."""
        return _make(np.asarray(m, dtype=float) @ self.basis)


def _make(basis: np.ndarray, factors=()) -> Lattice:
    basis = np.array(basis, dtype=float)
    if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
        raise DimensionMismatch(f"basis must be square, got shape {basis.shape}")
    n = basis.shape[0]
    if not np.all(np.isfinite(basis)):
        raise LatticeError("basis has non-finite entries")
    scale = float(np.max(np.linalg.norm(basis, axis=0)))
    det = abs(float(np.linalg.det(basis)))
    if scale == 0.0 or det < 1e-12 * scale**n:
        raise SingularBasis("basis vectors are linearly dependent")
    cond = float(np.linalg.cond(basis))
    if cond > MAX_CONDITION:
        raise SingularBasis(f"basis condition number {cond:.3g} exceeds {MAX_CONDITION:.0e}")
    basis.setflags(write=False)
    return Lattice(basis, tuple(factors))


def lattice_from_basis(rows: Sequence[Sequence[float]]) -> Lattice:
    """Build a lattice from basis vectors given as rows."""
    rows = [list(r) if np.ndim(r) else [r] for r in rows]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise DimensionMismatch("expected n basis vectors of length n")
    return _make(np.array(rows, dtype=float).T)


def orthogonal_sum(*factors: Lattice) -> Lattice:
    """Block-diagonal lattice ``L_1 ⊥ ... ⊥ L_m``."""
    if not factors:
        raise LatticeError("orthogonal_sum needs at least one factor")
    n = sum(f.dim for f in factors)
    basis = np.zeros((n, n))
    i = 0
    for f in factors:
        basis[i:i + f.dim, i:i + f.dim] = f.basis
        i += f.dim
    flat = []
    for f in factors:
        flat.extend(f.factors or (f,))
    return _make(basis, tuple(flat))


def dual_lattice(L: Lattice) -> Lattice:
    return _make(L.inverse.T, tuple(dual_lattice(f) for f in L.factors))


def rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def angle_lattice(degrees: float) -> Lattice:
    """Lattice spanned by ``e1`` and ``e1`` rotated counter-clockwise by ``degrees``."""
    t = math.radians(degrees)
    return lattice_from_basis([[1.0, 0.0], [math.cos(t), math.sin(t)]])


PRESETS = {"L90": 90.0, "L93": 93.0, "L105": 105.0, "L120": 120.0}


def preset_lattice(name: str) -> Lattice:
    try:
        return angle_lattice(PRESETS[name])
    except KeyError:
        raise LatticeError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def _require_dim(L: Lattice, dims) -> None:
    if L.dim not in dims:
        raise UnsupportedDimension(f"operation supports dimension {sorted(dims)}, got {L.dim}")


# -- reduction and short vectors ---------------------------------------------


@dataclass(frozen=True)
class ReducedBasis:
    """Lagrange-reduced basis ``b1, b2`` with ``basis @ transform = [b1 b2]``."""

    b1: np.ndarray
    b2: np.ndarray
    transform: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.column_stack([self.b1, self.b2])


def lagrange_reduce(L: Lattice) -> ReducedBasis:
    """Lagrange-Gauss reduction, sign-normalized so that ``b1 . b2 <= 0``."""
    _require_dim(L, {2})
    B = L.basis
    U = np.eye(2, dtype=np.int64)
    G = L.gram
    if G[0, 0] > G[1, 1]:
        U = U[:, ::-1].copy()
    for _ in range(10_000):
        g = U.T @ G @ U
        mu = int(np.rint(g[0, 1] / g[0, 0]))
        U[:, 1] -= mu * U[:, 0]
        g = U.T @ G @ U
        if g[1, 1] < g[0, 0]:
            U = U[:, ::-1].copy()
        else:
            break
    else:  # pragma: no cover - reduction always terminates on valid input
        raise RuntimeError("Lagrange reduction did not terminate")
    if (U.T @ G @ U)[0, 1] > 0:
        U[:, 1] = -U[:, 1]
    R = B @ U
    return ReducedBasis(R[:, 0], R[:, 1], U)


def _box_points(center_coords: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    axes = [np.arange(-b, b + 1) for b in bounds]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(bounds))
    return grid + center_coords


def lattice_points_in_ball(L: Lattice, radius: float) -> np.ndarray:
    """All nonzero lattice vectors of norm at most ``radius`` (Cartesian, 1D/2D).

    The box ``|k_i| <= radius * |d_i|`` with ``d_i`` the dual rows of the
    reduced basis contains every such point, since ``k_i = d_i . x``.
    """
    _require_dim(L, {1, 2})
    R = L.basis if L.dim == 1 else lagrange_reduce(L).matrix
    dual_rows = np.linalg.inv(R)
    bounds = np.ceil(radius * np.linalg.norm(dual_rows, axis=1)).astype(int) + 1
    k = _box_points(np.zeros(L.dim, dtype=int), bounds)
    pts = k @ R.T
    norms = np.linalg.norm(pts, axis=1)
    keep = (norms <= radius * (1 + TIE_RTOL)) & (norms > 0)
    return pts[keep]


def shortest_vector(L: Lattice) -> tuple[np.ndarray, float]:
    """A shortest nonzero vector and its length."""
    if L.dim == 1:
        v = L.basis[:, 0].copy()
        return v, float(abs(v[0]))
    if L.dim == 2:
        b1 = lagrange_reduce(L).b1
        return b1.copy(), float(np.linalg.norm(b1))
    if L.factors:
        best = None
        offset = 0
        for f in L.factors:
            v, lam = shortest_vector(f)
            if best is None or lam < best[1]:
                full = np.zeros(L.dim)
                full[offset:offset + f.dim] = v
                best = (full, lam)
            offset += f.dim
        return best
    raise UnsupportedDimension(f"shortest_vector needs dim 1 or 2 (or an orthogonal sum), got {L.dim}")


def coset_shortest_vectors(L: Lattice, v) -> np.ndarray:
    """All shortest vectors in the coset ``v + 2L``; ties at relative 1e-9 are all kept.

    Enumerates ``w = v + 2 R j`` over the box ``|j_i| <= ceil(|v| |d_i|) + 1``
    (``R`` reduced basis, ``d_i`` its dual rows), which holds every coset
    element no longer than ``v``.
    """
    _require_dim(L, {1, 2})
    v = np.asarray(v, dtype=float).reshape(L.dim)
    L.integer_coords(v)
    if not np.any(v):
        return np.zeros((1, L.dim))
    R = L.basis if L.dim == 1 else lagrange_reduce(L).matrix
    dual_rows = np.linalg.inv(R)
    m = np.rint(dual_rows @ v).astype(np.int64)
    bounds = np.ceil(np.linalg.norm(v) * np.linalg.norm(dual_rows, axis=1)).astype(int) + 1
    j = _box_points(np.zeros(L.dim, dtype=np.int64), bounds)
    coords = m + 2 * j
    pts = coords @ R.T
    norms = np.linalg.norm(pts, axis=1)
    best = norms.min()
    sel = pts[norms <= best * (1 + TIE_RTOL)]
    order = np.lexsort(sel.T[::-1])
    return sel[order]


def voronoi_relevant_vectors(L: Lattice) -> np.ndarray:
    """Voronoi-relevant vectors: the unique ± shortest pair of their coset mod 2L.

    Returned sorted by polar angle, so consecutive entries share a cell vertex.
    """
    _require_dim(L, {1, 2})
    if L.dim == 1:
        a = abs(L.basis[0, 0])
        return np.array([[a], [-a]])
    red = lagrange_reduce(L)
    out = []
    for rep in (red.b1, red.b2, red.b1 + red.b2):
        s = coset_shortest_vectors(L, rep)
        if len(s) == 2:
            out.extend(s)
    out = np.array(out)
    return out[np.argsort(np.arctan2(out[:, 1], out[:, 0]))]


# -- Voronoi cell ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class VoronoiCell2D:
    """Voronoi cell of a 2D lattice as a counter-clockwise convex polygon.

    Vertex ``i`` lies on the facets of ``relevant_vectors[i]`` and
    ``relevant_vectors[i + 1]``.
    """

    vertices: np.ndarray
    relevant_vectors: np.ndarray
    inradius: float
    circumradius: float

    @property
    def kind(self) -> str:
        return "rectangle" if len(self.vertices) == 4 else "hexagon"

    @property
    def deep_hole(self) -> np.ndarray:
        norms = np.linalg.norm(self.vertices, axis=1)
        i = int(np.argmax(norms >= self.circumradius * (1 - 1e-12)))
        return self.vertices[i].copy()

    @property
    def edges(self) -> list[tuple[np.ndarray, np.ndarray]]:
        V = self.vertices
        return [(V[i - 1], V[i]) for i in range(len(V))]

    @property
    def area(self) -> float:
        x, y = self.vertices.T
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    @property
    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def boundary_points(self) -> np.ndarray:
        """Vertices, edge midpoints and edge quarter points."""
        pts = [self.vertices]
        for t in (0.25, 0.5, 0.75):
            pts.append(np.array([(1 - t) * a + t * b for a, b in self.edges]))
        return np.vstack(pts)

    def contains(self, x, tol: float = CONTAINS_TOL) -> np.ndarray | bool:
        """Half-plane test ``x.r <= |r|^2 / 2`` with slack relative to ``|r|^2``."""
        x = np.asarray(x, dtype=float)
        R = self.relevant_vectors
        ok = np.all(x @ R.T <= 0.5 * np.sum(R * R, axis=1) * (1 + tol), axis=-1)
        return bool(ok) if ok.ndim == 0 else ok

    def project(self, x) -> np.ndarray:
        """Closest point of the cell to ``x``."""
        x = np.asarray(x, dtype=float)
        if self.contains(x):
            return x
        best, best_d = None, math.inf
        for a, b in self.edges:
            d = b - a
            t = min(1.0, max(0.0, float(np.dot(x - a, d) / np.dot(d, d))))
            p = a + t * d
            dist = float(np.dot(x - p, x - p))
            if dist < best_d:
                best, best_d = p, dist
        return best

    def grid(self, per_axis: int) -> np.ndarray:
        """In-cell points of a ``per_axis`` x ``per_axis`` grid over the bounding box."""
        lo, hi = self.bounding_box
        xs = np.linspace(lo[0], hi[0], per_axis)
        ys = np.linspace(lo[1], hi[1], per_axis)
        X, Y = np.meshgrid(xs, ys, indexing="xy")
        pts = np.column_stack([X.ravel(), Y.ravel()])
        return pts[self.contains(pts)]

    def samples(self, per_axis: int) -> np.ndarray:
        """Grid points plus the center and boundary points where tight constraints sit."""
        return np.vstack([self.grid(per_axis), np.zeros((1, 2)), self.boundary_points()])


def voronoi_cell(L: Lattice) -> VoronoiCell2D:
    _require_dim(L, {2})
    R = voronoi_relevant_vectors(L)
    if len(R) not in (4, 6):
        raise VoronoiConsistencyError(f"{len(R)} relevant vectors; expected 4 or 6")
    verts = []
    for i in range(len(R)):
        a, b = R[i], R[(i + 1) % len(R)]
        A = np.array([a, b])
        verts.append(np.linalg.solve(A, 0.5 * np.array([a @ a, b @ b])))
    verts = np.array(verts)
    if len(verts) not in (4, 6):  # pragma: no cover
        raise VoronoiConsistencyError("vertex count is neither 4 nor 6")
    lam = float(np.min(np.linalg.norm(R, axis=1)))
    mu = float(np.max(np.linalg.norm(verts, axis=1)))
    verts.setflags(write=False)
    R.setflags(write=False)
    return VoronoiCell2D(verts, R, lam / 2, mu)


def cell_contains(cell: VoronoiCell2D, x) -> bool:
    return cell.contains(x)


def covering_radius(L: Lattice) -> float:
    if L.dim == 1:
        return abs(float(L.basis[0, 0])) / 2
    if L.dim == 2:
        return voronoi_cell(L).circumradius
    if L.factors:
        return math.sqrt(sum(covering_radius(f) ** 2 for f in L.factors))
    raise UnsupportedDimension(f"covering_radius needs dim 1 or 2 (or an orthogonal sum), got {L.dim}")


def deep_hole(L: Lattice) -> np.ndarray:
    """A point of the Voronoi cell at distance ``covering_radius(L)`` from 0."""
    if L.dim == 1:
        return np.array([abs(float(L.basis[0, 0])) / 2])
    if L.dim == 2:
        return voronoi_cell(L).deep_hole
    if L.factors:
        return np.concatenate([deep_hole(f) for f in L.factors])
    raise UnsupportedDimension(f"deep_hole needs dim 1 or 2 (or an orthogonal sum), got {L.dim}")
