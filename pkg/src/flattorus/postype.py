"""Finite-support positive-type functions on a flat torus.

A :class:`WeightFunction` holds nonnegative Fourier weights ``z`` on the
dual lattice with ``z(u) = z(-u)``.  One entry is stored per ``±u`` pair,
keyed by the canonical representative (first nonzero dual coordinate
positive), and its value is the per-vector weight ``z(u)``.  Every sum over
the full dual lattice therefore counts each stored entry twice; that
factor lives in :data:`PAIR` and nowhere else.

The associated squared-distance function is

    f(x) = 2 * sum_{u in L*} z(u) * (1 - cos(2 pi u.x)),

and ``(C, z)`` is a feasible embedding when ``|x|^2 <= f(x)`` on the
Voronoi cell and ``C I - 4 pi^2 sum_u z(u) u u^T`` is positive semidefinite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Iterator, Mapping

import numpy as np

from .lattice import Lattice, UnsupportedDimension, covering_radius, voronoi_cell

TWO_PI = 2 * math.pi
#: each stored entry stands for the two vectors u and -u
PAIR = 2
MARGIN_TOL = 1e-9


class WeightError(ValueError):
    pass


class NotSameCosetPair(WeightError):
    pass


class WeightOrderViolation(WeightError):
    pass


class NotAMultiple(WeightError):
    pass


class NonTermination(RuntimeError):
    pass


def canonical(u) -> tuple[int, ...]:
    """Representative of ``±u`` whose first nonzero coordinate is positive."""
    u = tuple(int(c) for c in u)
    for c in u:
        if c:
            return u if c > 0 else tuple(-a for a in u)
    raise WeightError("the zero vector carries no weight")


def parity(u) -> tuple[int, ...]:
    """Coset of ``u`` in ``L*/2L*``."""
    return tuple(int(c) % 2 for c in u)


def is_primitive(u) -> bool:
    return reduce(math.gcd, (abs(int(c)) for c in u)) == 1


@dataclass(frozen=True, eq=False)
class WeightFunction:
    dual: Lattice
    entries: Mapping[tuple[int, ...], float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for u, w in self.entries.items():
            if len(u) != self.dual.dim:
                raise WeightError(f"coordinate {u} has wrong length for dimension {self.dual.dim}")
            w = float(w)
            if not (w >= 0 and math.isfinite(w)):
                raise WeightError(f"weight for {u} must be finite and nonnegative, got {w}")
            key = canonical(u)
            if key in clean:
                raise WeightError(f"{u} duplicates the pair of {key}")
            if w > 0:
                clean[key] = w
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    @classmethod
    def from_one_sided(cls, dual: Lattice, coords, weights) -> "WeightFunction":
        """Convert weights attached to single vectors ``u_i`` (not ``±u_i``).

        A one-sided weight ``w`` on ``u`` gives the same distance function as
        the symmetric weight ``w / PAIR`` on each of ``u`` and ``-u``.
        """
        return cls(dual, {tuple(int(c) for c in u): w / PAIR for u, w in zip(coords, weights)})

    def one_sided(self) -> dict[tuple[int, ...], float]:
        return {u: PAIR * w for u, w in self.entries.items()}

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, u) -> float:
        return self.entries.get(canonical(u), 0.0)

    @cached_property
    def coords(self) -> np.ndarray:
        return np.array(list(self.entries), dtype=np.int64).reshape(-1, self.dual.dim)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array(list(self.entries.values()), dtype=float)

    @cached_property
    def vectors(self) -> np.ndarray:
        return self.dual.point(self.coords).reshape(-1, self.dual.dim)

    @property
    def total_mass(self) -> float:
        """``sum_{u in L*} z(u)``."""
        return PAIR * float(self.weights.sum())

    @property
    def moment(self) -> np.ndarray:
        """``sum_{u in L*} z(u) u u^T``."""
        V = self.vectors
        return PAIR * (V.T * self.weights) @ V

    @property
    def support_radius(self) -> float:
        return float(np.max(np.linalg.norm(self.vectors, axis=1), initial=0.0))

    def spans(self) -> bool:
        return len(self) > 0 and np.linalg.matrix_rank(self.coords) == self.dual.dim

    def replace(self, entries) -> "WeightFunction":
        return WeightFunction(self.dual, entries)


@dataclass(frozen=True)
class PrimalCandidate:
    C: float
    z: WeightFunction


# -- evaluation ---------------------------------------------------------------


def one_minus_cos(t):
    """``1 - cos(2 pi t)`` as ``2 sin^2(pi t)``, accurate for small ``t``."""
    return 2 * np.sin(np.pi * np.asarray(t, dtype=float)) ** 2


def evaluate_f(z: WeightFunction, x) -> np.ndarray | float:
    """``f(x)`` for one point or an ``(m, n)`` array of points."""
    x = np.asarray(x, dtype=float)
    if len(z) == 0:
        out = np.zeros(x.shape[:-1])
    else:
        out = 2 * PAIR * (one_minus_cos(x @ z.vectors.T) @ z.weights)
    return float(out) if out.ndim == 0 else out


def spectral_expansion(z: WeightFunction) -> float:
    """Largest eigenvalue of ``4 pi^2 sum_u z(u) u u^T``."""
    M = 4 * math.pi**2 * z.moment
    return float(np.linalg.eigvalsh(M)[-1])


def embedding_map(z: WeightFunction, x) -> list[tuple[tuple[int, ...], complex]]:
    """Coordinates ``sqrt(z(u)) exp(2 pi i u.x)`` for every ``u`` in the support (both signs)."""
    x = np.asarray(x, dtype=float)
    out = []
    for u, w, v in zip(z.entries, z.weights, z.vectors):
        t = TWO_PI * float(v @ x)
        r = math.sqrt(w)
        out.append((u, complex(r * math.cos(t), r * math.sin(t))))
        out.append((tuple(-c for c in u), complex(r * math.cos(t), -r * math.sin(t))))
    return out


def embed_points(z: WeightFunction, X) -> np.ndarray:
    """Real embedding of each row of ``X``: shape ``(m, 2 * PAIR * len(z))``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    t = TWO_PI * (X @ z.vectors.T)
    r = np.sqrt(z.weights)
    # u and -u share the cosine and have opposite sines
    return np.hstack([r * np.cos(t), r * np.sin(t), r * np.cos(t), -r * np.sin(t)])


def subquadratic_check(z: WeightFunction, x, y):
    """``2 f(x) + 2 f(y) - f(x + y) - f(x - y)``, nonnegative for every positive-type f."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return 2 * evaluate_f(z, x) + 2 * evaluate_f(z, y) - evaluate_f(z, x + y) - evaluate_f(z, x - y)


def scaling_check(z: WeightFunction, x, k: int):
    """``k^2 f(x) - f(k x)`` for a positive integer ``k``."""
    if int(k) != k or k < 1:
        raise ValueError("k must be a positive integer")
    x = np.asarray(x, dtype=float)
    return k * k * evaluate_f(z, x) - evaluate_f(z, k * x)


# -- feasibility ----------------------------------------------------------------


def _cell_samples(L: Lattice, per_axis: int) -> np.ndarray:
    if L.dim == 1:
        a = abs(float(L.basis[0, 0]))
        return np.linspace(-a / 2, a / 2, per_axis).reshape(-1, 1)
    if L.dim == 2:
        return voronoi_cell(L).samples(per_axis)
    raise UnsupportedDimension(f"cell sampling needs dim 1 or 2, got {L.dim}")


@dataclass(frozen=True)
class FeasibilityReport:
    eigen_margin: float
    contraction_margin: float
    worst_point: np.ndarray
    refined_margin: float
    n_samples: int
    verdict: str

    @property
    def feasible(self) -> bool:
        return self.verdict == "feasible"


def _contraction_margin(z: WeightFunction, pts: np.ndarray) -> tuple[float, np.ndarray]:
    m = evaluate_f(z, pts) - np.sum(pts * pts, axis=1)
    i = int(np.argmin(m))
    return float(m[i]), pts[i]


def check_primal_feasible(cand: PrimalCandidate, L: Lattice, grid_per_axis: int = 64,
                          tol: float = MARGIN_TOL) -> FeasibilityReport:
    """Check both primal constraints on a sampled Voronoi cell.

    The contraction constraint is sampled at ``grid_per_axis`` and again at
    twice that resolution; a violation that only shows up on the finer grid
    makes the verdict ``inconclusive``.
    """
    if grid_per_axis < 16:
        raise ValueError("grid_per_axis must be at least 16")
    eig = cand.C - spectral_expansion(cand.z)
    pts = _cell_samples(L, grid_per_axis)
    con, worst = _contraction_margin(cand.z, pts)
    fine_pts = _cell_samples(L, 2 * grid_per_axis)
    fine, fine_worst = _contraction_margin(cand.z, fine_pts)
    if eig < -tol or con < -tol:
        verdict = "infeasible"
    elif fine < -tol:
        verdict, worst = "inconclusive", fine_worst
    else:
        verdict = "feasible"
    return FeasibilityReport(eig, con, worst, fine, len(pts), verdict)


def distortion_of_candidate(cand: PrimalCandidate, L: Lattice, grid_per_axis: int = 256) -> float:
    """Distortion of the embedding defined by ``cand.z``, estimated on a cell grid.

    ``sqrt(expansion / min f(x)/|x|^2)``; the minimum includes the limit at
    0, which is the smallest eigenvalue of ``4 pi^2 sum z u u^T``.
    """
    z = cand.z
    if not z.spans():
        return math.inf
    pts = _cell_samples(L, grid_per_axis)
    r2 = np.sum(pts * pts, axis=1)
    pts = pts[r2 >= (1e-6 * covering_radius(L)) ** 2]
    ratio = evaluate_f(z, pts) / np.sum(pts * pts, axis=1)
    eigs = np.linalg.eigvalsh(4 * math.pi**2 * z.moment)
    lo = min(float(ratio.min()), float(eigs[0]))
    if lo <= 0:
        return math.inf
    return math.sqrt(eigs[-1] / lo)


# -- support reduction ------------------------------------------------------------


def _key(z: WeightFunction, u) -> tuple[int, ...]:
    u = tuple(int(c) for c in np.asarray(u).ravel())
    if len(u) != z.dual.dim:
        raise WeightError(f"{u} has wrong length for dimension {z.dual.dim}")
    return u


def merge_coset_pair(z: WeightFunction, u, v) -> WeightFunction:
    """Move the weight of ``v`` onto ``(u ± v)/2``, for ``u ≡ v`` mod ``2L*``.

    ``z(±u) -= z(v)``, ``z(±v) = 0`` and ``(±u ± v)/2`` each gain ``2 z(v)``.
    The moment ``sum z t t^T`` is unchanged and the total mass grows by
    ``4 z(v)``.
    """
    u, v = _key(z, u), _key(z, v)
    if canonical(u) == canonical(v):
        raise NotSameCosetPair(f"{u} and {v} are equal up to sign")
    if parity(u) != parity(v):
        raise NotSameCosetPair(f"{u} and {v} lie in different cosets of 2L*")
    zu, zv = z[u], z[v]
    if zv > zu:
        raise WeightOrderViolation(f"z({v}) = {zv} exceeds z({u}) = {zu}")
    e = dict(z.entries)
    e[canonical(u)] = zu - zv
    e[canonical(v)] = 0.0
    for t in (tuple((a + b) // 2 for a, b in zip(u, v)), tuple((a - b) // 2 for a, b in zip(u, v))):
        k = canonical(t)
        e[k] = e.get(k, 0.0) + 2 * zv
    return z.replace(e)


def collapse_multiple(z: WeightFunction, u, v, k: int) -> WeightFunction:
    """Replace the weight on ``u = k v`` by ``k^2`` times as much on ``v``."""
    u, v = _key(z, u), _key(z, v)
    if int(k) != k or k < 2 or any(a != k * b for a, b in zip(u, v)):
        raise NotAMultiple(f"{u} is not {k} times {v}")
    e = dict(z.entries)
    zu = e.pop(canonical(u), 0.0)
    kv = canonical(v)
    e[kv] = e.get(kv, 0.0) + k * k * zu
    return z.replace(e)


@dataclass(frozen=True)
class ReductionStep:
    kind: str  # "collapse" or "merge"
    u: tuple[int, ...]
    v: tuple[int, ...]
    k: int
    mass_before: float
    mass_after: float

    @property
    def mass_increase(self) -> float:
        return self.mass_after - self.mass_before


def _next_step(z: WeightFunction):
    nonprim = [(reduce(math.gcd, map(abs, u)), u) for u in z.entries if not is_primitive(u)]
    if nonprim:
        k, u = max(nonprim, key=lambda p: (p[0], [-c for c in p[1]]))
        return "collapse", u, tuple(c // k for c in u), k
    groups: dict[tuple[int, ...], list] = {}
    for u in z.entries:
        groups.setdefault(parity(u), []).append(u)
    best = None
    for members in groups.values():
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                m = min(z[a], z[b])
                if best is None or m > best[0]:
                    best = (m, a, b)
    if best is None:
        return None
    _, a, b = best
    # the heavier vector keeps its (reduced) weight
    u, v = (a, b) if z[a] >= z[b] else (b, a)
    return "merge", u, v, 1


def reduction_steps(z: WeightFunction, max_steps: int | None = None) -> Iterator[tuple[ReductionStep, WeightFunction]]:
    """Apply collapses and coset merges until neither applies.

    Collapses (largest multiple first) run before merges; merges take the
    pair with the largest ``min(z(u), z(v))``.  Raises NonTermination after
    ``max_steps`` (default ``10 * len(z)**2``).
    """
    if max_steps is None:
        max_steps = 10 * max(len(z), 1) ** 2
    for _ in range(max_steps + 1):
        step = _next_step(z)
        if step is None:
            return
        kind, u, v, k = step
        new = collapse_multiple(z, u, v, k) if kind == "collapse" else merge_coset_pair(z, u, v)
        yield ReductionStep(kind, u, v, k, z.total_mass, new.total_mass), new
        z = new
    raise NonTermination(f"support reduction exceeded {max_steps} steps")


def reduce_support(z: WeightFunction, max_steps: int | None = None) -> WeightFunction:
    """Fixpoint with at most one primitive support vector per nonzero coset of ``L*/2L*``."""
    for _, z in reduction_steps(z, max_steps):
        pass
    return z
