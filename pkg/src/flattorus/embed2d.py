"""Exact least-distortion embeddings of 2D flat tori.

Pipeline: obtuse superbasis ``u0, u1, u2`` of the dual lattice, nonnegative
coefficients with ``4 pi^2 sum z_i u_i u_i^T = I``, maximization of the
distortion function

    g(x) = |x|^2 / (2 sum_i z_i (1 - cos(2 pi u_i.x)))

over the Voronoi cell, and a point-mass dual certificate ``(beta, Y)``
proving that ``sqrt(max g)`` is optimal.  Coefficients ``z_i`` here are
one-sided: one term per ``u_i``, not per ``±u_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .lattice import (
    TIE_RTOL,
    Lattice,
    NotALatticeVector,
    UnsupportedDimension,
    VoronoiCell2D,
    coset_shortest_vectors,
    dual_lattice,
    lagrange_reduce,
    lattice_points_in_ball,
    shortest_vector,
    voronoi_cell,
)
from .postype import WeightFunction, one_minus_cos, parity

TWO_PI = 2 * math.pi
TIE_TOL = 1e-9
DEDUP_TOL = 1e-6


class SuperbasisInvalid(RuntimeError):
    pass


class DecompositionFailed(RuntimeError):
    pass


class ZeroContractionPoint(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ObtuseSuperbasis:
    """``u0 + u1 + u2 = 0`` with pairwise non-acute angles; ``u1, u2`` a basis of ``L*``."""

    dual: Lattice
    vectors: np.ndarray  # rows u0, u1, u2
    coords: np.ndarray  # integer coordinates in the dual basis
    coeffs: np.ndarray | None = None

    @property
    def u0(self) -> np.ndarray:
        return self.vectors[0]

    @property
    def u1(self) -> np.ndarray:
        return self.vectors[1]

    @property
    def u2(self) -> np.ndarray:
        return self.vectors[2]

    def identity_residual(self) -> float:
        if self.coeffs is None:
            return math.inf
        M = 4 * math.pi**2 * (self.vectors.T * self.coeffs) @ self.vectors
        return float(np.max(np.abs(M - np.eye(2))))


def _coset_shortest(dual: Lattice, u: np.ndarray) -> bool:
    best = np.linalg.norm(coset_shortest_vectors(dual, u)[0])
    return np.linalg.norm(u) <= best * (1 + TIE_RTOL)


def superbasis_problems(dual: Lattice, vectors) -> list[str]:
    """Reasons why ``vectors`` fail to be a coset-shortest obtuse superbasis of ``dual``."""
    V = np.asarray(vectors, dtype=float)
    problems = []
    if V.shape != (3, 2):
        return [f"expected 3 vectors in the plane, got shape {V.shape}"]
    scale = float(np.max(np.sum(V * V, axis=1)))
    if np.max(np.abs(V.sum(axis=0))) > 1e-9 * math.sqrt(scale):
        problems.append("u0 + u1 + u2 != 0")
    try:
        K = dual.integer_coords(V)
    except NotALatticeVector as exc:
        return problems + [f"not dual-lattice vectors: {exc}"]
    if abs(round(np.linalg.det(K[1:].astype(float)))) != 1:
        problems.append("u1, u2 do not form a basis of the dual lattice")
    for i in range(3):
        for j in range(i + 1, 3):
            if V[i] @ V[j] > 1e-12 * scale:
                problems.append(f"u{i}.u{j} = {V[i] @ V[j]:.3g} > 0")
    cosets = [parity(k) for k in K]
    if len(set(cosets)) != 3 or any(not any(c) for c in cosets):
        problems.append("u0, u1, u2 do not meet the three nonzero cosets of L*/2L*")
    for i in range(3):
        if not _coset_shortest(dual, V[i]):
            problems.append(f"u{i} is not shortest in its coset mod 2L*")
    return problems


def obtuse_superbasis(dual: Lattice) -> ObtuseSuperbasis:
    """Obtuse superbasis from the Lagrange-reduced basis (``b1.b2 <= 0``)."""
    if dual.dim != 2:
        raise UnsupportedDimension(f"obtuse superbasis construction needs dim 2, got {dual.dim}")
    red = lagrange_reduce(dual)
    V = np.array([-red.b1 - red.b2, red.b1, red.b2])
    problems = superbasis_problems(dual, V)
    if problems:
        raise SuperbasisInvalid("; ".join(problems))
    return ObtuseSuperbasis(dual, V, dual.integer_coords(V))


def identity_decomposition(sb: ObtuseSuperbasis) -> np.ndarray:
    """Solve ``4 pi^2 sum z_i u_i u_i^T = I`` for ``(z0, z1, z2) >= 0``."""
    V = sb.vectors
    A = 4 * math.pi**2 * np.array([V[:, 0] ** 2, V[:, 0] * V[:, 1], V[:, 1] ** 2])
    try:
        z = np.linalg.solve(A, np.array([1.0, 0.0, 1.0]))
    except np.linalg.LinAlgError as exc:
        raise DecompositionFailed(str(exc)) from None
    if np.any(z < -1e-12 * np.max(np.abs(z))):
        raise DecompositionFailed(f"negative coefficient in {z}")
    # roundoff-level coefficients (the orthogonal case) become exact zeros
    z = np.where(np.abs(z) <= 1e-12 * np.max(np.abs(z)), 0.0, z)
    residual = np.max(np.abs(A @ z - [1.0, 0.0, 1.0]))
    if residual > 1e-12:
        raise DecompositionFailed(f"identity residual {residual:.3g}")
    return z


def with_coefficients(sb: ObtuseSuperbasis) -> ObtuseSuperbasis:
    return replace(sb, coeffs=identity_decomposition(sb))


def distortion_ratio(sb: ObtuseSuperbasis, x) -> np.ndarray | float:
    """``g(x)``; the value at the origin is its limit, 1."""
    if sb.coeffs is None:
        raise ValueError("superbasis has no identity-decomposition coefficients")
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    den = 2 * (one_minus_cos(x @ sb.vectors.T) @ sb.coeffs)
    at_zero = r2 == 0
    # g never exceeds a few units inside the cell; this only flags lattice points
    if np.any((den <= 1e-12 * r2) & ~at_zero):
        raise ZeroDivisionError("distortion ratio undefined: point is congruent to 0 modulo the lattice")
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(at_zero, 1.0, r2 / np.where(at_zero, 1.0, den))
    return float(g) if g.ndim == 0 else g


# -- maximization -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DistortionResult:
    D: float
    x_bar: np.ndarray
    contracted_points: np.ndarray
    weights: np.ndarray  # one-sided D * z_i on u0, u1, u2
    n_samples: int = 0

    @property
    def c2(self) -> float:
        return math.sqrt(self.D)


def _lex_order(P: np.ndarray) -> np.ndarray:
    R = np.round(P, 9) + 0.0  # +0.0 folds -0.0 into 0.0
    return np.lexsort(R.T[::-1])


def _dedupe(P: np.ndarray, tol: float) -> np.ndarray:
    out: list[np.ndarray] = []
    for p in P:
        if all(np.linalg.norm(p - q) > tol for q in out):
            out.append(p)
    return np.array(out).reshape(-1, P.shape[1])


def maximize_distortion(sb: ObtuseSuperbasis, cell: VoronoiCell2D, grid_per_axis: int = 512,
                        n_starts: int = 32, max_iter: int = 500) -> DistortionResult:
    """Maximize ``g`` over the cell: dense grid, then projected Nelder-Mead from the best samples."""
    if sb.coeffs is None:
        sb = with_coefficients(sb)
    pts = cell.samples(grid_per_axis)
    r2 = np.sum(pts * pts, axis=1)
    pts = pts[r2 >= (1e-6 * cell.circumradius) ** 2]
    g = distortion_ratio(sb, pts)

    order = np.argsort(-g, kind="stable")
    lo, hi = cell.bounding_box
    step = float(np.max(hi - lo)) / (grid_per_axis - 1)

    us = [tuple(map(float, u)) for u in sb.vectors]
    zs = [float(c) for c in sb.coeffs]
    halfplanes = [(float(a), float(b), 0.5 * float(a * a + b * b)) for a, b in cell.relevant_vectors]

    def neg_g(p):
        # scalar fast path of distortion_ratio(sb, cell.project(p)) for the simplex loop
        x, y = float(p[0]), float(p[1])
        if any(a * x + b * y > c * (1 + 1e-12) for a, b, c in halfplanes):
            x, y = cell.project(p)
        r2 = x * x + y * y
        den = 4 * sum(z * math.sin(math.pi * (a * x + b * y)) ** 2 for (a, b), z in zip(us, zs))
        return -(r2 / den) if den > 0 else -1.0

    cands = [pts[order[: 4 * n_starts]]]
    cand_g = [g[order[: 4 * n_starts]]]
    for x0 in pts[order[:n_starts]]:
        simplex = np.array([x0, x0 + [step, 0.0], x0 + [0.0, step]])
        res = minimize(neg_g, x0, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": 1e-12, "fatol": 1e-15,
                                "maxiter": max_iter})
        p = cell.project(res.x)
        cands.append(p[None, :])
        cand_g.append(np.atleast_1d(distortion_ratio(sb, p)))
    C = np.vstack(cands)
    G = np.concatenate(cand_g)
    D_max = float(G.max())
    top = C[G >= D_max - TIE_TOL]
    top = np.vstack([top, -top])
    top = top[_lex_order(top)]
    top = _dedupe(top, DEDUP_TOL)
    x_bar = top[0].copy()
    D = float(distortion_ratio(sb, x_bar))
    return DistortionResult(D, x_bar, top, D * sb.coeffs, len(pts))


# -- dual certificate ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DualCertificate:
    """Point mass ``beta`` at ``x_bar`` and a unit-trace PSD matrix ``Y``."""

    D: float
    x_bar: np.ndarray
    beta: float
    Y: np.ndarray
    superbasis: np.ndarray
    coeffs: np.ndarray
    status: str = "unverified"

    @property
    def objective(self) -> float:
        return 2 * math.pi**2 * self.beta * float(self.x_bar @ self.x_bar)

    @property
    def c2(self) -> float:
        return math.sqrt(self.D)

    def gram_matrix(self) -> np.ndarray:
        """``B_ij = u_i^T Y u_j`` for ``i, j in {0, 1}``."""
        U = self.superbasis[:2].T
        return U.T @ self.Y @ U


def dual_certificate(sb: ObtuseSuperbasis, D: float, x_bar) -> DualCertificate:
    """Build ``(beta, Y)`` with ``Tr(u_i u_i^T Y) = beta (1 - cos 2 pi u_i.x_bar)`` for i = 0, 1, 2.

    ``Y`` comes from its Gram matrix in the basis ``(u0, u1)``::

        B00 = 2 beta sin^2(pi u0.x),  B11 = 2 beta sin^2(pi u1.x),
        B01 = 2 beta sin(pi u0.x) sin(pi u1.x) cos(pi (u0 + u1).x)
    """
    x_bar = np.asarray(x_bar, dtype=float)
    r2 = float(x_bar @ x_bar)
    if math.sqrt(r2) < 1e-12:
        raise ZeroContractionPoint("the contraction point must be nonzero")
    if sb.coeffs is None:
        sb = with_coefficients(sb)
    beta = D / (2 * math.pi**2 * r2)
    a0 = math.pi * float(sb.u0 @ x_bar)
    a1 = math.pi * float(sb.u1 @ x_bar)
    s0, s1 = math.sin(a0), math.sin(a1)
    B = 2 * beta * np.array([[s0 * s0, s0 * s1 * math.cos(a0 + a1)],
                             [s0 * s1 * math.cos(a0 + a1), s1 * s1]])
    Uinv = np.linalg.inv(np.column_stack([sb.u0, sb.u1]))
    Y = Uinv.T @ B @ Uinv
    Y = 0.5 * (Y + Y.T)
    return DualCertificate(float(D), x_bar, beta, Y, sb.vectors.copy(), np.array(sb.coeffs, dtype=float))


@dataclass(frozen=True)
class Check:
    passed: bool
    residual: float
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    checks: dict[str, Check] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failures(self) -> list[str]:
        return [k for k, c in self.checks.items() if not c.passed]

    def as_dict(self) -> dict:
        return {k: {"passed": c.passed, "residual": c.residual, "detail": c.detail}
                for k, c in self.checks.items()}


def dual_inequality_residual(dual: Lattice, points, masses, Y, radius: float) -> tuple[float, np.ndarray | None]:
    """Worst violation of ``sum_j m_j (1 - cos 2 pi u.x_j) <= u^T Y u`` over ``0 < |u| <= radius``.

    Returns ``(max(lhs - rhs), worst u)``; a negative residual means every
    enumerated dual vector satisfies the inequality with room to spare.
    """
    U = lattice_points_in_ball(dual, radius)
    if len(U) == 0:
        return -math.inf, None
    X = np.atleast_2d(np.asarray(points, dtype=float))
    lhs = one_minus_cos(U @ X.T) @ np.atleast_1d(np.asarray(masses, dtype=float))
    rhs = np.einsum("ij,jk,ik->i", U, Y, U)
    diff = lhs - rhs
    i = int(np.argmax(diff))
    return float(diff[i]), U[i]


def verify_certificate(cert: DualCertificate, sb: ObtuseSuperbasis, dual: Lattice,
                       enum_radius_factor: float = 8.0, tol: float = 1e-9) -> VerificationReport:
    """Run the six certificate checks; nothing is raised, failures are recorded."""
    if sb.coeffs is None:
        sb = with_coefficients(sb)
    checks: dict[str, Check] = {}
    Y = np.asarray(cert.Y, dtype=float)
    x = np.asarray(cert.x_bar, dtype=float)

    tr = float(np.trace(Y))
    checks["trace"] = Check(abs(tr - 1) <= tol, abs(tr - 1), f"trace(Y) = {tr!r}")

    lam = float(np.linalg.eigvalsh(0.5 * (Y + Y.T))[0])
    checks["psd"] = Check(lam >= -tol, max(0.0, -lam), f"lambda_min(Y) = {lam!r}")

    lhs = np.einsum("ij,jk,ik->i", sb.vectors, Y, sb.vectors)
    rhs = cert.beta * one_minus_cos(sb.vectors @ x)
    eq = np.abs(lhs - rhs)
    checks["equalities"] = Check(bool(np.all(eq <= 1e-10)), float(eq.max()),
                                 "max_i |Tr(u_i u_i^T Y) - beta (1 - cos 2 pi u_i.x)|")

    problems = superbasis_problems(dual, sb.vectors)
    checks["coset_coverage"] = Check(not problems, float(len(problems)), "; ".join(problems) or "ok")

    lam_dual = shortest_vector(dual)[1]
    worst, u = dual_inequality_residual(dual, x, cert.beta, Y, enum_radius_factor * lam_dual)
    checks["enumeration"] = Check(worst <= tol, max(0.0, worst),
                                  f"radius {enum_radius_factor} * lambda(L*); worst u = "
                                  f"{None if u is None else u.tolist()}")

    cell = voronoi_cell(dual_lattice(dual))
    try:
        g = float(distortion_ratio(sb, x))
    except ZeroDivisionError:
        g = math.nan
    slack = abs(g - cert.D) if math.isfinite(g) else math.inf
    in_cell = cell.contains(x)
    support = sb.coeffs > 0
    support_eq = float(eq[support].max()) if support.any() else 0.0
    ok = slack <= tol and in_cell and support_eq <= 1e-10
    checks["slackness"] = Check(ok, max(slack, support_eq),
                                f"g(x_bar) = {g!r}, D = {cert.D!r}, x_bar in cell: {in_cell}")
    return VerificationReport(checks)


# -- pipeline ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LeastDistortion2D:
    lattice: Lattice
    cell: VoronoiCell2D
    superbasis: ObtuseSuperbasis
    result: DistortionResult
    certificate: DualCertificate
    report: VerificationReport
    weights: WeightFunction

    @property
    def D(self) -> float:
        return self.result.D

    @property
    def c2(self) -> float:
        return self.result.c2

    @property
    def verified(self) -> bool:
        return self.report.passed

    def __iter__(self):
        return iter((self.result, self.certificate, self.report))


def least_distortion_2d(L: Lattice, grid_per_axis: int = 512, n_starts: int = 32,
                        enum_radius_factor: float = 8.0) -> LeastDistortion2D:
    """``c2(R^2/L)`` with an optimal embedding and a verified dual certificate."""
    if L.dim != 2:
        raise UnsupportedDimension(f"the exact pipeline needs a 2D lattice, got dim {L.dim}")
    dual = dual_lattice(L)
    cell = voronoi_cell(L)
    sb = with_coefficients(obtuse_superbasis(dual))
    res = maximize_distortion(sb, cell, grid_per_axis, n_starts)
    cert = dual_certificate(sb, res.D, res.x_bar)
    report = verify_certificate(cert, sb, dual, enum_radius_factor)
    cert = replace(cert, status="verified" if report.passed else "failed: " + ", ".join(report.failures()))
    weights = WeightFunction.from_one_sided(dual, sb.coords, res.weights)
    return LeastDistortion2D(L, cell, sb, res, cert, report, weights)
