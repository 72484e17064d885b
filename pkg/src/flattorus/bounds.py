"""Closed-form lower bounds and orthogonal composition."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .embed2d import dual_inequality_residual, least_distortion_2d
from .lattice import Lattice, UnsupportedDimension, covering_radius, deep_hole, dual_lattice, shortest_vector


class EmptyFactorList(ValueError):
    pass


def standard_torus_reference() -> float:
    """``c2(R^n/Z^n)``, the same for every n."""
    return math.pi / 2


@dataclass(frozen=True, eq=False)
class LowerBound:
    """``c2 >= value``, witnessed by the point mass ``nu_mass`` at ``deep_hole`` and ``Y = I/n``."""

    value: float
    deep_hole: np.ndarray
    nu_mass: float
    Y: np.ndarray

    @property
    def objective(self) -> float:
        """``2 pi^2 nu_mass |deep_hole|^2``, which equals ``value**2``."""
        return 2 * math.pi**2 * self.nu_mass * float(self.deep_hole @ self.deep_hole)


def _dual_min(L: Lattice) -> float:
    return shortest_vector(dual_lattice(L))[1]


def lower_bound_thm51(L: Lattice) -> LowerBound:
    """``pi lambda(L*) mu(L) / sqrt(n)`` with its dual witness."""
    n = L.dim
    lam = _dual_min(L)
    mu = covering_radius(L)
    return LowerBound(math.pi * lam * mu / math.sqrt(n), deep_hole(L), lam**2 / (2 * n), np.eye(n) / n)


def haviv_regev_bound(L: Lattice) -> float:
    """``lambda(L*) mu(L) / (4 sqrt(n))``."""
    return _dual_min(L) * covering_radius(L) / (4 * math.sqrt(L.dim))


def verify_lower_bound(bound: LowerBound, L: Lattice, enum_radius_factor: float = 8.0,
                       tol: float = 1e-9) -> tuple[bool, float]:
    """Check the witness against ``nu(1 - cos 2 pi u.y) <= u^T Y u`` on a dual enumeration ball.

    Returns ``(passed, worst residual)``.  Only dimensions 1 and 2 are enumerated.
    """
    dual = dual_lattice(L)
    if dual.dim not in (1, 2):
        raise UnsupportedDimension("witness enumeration needs dim 1 or 2")
    radius = enum_radius_factor * shortest_vector(dual)[1]
    worst, _ = dual_inequality_residual(dual, bound.deep_hole, bound.nu_mass, bound.Y, radius)
    return worst <= tol, worst


@dataclass(frozen=True)
class BoundsSummary:
    n: int
    thm51_lower: float
    haviv_regev_lower: float
    deep_hole: np.ndarray


def bounds_summary(L: Lattice) -> BoundsSummary:
    b = lower_bound_thm51(L)
    return BoundsSummary(L.dim, b.value, b.value / (4 * math.pi), b.deep_hole)


def orthogonal_compose(values) -> float:
    """``c2`` of an orthogonal sum from the ``c2`` of its factors."""
    values = list(values)
    if not values:
        raise EmptyFactorList("need at least one factor")
    return max(values)


def least_distortion(L: Lattice, **pipeline_kwargs) -> float:
    """``c2`` for 1D and 2D lattices and orthogonal sums of them."""
    if L.dim == 1:
        return standard_torus_reference()
    if L.dim == 2:
        return least_distortion_2d(L, **pipeline_kwargs).c2
    if L.factors:
        return orthogonal_compose(least_distortion(f, **pipeline_kwargs) for f in L.factors)
    raise UnsupportedDimension(f"no exact method for a {L.dim}-dimensional lattice without known factors")
