"""Distortion-function samples over a Voronoi cell, for contour plots."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embed2d import distortion_ratio, maximize_distortion, obtuse_superbasis, with_coefficients
from .lattice import Lattice, UnsupportedDimension, dual_lattice, voronoi_cell

MIN_RESOLUTION = 16


@dataclass(frozen=True, eq=False)
class ContourGrid:
    resolution: int
    samples: np.ndarray  # rows (x, y, g)
    maximizers: np.ndarray
    D: float

    def to_csv(self) -> str:
        lines = ["x,y,g"]
        lines += [f"{x!r},{y!r},{g!r}" for x, y, g in self.samples.tolist()]
        lines.append(f"# maximizers D={self.D!r}")
        lines += [f"# {x!r},{y!r}" for x, y in self.maximizers.tolist()]
        return "\n".join(lines) + "\n"


def contour_grid(L: Lattice, resolution: int = 256, **search_kwargs) -> ContourGrid:
    """Evaluate ``g`` at the in-cell points of a ``resolution``-per-axis grid."""
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution must be at least {MIN_RESOLUTION}, got {resolution}")
    if L.dim != 2:
        raise UnsupportedDimension(f"contour data needs a 2D lattice, got dim {L.dim}")
    cell = voronoi_cell(L)
    sb = with_coefficients(obtuse_superbasis(dual_lattice(L)))
    pts = cell.grid(resolution)
    g = distortion_ratio(sb, pts)
    res = maximize_distortion(sb, cell, **search_kwargs)
    return ContourGrid(resolution, np.column_stack([pts, g]), res.contracted_points, res.D)
