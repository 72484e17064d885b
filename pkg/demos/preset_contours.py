"""
Contours of the distortion function
===================================

Writes one CSV per lattice L_phi spanned by e1 and e1 rotated by phi, for
phi = 90, 93, 105 and 120 degrees.  Each file has columns x, y, g and a
commented trailer listing the maximizers, ready for any contour plotter.

    python demos/preset_contours.py [output-dir] [resolution]
"""

import sys
from pathlib import Path

import numpy as np

from flattorus.contour import contour_grid
from flattorus.lattice import PRESETS, preset_lattice, voronoi_cell

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("contours")
resolution = int(sys.argv[2]) if len(sys.argv) > 2 else 256
out.mkdir(parents=True, exist_ok=True)

for name in PRESETS:
    L = preset_lattice(name)
    grid = contour_grid(L, resolution)
    path = out / f"{name}.csv"
    path.write_text(grid.to_csv())

    # where do the maximizers sit relative to the cell's corners?
    V = voronoi_cell(L).vertices
    d = np.linalg.norm(grid.maximizers[:, None] - V[None], axis=2).min(axis=1)
    at_vertex = int(np.sum(d < 1e-6))
    print(f"{name}: D = {grid.D:.12f}, {len(grid.maximizers)} maximizers, {at_vertex} at vertices "
          f"-> {path} ({len(grid.samples)} samples)")
