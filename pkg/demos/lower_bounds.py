"""
How good is the deep-hole lower bound?
======================================

Compares the exact distortion c2 of random planar tori with the bound
pi * lambda(L*) * mu(L) / sqrt(n) and the earlier, weaker bound that is
4 pi times smaller.
"""

import numpy as np

from flattorus.bounds import bounds_summary, verify_lower_bound, lower_bound_thm51
from flattorus.embed2d import least_distortion_2d
from flattorus.lattice import angle_lattice, lattice_from_basis

rng = np.random.default_rng(1)
rows = []
for deg in (60, 75, 90, 105, 120):
    rows.append((f"L{deg}", angle_lattice(deg)))
for i in range(5):
    rows.append((f"rand{i}", lattice_from_basis(rng.uniform(-10, 10, (2, 2)))))

print(f"{'lattice':8s} {'c2':>10s} {'bound':>10s} {'weak':>10s} {'ratio':>7s} witness")
for name, L in rows:
    c2 = least_distortion_2d(L).c2
    s = bounds_summary(L)
    ok, _ = verify_lower_bound(lower_bound_thm51(L), L)
    print(f"{name:8s} {c2:10.6f} {s.thm51_lower:10.6f} {s.haviv_regev_lower:10.6f} "
          f"{c2 / s.thm51_lower:7.4f} {'ok' if ok else 'FAIL'}")
