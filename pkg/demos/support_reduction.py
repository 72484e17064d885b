"""
Shrinking the support of a weight function
==========================================

Any finite weight function can be pushed, one step at a time, onto at most
one primitive dual vector per nonzero coset of L*/2L*.  Each step keeps the
moment sum z(t) t t^T and raises the total mass, so the resulting embedding
expands no more and contracts no more than before.
"""

import numpy as np

from flattorus.lattice import dual_lattice, lattice_from_basis
from flattorus.postype import PrimalCandidate, WeightFunction, check_primal_feasible, reduction_steps

L = lattice_from_basis([[1.0, 0.0], [0.3, 1.2]])
dual = dual_lattice(L)
z = WeightFunction(dual, {(1, 1): 0.02, (1, -1): 0.015, (3, 1): 0.01, (2, 0): 0.01, (0, 1): 0.03, (4, 2): 0.004})
print("start:", z.entries)
print("mass", z.total_mass, "moment\n", z.moment)

# scale z until (C, z) is feasible with C its expansion
C = None
for s in np.geomspace(1, 100, 200):
    zs = z.replace({u: s * w for u, w in z.entries.items()})
    C = 4 * np.pi**2 * np.linalg.eigvalsh(zs.moment)[-1]
    if check_primal_feasible(PrimalCandidate(C, zs), L).feasible:
        break
print(f"\nfeasible after scaling by {s:.3f}, C = {C:.6f}")

for step, zs in reduction_steps(zs):
    feasible = check_primal_feasible(PrimalCandidate(C, zs), L).feasible
    print(f"{step.kind:8s} u={step.u} v={step.v} k={step.k}  mass +{step.mass_increase:.5f}  still feasible: {feasible}")

print("\nreduced:", zs.entries)
print("moment\n", zs.moment)
