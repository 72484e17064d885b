"""
The standard torus R^2/Z^2
==========================

Builds the least-distortion embedding of the square torus, checks the dual
certificate that proves it optimal, and compares with the lower bound.
"""

import math

import numpy as np

from flattorus.bounds import lower_bound_thm51
from flattorus.embed2d import least_distortion_2d
from flattorus.lattice import lattice_from_basis
from flattorus.postype import PrimalCandidate, check_primal_feasible, embed_points, evaluate_f

Z2 = lattice_from_basis([[1, 0], [0, 1]])
run = least_distortion_2d(Z2)

# the squared distortion D and the distortion itself
print(f"D  = {run.D!r}   (pi^2/4 = {math.pi**2 / 4!r})")
print(f"c2 = {run.c2!r}   (pi/2   = {math.pi / 2!r})")

# every point where the distortion function reaches D
print("most contracted points:")
for x in run.result.contracted_points:
    print("   ", np.round(x, 9))

# the optimal embedding puts weight on +-e1 and +-e2 only
for u, w in run.weights.entries.items():
    print(f"z{u} = {w!r}")

# the embedding is an honest map into R^8: distances match f
X = np.array([[0.1, 0.2], [0.45, -0.3]])
phi = embed_points(run.weights, X)
print("|phi(x) - phi(y)|^2 =", np.sum((phi[0] - phi[1]) ** 2), " f(x - y) =", evaluate_f(run.weights, X[0] - X[1]))

# feasibility of (D, z) on a fine grid
rep = check_primal_feasible(PrimalCandidate(run.D, run.weights), Z2, 256)
print("primal verdict:", rep.verdict, " contraction margin:", rep.contraction_margin)

# the certificate: a point mass at x_bar and a unit-trace PSD matrix Y
cert = run.certificate
print("x_bar =", cert.x_bar, " beta =", cert.beta)
print("Y =\n", np.round(cert.Y, 12))
for name, check in run.report.checks.items():
    print(f"  {name:15s} {'ok' if check.passed else 'FAIL'}  residual {check.residual:.2e}")

# the deep-hole lower bound is tight here
print("lower bound:", lower_bound_thm51(Z2).value)
