"""
Hermite functions and Gauss-Hermite quadrature
==============================================

The basis behind every solver in the package: orthonormal Hermite
functions on the whole real line, and the quadrature rule that makes
their inner products exact.
"""

import numpy as np

from hermwave.hermite import BasisSpec, gauss_hermite, hermite_fun_eval
from hermwave.field import evaluate, project

# The first few functions on a grid.  They decay like exp(-x^2/2), so
# even phi_40 is negligible past |x| = 12.
x = np.linspace(-12, 12, 2401)
phi = hermite_fun_eval(40, x)
for n in (0, 1, 5, 40):
    print(f"phi_{n:<2d}  max |phi| = {np.abs(phi[n]).max():.4f}   |phi(12)| = {abs(phi[n, -1]):.1e}")

# A 32-point rule integrates products of phi_0..phi_31 exactly, so the
# quadrature Gram matrix is the identity to rounding.
r = gauss_hermite(32)
P = hermite_fun_eval(31, r.nodes)
G = (P * r.scaled_weights) @ P.T
print("\nGram matrix deviation from identity:", np.abs(G - np.eye(32)).max())
print("sum of weights - sqrt(pi):", r.weights.sum() - np.sqrt(np.pi))

# Large rules stay finite: the recurrence runs in log scale.
big = gauss_hermite(1000)
print("1000-node rule: largest node %.3f, smallest scaled weight %.3e" % (big.nodes.max(), big.scaled_weights.min()))

# Projection of a Gaussian.  The coefficients fall off geometrically,
# which is what gives the solvers their spectral accuracy.
f = project(BasisSpec(40), lambda x: np.exp(-x**2))
print("\n n   |coefficient|")
for n in range(0, 41, 8):
    print(f"{n:2d}   {abs(f.coeffs[n]):.3e}")

# Moving and stretching the basis: x = center + scale * xi.  A basis left
# at the origin cannot reach a bump centred at x = 10 with 31 functions.
g = lambda x: np.exp(-(x - 10) ** 2 / 4)
for spec in (BasisSpec(30), BasisSpec(30, center=10.0), BasisSpec(30, center=10.0, scale=1.5)):
    err = np.abs(evaluate(project(spec, g), x + 10) - g(x + 10)).max()
    print(f"center {spec.center:4.1f} scale {spec.scale:3.1f}: max error {err:.2e}")
