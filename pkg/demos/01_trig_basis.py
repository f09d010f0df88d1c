"""Tour of the trigonometric basis layer.

Shows the coefficient/grid representations, exact-degree quadrature, the
skew derivative operator, and the Parseval identity that lets every later
module treat coefficient vectors as L2 objects.
"""

import numpy as np

from kdvflow.spectral import (
    BasisSpec,
    SpectralField,
    analyze,
    apply_derivative,
    basis_eval,
    derivative_matrix,
    inner_product,
    synthesize,
)

spec = BasisSpec(l=10.0, N=6)
print(f"basis on [-{spec.l}, {spec.l}] with cutoff N={spec.N}: dim = {spec.dim}")

print("\nbasis functions at x=1.3:")
for j in range(5):
    print(f"  w_{j}(1.3) = {basis_eval(spec, j, 1.3):+.6f}")

rng = np.random.default_rng(0)
u = SpectralField(spec, rng.uniform(-1, 1, spec.dim))

grid = synthesize(u)          # default dealiased grid, 4(N+1) nodes
back = analyze(grid)
print(f"\nround trip through {grid.M} grid nodes:"
      f" max coefficient error {np.max(np.abs(back.coeffs - u.coeffs)):.2e}")

v = SpectralField(spec, rng.uniform(-1, 1, spec.dim))
lhs = inner_product(synthesize(u), synthesize(v))
print(f"Parseval: quadrature <u, v> = {lhs:.12f}, coefficient dot = {u.dot(v):.12f}")

D = derivative_matrix(spec)
print(f"\nderivative matrix is skew: max |D + D^T| = {np.max(np.abs(D + D.T)):.1e}")
print(f"first row and column vanish: {np.all(D[0] == 0) and np.all(D[:, 0] == 0)}")

du = apply_derivative(u)
x = np.linspace(-spec.l, spec.l, 7)
eps = 1e-6
for xi in x[:3]:
    fd = sum(
        u.coeffs[j] * (basis_eval(spec, j, xi + eps) - basis_eval(spec, j, xi - eps))
        for j in range(spec.dim)
    ) / (2 * eps)
    exact = sum(du.coeffs[j] * basis_eval(spec, j, xi) for j in range(spec.dim))
    print(f"u'({xi:+.2f}): spectral {exact:+.8f}, finite difference {fd:+.8f}")
