"""
Gaussian kernels and their spectrum
===================================

Build a median-heuristic kernel, project out the linear design and look at
how quickly the eigenvalues decay.
"""

# %%
import numpy as np

from kcmtest.kernel import KernelSpec, build_kernel_matrix, gamma_grid, median_heuristic
from kcmtest.regression import add_intercept, project_kernel, projection_matrix
from kcmtest.spectral import directional_components, eigendecompose

rng = np.random.default_rng(1)
X = rng.standard_normal((150, 4))

gamma = median_heuristic(X)
print(f"median heuristic gamma = {gamma:.4f}")
print("grid:", np.round([s.gamma for s in gamma_grid(X, 9)], 4))

# %%
# The raw kernel has trace n. After projection a few directions are gone,
# one per column of the design.
K = build_kernel_matrix(KernelSpec(gamma), X)
P = projection_matrix(add_intercept(X))
raw = eigendecompose(K)
proj = eigendecompose(project_kernel(P, K))
print("raw trace", raw.eigenvalues.sum().round(6), " projected rank", np.count_nonzero(proj.eigenvalues))

share = np.cumsum(proj.eigenvalues) / proj.eigenvalues.sum()
for J in (1, 5, 16, 50):
    print(f"leading {J:>3} directions carry {share[J - 1]:.1%} of the projected trace")

# %%
# Directional estimates of a residual that is curved in the first covariate.
eps = P.values @ (X[:, 0] ** 2 + 0.5 * rng.standard_normal(150))
d = directional_components(proj, eps, J=8)
print("d_hat :", np.round(d.d_hat, 3))
print("S2_hat:", np.round(d.s2_hat, 3))
