"""
Weighting the directional components
====================================

Convergent schemes (eigenvalue, Basel, geometric) emphasize the leading directions;
divergent schemes (harmonic, equal) spread weight out and need studentizing.
"""

# %%
import numpy as np

from kcmtest.dgp import DgpSpec, generate
from kcmtest.kernel import KernelSpec, build_kernel_matrix, median_heuristic
from kcmtest.regression import fit_ols, project_kernel, projection_matrix, score_matrix
from kcmtest.spectral import eigendecompose
from kcmtest.teststats import stat_divergent, stat_generic
from kcmtest.weights import generate_weights, parse_scheme

data = generate(DgpSpec(6, 10, 200), seed=2)
fit = fit_ols(data.X, data.y)
P = projection_matrix(score_matrix(fit))
dec = eigendecompose(project_kernel(P, build_kernel_matrix(KernelSpec(median_heuristic(data.X)), data.X)))
eps = P.values @ fit.residuals
J = 22

# %%
for name in ("eigen", "basel", "geom:0.5", "harmonic", "equal"):
    w = generate_weights(parse_scheme(name), J, dec)
    print(f"{name:<10} first weights {np.round(w[:4], 4)}  sum {w.sum():.3f}")

print("generic basel     ", round(stat_generic(dec, eps, generate_weights(parse_scheme("basel"), J, dec), J).value, 4))
for name in ("harmonic", "equal"):
    w = generate_weights(parse_scheme(name), J, dec)
    print(f"divergent {name:<8}", round(stat_divergent(dec, eps, w, J).value, 4))
