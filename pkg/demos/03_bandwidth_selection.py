"""
Choosing the bandwidth on a training split
==========================================

Compare the two selection criteria across the grid on one split.
"""

# %%
import numpy as np

from kcmtest.dgp import DgpSpec, generate, split
from kcmtest.kernel import gamma_grid
from kcmtest.regression import fit_ols, projection_matrix, score_matrix
from kcmtest.selection import select_kernel

data = generate(DgpSpec(2, 10, 400), seed=5)
fit = fit_ols(data.X, data.y)
train, _ = split(data, 0.15, seed=5)
G = score_matrix(fit)[train.index]
eps = fit.residuals[train.index]
grid = gamma_grid(train.X, 9)

# %%
for method in ("nasym", "asym"):
    sel = select_kernel(train.X, eps, projection_matrix(G), grid, method, N=data.n)
    print(f"{method}: J = {sel.J}, chosen gamma = {sel.chosen.gamma:.4f}")
    for g, v in sel.criterion_values:
        mark = "<" if g == sel.chosen.gamma else ""
        print(f"   gamma {g:8.4f}  criterion {v:9.4f} {mark}")
