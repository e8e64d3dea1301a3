"""Gaussian kernels, kernel matrices and bandwidth grids."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from .exceptions import DataError

__all__ = [
    "KernelSpec",
    "KernelMatrix",
    "eval_kernel",
    "build_kernel_matrix",
    "cross_kernel",
    "median_heuristic",
    "gamma_grid",
]

GRID_SPAN = 16.0


@dataclass(frozen=True)
class KernelSpec:
    """Gaussian kernel ``k(x, y) = exp(-gamma * ||x - y||^2)``."""

    gamma: float
    family: str = "gaussian"

    def __post_init__(self):
        if self.family != "gaussian":
            raise ValueError(f"unsupported kernel family {self.family!r}")
        if not np.isfinite(self.gamma) or self.gamma <= 0:
            raise ValueError(f"gamma must be a positive finite number, got {self.gamma}")


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    values: np.ndarray = field(repr=False)
    spec: KernelSpec

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _as_2d(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DataError(f"expected a 2-D covariate matrix, got shape {X.shape}")
    return X


def eval_kernel(spec: KernelSpec, x, y) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape or x.ndim != 1:
        raise DataError(f"dimension mismatch: {x.shape} vs {y.shape}")
    diff = x - y
    return float(np.exp(-spec.gamma * (diff @ diff)))


def build_kernel_matrix(spec: KernelSpec, X, sqdist: np.ndarray | None = None) -> KernelMatrix:
    """Kernel matrix ``K[i, j] = k(x_i, x_j)``.

    ``sqdist`` may carry a precomputed squared-distance matrix of ``X`` so a
    bandwidth grid does not recompute distances for every gamma.
    """
    X = _as_2d(X)
    n = X.shape[0]
    if n < 2:
        raise DataError("a kernel matrix needs at least two observations")
    if sqdist is None:
        sqdist = squared_distances(X)
    elif sqdist.shape != (n, n):
        raise DataError("squared-distance matrix does not match X")
    K = np.exp(-spec.gamma * sqdist)
    # exact symmetry and unit diagonal regardless of rounding in sqdist
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, 1.0)
    return KernelMatrix(K, spec)


def squared_distances(X) -> np.ndarray:
    X = _as_2d(X)
    return squareform(pdist(X, "sqeuclidean"))


def cross_kernel(spec: KernelSpec, X_new, X) -> np.ndarray:
    """Rectangular matrix ``k(x*_a, x_b)`` between new points and training points."""
    X_new, X = _as_2d(X_new), _as_2d(X)
    if X_new.shape[1] != X.shape[1]:
        raise DataError(f"dimension mismatch: {X_new.shape[1]} vs {X.shape[1]}")
    return np.exp(-spec.gamma * cdist(X_new, X, "sqeuclidean"))


def median_heuristic(X) -> float:
    """``1 / median ||x_i - x_j||`` over distinct pairs.

    For an even number of pairs the lower middle order statistic is used.
    """
    X = _as_2d(X)
    if X.shape[0] < 2:
        raise DataError("median heuristic needs at least two rows")
    d = np.sort(pdist(X, "euclidean"))
    med = d[(d.size - 1) // 2]
    if not med > 0:
        raise DataError("median pairwise distance is zero (rows are identical)")
    return 1.0 / float(med)


def gamma_grid(X_train, m: int) -> list[KernelSpec]:
    """Log-spaced bandwidths spanning ``[g/16, 16 g]`` around the median heuristic ``g``.

    Odd ``m`` gives a grid symmetric in log-scale with ``g`` at the centre.
    Even ``m`` keeps the spacing of the ``m + 1`` grid and drops its top point,
    so ``g`` is always a member.
    """
    m = int(m)
    if m < 1:
        raise ValueError("grid size must be at least 1")
    g = median_heuristic(X_train)
    if m == 1:
        return [KernelSpec(g)]
    half = m // 2
    step = np.log(GRID_SPAN) / half
    ks = np.arange(-half, half + 1) if m % 2 else np.arange(-half, half)
    gammas = g * np.exp(ks * step)
    gammas[half] = g
    return [KernelSpec(float(v)) for v in gammas]
