"""Linear model fit, score matrix and the score annihilator."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DataError
from .kernel import KernelMatrix

__all__ = [
    "LinearModelFit",
    "ProjectionMatrix",
    "add_intercept",
    "fit_ols",
    "linear_residuals",
    "score_matrix",
    "projection_matrix",
    "project_residuals",
    "project_kernel",
]


@dataclass(frozen=True, eq=False)
class LinearModelFit:
    theta_hat: np.ndarray
    residuals: np.ndarray = field(repr=False)
    design: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.design.shape[0]


@dataclass(frozen=True, eq=False)
class ProjectionMatrix:
    values: np.ndarray = field(repr=False)
    score_rank: int

    @property
    def n(self) -> int:
        return self.values.shape[0]


def add_intercept(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return np.column_stack([np.ones(X.shape[0]), X])


def linear_residuals(X, y, theta) -> np.ndarray:
    """``y - alpha - X @ beta`` with ``theta = (alpha, beta)``."""
    return np.asarray(y, dtype=float) - add_intercept(X) @ np.asarray(theta, dtype=float)


def fit_ols(X, y) -> LinearModelFit:
    """Least squares fit of ``y`` on an intercept and ``X``."""
    design = add_intercept(X)
    y = np.asarray(y, dtype=float)
    n, p = design.shape
    if y.shape != (n,):
        raise DataError(f"response has shape {y.shape}, expected ({n},)")
    if n <= p:
        raise DataError(f"need more observations than parameters: n={n}, q+1={p}")
    theta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < p:
        raise DataError(f"design matrix is rank deficient (rank {rank} < {p})")
    return LinearModelFit(theta, y - design @ theta, design)


def score_matrix(fit: LinearModelFit) -> np.ndarray:
    """Gradient of ``y - alpha - x @ beta`` in ``theta``, one row per observation."""
    return -fit.design


def projection_matrix(G) -> ProjectionMatrix:
    """``I - G (G'G)^{-1} G'``, computed from an orthonormal basis of ``G``."""
    G = np.asarray(G, dtype=float)
    if G.ndim == 1:
        G = G[:, None]
    n, d = G.shape
    if d >= n:
        raise DataError(f"score matrix needs fewer columns than rows, got {G.shape}")
    Q, R = np.linalg.qr(G)
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-10 * max(diag.max(), 1.0):
        raise DataError("G'G is singular; score columns are collinear")
    P = -(Q @ Q.T)
    P[np.diag_indices(n)] += 1.0
    P = 0.5 * (P + P.T)
    return ProjectionMatrix(P, d)


def project_residuals(P: ProjectionMatrix, eps) -> np.ndarray:
    eps = np.asarray(eps, dtype=float)
    if eps.shape[0] != P.n:
        raise DataError(f"residual length {eps.shape[0]} does not match projection size {P.n}")
    return P.values @ eps


def project_kernel(P: ProjectionMatrix, K) -> np.ndarray:
    """Projected kernel ``P K P'``."""
    if isinstance(K, KernelMatrix):
        K = K.values
    K = np.asarray(K, dtype=float)
    if K.shape != (P.n, P.n):
        raise DataError(f"kernel shape {K.shape} does not match projection size {P.n}")
    PK = P.values @ K @ P.values.T
    return 0.5 * (PK + PK.T)
