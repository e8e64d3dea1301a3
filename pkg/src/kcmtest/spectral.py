"""Eigendecomposition of kernel matrices and directional-component estimates.

Eigenvalues are the raw eigenvalues ``sigma_i^2`` of the ``n x n`` kernel
matrix (not divided by ``n``); eigenvectors are unit-norm columns.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DataError, NumericalError
from .kernel import KernelMatrix

__all__ = [
    "SpectralDecomposition",
    "DirectionalEstimates",
    "EIGEN_FLOOR",
    "eigendecompose",
    "truncate",
    "directional_components",
    "nystrom_eigenfunction",
]

# relative to the leading eigenvalue
EIGEN_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)
    n: int
    gamma: float | None = None

    @property
    def rank_kept(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.T


@dataclass(frozen=True, eq=False)
class DirectionalEstimates:
    d_hat: np.ndarray
    s2_hat: np.ndarray

    @property
    def J(self) -> int:
        return self.d_hat.shape[0]


def _fix_signs(U: np.ndarray) -> np.ndarray:
    # first entry that is clearly nonzero is made positive
    scale = np.max(np.abs(U), axis=0, keepdims=True)
    significant = np.abs(U) > 1e-10 * np.where(scale > 0, scale, 1.0)
    first = np.argmax(significant, axis=0)
    signs = np.sign(U[first, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def eigendecompose(K) -> SpectralDecomposition:
    """Full symmetric eigendecomposition, eigenvalues descending.

    Accepts a :class:`KernelMatrix` or a plain symmetric array (for instance a
    projected kernel ``P K P``). Eigenvalues below ``EIGEN_FLOOR`` times the
    largest one, including negative rounding noise, are set to zero.
    """
    gamma = None
    if isinstance(K, KernelMatrix):
        gamma = K.spec.gamma
        K = K.values
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise DataError(f"expected a square matrix, got shape {K.shape}")
    n = K.shape[0]
    try:
        w, U = np.linalg.eigh(0.5 * (K + K.T))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed for n={n}, gamma={gamma}: {exc}") from exc
    w, U = w[::-1], U[:, ::-1]
    top = max(w[0], 0.0)
    w = np.where(w > EIGEN_FLOOR * top, w, 0.0)
    return SpectralDecomposition(w, _fix_signs(U), n, gamma)


def truncate(dec: SpectralDecomposition, J: int) -> SpectralDecomposition:
    """Keep the leading ``J`` eigenpairs."""
    J = int(J)
    if not 1 <= J <= dec.rank_kept:
        raise DataError(f"truncation level J={J} outside [1, {dec.rank_kept}]")
    if J == dec.rank_kept:
        return dec
    return SpectralDecomposition(dec.eigenvalues[:J], dec.eigenvectors[:, :J], dec.n, dec.gamma)


def directional_components(dec: SpectralDecomposition, eps, J: int | None = None) -> DirectionalEstimates:
    """Directional-component estimates and their variance estimates.

    ``d_hat[i] = eps @ u_i / sqrt(n)`` and ``s2_hat[i]`` is the variance
    (denominator ``n``) of the vector ``sqrt(n) * eps * u_i``.
    """
    eps = np.asarray(eps, dtype=float)
    if eps.shape != (dec.n,):
        raise DataError(f"residual vector has shape {eps.shape}, expected ({dec.n},)")
    J = dec.rank_kept if J is None else int(J)
    if not 1 <= J <= dec.rank_kept:
        raise DataError(f"J={J} outside [1, {dec.rank_kept}]")
    U = dec.eigenvectors[:, :J]
    n = dec.n
    proj = eps @ U
    d_hat = proj / np.sqrt(n)
    # var of sqrt(n) eps_j u_ji = sum_j eps_j^2 u_ji^2 - d_hat_i^2
    s2_hat = (eps * eps) @ (U * U) - d_hat**2
    return DirectionalEstimates(d_hat, np.maximum(s2_hat, 0.0))


def nystrom_eigenfunction(dec: SpectralDecomposition, K_cross, i: int) -> np.ndarray:
    """Estimated eigenfunction ``i`` (0-based) at new points.

    ``K_cross`` is ``m x n`` with entries ``k(x*_a, x_b)`` against the points
    the decomposition was built from. Returns ``sqrt(n) / sigma_i^2 * K_cross @ u_i``.
    """
    K_cross = np.atleast_2d(np.asarray(K_cross, dtype=float))
    if K_cross.shape[1] != dec.n:
        raise DataError(f"cross-kernel has {K_cross.shape[1]} columns, expected {dec.n}")
    if not 0 <= i < dec.rank_kept:
        raise DataError(f"eigen index {i} outside [0, {dec.rank_kept})")
    s2 = dec.eigenvalues[i]
    if s2 <= EIGEN_FLOOR * dec.eigenvalues[0] or s2 <= 0:
        raise NumericalError(f"unstable eigendirection {i}: eigenvalue {s2:.3g} at or below floor")
    return np.sqrt(dec.n) / s2 * (K_cross @ dec.eigenvectors[:, i])
