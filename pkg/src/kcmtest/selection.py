"""Bandwidth selection on the training split."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DataError, NumericalError
from .kernel import KernelSpec, build_kernel_matrix, squared_distances
from .regression import ProjectionMatrix, project_kernel
from .spectral import SpectralDecomposition, eigendecompose, truncate
from .teststats import studentized_batch

__all__ = [
    "DEFAULT_LAMBDA",
    "SelectionResult",
    "truncation_level",
    "snr_nonasymptotic",
    "snr_asymptotic",
    "select_kernel",
]

DEFAULT_LAMBDA = 0.15


@dataclass(frozen=True)
class SelectionResult:
    chosen: KernelSpec
    criterion_values: list[tuple[float, float]]
    method: str
    J: int
    lam: float | None = None


def truncation_level(tau: float, N: int, cap: int) -> int:
    """``floor(tau * N)`` clamped to ``[1, cap]``."""
    # guard against 0.11 * 200 = 22.000000000000004 style rounding either way
    J = math.floor(tau * N + 1e-9)
    return int(min(max(J, 1), cap))


def snr_nonasymptotic(dec: SpectralDecomposition, eps_train, J: int) -> float:
    """Squared studentized truncated quadratic form, or ``-inf`` when degenerate."""
    eps_train = np.asarray(eps_train, dtype=float)
    if eps_train.shape != (dec.n,):
        raise DataError(f"residual vector has shape {eps_train.shape}, expected ({dec.n},)")
    J = int(J)
    if not 1 <= J <= dec.rank_kept:
        raise DataError(f"J={J} outside [1, {dec.rank_kept}]")
    w = dec.eigenvalues[:J] / dec.n
    try:
        v = studentized_batch(dec.eigenvectors[:, :J], w, eps_train[:, None])[0]
    except NumericalError:
        return -np.inf
    return float(v * v)


def snr_asymptotic(K, eps_train, lam: float = DEFAULT_LAMBDA) -> float:
    """``(eps' K eps / n^2) / (2 sd_i + lam)`` with ``sd`` the standard deviation
    (denominator ``n - 1``) of the row terms ``eps_i (K eps)_i / n``.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    K = np.asarray(getattr(K, "values", K), dtype=float)
    eps = np.asarray(eps_train, dtype=float)
    n = eps.shape[0]
    if K.shape != (n, n):
        raise DataError(f"kernel shape {K.shape} does not match residual length {n}")
    rows = eps * (K @ eps) / n
    num = rows.sum() / n
    den = 2.0 * rows.std(ddof=1) + lam
    if not den > 0:
        return -np.inf
    return float(num / den)


def select_kernel(
    X_train,
    eps_train,
    P_train: ProjectionMatrix,
    grid: list[KernelSpec],
    method: str = "nasym",
    tau: float = 0.11,
    N: int | None = None,
    *,
    truncated: bool = True,
    lam: float = DEFAULT_LAMBDA,
    J: int | None = None,
) -> SelectionResult:
    """Pick the grid bandwidth maximizing the selection criterion.

    The criterion is evaluated on the projected training kernel ``P K P'`` with
    the raw training residuals. The projection already removes the estimation
    effect from the quadratic form; projecting the residuals as well would
    shrink the variance estimates by roughly ``rank(P) / n``, which is severe on
    a small training split. ``method='nasym'`` uses the squared
    studentized statistic, ``'asym'`` the regularized asymptotic ratio. The
    truncation level is ``floor(tau * N)`` capped at ``n_train`` unless ``J``
    is given; with ``truncated=False`` the full training spectrum is used.
    Ties go to the smaller bandwidth, then to the earlier grid entry.
    """
    if not grid:
        raise ValueError("bandwidth grid is empty")
    if method not in ("nasym", "asym"):
        raise ValueError(f"unknown selection method {method!r}")
    X_train = np.asarray(X_train, dtype=float)
    n = X_train.shape[0]
    if P_train.n != n:
        raise DataError("projection size does not match the training sample")
    N = n if N is None else N
    if not truncated:
        J = n
    elif J is None:
        J = truncation_level(tau, N, n)
    elif not 1 <= J <= n:
        raise DataError(f"J={J} outside [1, {n}]")
    eps_train = np.asarray(eps_train, dtype=float)
    if eps_train.shape != (n,):
        raise DataError(f"residual vector has shape {eps_train.shape}, expected ({n},)")
    sqd = squared_distances(X_train)

    scores = []
    for spec in grid:
        Kp = project_kernel(P_train, build_kernel_matrix(spec, X_train, sqd))
        if method == "nasym":
            dec = eigendecompose(Kp)
            score = snr_nonasymptotic(dec, eps_train, J)
        else:
            if truncated:
                Kp = truncate(eigendecompose(Kp), J).reconstruct()
            score = snr_asymptotic(Kp, eps_train, lam)
        scores.append((spec.gamma, score))

    best = None
    for idx, (g, s) in enumerate(scores):
        if not np.isfinite(s) and s != np.inf:
            continue
        if best is None or s > scores[best][1] or (s == scores[best][1] and g < scores[best][0]):
            best = idx
    if best is None:
        raise NumericalError("no admissible bandwidth: every grid point is degenerate")
    return SelectionResult(grid[best], scores, method, J, lam if method == "asym" else None)
