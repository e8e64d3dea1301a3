"""Test statistics in projected form.

All functions take residuals that have already been passed through the score
annihilator (``eps_proj``) together with the eigendecomposition of the
projected kernel, except :func:`stat_gp` and :func:`stat_icm` which take the
raw residuals, the kernel and the projection and evaluate the sandwich form.

The ``_batch`` helpers evaluate a statistic for every column of an ``n x B``
residual matrix at once; the bootstrap relies on them.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DataError, NumericalError
from .kernel import KernelMatrix
from .regression import ProjectionMatrix, project_residuals
from .spectral import SpectralDecomposition
from .weights import CONVERGENT, DIVERGENT, WeightScheme, parse_scheme

__all__ = [
    "ICM_GAMMA",
    "StatisticKind",
    "StatisticValue",
    "parse_kind",
    "stat_basic",
    "stat_generic",
    "stat_divergent",
    "stat_gp",
    "stat_icm",
    "weighted_sum_batch",
    "studentized_batch",
    "dense_quadratic_batch",
]

ICM_GAMMA = 0.5
SELECTION_METHODS = ("nasym", "asym")


@dataclass(frozen=True)
class StatisticKind:
    """Which statistic to compute and how its kernel is chosen.

    ``basic``, ``generic`` and ``divergent`` run on a train/test split with a
    bandwidth selected on the training part (``select`` overrides the study
    default). ``gp`` and ``icm`` use a fixed bandwidth on the whole sample.
    ``truncated`` is false for ``basic:all`` and plain ``gp``/``icm``.
    """

    name: str
    scheme: WeightScheme | None = None
    truncated: bool = True
    select: str | None = None

    def __post_init__(self):
        if self.name not in ("basic", "generic", "divergent", "gp", "icm"):
            raise ValueError(f"unknown statistic {self.name!r}")
        if self.name in ("generic", "divergent"):
            if self.scheme is None:
                raise ValueError(f"{self.name} statistic needs a weight scheme")
            want = CONVERGENT if self.name == "generic" else DIVERGENT
            if self.scheme.weight_class != want:
                raise ValueError(f"{self.name} statistic needs {want} weights, got {self.scheme.kind}")
            if not self.truncated:
                raise ValueError(f"{self.name} statistic is always truncated")
        elif self.scheme is not None:
            raise ValueError(f"{self.name} statistic takes no weight scheme")
        if self.select is not None:
            if self.select not in SELECTION_METHODS:
                raise ValueError(f"unknown selection method {self.select!r}")
            if not self.uses_split:
                raise ValueError(f"{self.name} uses a fixed kernel; no selection override")

    @property
    def uses_split(self) -> bool:
        return self.name in ("basic", "generic", "divergent")

    @property
    def token(self) -> str:
        if self.name in ("generic", "divergent"):
            tok = f"{self.name}:{self.scheme.token}"
        elif self.name == "basic":
            tok = "basic" if self.truncated else "basic:all"
        else:
            tok = f"{self.name}:trc" if self.truncated else self.name
        return f"{tok}@{self.select}" if self.select else tok

    def __str__(self):
        return self.token


def parse_kind(token: str) -> StatisticKind:
    """Parse ``basic[:all] | generic:<scheme> | divergent:<scheme> | gp[:trc] | icm[:trc]``.

    Any split-based kind may carry an ``@nasym`` / ``@asym`` suffix.
    """
    body, _, select = token.strip().lower().partition("@")
    select = select or None
    name, _, rest = body.partition(":")
    if name == "basic":
        if rest not in ("", "all", "trc"):
            raise ValueError(f"bad statistic token {token!r}")
        return StatisticKind("basic", truncated=rest != "all", select=select)
    if name in ("generic", "divergent"):
        if not rest:
            raise ValueError(f"{name} needs a weight scheme, e.g. {name}:harmonic")
        return StatisticKind(name, parse_scheme(rest), select=select)
    if name in ("gp", "icm"):
        if rest not in ("", "trc"):
            raise ValueError(f"bad statistic token {token!r}")
        return StatisticKind(name, truncated=rest == "trc", select=select)
    raise ValueError(f"unknown statistic {token!r}")


@dataclass(frozen=True, eq=False)
class StatisticValue:
    value: float
    J_used: int
    gamma_used: float | None
    diagnostics: dict = field(default_factory=dict, repr=False)


# -- batch kernels ---------------------------------------------------------


def weighted_sum_batch(U: np.ndarray, w: np.ndarray, E: np.ndarray) -> np.ndarray:
    """``sum_i w_i (E[:, b] @ u_i)^2`` for every column ``b`` of ``E``."""
    proj = U.T @ E
    return w @ (proj * proj)


def studentized_batch(U: np.ndarray, w: np.ndarray, E: np.ndarray, strict: bool = True) -> np.ndarray:
    """Studentized weighted sum for every column of ``E``.

    A column whose variance estimates are all zero has no studentization:
    with ``strict`` this raises :class:`NumericalError`, otherwise the
    column's value is NaN.
    """
    n = U.shape[0]
    proj = U.T @ E
    sq = proj * proj
    s2 = np.maximum((U * U).T @ (E * E) - sq / n, 0.0)
    num = w @ sq - w @ s2
    den = np.sqrt(2.0 * ((w * w) @ (s2 * s2)))
    bad = ~(den > 0)
    if bad.any():
        if strict:
            raise NumericalError("degenerate studentization: all variance estimates are zero")
        den = np.where(bad, np.nan, den)
    return num / den


def dense_quadratic_batch(K: np.ndarray, E: np.ndarray) -> np.ndarray:
    """``E[:, b]' K E[:, b] / n`` for every column."""
    return np.einsum("ib,ib->b", E, K @ E) / K.shape[0]


# -- single statistics -----------------------------------------------------


def _check(dec: SpectralDecomposition, eps_proj, J) -> tuple[np.ndarray, int]:
    eps_proj = np.asarray(eps_proj, dtype=float)
    if eps_proj.shape != (dec.n,):
        raise DataError(f"residual vector has shape {eps_proj.shape}, expected ({dec.n},)")
    J = int(J)
    if not 1 <= J <= dec.rank_kept:
        raise DataError(f"J={J} outside [1, {dec.rank_kept}]")
    return eps_proj, J


def _check_weights(weights, J) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.shape[0] < J:
        raise DataError(f"need at least J={J} weights, got {w.shape}")
    w = w[:J]
    if np.any(w <= 0) or np.any(np.diff(w) > 1e-15 * np.abs(w[:-1])):
        raise DataError("weights must be positive and non-increasing")
    return w


def _diagnostics(U, w, eps_proj):
    n = U.shape[0]
    proj = eps_proj @ U
    s2 = np.maximum((eps_proj**2) @ (U * U) - proj**2 / n, 0.0)
    return {"weight": w, "d_hat": proj / np.sqrt(n), "s2_hat": s2}


def stat_basic(dec: SpectralDecomposition, eps_proj, J: int) -> StatisticValue:
    """Truncated quadratic form with eigenvalue weights ``sigma_i^2 / n``."""
    eps_proj, J = _check(dec, eps_proj, J)
    U = dec.eigenvectors[:, :J]
    w = dec.eigenvalues[:J] / dec.n
    value = float(weighted_sum_batch(U, w, eps_proj[:, None])[0])
    return StatisticValue(value, J, dec.gamma, _diagnostics(U, w, eps_proj))


def stat_generic(dec: SpectralDecomposition, eps_proj, weights, J: int) -> StatisticValue:
    """``sum_{i<=J} w_i (eps_proj @ u_i)^2``."""
    eps_proj, J = _check(dec, eps_proj, J)
    w = _check_weights(weights, J)
    U = dec.eigenvectors[:, :J]
    value = float(weighted_sum_batch(U, w, eps_proj[:, None])[0])
    return StatisticValue(value, J, dec.gamma, _diagnostics(U, w, eps_proj))


def stat_divergent(dec: SpectralDecomposition, eps_proj, weights, J: int) -> StatisticValue:
    """Weighted sum centred by ``sum w_i S_i^2`` and scaled by ``sqrt(2 sum w_i^2 S_i^4)``."""
    eps_proj, J = _check(dec, eps_proj, J)
    w = _check_weights(weights, J)
    U = dec.eigenvectors[:, :J]
    value = float(studentized_batch(U, w, eps_proj[:, None])[0])
    return StatisticValue(value, J, dec.gamma, _diagnostics(U, w, eps_proj))


def stat_gp(K, P: ProjectionMatrix, eps) -> StatisticValue:
    """Untruncated sandwich form ``(P eps)' K (P eps) / m``."""
    gamma = None
    if isinstance(K, KernelMatrix):
        gamma = K.spec.gamma
        K = K.values
    K = np.asarray(K, dtype=float)
    m = P.n
    if K.shape != (m, m):
        raise DataError(f"kernel shape {K.shape} does not match projection size {m}")
    e = project_residuals(P, eps)
    value = float(dense_quadratic_batch(K, e[:, None])[0])
    return StatisticValue(value, m, gamma)


def stat_icm(K: KernelMatrix, P: ProjectionMatrix, eps) -> StatisticValue:
    """:func:`stat_gp` with the bandwidth pinned at ``ICM_GAMMA``."""
    if not isinstance(K, KernelMatrix) or K.spec.gamma != ICM_GAMMA:
        raise ValueError(f"ICM statistic requires a Gaussian kernel with gamma={ICM_GAMMA}")
    return stat_gp(K, P, eps)
