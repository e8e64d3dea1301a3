"""Multiplier bootstrap with Mammen's two-point weights."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DataError, NumericalError
from .regression import ProjectionMatrix
from .rng import derive_seed
from .spectral import SpectralDecomposition
from .teststats import StatisticKind, StatisticValue, studentized_batch, weighted_sum_batch

__all__ = [
    "MAMMEN_LOW",
    "MAMMEN_HIGH",
    "MAMMEN_P_LOW",
    "MultiplierDraw",
    "BootstrapDistribution",
    "TestOutcome",
    "draw_multipliers",
    "multiplier_matrix",
    "bootstrap_distribution",
    "p_value",
    "critical_value",
    "make_outcome",
]

SQRT5 = math.sqrt(5.0)
MAMMEN_LOW = 0.5 * (1.0 - SQRT5)
MAMMEN_HIGH = 0.5 * (1.0 + SQRT5)
MAMMEN_P_LOW = (1.0 + SQRT5) / (2.0 * SQRT5)

MAX_FAILURE_RATE = 0.01


@dataclass(frozen=True, eq=False)
class MultiplierDraw:
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class BootstrapDistribution:
    draws: np.ndarray = field(repr=False)
    kind: StatisticKind | None = None
    failures: int = 0

    @property
    def B(self) -> int:
        return self.draws.shape[0]


@dataclass(frozen=True, eq=False)
class TestOutcome:
    statistic: StatisticValue
    p_value: float
    critical_value: float
    reject: bool
    B: int
    alpha: float
    kind: StatisticKind | None = None

    def to_dict(self) -> dict:
        s = self.statistic
        out = {
            "statistic": str(self.kind) if self.kind is not None else None,
            "value": s.value,
            "p_value": self.p_value,
            "critical_value": self.critical_value,
            "reject": self.reject,
            "alpha": self.alpha,
            "B": self.B,
            "J": s.J_used,
            "gamma": s.gamma_used,
        }
        out.update({k: v for k, v in s.diagnostics.items() if np.isscalar(v)})
        tables = {k: np.asarray(v).tolist() for k, v in s.diagnostics.items() if not np.isscalar(v)}
        if tables:
            out["directions"] = tables
        return out


def draw_multipliers(n: int, rng: np.random.Generator) -> MultiplierDraw:
    """``n`` i.i.d. Mammen multipliers (mean 0, variance 1)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    low = rng.random(n) < MAMMEN_P_LOW
    return MultiplierDraw(np.where(low, MAMMEN_LOW, MAMMEN_HIGH))


def multiplier_matrix(n: int, B: int, seed: int) -> np.ndarray:
    """``n x B`` multipliers; column ``b`` comes from its own stream keyed by ``(seed, 'boot', b)``."""
    V = np.empty((n, B))
    for b in range(B):
        rng = np.random.default_rng(derive_seed(seed, "boot", b))
        V[:, b] = draw_multipliers(n, rng).values
    return V


def bootstrap_distribution(
    dec: SpectralDecomposition,
    P: ProjectionMatrix,
    eps,
    kind: StatisticKind,
    weights,
    J: int,
    B: int,
    seed: int,
    multipliers: np.ndarray | None = None,
) -> BootstrapDistribution:
    """Bootstrap draws of the statistic ``kind`` under the null.

    Each replicate multiplies the raw residuals ``eps`` by Mammen weights,
    projects with ``P`` and re-evaluates the statistic on the *fixed*
    eigenvectors of ``dec``. ``weights`` is ignored for eigenvalue-weighted
    kinds (``basic``, ``gp``, ``icm``). Divergent statistics are
    re-studentized per replicate; replicates that cannot be studentized count
    as failures and are dropped, and more than 1% failures is an error.
    A precomputed ``multipliers`` matrix (``n x B``) overrides ``seed``.
    """
    eps = np.asarray(eps, dtype=float)
    n = dec.n
    if eps.shape != (n,) or P.n != n:
        raise DataError("residuals, projection and decomposition sizes disagree")
    if B < 1:
        raise ValueError("B must be at least 1")
    J = int(J)
    if not 1 <= J <= dec.rank_kept:
        raise DataError(f"J={J} outside [1, {dec.rank_kept}]")
    V = multiplier_matrix(n, B, seed) if multipliers is None else np.asarray(multipliers)[:n, :B]
    if V.shape != (n, B):
        raise DataError(f"multiplier matrix has shape {V.shape}, expected {(n, B)}")

    U = dec.eigenvectors[:, :J]
    if kind.name in ("basic", "gp", "icm"):
        w = dec.eigenvalues[:J] / n
    else:
        w = np.asarray(weights, dtype=float)[:J]
        if w.shape[0] < J:
            raise DataError(f"need at least J={J} weights")

    W = P.values @ (eps[:, None] * V)
    if kind.name == "divergent":
        draws = studentized_batch(U, w, W, strict=False)
    else:
        draws = weighted_sum_batch(U, w, W)
    ok = np.isfinite(draws)
    failures = int(B - ok.sum())
    if failures > MAX_FAILURE_RATE * B:
        raise NumericalError(f"{failures} of {B} bootstrap replicates failed")
    return BootstrapDistribution(draws[ok], kind, failures)


def p_value(dist: BootstrapDistribution, observed: float) -> float:
    """``(1 + #{draws >= observed}) / (B + 1)``."""
    return float((1 + np.count_nonzero(dist.draws >= observed)) / (dist.B + 1))


def critical_value(dist: BootstrapDistribution, alpha: float) -> float:
    """Order statistic ``ceil((1 - alpha)(B + 1))`` of the draws, clamped to ``[1, B]``."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    k = math.ceil((1.0 - alpha) * (dist.B + 1) - 1e-9)
    k = min(max(k, 1), dist.B)
    return float(np.sort(dist.draws)[k - 1])


def make_outcome(stat: StatisticValue, dist: BootstrapDistribution, alpha: float = 0.05,
                 kind: StatisticKind | None = None) -> TestOutcome:
    crit = critical_value(dist, alpha)
    return TestOutcome(
        statistic=stat,
        p_value=p_value(dist, stat.value),
        critical_value=crit,
        reject=bool(stat.value > crit),
        B=dist.B,
        alpha=alpha,
        kind=kind if kind is not None else dist.kind,
    )
