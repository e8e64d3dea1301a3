"""Simulation designs.

DGP 1 is the linear null ``y = 1 + 0.5 * sum(x) + e``. DGPs 2-5 add a fixed
nonlinear term, DGP 6 is a heteroskedastic fixed alternative and DGP 7 a
heteroskedastic local alternative whose drift shrinks like ``N^{-1/2}``.
DGPs 1-5 accept any dimension; 6 and 7 are defined for ``q`` in {10, 20}
only (their covariate blocks differ between the two).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DataError
from .rng import derive_seed

__all__ = ["DgpSpec", "Dataset", "parse_dgp", "coefficients", "draw_covariates", "response", "generate", "split"]

ALPHA = 1.0


@dataclass(frozen=True)
class DgpSpec:
    id: int
    q: int = 10
    n: int = 200

    def __post_init__(self):
        if self.id not in range(1, 8):
            raise DataError(f"unknown DGP id {self.id}")
        if self.q < 1:
            raise DataError("q must be at least 1")
        if self.id in (6, 7) and self.q not in (10, 20):
            raise DataError(f"DGP{self.id} is defined for q in {{10, 20}}, got q={self.q}")
        if self.n < self.q + 2:
            raise DataError(f"n={self.n} too small for q={self.q}")

    @property
    def name(self) -> str:
        star = "*" if self.id in (6, 7) and self.q == 20 else ""
        return f"dgp{self.id}{star}"


@dataclass(frozen=True, eq=False)
class Dataset:
    X: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    truth: DgpSpec | None = None
    seed: int | None = None
    index: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.X.ndim != 2 or self.y.shape != (self.X.shape[0],):
            raise DataError(f"inconsistent shapes X{self.X.shape}, y{self.y.shape}")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.y))):
            raise DataError("dataset contains non-finite values")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def q(self) -> int:
        return self.X.shape[1]

    def take(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        base = self.index if self.index is not None else np.arange(self.n)
        return Dataset(self.X[idx], self.y[idx], self.truth, self.seed, base[idx])


def parse_dgp(token: str) -> int:
    t = token.strip().lower().rstrip("*")
    if t.startswith("dgp"):
        t = t[3:]
    try:
        k = int(t)
    except ValueError:
        raise DataError(f"unknown DGP {token!r}") from None
    if k not in range(1, 8):
        raise DataError(f"unknown DGP {token!r}")
    return k


def coefficients(dgp_id: int, q: int) -> np.ndarray:
    """True ``(alpha, beta)`` of the linear part."""
    b = 0.5 if dgp_id <= 5 else 1.0
    return np.concatenate([[ALPHA], np.full(q, b)])


def draw_covariates(dgp_id: int, n: int, q: int, rng: np.random.Generator) -> np.ndarray:
    if dgp_id <= 5:
        return rng.standard_normal((n, q))
    n_unif = q // 2
    X = np.empty((n, q))
    for l in range(1, n_unif + 1):
        upper = 1.0 + 0.1 * (l - 1) if dgp_id == 6 else float(l)
        X[:, l - 1] = rng.uniform(0.0, upper, n)
    for l in range(n_unif + 1, q + 1):
        # second parameter read as a standard deviation (numpy ``scale``)
        X[:, l - 1] = rng.normal(0.0, 1.0 + 0.1 * (l - n_unif), n)
    return X


def response(dgp_id: int, X, e, n_total: int | None = None) -> np.ndarray:
    """Response for given covariates and noise.

    ``n_total`` is the sample size that scales the DGP 7 drift; it defaults to
    the number of rows of ``X``.
    """
    X = np.asarray(X, dtype=float)
    e = np.asarray(e, dtype=float)
    n, q = X.shape
    theta = coefficients(dgp_id, q)
    xb = X @ theta[1:]
    y = theta[0] + xb
    norm = np.sqrt(np.einsum("ij,ij->i", X, X))
    if dgp_id == 1:
        return y + e
    if dgp_id == 2:
        return y + 1.5 * np.exp(-(xb**2)) + e
    if dgp_id == 3:
        return y + 2.0 * np.cos(1.2 * norm) + e
    if dgp_id == 4:
        return y + 0.5 * xb**2 + e
    if dgp_id == 5:
        return y + 1.5 * np.exp(0.25 * xb) + e
    if dgp_id == 6:
        return y + norm + np.abs(X.sum(axis=1)) * e
    if dgp_id == 7:
        N = n if n_total is None else n_total
        scale = np.sqrt(0.1 + X[:, :5].sum(axis=1) + (X[:, 5:] ** 2).sum(axis=1))
        return y + norm / np.sqrt(N) + scale * e
    raise DataError(f"unknown DGP id {dgp_id}")


def generate(spec: DgpSpec, seed: int) -> Dataset:
    rng = np.random.default_rng(derive_seed(seed, "data"))
    X = draw_covariates(spec.id, spec.n, spec.q, rng)
    e = rng.standard_normal(spec.n)
    return Dataset(X, response(spec.id, X, e), spec, seed)


def split(data: Dataset, train_frac: float = 0.15, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Random disjoint train/test partition with ``round(train_frac * n)`` training rows."""
    if not 0 < train_frac < 1:
        raise DataError("train_frac must lie in (0, 1)")
    n_train = int(np.floor(train_frac * data.n + 0.5))
    if n_train < 2 or data.n - n_train < 2:
        raise DataError(f"split of n={data.n} at {train_frac} leaves a part with fewer than 2 rows")
    perm = np.random.default_rng(derive_seed(seed, "split")).permutation(data.n)
    train, test = np.sort(perm[:n_train]), np.sort(perm[n_train:])
    return data.take(train), data.take(test)
