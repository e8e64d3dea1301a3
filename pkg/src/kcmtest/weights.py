"""Directional-component weight sequences.

Schemes are written on the command line as one of::

    eigen | basel | harmonic | equal | poly:<p> | geom:<r> | exp:<beta>
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DataError
from .spectral import SpectralDecomposition

__all__ = ["WeightScheme", "parse_scheme", "generate_weights", "CONVERGENT", "DIVERGENT"]

CONVERGENT = "convergent"
DIVERGENT = "divergent"

_KINDS = {"eigen", "basel", "poly", "geom", "exp", "harmonic", "equal"}
_PARAMETRIC = {"poly", "geom", "exp"}


@dataclass(frozen=True)
class WeightScheme:
    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown weight scheme {self.kind!r}")
        if self.kind in _PARAMETRIC:
            if self.param is None:
                raise ValueError(f"scheme {self.kind!r} needs a parameter")
            p = float(self.param)
            if self.kind == "poly" and not p > 1:
                raise ValueError("polynomial decay needs p > 1")
            if self.kind == "geom" and not 0 < p < 1:
                raise ValueError("geometric weights need 0 < r < 1")
            if self.kind == "exp" and not p > 0:
                raise ValueError("exponential decay needs beta > 0")
            object.__setattr__(self, "param", p)
        elif self.param is not None:
            raise ValueError(f"scheme {self.kind!r} takes no parameter")

    @property
    def weight_class(self) -> str:
        return DIVERGENT if self.kind in ("harmonic", "equal") else CONVERGENT

    @property
    def token(self) -> str:
        if self.param is None:
            return self.kind
        return f"{self.kind}:{self.param:g}"

    def __str__(self):
        return self.token


def parse_scheme(token: str) -> WeightScheme:
    kind, _, arg = token.strip().lower().partition(":")
    if kind in _PARAMETRIC:
        if not arg:
            raise ValueError(f"scheme {kind!r} needs a parameter, e.g. {kind}:2")
        try:
            return WeightScheme(kind, float(arg))
        except ValueError as exc:
            raise ValueError(f"bad weight scheme {token!r}: {exc}") from None
    if arg:
        raise ValueError(f"scheme {kind!r} takes no parameter")
    return WeightScheme(kind)


def generate_weights(scheme: WeightScheme, J: int, dec: SpectralDecomposition | None = None) -> np.ndarray:
    """First ``J`` weights of ``scheme``.

    ``eigen`` returns ``sigma_i^2 / n`` from ``dec``, where ``n`` is the size of
    the matrix that was decomposed.
    """
    J = int(J)
    if J < 1:
        raise ValueError("J must be at least 1")
    i = np.arange(1, J + 1, dtype=float)
    kind = scheme.kind
    if kind == "eigen":
        if dec is None:
            raise DataError("eigenvalue-scaled weights need a spectral decomposition")
        if J > dec.rank_kept:
            raise DataError(f"J={J} exceeds decomposition rank {dec.rank_kept}")
        return dec.eigenvalues[:J] / dec.n
    if kind == "basel":
        return i**-2.0
    if kind == "poly":
        return i ** -scheme.param
    if kind == "geom":
        return scheme.param**i
    if kind == "exp":
        return np.exp(-scheme.param * i)
    if kind == "harmonic":
        return 1.0 / i
    return np.ones(J)
