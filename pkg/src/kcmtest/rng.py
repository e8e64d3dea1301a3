"""Seed derivation.

Every random stream in a study is keyed by a tuple of integers and string tags
hashed through :class:`numpy.random.SeedSequence`, so a replicate (or a single
bootstrap draw) can be regenerated without replaying the ones before it.
"""
from __future__ import annotations

import zlib

import numpy as np


def _key(part):
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    part = int(part)
    if part < 0:
        raise ValueError("seed components must be non-negative")
    return part


def derive_seed(*parts) -> int:
    """Hash ``parts`` (ints or str tags) into a 63-bit integer seed."""
    if not parts:
        raise ValueError("derive_seed needs at least one component")
    head, *rest = (_key(p) for p in parts)
    ss = np.random.SeedSequence(entropy=head, spawn_key=tuple(rest))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def make_rng(*parts) -> np.random.Generator:
    """Generator seeded from :func:`derive_seed` (a single int is used as is)."""
    if len(parts) == 1:
        return np.random.default_rng(_key(parts[0]))
    return np.random.default_rng(derive_seed(*parts))
