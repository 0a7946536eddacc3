"""Seed splitting and tangent-direction sampling."""

from __future__ import annotations

import math
import warnings
import zlib

import numpy as np
from scipy.stats import norm, qmc


def _key(k) -> int:
    if isinstance(k, str):
        return zlib.crc32(k.encode())
    return int(k)


def rng_for(seed: int, *keys) -> np.random.Generator:
    """Counter-based child generator: same (seed, keys) -> same stream."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(_key(k) for k in keys))
    return np.random.default_rng(ss)


def child_seed(seed: int, *keys) -> int:
    return int(rng_for(seed, *keys).integers(0, 2**31 - 1))


def directions(dim: int, count: int, seed: int = 0) -> np.ndarray:
    """``count`` quasi-uniform unit vectors (scrambled Sobol -> Gaussian -> sphere)."""
    m = max(1, math.ceil(math.log2(max(count, 2))))
    sob = qmc.Sobol(d=dim, scramble=True, seed=seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        u = sob.random_base2(m)[:count]
    z = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_tangents(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    y = rng.normal(size=(count, dim))
    return y * rng.uniform(0.5, 2.0, size=(count, 1))
