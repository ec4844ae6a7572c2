"""Portable seeded random streams.

Every stochastic operation in the package draws from a named stream so that
results are reproducible bit-for-bit across runs and platforms:

* generator: numpy ``Philox`` (counter-based), keyed with the 128-bit
  blake2b digest of ``"{seed}:{purpose}"``;
* uniforms: numpy ``Generator.random`` (top 53 bits of the counter output);
* Gaussians: inverse CDF, ``ndtri(u + 2**-54)`` on those uniforms. The
  half-ulp shift keeps the argument strictly inside (0, 1).

Stream purposes in use:

===========================  =======================================
``gen/label-noise``          label-noise population generator
``gen/gaussian-mixture``     two-class Gaussian mixture generator
``gen/nested-features``      nested-subpopulation generator
``alpha/gaussian-mixture``   posterior-risk profile sampling
``alpha/nested-features``    posterior-risk profile sampling
``embed``                    fixed random linear embedding
``dynamics``                 best-response dynamics (init + reinit)
``bayes-fit``                single-predictor risk minimization
===========================  =======================================
"""

from __future__ import annotations

import hashlib

import numpy as np
from scipy.special import ndtri

_HALF_ULP = 2.0 ** -54


def stream_key(seed: int, purpose: str) -> int:
    """128-bit Philox key derived from a seed and a stream purpose."""
    digest = hashlib.blake2b(f"{seed}:{purpose}".encode(), digest_size=16).digest()
    return int.from_bytes(digest, "little")


def make_stream(seed: int, purpose: str) -> np.random.Generator:
    """Independent deterministic generator for (seed, purpose)."""
    return np.random.Generator(np.random.Philox(key=stream_key(seed, purpose)))


def normals(gen: np.random.Generator, size) -> np.ndarray:
    """Standard normal variates via the inverse CDF of 53-bit uniforms."""
    u = gen.random(size)
    return ndtri(u + _HALF_ULP)
