"""Seeded generators for the three synthetic benchmark populations.

Each generator consumes one named stream (see :mod:`mkteq.rng`) with a fixed
draw order, so datasets are bit-identical across runs and platforms:

* label noise: n uniforms (label 1 iff u < alpha);
* Gaussian mixture: n uniforms for labels, then n x d inverse-CDF normals;
* nested features: n uniforms for subpopulations, n uniforms for labels,
  then n x 4 inverse-CDF normals (row-major), truncated to the first
  ``dim`` coordinates afterwards — so truncation commutes with generation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .population import Population, _readonly
from .rng import make_stream, normals

# The nested-features population always lives in this many base dimensions;
# the representation keeps only the first `dim` of them.
BASE_DIM = 4


@dataclass(frozen=True)
class LabelNoiseSpec:
    """Zero-dimensional population: labels are pure coin flips.

    Label 1 is drawn with probability ``alpha`` (the minority label for
    alpha < 0.5, making 0 the Bayes-optimal prediction).
    """

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 0.5:
            raise ValueError(f"alpha must lie in [0, 0.5], got {self.alpha}")


@dataclass(frozen=True)
class GaussianMixtureSpec:
    """Two-class isotropic Gaussian mixture: X | Y=1 ~ N(+mu, sigma^2 I),
    X | Y=0 ~ N(-mu, sigma^2 I), P[Y=1] = prior_y1."""

    mu: np.ndarray = (1.0,)
    sigma: float = 1.0
    prior_y1: float = 0.4

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=np.float64))
        object.__setattr__(self, "mu", _readonly(mu))
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not 0.0 < self.prior_y1 < 1.0:
            raise ValueError(f"prior_y1 must lie in (0, 1), got {self.prior_y1}")

    @property
    def dim(self) -> int:
        return self.mu.shape[0]


@dataclass(frozen=True)
class NestedFeaturesSpec:
    """Four subpopulations with nested informative coordinates.

    Subpopulation i (1-based, uniform over 1..4) has class-mean vector
    ``subpopulation_mean(i)``; labels are fair coins; the representation
    keeps the first ``dim`` of the ``BASE_DIM`` coordinates. Coordinate d
    carries signal about subpopulation i only when d >= i, so small ``dim``
    hides entire subpopulations.
    """

    sigma: float = 1.0
    dim: int = BASE_DIM

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not 0 <= self.dim <= BASE_DIM:
            raise ValueError(f"dim must lie in [0, {BASE_DIM}], got {self.dim}")


SettingSpec = Union[LabelNoiseSpec, GaussianMixtureSpec, NestedFeaturesSpec]


def subpopulation_mean(i: int) -> np.ndarray:
    """Class-mean vector of subpopulation i: zeros below i, ones from i up."""
    if not 1 <= i <= BASE_DIM:
        raise ValueError(f"subpopulation index must lie in [1, {BASE_DIM}], got {i}")
    mu = np.zeros(BASE_DIM)
    mu[i - 1 :] = 1.0
    return mu


def label_noise_population(alpha: float, n: int, seed: int) -> Population:
    """n zero-dimensional points with Bernoulli(alpha) labels, uniform weights."""
    spec = LabelNoiseSpec(alpha)
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = make_stream(seed, "gen/label-noise")
    y = gen.random(n) < spec.alpha
    return Population(np.zeros((n, 0)), y.astype(np.uint8))


def gaussian_mixture_population(spec: GaussianMixtureSpec, n: int, seed: int) -> Population:
    """n points from the two-class Gaussian mixture, uniform weights."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = make_stream(seed, "gen/gaussian-mixture")
    y = (gen.random(n) < spec.prior_y1).astype(np.uint8)
    z = normals(gen, (n, spec.dim))
    signs = 2.0 * y - 1.0
    X = signs[:, None] * spec.mu + spec.sigma * z
    return Population(X, y)


def nested_features_population(spec: NestedFeaturesSpec, n: int, seed: int) -> Population:
    """n points from the nested-subpopulation mixture, truncated to spec.dim."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = make_stream(seed, "gen/nested-features")
    subpop = np.minimum((gen.random(n) * BASE_DIM).astype(np.intp), BASE_DIM - 1) + 1
    y = (gen.random(n) < 0.5).astype(np.uint8)
    z = normals(gen, (n, BASE_DIM))
    means = np.stack([subpopulation_mean(i) for i in range(1, BASE_DIM + 1)])
    signs = 2.0 * y - 1.0
    X_all = signs[:, None] * means[subpop - 1] + spec.sigma * z
    return Population(X_all[:, : spec.dim], y)


def generate(spec: SettingSpec, n: int, seed: int) -> Population:
    """Dispatch to the generator matching the spec type."""
    if isinstance(spec, LabelNoiseSpec):
        return label_noise_population(spec.alpha, n, seed)
    if isinstance(spec, GaussianMixtureSpec):
        return gaussian_mixture_population(spec, n, seed)
    if isinstance(spec, NestedFeaturesSpec):
        return nested_features_population(spec, n, seed)
    raise ValueError(f"unknown population spec: {spec!r}")


def embed_linear(population: Population, out_dim: int, seed: int) -> Population:
    """Map representations through a fixed seeded linear projection.

    Useful for producing high-dimensional datasets whose underlying game
    structure is that of a low-dimensional generator. Labels and weights are
    untouched.
    """
    if population.dim < 1:
        raise ValueError("cannot embed a zero-dimensional population")
    if out_dim < 1:
        raise ValueError("out_dim must be >= 1")
    gen = make_stream(seed, "embed")
    A = normals(gen, (population.dim, out_dim)) / np.sqrt(population.dim)
    return Population(population.X @ A, population.y, population.weights)
