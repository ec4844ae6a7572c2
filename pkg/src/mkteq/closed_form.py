"""Closed-form equilibrium social loss from per-representation Bayes risks.

The per-representation Bayes risk alpha(x) = min(P[y=1|x], P[y=0|x]) is the
irreducible error at x. With the full (tabular) function class and noiseless
user choice, the equilibrium social loss of a population is a closed-form
functional of the alpha distribution:

* equal reputations, m providers: mean of ``alpha * 1[alpha < 1/m]`` —
  below the threshold all providers pick the majority label (sharing its
  error), above it they split across labels and every user is served
  correctly by someone;
* two providers with reputations (w_max, w_min): the threshold moves to
  w_min and the heterogeneous branch contributes
  ``(alpha - w_min) (w_max - alpha) / (1 - 2 w_min)^2`` from the mixed
  equilibrium.

Profiles whose alphas sit on a threshold admit multiple equilibria with
different losses; the evaluators refuse those instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Optional, Union

import numpy as np

from .errors import DegenerateInstanceError
from .population import _readonly, sigmoid
from .rng import make_stream, normals
from .synth import (
    BASE_DIM,
    GaussianMixtureSpec,
    LabelNoiseSpec,
    NestedFeaturesSpec,
    SettingSpec,
    subpopulation_mean,
)

# Alphas closer than this to an equilibrium-multiplicity threshold (1/m or
# w_min) make the instance degenerate.
DEGENERACY_TOL = 1e-9

_WEIGHT_SUM_ATOL = 1e-9


@dataclass(frozen=True)
class AlphaProfile:
    """Weighted distribution of per-representation Bayes risks."""

    alphas: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        alphas = np.asarray(self.alphas, dtype=np.float64).reshape(-1)
        weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if alphas.size == 0:
            raise ValueError("alpha profile must be nonempty")
        if alphas.shape != weights.shape:
            raise ValueError("alphas and weights must have equal length")
        if (alphas < 0).any() or (alphas > 0.5).any():
            raise ValueError("alphas must lie in [0, 0.5]")
        if (weights <= 0).any():
            raise ValueError("weights must be positive")
        if abs(weights.sum() - 1.0) > _WEIGHT_SUM_ATOL:
            raise ValueError(f"weights must sum to 1 within {_WEIGHT_SUM_ATOL:g}")
        object.__setattr__(self, "alphas", _readonly(alphas))
        object.__setattr__(self, "weights", _readonly(weights))

    @classmethod
    def uniform(cls, alphas) -> "AlphaProfile":
        alphas = np.asarray(alphas, dtype=np.float64).reshape(-1)
        n = alphas.size
        if n == 0:
            raise ValueError("alpha profile must be nonempty")
        return cls(alphas, np.full(n, 1.0 / n))

    @classmethod
    def from_pairs(cls, pairs) -> "AlphaProfile":
        alphas = [a for a, _ in pairs]
        weights = [w for _, w in pairs]
        return cls(np.asarray(alphas), np.asarray(weights))

    @property
    def n(self) -> int:
        return self.alphas.shape[0]


@dataclass(frozen=True)
class EqualReputations:
    """Market regime: m providers with equal reputations."""

    m: int

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 2:
            raise ValueError(f"m must be an integer >= 2, got {self.m!r}")


@dataclass(frozen=True)
class TwoProviders:
    """Market regime: two providers with reputations (1 - w_min, w_min)."""

    w_min: float

    def __post_init__(self):
        if not 0.0 < self.w_min <= 0.5:
            raise ValueError(f"w_min must lie in (0, 0.5], got {self.w_min}")


Regime = Union[EqualReputations, TwoProviders]


def per_rep_bayes_risk(posterior_y1):
    """Irreducible error min(p, 1-p) of a label posterior; scalar or array."""
    p = np.asarray(posterior_y1, dtype=np.float64)
    if (p < 0).any() or (p > 1).any():
        raise ValueError("posterior probabilities must lie in [0, 1]")
    out = np.minimum(p, 1.0 - p)
    return float(out) if np.isscalar(posterior_y1) or out.ndim == 0 else out


def bayes_risk(profile: AlphaProfile) -> float:
    """Minimum achievable single-predictor risk: the weighted mean alpha."""
    return float(profile.alphas @ profile.weights)


def _check_not_degenerate(profile: AlphaProfile, threshold: float, what: str):
    gaps = np.abs(profile.alphas - threshold)
    bad = np.flatnonzero(gaps <= DEGENERACY_TOL)
    if bad.size:
        i = int(bad[0])
        raise DegenerateInstanceError(
            f"entry {i} has alpha = {profile.alphas[i]!r} within {DEGENERACY_TOL:g} "
            f"of {what} = {threshold!r}; multiple equilibria with different losses exist"
        )


def equal_reputation_social_loss(profile: AlphaProfile, m: int) -> float:
    """Equilibrium social loss for m equal-reputation providers.

    Each representation contributes alpha below the 1/m threshold and zero
    above it. Alphas within ``DEGENERACY_TOL`` of 1/m are refused.
    """
    if not isinstance(m, (int, np.integer)) or m < 2:
        raise ValueError(f"m must be an integer >= 2, got {m!r}")
    threshold = 1.0 / m
    _check_not_degenerate(profile, threshold, "1/m")
    contributions = profile.alphas * (profile.alphas < threshold)
    return float(contributions @ profile.weights)


def two_provider_social_loss(profile: AlphaProfile, w_min: float) -> float:
    """Equilibrium social loss for two providers with reputations (1-w_min, w_min).

    Below w_min a representation contributes alpha (both providers play the
    majority label); above it the unique mixed equilibrium contributes
    ``(alpha - w_min)(w_max - alpha) / (1 - 2 w_min)^2``. With w_min = 0.5 the
    upper branch is vacuous and the loss equals the Bayes risk.
    """
    if not 0.0 < w_min <= 0.5:
        raise ValueError(f"w_min must lie in (0, 0.5], got {w_min}")
    _check_not_degenerate(profile, w_min, "w_min")
    a = profile.alphas
    above = a > w_min
    contributions = np.where(above, 0.0, a)
    if above.any():
        w_max = 1.0 - w_min
        denom = (1.0 - 2.0 * w_min) ** 2
        mixed = (a[above] - w_min) * (w_max - a[above]) / denom
        contributions = contributions.copy()
        contributions[above] = mixed
    return float(contributions @ profile.weights)


def equilibrium_social_loss(profile: AlphaProfile, regime: Regime) -> float:
    """Closed-form equilibrium social loss under either market regime."""
    if isinstance(regime, EqualReputations):
        return equal_reputation_social_loss(profile, regime.m)
    if isinstance(regime, TwoProviders):
        return two_provider_social_loss(profile, regime.w_min)
    raise ValueError(f"unknown regime: {regime!r}")


def _logit(p: float) -> float:
    return math.log(p) - math.log1p(-p)


def _gaussian_log_odds(X: np.ndarray, spec: GaussianMixtureSpec) -> np.ndarray:
    # log P[y=1|x] - log P[y=0|x] = logit(prior) + 2 <x, mu> / sigma^2
    return _logit(spec.prior_y1) + 2.0 * (X @ spec.mu) / spec.sigma**2


def gaussian_posterior_alpha(x, spec: GaussianMixtureSpec) -> float:
    """Exact per-representation Bayes risk under the two-class Gaussian mixture."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.shape != spec.mu.shape:
        raise ValueError(f"x has shape {x.shape}, class mean has shape {spec.mu.shape}")
    log_odds = _gaussian_log_odds(x[None, :], spec)[0]
    return float(sigmoid(np.asarray([-abs(log_odds)]))[0])


def _nested_log_odds(X: np.ndarray, spec: NestedFeaturesSpec) -> np.ndarray:
    # Posterior odds marginalize over the four equal-prior subpopulations:
    # P[y=1|x] proportional to sum_i N(x; +mu_i, sigma^2 I).
    if X.shape[1] == 0:
        return np.zeros(X.shape[0])
    means = np.stack([subpopulation_mean(i)[: spec.dim] for i in range(1, BASE_DIM + 1)])
    T = (X @ means.T) / spec.sigma**2
    C = (means**2).sum(axis=1) / (2.0 * spec.sigma**2)
    log_p1 = _logsumexp_rows(T - C)
    log_p0 = _logsumexp_rows(-T - C)
    return log_p1 - log_p0


def _logsumexp_rows(A: np.ndarray) -> np.ndarray:
    hi = A.max(axis=1)
    return hi + np.log(np.exp(A - hi[:, None]).sum(axis=1))


def nested_posterior_alpha(x, spec: NestedFeaturesSpec) -> float:
    """Exact per-representation Bayes risk under the nested-features mixture."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != spec.dim:
        raise ValueError(f"x has dimension {x.shape[0]}, spec.dim = {spec.dim}")
    log_odds = _nested_log_odds(x[None, :], spec)[0]
    return float(sigmoid(np.asarray([-abs(log_odds)]))[0])


def sample_alpha_profile(spec: SettingSpec, n_samples: int, seed: int) -> AlphaProfile:
    """Monte-Carlo alpha profile: sample representations, compute exact posteriors.

    Deterministic given the seed; the label-noise spec needs no sampling and
    returns ``n_samples`` identical entries.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if isinstance(spec, LabelNoiseSpec):
        return AlphaProfile.uniform(np.full(n_samples, spec.alpha))
    if isinstance(spec, GaussianMixtureSpec):
        gen = make_stream(seed, "alpha/gaussian-mixture")
        y = (gen.random(n_samples) < spec.prior_y1).astype(np.float64)
        z = normals(gen, (n_samples, spec.dim))
        X = (2.0 * y - 1.0)[:, None] * spec.mu + spec.sigma * z
        alphas = sigmoid(-np.abs(_gaussian_log_odds(X, spec)))
        return AlphaProfile.uniform(alphas)
    if isinstance(spec, NestedFeaturesSpec):
        gen = make_stream(seed, "alpha/nested-features")
        subpop = np.minimum((gen.random(n_samples) * BASE_DIM).astype(np.intp), BASE_DIM - 1) + 1
        y = (gen.random(n_samples) < 0.5).astype(np.float64)
        z = normals(gen, (n_samples, BASE_DIM))
        means = np.stack([subpopulation_mean(i) for i in range(1, BASE_DIM + 1)])
        X = ((2.0 * y - 1.0)[:, None] * means[subpop - 1] + spec.sigma * z)[:, : spec.dim]
        alphas = sigmoid(-np.abs(_nested_log_odds(X, spec)))
        return AlphaProfile.uniform(alphas)
    raise ValueError(f"unknown population spec: {spec!r}")


@dataclass(frozen=True)
class CurvePoint:
    """One grid point of a theory curve; ``error`` flags degenerate instances."""

    axis_value: float
    bayes_risk: float
    social_loss: Optional[float]
    error: Optional[str] = None


def theory_curve(
    axis: str,
    grid,
    regime: Regime,
    n_samples: int = 100_000,
    seed: int = 0,
    *,
    mixture: Optional[GaussianMixtureSpec] = None,
    nested_sigma: float = 1.0,
) -> List[CurvePoint]:
    """Closed-form (bayes risk, equilibrium social loss) along a sweep axis.

    ``axis`` selects the population family and swept parameter:
    ``"alpha"`` (label-noise level), ``"noise"`` (mixture sigma) or
    ``"dimension"`` (kept nested-features coordinates). Grid point k samples
    with seed ``seed + k``. Degenerate points are recorded, not fatal.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("grid must be nonempty")
    if mixture is None:
        mixture = GaussianMixtureSpec()
    points = []
    for k, value in enumerate(grid):
        if axis == "alpha":
            profile = AlphaProfile(np.asarray([float(value)]), np.asarray([1.0]))
        elif axis == "noise":
            spec = replace(mixture, sigma=float(value))
            profile = sample_alpha_profile(spec, n_samples, seed + k)
        elif axis == "dimension":
            spec = NestedFeaturesSpec(sigma=nested_sigma, dim=int(value))
            profile = sample_alpha_profile(spec, n_samples, seed + k)
        else:
            raise ValueError(f"unknown axis {axis!r}; expected alpha, noise or dimension")
        risk = bayes_risk(profile)
        try:
            loss = equilibrium_social_loss(profile, regime)
            points.append(CurvePoint(float(value), risk, loss))
        except DegenerateInstanceError as exc:
            points.append(CurvePoint(float(value), risk, None, error=str(exc)))
    return points
