"""Payoff machinery: losses, user choice probabilities, utilities, social loss.

User choice follows a weighted logit: provider j is picked with probability
proportional to ``reputation_j * exp(-loss_j / c)``. In the noiseless limit
(c = 0) users pick a minimum-loss provider, breaking ties proportionally to
reputations; with equal reputations ties are broken uniformly.

All functions are pure; nothing here mutates its inputs.
"""

from __future__ import annotations

import numpy as np

from .errors import ZeroNoiseError
from .population import MarketConfig, Population, ProviderStrategy

# Losses are compared for ties after rounding to this many decimal digits,
# giving exact-tie semantics on floating point.
TIE_DECIMALS = 12


def point_loss(prediction: float, y: int) -> float:
    """Absolute loss |y - prediction| of a single prediction in [0, 1]."""
    if not 0.0 <= prediction <= 1.0:
        raise ValueError(f"prediction must lie in [0, 1], got {prediction}")
    if y not in (0, 1):
        raise ValueError(f"label must be 0 or 1, got {y}")
    return abs(y - prediction)


def choice_probabilities(losses, config: MarketConfig) -> np.ndarray:
    """Weighted-logit choice distribution over providers for one user.

    Requires c > 0; the noiseless limit must go through
    :func:`noiseless_choice_probabilities` instead.
    """
    losses = np.asarray(losses, dtype=np.float64)
    if losses.shape != (config.m,):
        raise ValueError(f"expected {config.m} losses, got shape {losses.shape}")
    if config.c == 0:
        raise ZeroNoiseError(
            "c = 0 has tie-breaking semantics; use noiseless_choice_probabilities"
        )
    scores = config.reputations * np.exp(-(losses - losses.min()) / config.c)
    return scores / scores.sum()


def noiseless_choice_probabilities(losses, reputations) -> np.ndarray:
    """Noiseless-limit choice: mass on minimum-loss providers, split by reputation.

    Ties are detected after rounding losses to ``TIE_DECIMALS`` digits.
    """
    losses = np.asarray(losses, dtype=np.float64)
    reputations = np.asarray(reputations, dtype=np.float64)
    if losses.shape != reputations.shape or losses.ndim != 1:
        raise ValueError(
            f"losses and reputations must be 1-d of equal length, got {losses.shape} and {reputations.shape}"
        )
    rounded = np.round(losses, TIE_DECIMALS)
    winners = rounded == rounded.min()
    mass = np.where(winners, reputations, 0.0)
    return mass / mass.sum()


def loss_matrix(strategies, population: Population) -> np.ndarray:
    """Per-provider per-point losses, shape (m, n)."""
    y = population.y.astype(np.float64)
    return np.stack([np.abs(y - s.predictions(population)) for s in strategies])


def choice_matrix(losses: np.ndarray, config: MarketConfig) -> np.ndarray:
    """Columnwise choice distributions for a loss matrix of shape (m, n)."""
    if losses.shape[0] != config.m:
        raise ValueError(f"loss matrix has {losses.shape[0]} rows, config.m = {config.m}")
    w = config.reputations[:, None]
    if config.c > 0:
        scores = w * np.exp(-(losses - losses.min(axis=0)) / config.c)
    else:
        rounded = np.round(losses, TIE_DECIMALS)
        scores = w * (rounded == rounded.min(axis=0))
    return scores / scores.sum(axis=0)


def _validate_market(strategies, population: Population, config: MarketConfig):
    if len(strategies) != config.m:
        raise ValueError(f"expected {config.m} strategies, got {len(strategies)}")


def provider_utilities(strategies, population: Population, config: MarketConfig) -> np.ndarray:
    """Expected market share of each provider; always sums to one."""
    _validate_market(strategies, population, config)
    probs = choice_matrix(loss_matrix(strategies, population), config)
    return probs @ population.weights / population.total_weight


def social_loss(strategies, population: Population, config: MarketConfig) -> float:
    """Population-average loss of the provider each user actually selects."""
    _validate_market(strategies, population, config)
    losses = loss_matrix(strategies, population)
    probs = choice_matrix(losses, config)
    per_point = (probs * losses).sum(axis=0)
    return float(per_point @ population.weights / population.total_weight)


def strategy_risk(strategy: ProviderStrategy, population: Population) -> float:
    """Expected loss of a single strategy over the population."""
    y = population.y.astype(np.float64)
    losses = np.abs(y - strategy.predictions(population))
    return float(losses @ population.weights / population.total_weight)
