"""Staged approximate best-response dynamics over linear-sigmoid predictors.

Providers take turns (in index order, one turn each per stage) running
full-batch gradient ascent on their own market share against the others'
frozen predictors. A provider whose risk exceeds a threshold is
re-initialized before its turn. The dynamics stop when no provider's
utility moved by more than ``stop_epsilon`` between consecutive stage ends,
or after ``max_stages`` stages (reported, never an error).

Also provides the single-provider Bayes-risk minimizer used to estimate
representation quality, and the risk-indexed learning-rate schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple, Union

import numpy as np

from .errors import ZeroNoiseError
from .market import provider_utilities, social_loss, strategy_risk, loss_matrix
from .population import LinearStrategy, MarketConfig, Population, sigmoid
from .rng import make_stream, normals

SCHEDULE_NAME = "schedule"


def scheduled_learning_rate(risk: float) -> float:
    """Step size keyed on the provider's current risk; larger when nearly fit."""
    if not 0.0 <= risk <= 1.0:
        raise ValueError(f"risk must lie in [0, 1], got {risk}")
    if risk >= 0.3:
        return 0.1
    if risk >= 0.2:
        return 0.5
    if risk >= 0.15:
        return 1.0
    if risk >= 0.1:
        return 2.0
    if risk >= 0.07:
        return 5.0
    return 10.0


@dataclass(frozen=True)
class DynamicsConfig:
    """Hyperparameters of the best-response dynamics.

    ``learning_rate`` is either a fixed step size or the string
    ``"schedule"`` for the risk-indexed schedule, re-evaluated at every
    inner iteration from the provider's current risk. ``reputations=None``
    means equal reputations.
    """

    m: int
    choice_noise: float = 0.3
    tau: float = 0.1
    init_sigma: float = 0.1
    reinit_threshold: float = 0.3
    inner_iterations: int = 5000
    learning_rate: Union[float, str] = 0.1
    stop_epsilon: float = 0.01
    max_stages: int = 200
    seed: int = 0
    reputations: Optional[np.ndarray] = None

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 2:
            raise ValueError(f"m must be an integer >= 2, got {self.m!r}")
        if not self.choice_noise > 0:
            raise ValueError("dynamics require smooth choice: choice_noise must be > 0")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.init_sigma < 0:
            raise ValueError(f"init_sigma must be nonnegative, got {self.init_sigma}")
        if self.inner_iterations < 0:
            raise ValueError("inner_iterations must be >= 0")
        if isinstance(self.learning_rate, str) and self.learning_rate != SCHEDULE_NAME:
            raise ValueError(f"learning_rate must be a float or {SCHEDULE_NAME!r}")
        if self.max_stages < 1:
            raise ValueError("max_stages must be >= 1")

    def market_config(self) -> MarketConfig:
        return MarketConfig(self.m, self.choice_noise, self.reputations)


@dataclass(frozen=True)
class StageRecord:
    """One provider turn: utilities around the turn, the risk that drove the
    reinitialization decision, and the full utility vector afterwards."""

    stage: int
    provider: int
    utility_before: float
    utility_after: float
    risk: float
    reinitialized: bool
    utilities_after: np.ndarray


@dataclass
class DynamicsTrace:
    records: List[StageRecord] = field(default_factory=list)
    converged: bool = False
    stages_run: int = 0


@dataclass(frozen=True)
class EquilibriumResult:
    """Outcome of a dynamics run at its final strategy profile."""

    utilities: np.ndarray
    social_loss: float
    converged: bool
    stages_run: int


def init_linear(dim: int, init_sigma: float, rng: np.random.Generator, tau: float = 1.0) -> LinearStrategy:
    """Fresh predictor with N(0, init_sigma^2) weights and bias.

    Zero-dimensional populations get a bias-only predictor. Draw order is
    weights first, then bias.
    """
    if dim < 0:
        raise ValueError("dim must be >= 0")
    w = init_sigma * normals(rng, dim)
    b = float(init_sigma * normals(rng, 1)[0])
    return LinearStrategy(w, b, tau)


def utility_gradient(
    j: int, strategies, population: Population, config: MarketConfig
) -> Tuple[np.ndarray, float]:
    """Exact gradient of provider j's market share in its (w, b) parameters.

    Composes the logit-choice derivative ``-p_j (1 - p_j) / c`` with the
    per-point loss derivative ``(1 - 2y) s (1 - s) / tau``. Requires c > 0.
    """
    if config.c == 0:
        raise ZeroNoiseError("utility is not smooth at c = 0; gradients need c > 0")
    strategy = strategies[j]
    if not isinstance(strategy, LinearStrategy):
        raise TypeError(f"provider {j} is not a linear strategy: {type(strategy).__name__}")
    losses = loss_matrix(strategies, population)
    scores = config.reputations[:, None] * np.exp(-(losses - losses.min(axis=0)) / config.c)
    p_j = scores[j] / scores.sum(axis=0)

    y = population.y.astype(np.float64)
    s = strategy.predictions(population)
    dl_dz = (1.0 - 2.0 * y) * s * (1.0 - s) / strategy.tau
    coef = (population.weights / population.total_weight) * (-p_j * (1.0 - p_j) / config.c) * dl_dz
    grad_w = population.X.T @ coef
    return grad_w, float(coef.sum())


class BestResponse(NamedTuple):
    strategy: LinearStrategy
    reinitialized: bool
    risk: float


def best_respond(
    j: int, strategies, population: Population, config: DynamicsConfig, rng: np.random.Generator
) -> BestResponse:
    """One provider turn: reinitialize if the risk exceeds the threshold,
    then ``inner_iterations`` steps of gradient ascent on market share.

    Returns the updated strategy together with the reinitialization flag and
    the risk that drove the decision. Opponent predictors are frozen for the
    whole turn.
    """
    market = config.market_config()
    current = strategies[j]
    risk_at_turn = strategy_risk(current, population)
    reinitialized = risk_at_turn > config.reinit_threshold
    if reinitialized:
        current = init_linear(population.dim, config.init_sigma, rng, config.tau)

    y = population.y.astype(np.float64)
    wgt = population.weights / population.total_weight
    X = population.X
    XT = np.ascontiguousarray(X.T)
    c = config.choice_noise
    rep_j = float(market.reputations[j])

    opponent_scores = np.zeros(population.n)
    for k, other in enumerate(strategies):
        if k == j:
            continue
        losses_k = np.abs(y - other.predictions(population))
        opponent_scores += float(market.reputations[k]) * np.exp(-losses_k / c)

    scheduled = config.learning_rate == SCHEDULE_NAME
    eta = None if scheduled else float(config.learning_rate)
    w = current.w.copy()
    b = current.b
    tau = config.tau
    sign = 1.0 - 2.0 * y
    for _ in range(config.inner_iterations):
        z = X @ w + b
        s = sigmoid(z / tau)
        loss = np.abs(y - s)
        e = rep_j * np.exp(-loss / c)
        p = e / (opponent_scores + e)
        coef = wgt * (-p * (1.0 - p) / c) * sign * s * (1.0 - s) / tau
        if scheduled:
            eta = scheduled_learning_rate(min(float(loss @ wgt), 1.0))
        w += eta * (XT @ coef)
        b += eta * float(coef.sum())
    return BestResponse(LinearStrategy(w, b, tau), reinitialized, risk_at_turn)


def run_dynamics(
    population: Population, config: DynamicsConfig
) -> Tuple[List[LinearStrategy], EquilibriumResult, DynamicsTrace]:
    """Run staged best-response dynamics to (approximate) equilibrium.

    Deterministic given the config seed: initialization and every
    reinitialization draw from one named stream in provider order.
    Non-convergence within ``max_stages`` is reported via the result, not
    raised.
    """
    market = config.market_config()
    rng = make_stream(config.seed, "dynamics")
    strategies = [
        init_linear(population.dim, config.init_sigma, rng, config.tau) for _ in range(config.m)
    ]
    trace = DynamicsTrace()
    utilities = provider_utilities(strategies, population, market)
    previous = utilities
    stages_run = 0
    converged = False
    for stage in range(1, config.max_stages + 1):
        for j in range(config.m):
            before = float(utilities[j])
            response = best_respond(j, strategies, population, config, rng)
            strategies[j] = response.strategy
            utilities = provider_utilities(strategies, population, market)
            trace.records.append(
                StageRecord(
                    stage=stage,
                    provider=j,
                    utility_before=before,
                    utility_after=float(utilities[j]),
                    risk=response.risk,
                    reinitialized=response.reinitialized,
                    utilities_after=utilities,
                )
            )
        stages_run = stage
        if np.abs(utilities - previous).max() <= config.stop_epsilon:
            converged = True
            break
        previous = utilities
    trace.converged = converged
    trace.stages_run = stages_run
    result = EquilibriumResult(
        utilities=utilities,
        social_loss=social_loss(strategies, population, market),
        converged=converged,
        stages_run=stages_run,
    )
    return strategies, result, trace


def fit_bayes_optimal(
    population: Population,
    iterations: int = 10_000,
    learning_rate: float = 1.0,
    seed: int = 0,
    tau: float = 0.1,
    init_sigma: float = 0.1,
) -> Tuple[LinearStrategy, float]:
    """Approximate the Bayes-optimal linear predictor by full-batch descent
    on the expected loss; returns the predictor and its final risk."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    rng = make_stream(seed, "bayes-fit")
    strategy = init_linear(population.dim, init_sigma, rng, tau)
    w = strategy.w.copy()
    b = strategy.b
    X = population.X
    XT = np.ascontiguousarray(X.T)
    y = population.y.astype(np.float64)
    wgt = population.weights / population.total_weight
    sign = 1.0 - 2.0 * y
    for _ in range(iterations):
        s = sigmoid((X @ w + b) / tau)
        coef = wgt * sign * s * (1.0 - s) / tau
        w -= learning_rate * (XT @ coef)
        b -= learning_rate * float(coef.sum())
    fitted = LinearStrategy(w, b, tau)
    return fitted, strategy_risk(fitted, population)
