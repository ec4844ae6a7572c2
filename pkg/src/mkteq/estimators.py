"""Scikit-learn style estimators wrapping the data-driven solvers.

``LinearMarketDynamics`` fits a whole market of competing linear predictors
to a dataset via best-response dynamics; ``BayesOptimalLinear`` fits the
single-provider risk minimizer. Both follow the sklearn contract
(constructor stores hyperparameters verbatim, ``fit`` returns self, fitted
attributes carry trailing underscores), so they compose with pipelines,
``clone`` and parameter search.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .dynamics import DynamicsConfig, fit_bayes_optimal, run_dynamics
from .market import provider_utilities, social_loss
from .validation import as_population


class LinearMarketDynamics(BaseEstimator):
    """Equilibrium market of competing linear-sigmoid predictors.

    Parameters mirror :class:`mkteq.dynamics.DynamicsConfig`. After ``fit``:

    ``strategies_``      list of fitted :class:`LinearStrategy`
    ``coef_``            (n_providers, n_features) weight matrix
    ``intercept_``       (n_providers,) biases
    ``utilities_``       per-provider market shares at the outcome
    ``social_loss_``     population loss of the chosen providers
    ``converged_``       whether the stopping rule fired
    ``n_stages_``        stages actually run
    ``trace_``           full per-turn dynamics trace
    """

    def __init__(
        self,
        n_providers=2,
        choice_noise=0.3,
        tau=0.1,
        init_sigma=0.1,
        reinit_threshold=0.3,
        inner_iterations=5000,
        learning_rate=0.1,
        stop_epsilon=0.01,
        max_stages=200,
        seed=0,
        reputations=None,
    ):
        self.n_providers = n_providers
        self.choice_noise = choice_noise
        self.tau = tau
        self.init_sigma = init_sigma
        self.reinit_threshold = reinit_threshold
        self.inner_iterations = inner_iterations
        self.learning_rate = learning_rate
        self.stop_epsilon = stop_epsilon
        self.max_stages = max_stages
        self.seed = seed
        self.reputations = reputations

    def _config(self) -> DynamicsConfig:
        return DynamicsConfig(
            m=self.n_providers,
            choice_noise=self.choice_noise,
            tau=self.tau,
            init_sigma=self.init_sigma,
            reinit_threshold=self.reinit_threshold,
            inner_iterations=self.inner_iterations,
            learning_rate=self.learning_rate,
            stop_epsilon=self.stop_epsilon,
            max_stages=self.max_stages,
            seed=self.seed,
            reputations=self.reputations,
        )

    def fit(self, X, y, sample_weight=None):
        population = as_population(X, y, sample_weight)
        strategies, result, trace = run_dynamics(population, self._config())
        self.strategies_ = strategies
        self.coef_ = np.stack([s.w for s in strategies])
        self.intercept_ = np.asarray([s.b for s in strategies])
        self.utilities_ = result.utilities
        self.social_loss_ = result.social_loss
        self.converged_ = result.converged
        self.n_stages_ = result.stages_run
        self.trace_ = trace
        return self

    def predict_proba(self, X):
        """Per-provider soft predictions, shape (n_samples, n_providers)."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        return np.column_stack([s.predict_values(X) for s in self.strategies_])

    def predict(self, X):
        """Per-provider hard labels, shape (n_samples, n_providers)."""
        return (self.predict_proba(X) >= 0.5).astype(np.uint8)

    def market_utilities(self, X, y, sample_weight=None):
        """Market shares the fitted providers would win on (X, y)."""
        population = as_population(X, y, sample_weight)
        return provider_utilities(self.strategies_, population, self._config().market_config())

    def market_social_loss(self, X, y, sample_weight=None) -> float:
        """Social loss the fitted market induces on (X, y)."""
        population = as_population(X, y, sample_weight)
        return social_loss(self.strategies_, population, self._config().market_config())


class BayesOptimalLinear(BaseEstimator, ClassifierMixin):
    """Single linear-sigmoid predictor fit to minimize expected loss.

    After ``fit``: ``coef_``, ``intercept_``, ``strategy_`` and ``risk_``
    (the achieved expected loss, an estimate of the Bayes risk when the
    model family is expressive enough).
    """

    def __init__(self, iterations=10_000, learning_rate=1.0, tau=0.1, init_sigma=0.1, seed=0):
        self.iterations = iterations
        self.learning_rate = learning_rate
        self.tau = tau
        self.init_sigma = init_sigma
        self.seed = seed

    def fit(self, X, y, sample_weight=None):
        population = as_population(X, y, sample_weight)
        strategy, risk = fit_bayes_optimal(
            population,
            iterations=self.iterations,
            learning_rate=self.learning_rate,
            seed=self.seed,
            tau=self.tau,
            init_sigma=self.init_sigma,
        )
        self.strategy_ = strategy
        self.coef_ = strategy.w.copy()
        self.intercept_ = strategy.b
        self.risk_ = risk
        self.classes_ = np.asarray([0, 1])
        return self

    def predict_proba(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        p1 = self.strategy_.predict_values(X)
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X):
        return (self.predict_proba(X)[:, 1] >= 0.5).astype(np.uint8)
