"""Market equilibria of competing classifiers.

Computes how the population-level loss of a marketplace of competing
predictors behaves at equilibrium — via closed-form formulas over
per-representation Bayes risks, exact solving of the induced
per-representation games, and gradient-based best-response dynamics over
linear predictors — and exposes the sweep tooling showing that equilibrium
social loss need not improve monotonically with representation quality.
"""

from .closed_form import (
    AlphaProfile,
    CurvePoint,
    EqualReputations,
    TwoProviders,
    bayes_risk,
    equal_reputation_social_loss,
    equilibrium_social_loss,
    gaussian_posterior_alpha,
    nested_posterior_alpha,
    per_rep_bayes_risk,
    sample_alpha_profile,
    theory_curve,
    two_provider_social_loss,
)
from .dynamics import (
    DynamicsConfig,
    DynamicsTrace,
    EquilibriumResult,
    StageRecord,
    best_respond,
    fit_bayes_optimal,
    init_linear,
    run_dynamics,
    scheduled_learning_rate,
    utility_gradient,
)
from .errors import (
    CapacityError,
    DegenerateInstanceError,
    ReprFormatError,
    UnsupportedReprVersion,
    ZeroNoiseError,
)
from .estimators import BayesOptimalLinear, LinearMarketDynamics
from .exact_games import (
    MixedProfile,
    PerRepGame,
    PureProfile,
    enumerate_pure_equilibria,
    game_payoffs,
    mixed_profile_social_loss,
    population_equilibrium,
    pure_profile_social_loss,
    solve_mixed_equilibrium,
)
from .market import (
    choice_probabilities,
    noiseless_choice_probabilities,
    point_loss,
    provider_utilities,
    social_loss,
    strategy_risk,
)
from .population import (
    LabeledPoint,
    LinearStrategy,
    MarketConfig,
    Population,
    ProviderStrategy,
    TabularStrategy,
)
from .repr_io import read_csv_repr, read_repr, write_repr
from .synth import (
    BASE_DIM,
    GaussianMixtureSpec,
    LabelNoiseSpec,
    NestedFeaturesSpec,
    embed_linear,
    gaussian_mixture_population,
    generate,
    label_noise_population,
    nested_features_population,
    subpopulation_mean,
)
from .validation import as_population, check_features_labels

__version__ = "0.1.0"

__all__ = [
    "AlphaProfile",
    "BASE_DIM",
    "BayesOptimalLinear",
    "CapacityError",
    "CurvePoint",
    "DegenerateInstanceError",
    "DynamicsConfig",
    "DynamicsTrace",
    "EqualReputations",
    "EquilibriumResult",
    "GaussianMixtureSpec",
    "LabelNoiseSpec",
    "LabeledPoint",
    "LinearMarketDynamics",
    "LinearStrategy",
    "MarketConfig",
    "MixedProfile",
    "NestedFeaturesSpec",
    "PerRepGame",
    "Population",
    "ProviderStrategy",
    "PureProfile",
    "ReprFormatError",
    "StageRecord",
    "TabularStrategy",
    "TwoProviders",
    "UnsupportedReprVersion",
    "ZeroNoiseError",
    "as_population",
    "bayes_risk",
    "best_respond",
    "check_features_labels",
    "choice_probabilities",
    "embed_linear",
    "enumerate_pure_equilibria",
    "equal_reputation_social_loss",
    "equilibrium_social_loss",
    "fit_bayes_optimal",
    "game_payoffs",
    "gaussian_mixture_population",
    "gaussian_posterior_alpha",
    "generate",
    "init_linear",
    "label_noise_population",
    "mixed_profile_social_loss",
    "nested_features_population",
    "nested_posterior_alpha",
    "noiseless_choice_probabilities",
    "per_rep_bayes_risk",
    "point_loss",
    "population_equilibrium",
    "provider_utilities",
    "pure_profile_social_loss",
    "read_csv_repr",
    "read_repr",
    "run_dynamics",
    "sample_alpha_profile",
    "scheduled_learning_rate",
    "social_loss",
    "solve_mixed_equilibrium",
    "strategy_risk",
    "subpopulation_mean",
    "theory_curve",
    "two_provider_social_loss",
    "utility_gradient",
    "write_repr",
]
