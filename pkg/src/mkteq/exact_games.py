"""Exact equilibrium analysis of per-representation two-action games.

With the full function class and noiseless users, the population game
factorizes into independent games, one per distinct representation: each
provider picks one of the two labels, users with the majority label (mass
1 - alpha) and the minority label (mass alpha) then choose minimum-loss
providers with reputation-proportional tie-breaking. This module enumerates
pure equilibria by brute force, solves the two-provider mixed equilibrium
from the indifference equations, and aggregates per-representation solutions
back into a population-level social loss — the oracle layer against which
the closed-form module is validated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .closed_form import AlphaProfile, DEGENERACY_TOL, EqualReputations, Regime, TwoProviders
from .errors import CapacityError, DegenerateInstanceError
from .market import noiseless_choice_probabilities
from .population import _readonly

# Brute-force enumeration visits 2^m profiles.
MAX_ENUM_PROVIDERS = 20

# A unilateral deviation must improve payoff by more than this to refute an
# equilibrium; payoffs are simple rationals of the inputs at desk scale.
BEST_RESPONSE_TOL = 1e-12


@dataclass(frozen=True)
class PerRepGame:
    """The two-action game played at a single representation.

    ``alpha`` is the per-representation Bayes risk, ``bayes_label`` the
    majority label, and users split (1 - alpha) / alpha between the majority
    and minority labels.
    """

    alpha: float
    m: int
    reputations: np.ndarray = None
    bayes_label: int = 1

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 0.5:
            raise ValueError(f"alpha must lie in [0, 0.5], got {self.alpha}")
        if not isinstance(self.m, (int, np.integer)) or self.m < 2:
            raise ValueError(f"m must be an integer >= 2, got {self.m!r}")
        if self.bayes_label not in (0, 1):
            raise ValueError(f"bayes_label must be 0 or 1, got {self.bayes_label}")
        reps = self.reputations
        if reps is None:
            reps = np.full(self.m, 1.0 / self.m)
        else:
            reps = np.asarray(reps, dtype=np.float64)
            if reps.shape != (self.m,):
                raise ValueError(f"reputations must have shape ({self.m},), got {reps.shape}")
            if (reps <= 0).any():
                raise ValueError("reputations must be positive")
            if abs(reps.sum() - 1.0) > 1e-12:
                raise ValueError("reputations must sum to 1 within 1e-12")
        object.__setattr__(self, "reputations", _readonly(reps))
        object.__setattr__(self, "m", int(self.m))


@dataclass(frozen=True)
class PureProfile:
    """One hard label per provider for the single representation."""

    labels: Tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(v) for v in self.labels)
        if any(v not in (0, 1) for v in labels):
            raise ValueError("labels must be binary (0/1)")
        object.__setattr__(self, "labels", labels)

    def count_on(self, label: int) -> int:
        return sum(1 for v in self.labels if v == label)


@dataclass(frozen=True)
class MixedProfile:
    """Two-provider mixed strategies: probability each plays the majority label."""

    p1: float
    p2: float

    def __post_init__(self):
        for name, p in (("p1", self.p1), ("p2", self.p2)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")


def game_payoffs(game: PerRepGame, profile: PureProfile) -> np.ndarray:
    """Expected market share of each provider at a pure label profile.

    Users carrying the majority label (mass 1 - alpha) and the minority
    label (mass alpha) each pick among the providers predicting their label,
    tie-broken proportionally to reputation; entries sum to one.
    """
    labels = np.asarray(profile.labels)
    if labels.shape != (game.m,):
        raise ValueError(f"profile has {labels.shape[0]} labels, game.m = {game.m}")
    shares = np.zeros(game.m)
    for label, mass in ((game.bayes_label, 1.0 - game.alpha), (1 - game.bayes_label, game.alpha)):
        losses = (labels != label).astype(np.float64)
        shares += mass * noiseless_choice_probabilities(losses, game.reputations)
    return shares


def pure_profile_social_loss(game: PerRepGame, profile: PureProfile) -> float:
    """Realized user loss at a pure profile: a label group loses only when
    no provider predicts it."""
    majority_covered = game.bayes_label in profile.labels
    minority_covered = (1 - game.bayes_label) in profile.labels
    return (1.0 - game.alpha) * (not majority_covered) + game.alpha * (not minority_covered)


def enumerate_pure_equilibria(game: PerRepGame) -> List[PureProfile]:
    """All pure profiles where no provider gains from a unilateral label flip.

    Brute force over the 2^m profiles, in lexicographic label order.
    """
    if game.m > MAX_ENUM_PROVIDERS:
        raise CapacityError(
            f"enumeration supports at most {MAX_ENUM_PROVIDERS} providers, got {game.m}"
        )
    equilibria = []
    for labels in itertools.product((0, 1), repeat=game.m):
        profile = PureProfile(labels)
        payoffs = game_payoffs(game, profile)
        stable = True
        for j in range(game.m):
            flipped = list(labels)
            flipped[j] = 1 - flipped[j]
            deviation = game_payoffs(game, PureProfile(tuple(flipped)))[j]
            if deviation > payoffs[j] + BEST_RESPONSE_TOL:
                stable = False
                break
        if stable:
            equilibria.append(profile)
    return equilibria


def solve_mixed_equilibrium(game: PerRepGame) -> MixedProfile:
    """Equilibrium of the two-provider game, mixed where no pure one exists.

    For alpha below the smaller reputation both providers play the majority
    label. Above it, the indifference equations pin down each provider's
    majority-label probability as ``(w_opponent - (1 - alpha)) / (2 w_opponent - 1)``,
    and the two probabilities sum to one.
    """
    if game.m != 2:
        raise ValueError(f"mixed solving is defined for m = 2, got m = {game.m}")
    w_min = float(game.reputations.min())
    if abs(game.alpha - w_min) <= DEGENERACY_TOL:
        raise DegenerateInstanceError(
            f"alpha = {game.alpha!r} within {DEGENERACY_TOL:g} of w_min = {w_min!r}; "
            "multiple equilibria exist"
        )
    if game.alpha < w_min:
        return MixedProfile(1.0, 1.0)
    w1, w2 = float(game.reputations[0]), float(game.reputations[1])
    p1 = (w2 - (1.0 - game.alpha)) / (2.0 * w2 - 1.0)
    p2 = (w1 - (1.0 - game.alpha)) / (2.0 * w1 - 1.0)
    return MixedProfile(p1, p2)


def mixed_profile_social_loss(game: PerRepGame, profile: MixedProfile) -> float:
    """Expected user loss when both providers independently randomize labels.

    Users lose alpha when both play the majority label and 1 - alpha when
    both play the minority label; split predictions serve everyone.
    """
    both_majority = profile.p1 * profile.p2
    both_minority = (1.0 - profile.p1) * (1.0 - profile.p2)
    return game.alpha * both_majority + (1.0 - game.alpha) * both_minority


@dataclass(frozen=True)
class RepEquilibrium:
    """Solved equilibrium of one profile entry."""

    alpha: float
    weight: float
    social_loss: float
    pure_equilibria: Optional[Tuple[PureProfile, ...]] = None
    mixed: Optional[MixedProfile] = None


def population_equilibrium(profile: AlphaProfile, regime: Regime) -> Tuple[float, List[RepEquilibrium]]:
    """Solve every per-representation game and aggregate the social loss.

    Equal-reputation entries are solved by brute-force enumeration (all pure
    equilibria of an entry must agree on the social loss); two-provider
    entries by the mixed solver. Returns the weight-averaged social loss and
    the per-entry records. Degenerate entries raise, naming themselves.
    """
    records = []
    total = 0.0
    for i in range(profile.n):
        alpha = float(profile.alphas[i])
        weight = float(profile.weights[i])
        if isinstance(regime, EqualReputations):
            game = PerRepGame(alpha=alpha, m=regime.m)
            if abs(alpha - 1.0 / regime.m) <= DEGENERACY_TOL:
                raise DegenerateInstanceError(
                    f"entry {i} has alpha = {alpha!r} within {DEGENERACY_TOL:g} of 1/m"
                )
            equilibria = enumerate_pure_equilibria(game)
            if not equilibria:
                raise RuntimeError(
                    f"entry {i}: no pure equilibrium found for alpha = {alpha!r}, m = {regime.m}"
                )
            losses = {pure_profile_social_loss(game, eq) for eq in equilibria}
            if len({round(v, 12) for v in losses}) != 1:
                raise RuntimeError(
                    f"entry {i}: pure equilibria disagree on social loss: {sorted(losses)}"
                )
            loss = losses.pop()
            records.append(RepEquilibrium(alpha, weight, loss, pure_equilibria=tuple(equilibria)))
        elif isinstance(regime, TwoProviders):
            game = PerRepGame(
                alpha=alpha, m=2, reputations=np.asarray([1.0 - regime.w_min, regime.w_min])
            )
            try:
                mixed = solve_mixed_equilibrium(game)
            except DegenerateInstanceError as exc:
                raise DegenerateInstanceError(f"entry {i}: {exc}") from exc
            loss = mixed_profile_social_loss(game, mixed)
            records.append(RepEquilibrium(alpha, weight, loss, mixed=mixed))
        else:
            raise ValueError(f"unsupported regime for exact solving: {regime!r}")
        total += weight * records[-1].social_loss
    return total, records
