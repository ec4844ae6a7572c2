"""Deterministic experiment sweeps behind the CLI.

Seed plumbing: trial (grid point g, trial t) under master seed S runs the
dynamics with seed ``S * 10**6 + g * 10**3 + t``; the dataset of grid point
g is generated once with seed ``S * 10**6 + g * 10**3`` (data generators and
dynamics consume different named streams, so the numeric overlap with trial
0 draws nothing in common). Grid/trial pairs may run on a thread pool; rows
are sorted before any output is written, so threading never changes bytes.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from .closed_form import (
    EqualReputations,
    Regime,
    TwoProviders,
    bayes_risk,
    sample_alpha_profile,
)
from .dynamics import DynamicsConfig, fit_bayes_optimal, run_dynamics
from .errors import DegenerateInstanceError
from .exact_games import (
    PerRepGame,
    enumerate_pure_equilibria,
    mixed_profile_social_loss,
    pure_profile_social_loss,
    solve_mixed_equilibrium,
)
from .population import Population
from .repr_io import read_repr
from .synth import (
    GaussianMixtureSpec,
    LabelNoiseSpec,
    NestedFeaturesSpec,
    gaussian_mixture_population,
    label_noise_population,
    nested_features_population,
)

AXES = ("alpha", "noise", "dimension", "repr")


def trial_seed(master_seed: int, grid_index: int, trial_index: int) -> int:
    """Documented per-trial seed: master * 10^6 + grid * 10^3 + trial."""
    return master_seed * 10**6 + grid_index * 10**3 + trial_index


def grid_seed(master_seed: int, grid_index: int) -> int:
    return trial_seed(master_seed, grid_index, 0)


@dataclass(frozen=True)
class SweepSource:
    """What population each grid point draws from."""

    axis: str
    grid: Sequence[float]
    n_points: int = 10_000
    mixture: GaussianMixtureSpec = GaussianMixtureSpec()
    nested_sigma: float = 1.0
    repr_path: Optional[str] = None

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if len(self.grid) == 0:
            raise ValueError("grid must be nonempty")
        if self.axis == "repr" and not self.repr_path:
            raise ValueError("repr axis requires a repr_path")

    def setting(self, grid_index: int):
        value = self.grid[grid_index]
        if self.axis == "alpha":
            return LabelNoiseSpec(float(value))
        if self.axis == "noise":
            return replace(self.mixture, sigma=float(value))
        if self.axis == "dimension":
            return NestedFeaturesSpec(sigma=self.nested_sigma, dim=int(value))
        return None

    def population(self, grid_index: int, master_seed: int) -> Population:
        seed = grid_seed(master_seed, grid_index)
        value = self.grid[grid_index]
        if self.axis == "alpha":
            return label_noise_population(float(value), self.n_points, seed)
        if self.axis == "noise":
            return gaussian_mixture_population(self.setting(grid_index), self.n_points, seed)
        if self.axis == "dimension":
            return nested_features_population(self.setting(grid_index), self.n_points, seed)
        return read_repr(self.repr_path)


@dataclass(frozen=True)
class DynamicsRow:
    grid_index: int
    axis_value: float
    trial: int
    seed: int
    social_loss: float
    bayes_risk_fit: float
    converged: bool
    stages: int
    mean_social_loss: float = math.nan
    two_se_social_loss: Optional[float] = None


def run_dynamics_sweep(
    source: SweepSource,
    dynamics: DynamicsConfig,
    trials: int,
    master_seed: int,
    threads: int = 1,
    bayes_iterations: int = 10_000,
    bayes_learning_rate: float = 1.0,
) -> List[DynamicsRow]:
    """Dynamics trials over every grid point, aggregated per grid point."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    populations = {
        g: source.population(g, master_seed) for g in range(len(source.grid))
    }

    def one(task):
        g, t = task
        seed = trial_seed(master_seed, g, t)
        population = populations[g]
        config = replace(dynamics, seed=seed)
        _, result, trace = run_dynamics(population, config)
        _, fitted_risk = fit_bayes_optimal(
            population,
            iterations=bayes_iterations,
            learning_rate=bayes_learning_rate,
            seed=seed,
            tau=dynamics.tau,
            init_sigma=dynamics.init_sigma,
        )
        return DynamicsRow(
            grid_index=g,
            axis_value=float(source.grid[g]),
            trial=t,
            seed=seed,
            social_loss=result.social_loss,
            bayes_risk_fit=fitted_risk,
            converged=result.converged,
            stages=result.stages_run,
        )

    tasks = [(g, t) for g in range(len(source.grid)) for t in range(trials)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, tasks))
    else:
        rows = [one(task) for task in tasks]
    rows.sort(key=lambda r: (r.grid_index, r.trial))

    out = []
    for g in range(len(source.grid)):
        group = [r for r in rows if r.grid_index == g]
        losses = np.asarray([r.social_loss for r in group])
        mean = float(losses.mean())
        two_se = (
            float(2.0 * losses.std(ddof=1) / math.sqrt(len(losses))) if len(losses) > 1 else None
        )
        out.extend(replace(r, mean_social_loss=mean, two_se_social_loss=two_se) for r in group)
    return out


@dataclass(frozen=True)
class ExactRow:
    grid_index: int
    alpha: float
    m: int
    w_min: Optional[float]
    n_pure_equilibria: int
    pure_majority_counts: str
    p1: Optional[float]
    p2: Optional[float]
    social_loss: Optional[float]
    degenerate: str = ""


def run_exact_sweep(alpha_grid, m: int, w_min: Optional[float] = None) -> List[ExactRow]:
    """Exact per-representation game analysis over an alpha grid.

    With ``w_min`` the game is the two-provider unequal-reputation one and
    the mixed equilibrium is reported; otherwise reputations are equal and
    the social loss is the (common) value across all pure equilibria.
    """
    rows = []
    for g, alpha in enumerate(alpha_grid):
        alpha = float(alpha)
        reputations = None
        if w_min is not None:
            if m != 2:
                raise ValueError("w_min applies to the two-provider game (m = 2)")
            reputations = np.asarray([1.0 - w_min, w_min])
        game = PerRepGame(alpha=alpha, m=m, reputations=reputations)
        equilibria = enumerate_pure_equilibria(game)
        counts = ";".join(
            str(eq.count_on(game.bayes_label)) for eq in equilibria
        )
        p1 = p2 = loss = None
        degenerate = ""
        if m == 2:
            try:
                mixed = solve_mixed_equilibrium(game)
                p1, p2 = mixed.p1, mixed.p2
                loss = mixed_profile_social_loss(game, mixed)
            except DegenerateInstanceError as exc:
                degenerate = str(exc)
        else:
            threshold = 1.0 / m
            if abs(alpha - threshold) <= 1e-9:
                degenerate = f"alpha = {alpha!r} sits on the 1/m threshold"
            elif equilibria:
                losses = {pure_profile_social_loss(game, eq) for eq in equilibria}
                loss = losses.pop()
        rows.append(
            ExactRow(
                grid_index=g,
                alpha=alpha,
                m=m,
                w_min=w_min,
                n_pure_equilibria=len(equilibria),
                pure_majority_counts=counts,
                p1=p1,
                p2=p2,
                social_loss=loss,
                degenerate=degenerate,
            )
        )
    return rows


@dataclass(frozen=True)
class BayesRow:
    grid_index: int
    axis_value: float
    analytic_bayes_risk: Optional[float]
    fitted_risk: float
    seed: int


def run_bayes_sweep(
    source: SweepSource,
    master_seed: int,
    n_samples: int = 100_000,
    iterations: int = 10_000,
    learning_rate: float = 1.0,
    tau: float = 0.1,
) -> List[BayesRow]:
    """Analytic Bayes risk (where the generator is known) next to the fitted risk."""
    rows = []
    for g in range(len(source.grid)):
        population = source.population(g, master_seed)
        setting = source.setting(g)
        analytic = None
        if isinstance(setting, LabelNoiseSpec):
            analytic = setting.alpha
        elif setting is not None:
            profile = sample_alpha_profile(setting, n_samples, master_seed + g)
            analytic = bayes_risk(profile)
        seed = grid_seed(master_seed, g)
        _, fitted = fit_bayes_optimal(
            population, iterations=iterations, learning_rate=learning_rate, seed=seed, tau=tau
        )
        rows.append(
            BayesRow(
                grid_index=g,
                axis_value=float(source.grid[g]),
                analytic_bayes_risk=analytic,
                fitted_risk=fitted,
                seed=seed,
            )
        )
    return rows


def regime_from(m: int, w_min: Optional[float]) -> Regime:
    return TwoProviders(w_min) if w_min is not None else EqualReputations(m)
