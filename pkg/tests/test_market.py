"""Loss, choice, utility and social-loss machinery."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mkteq import (
    LinearStrategy,
    MarketConfig,
    Population,
    TabularStrategy,
    ZeroNoiseError,
    choice_probabilities,
    noiseless_choice_probabilities,
    point_loss,
    provider_utilities,
    social_loss,
    strategy_risk,
)
from mkteq.market import choice_matrix, loss_matrix


def test_point_loss_values():
    assert point_loss(0.9, 1) == pytest.approx(0.1)
    assert point_loss(0.9, 0) == pytest.approx(0.9)
    assert point_loss(1.0, 1) == 0.0


def test_point_loss_domain():
    with pytest.raises(ValueError):
        point_loss(1.2, 1)
    with pytest.raises(ValueError):
        point_loss(-0.1, 0)
    with pytest.raises(ValueError):
        point_loss(0.5, 2)


def test_choice_equal_losses_split_evenly():
    cfg = MarketConfig(3, 0.3)
    p = choice_probabilities([0.5, 0.5, 0.5], cfg)
    np.testing.assert_allclose(p, [1 / 3] * 3, atol=1e-15)


def test_choice_best_provider_dominates():
    # Hand evaluation of the logit rule at losses (0, 1, 1), c = 0.3:
    # p_1 = 1 / (1 + 2 e^{-10/3}), p_2 = p_3 = e^{-10/3} / (1 + 2 e^{-10/3}).
    e = math.exp(-10.0 / 3.0)
    expected = np.asarray([1.0, e, e]) / (1.0 + 2.0 * e)
    cfg = MarketConfig(3, 0.3)
    p = choice_probabilities([0.0, 1.0, 1.0], cfg)
    np.testing.assert_allclose(p, expected, rtol=1e-12)
    assert p[0] == pytest.approx(0.9334, abs=5e-5)


def test_choice_reputations_split_equal_losses():
    cfg = MarketConfig(2, 0.3, reputations=[0.7, 0.3])
    p = choice_probabilities([0.0, 0.0], cfg)
    np.testing.assert_allclose(p, [0.7, 0.3], atol=1e-15)


def test_choice_zero_noise_is_signaled():
    with pytest.raises(ZeroNoiseError):
        choice_probabilities([0.1, 0.2], MarketConfig(2, 0.0))


def test_choice_length_mismatch():
    with pytest.raises(ValueError):
        choice_probabilities([0.1, 0.2, 0.3], MarketConfig(2, 0.3))


def test_noiseless_unique_minimizer():
    np.testing.assert_allclose(noiseless_choice_probabilities([0.0, 1.0], [0.5, 0.5]), [1.0, 0.0])


def test_noiseless_uniform_tie():
    np.testing.assert_allclose(noiseless_choice_probabilities([0.0, 0.0], [0.5, 0.5]), [0.5, 0.5])


def test_noiseless_reputation_proportional_tie():
    p = noiseless_choice_probabilities([0.2, 0.2, 0.9], [0.6, 0.2, 0.2])
    np.testing.assert_allclose(p, [0.75, 0.25, 0.0], atol=1e-15)


def test_noiseless_rounding_makes_near_ties_exact():
    p = noiseless_choice_probabilities([0.2, 0.2 + 1e-13], [0.5, 0.5])
    np.testing.assert_allclose(p, [0.5, 0.5])


def _single_point_population(y=1):
    return Population(np.zeros((1, 0)), np.asarray([y]))


def test_identical_strategies_share_market():
    pop = Population(np.asarray([[0.0], [1.0]]), np.asarray([0, 1]))
    s = LinearStrategy(np.asarray([1.0]), 0.0, tau=1.0)
    np.testing.assert_allclose(
        provider_utilities([s, s], pop, MarketConfig(2, 0.3)), [0.5, 0.5], atol=1e-15
    )
    np.testing.assert_allclose(
        provider_utilities([s, s, s], pop, MarketConfig(3, 0.3)), [1 / 3] * 3, atol=1e-15
    )


def test_tabular_winner_takes_single_point():
    pop = _single_point_population(y=1)
    right = TabularStrategy(np.asarray([1]))
    wrong = TabularStrategy(np.asarray([0]))
    u = provider_utilities([right, wrong], pop, MarketConfig(2, 0.0))
    np.testing.assert_allclose(u, [1.0, 0.0])
    assert social_loss([right, wrong], pop, MarketConfig(2, 0.0)) == 0.0


def test_identical_providers_social_loss_is_their_risk():
    pop = Population(np.asarray([[-0.4], [0.2], [1.5]]), np.asarray([0, 1, 1]))
    s = LinearStrategy(np.asarray([2.0]), -0.3, tau=0.5)
    risk = strategy_risk(s, pop)
    for c in (0.0, 0.3):
        assert social_loss([s, s], pop, MarketConfig(2, c)) == pytest.approx(risk, abs=1e-15)


def test_saturated_predictions_stay_strictly_inside_unit_interval():
    s = LinearStrategy(np.asarray([500.0]), 0.0, tau=0.1)
    X = np.asarray([[-10.0], [0.0], [10.0]])
    p = s.predict_values(X)
    assert ((p > 0.0) & (p < 1.0)).all()


def test_dimension_mismatch_raises():
    pop = Population(np.asarray([[0.0, 1.0]]), np.asarray([1]))
    s = LinearStrategy(np.asarray([1.0]), 0.0)
    with pytest.raises(ValueError):
        provider_utilities([s, s], pop, MarketConfig(2, 0.3))


@st.composite
def _loss_instances(draw):
    m = draw(st.integers(2, 6))
    losses = draw(
        st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=m, max_size=m)
    )
    raw = draw(st.lists(st.floats(0.05, 1.0), min_size=m, max_size=m))
    reps = np.asarray(raw)
    reps = reps / reps.sum()
    # exact renormalization so the config invariant holds
    reps[-1] = 1.0 - reps[:-1].sum()
    c = draw(st.sampled_from([1e-6, 0.05, 0.3, 1.0, 10.0]))
    return np.asarray(losses), reps, c


@given(_loss_instances())
@settings(max_examples=200, deadline=None)
def test_choice_is_a_distribution(instance):
    losses, reps, c = instance
    p = choice_probabilities(losses, MarketConfig(len(losses), c, reps))
    assert (p >= 0).all()
    assert abs(p.sum() - 1.0) <= 1e-12


@given(_loss_instances())
@settings(max_examples=200, deadline=None)
def test_noiseless_is_a_distribution(instance):
    losses, reps, _ = instance
    p = noiseless_choice_probabilities(losses, reps)
    assert (p >= 0).all()
    assert abs(p.sum() - 1.0) <= 1e-12
    rounded = np.round(losses, 12)
    assert p[rounded > rounded.min()].sum() == 0.0


def _random_market(rng, m=None, dim=None, c=0.3):
    m = m or rng.integers(2, 5)
    dim = dim if dim is not None else rng.integers(0, 4)
    n = int(rng.integers(3, 30))
    pop = Population(
        rng.normal(size=(n, dim)), rng.integers(0, 2, n), rng.random(n) + 0.1
    )
    strategies = [
        LinearStrategy(rng.normal(size=dim), float(rng.normal()), tau=0.7) for _ in range(m)
    ]
    return pop, strategies, MarketConfig(int(m), c)


def test_utilities_sum_to_one_and_permute():
    rng = np.random.default_rng(42)
    for _ in range(50):
        pop, strategies, cfg = _random_market(rng)
        u = provider_utilities(strategies, pop, cfg)
        assert abs(u.sum() - 1.0) <= 1e-12
        perm = rng.permutation(cfg.m)
        u_perm = provider_utilities([strategies[i] for i in perm], pop, cfg)
        np.testing.assert_allclose(u_perm, u[perm], atol=1e-12)


def test_small_noise_matches_noiseless_choice():
    rng = np.random.default_rng(7)
    for _ in range(100):
        m = int(rng.integers(2, 6))
        losses = np.round(rng.random(m), 3)
        reps = rng.random(m) + 0.1
        reps /= reps.sum()
        reps[-1] = 1.0 - reps[:-1].sum()
        soft = choice_probabilities(losses, MarketConfig(m, 1e-6, reps))
        hard = noiseless_choice_probabilities(losses, reps)
        np.testing.assert_allclose(soft, hard, atol=1e-3)


def test_social_loss_bounds():
    rng = np.random.default_rng(11)
    for _ in range(50):
        pop, strategies, cfg = _random_market(rng)
        sl = social_loss(strategies, pop, cfg)
        risks = [strategy_risk(s, pop) for s in strategies]
        assert sl <= max(risks) + 1e-12
        noiseless_cfg = MarketConfig(cfg.m, 0.0)
        losses = loss_matrix(strategies, pop)
        pointwise_min = losses.min(axis=0) @ pop.weights / pop.total_weight
        assert social_loss(strategies, pop, noiseless_cfg) >= pointwise_min - 1e-12


def test_choice_matrix_agrees_with_per_point_choice():
    rng = np.random.default_rng(3)
    pop, strategies, cfg = _random_market(rng, m=3, dim=2)
    losses = loss_matrix(strategies, pop)
    matrix = choice_matrix(losses, cfg)
    for i in range(pop.n):
        np.testing.assert_allclose(
            matrix[:, i], choice_probabilities(losses[:, i], cfg), atol=1e-14
        )
