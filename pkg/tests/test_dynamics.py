"""Best-response dynamics, gradients, schedule, Bayes-risk fitting."""

import dataclasses

import numpy as np
import pytest

from mkteq import (
    DynamicsConfig,
    LinearStrategy,
    MarketConfig,
    PerRepGame,
    Population,
    TabularStrategy,
    ZeroNoiseError,
    best_respond,
    enumerate_pure_equilibria,
    fit_bayes_optimal,
    init_linear,
    label_noise_population,
    provider_utilities,
    run_dynamics,
    scheduled_learning_rate,
    social_loss,
    strategy_risk,
    utility_gradient,
)
from mkteq.rng import make_stream
from oracles import bias_grid_risk


def test_schedule_values():
    assert scheduled_learning_rate(0.5) == 0.1
    assert scheduled_learning_rate(0.3) == 0.1
    assert scheduled_learning_rate(0.25) == 0.5
    assert scheduled_learning_rate(0.2) == 0.5
    assert scheduled_learning_rate(0.17) == 1.0
    assert scheduled_learning_rate(0.15) == 1.0
    assert scheduled_learning_rate(0.12) == 2.0
    assert scheduled_learning_rate(0.1) == 2.0
    assert scheduled_learning_rate(0.08) == 5.0
    assert scheduled_learning_rate(0.07) == 5.0
    assert scheduled_learning_rate(0.05) == 10.0
    with pytest.raises(ValueError):
        scheduled_learning_rate(1.5)


def test_init_linear_shapes_and_determinism():
    s = init_linear(0, 0.1, make_stream(0, "dynamics"), tau=0.1)
    assert s.w.shape == (0,)
    zero = init_linear(3, 0.0, make_stream(0, "dynamics"), tau=1.0)
    assert (zero.w == 0).all() and zero.b == 0.0
    X = np.zeros((4, 3))
    np.testing.assert_allclose(zero.predict_values(X), 0.5)
    a = init_linear(5, 0.1, make_stream(9, "dynamics"))
    b = init_linear(5, 0.1, make_stream(9, "dynamics"))
    assert (a.w == b.w).all() and a.b == b.b


def _random_instance(rng, dim, m, c, tau=0.7):
    n = int(rng.integers(2, 25))
    pop = Population(rng.normal(size=(n, dim)), rng.integers(0, 2, n), rng.random(n) + 0.2)
    strategies = [
        LinearStrategy(rng.normal(size=dim), float(rng.normal()), tau=tau) for _ in range(m)
    ]
    return pop, strategies, MarketConfig(m, c)


def _finite_difference(j, strategies, pop, cfg, step=1e-5):
    base = strategies[j]
    theta = np.concatenate([base.w, [base.b]])

    def u(t):
        trial = LinearStrategy(t[:-1], t[-1], base.tau)
        probe = list(strategies)
        probe[j] = trial
        return provider_utilities(probe, pop, cfg)[j]

    grad = np.zeros_like(theta)
    for k in range(theta.size):
        up, down = theta.copy(), theta.copy()
        up[k] += step
        down[k] -= step
        grad[k] = (u(up) - u(down)) / (2 * step)
    return grad


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(17)
    checked = 0
    for dim in (0, 1, 2, 3, 5):
        for m in (2, 3, 4):
            for c in (0.1, 0.3, 1.0):
                pop, strategies, cfg = _random_instance(rng, dim, m, c)
                j = int(rng.integers(0, m))
                gw, gb = utility_gradient(j, strategies, pop, cfg)
                analytic = np.concatenate([gw, [gb]])
                fd = _finite_difference(j, strategies, pop, cfg)
                denom = max(np.linalg.norm(fd), 1e-10)
                assert np.linalg.norm(analytic - fd) / denom < 1e-5
                checked += 1
    assert checked >= 20


def test_gradient_vanishes_for_huge_noise():
    rng = np.random.default_rng(3)
    pop, strategies, _ = _random_instance(rng, 3, 2, 0.3)
    norms = []
    for c in (1e2, 1e4, 1e6, 1e8):
        gw, gb = utility_gradient(0, strategies, pop, MarketConfig(2, c))
        norms.append(np.linalg.norm(np.concatenate([gw, [gb]])))
    assert norms[-1] < 1e-9
    assert all(hi > lo for hi, lo in zip(norms, norms[1:]))


def test_gradient_requires_smooth_linear_provider():
    pop = label_noise_population(0.2, 10, 0)
    linear = LinearStrategy(np.zeros(0), 0.0, tau=0.1)
    with pytest.raises(ZeroNoiseError):
        utility_gradient(0, [linear, linear], pop, MarketConfig(2, 0.0))
    tabular = TabularStrategy(np.asarray([0]))
    with pytest.raises(TypeError):
        utility_gradient(0, [tabular, linear], pop, MarketConfig(2, 0.3))


def test_best_respond_reinitializes_bad_predictors():
    pop = label_noise_population(0.2, 400, 5)
    # A confident wrong predictor: predicts the minority label everywhere.
    bad = LinearStrategy(np.zeros(0), 5.0, tau=0.1)
    good = LinearStrategy(np.zeros(0), -5.0, tau=0.1)
    cfg = DynamicsConfig(m=2, choice_noise=0.3, inner_iterations=0, seed=1)
    response = best_respond(0, [bad, good], pop, cfg, make_stream(1, "dynamics"))
    assert response.reinitialized
    assert response.risk == pytest.approx(strategy_risk(bad, pop))
    assert abs(response.strategy.b) < 1.0


def test_best_respond_zero_iterations_keeps_parameters():
    pop = label_noise_population(0.2, 400, 5)
    good = LinearStrategy(np.zeros(0), -5.0, tau=0.1)
    cfg = DynamicsConfig(m=2, choice_noise=0.3, inner_iterations=0, seed=1)
    response = best_respond(0, [good, good], pop, cfg, make_stream(1, "dynamics"))
    assert not response.reinitialized
    assert response.strategy.b == good.b


def test_run_dynamics_converges_to_majority_label():
    pop = label_noise_population(0.2, 1500, 21)
    cfg = DynamicsConfig(m=2, choice_noise=0.3, inner_iterations=5000, seed=2)
    strategies, result, trace = run_dynamics(pop, cfg)
    assert result.converged
    for s in strategies:
        # label 1 is the minority, so converged predictors answer below 1/2
        assert s.predictions(pop)[0] < 0.5
    assert result.social_loss == pytest.approx(float(pop.y.mean()), abs=0.05)


def test_run_dynamics_single_stage_cap():
    pop = label_noise_population(0.3, 200, 3)
    cfg = DynamicsConfig(m=3, choice_noise=0.3, inner_iterations=50, max_stages=1, seed=0)
    _, result, trace = run_dynamics(pop, cfg)
    assert trace.stages_run == 1
    assert len(trace.records) == 3
    assert {r.stage for r in trace.records} == {1}


def test_run_dynamics_bit_identical_traces():
    pop = label_noise_population(0.35, 300, 8)
    cfg = DynamicsConfig(m=3, choice_noise=0.3, inner_iterations=200, max_stages=4, seed=13)
    s1, r1, t1 = run_dynamics(pop, cfg)
    s2, r2, t2 = run_dynamics(pop, cfg)
    assert r1.social_loss == r2.social_loss
    assert (r1.utilities == r2.utilities).all()
    assert len(t1.records) == len(t2.records)
    for a, b in zip(t1.records, t2.records):
        assert (a.stage, a.provider, a.reinitialized) == (b.stage, b.provider, b.reinitialized)
        assert a.utility_before == b.utility_before
        assert a.utility_after == b.utility_after
        assert a.risk == b.risk
        assert (a.utilities_after == b.utilities_after).all()
    for sa, sb in zip(s1, s2):
        assert (sa.w == sb.w).all() and sa.b == sb.b


def test_trace_utilities_conserved():
    pop = label_noise_population(0.4, 500, 4)
    cfg = DynamicsConfig(m=3, choice_noise=0.3, inner_iterations=300, max_stages=5, seed=6)
    _, _, trace = run_dynamics(pop, cfg)
    for record in trace.records:
        assert 0.0 <= record.utility_before <= 1.0
        assert 0.0 <= record.utility_after <= 1.0
        assert abs(record.utilities_after.sum() - 1.0) <= 1e-9


def test_label_symmetry_of_utilities_and_social_loss():
    rng = np.random.default_rng(31)
    pop = Population(rng.normal(size=(40, 2)), rng.integers(0, 2, 40), rng.random(40) + 0.1)
    flipped = Population(pop.X, 1 - pop.y, pop.weights)
    strategies = [LinearStrategy(rng.normal(size=2), float(rng.normal()), tau=0.3) for _ in range(3)]
    negated = [LinearStrategy(-s.w, -s.b, s.tau) for s in strategies]
    cfg = MarketConfig(3, 0.3)
    np.testing.assert_allclose(
        provider_utilities(strategies, pop, cfg),
        provider_utilities(negated, flipped, cfg),
        atol=1e-9,
    )
    assert social_loss(strategies, pop, cfg) == pytest.approx(
        social_loss(negated, flipped, cfg), abs=1e-9
    )


def test_converged_labels_form_pure_equilibrium():
    pop = label_noise_population(0.2, 1000, 12)
    cfg = DynamicsConfig(m=2, choice_noise=0.05, inner_iterations=5000, seed=9)
    strategies, result, _ = run_dynamics(pop, cfg)
    assert result.converged
    p1_hat = float(pop.y.mean())
    bayes_label = int(p1_hat > 0.5)
    game = PerRepGame(alpha=min(p1_hat, 1 - p1_hat), m=2, bayes_label=bayes_label)
    induced = tuple(int(s.predictions(pop)[0] > 0.5) for s in strategies)
    assert induced in {eq.labels for eq in enumerate_pure_equilibria(game)}


def test_fit_bayes_optimal_label_noise():
    pop = label_noise_population(0.2, 3000, 2)
    _, risk = fit_bayes_optimal(pop, iterations=10_000, learning_rate=1.0, seed=1)
    oracle = bias_grid_risk(pop)
    assert risk <= oracle + 0.02
    assert risk <= 0.2 + 0.02


def test_fit_bayes_optimal_separable():
    rng = np.random.default_rng(5)
    y = rng.integers(0, 2, 400)
    X = (2.0 * y - 1.0).reshape(-1, 1) + 0.01 * rng.normal(size=(400, 1))
    pop = Population(X, y)
    _, risk = fit_bayes_optimal(pop, iterations=2000, learning_rate=1.0, seed=0)
    assert risk < 0.02


def test_fit_bayes_optimal_validates_iterations():
    pop = label_noise_population(0.2, 10, 0)
    with pytest.raises(ValueError):
        fit_bayes_optimal(pop, iterations=0)


def test_dynamics_config_validation():
    with pytest.raises(ValueError):
        DynamicsConfig(m=1, choice_noise=0.3)
    with pytest.raises(ValueError):
        DynamicsConfig(m=2, choice_noise=0.0)
    with pytest.raises(ValueError):
        DynamicsConfig(m=2, choice_noise=0.3, learning_rate="warp")
    cfg = DynamicsConfig(m=2, choice_noise=0.3, learning_rate="schedule")
    assert dataclasses.replace(cfg, seed=5).seed == 5
