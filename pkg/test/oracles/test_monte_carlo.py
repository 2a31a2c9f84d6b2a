import math

import numpy as np
import pydantic
from pytest import mark, raises

from diffusion_bench import *


def test_vs_analytic(gaussian_target: GaussianTarget, rng: np.random.Generator):
    particles = gaussian_target.sample(100_000, rng)
    x = rng.standard_normal((10, 2))

    score, hess = mc_marginal_derivatives(particles, 1.0, x)
    exact_score, exact_hess, _ = gaussian_marginal_derivatives(
        gaussian_target, 1.0, x
    )

    assert np.max(np.linalg.norm(score - exact_score, axis=-1)) < 0.05
    assert np.max(np.abs(hess - exact_hess)) < 0.1
    assert np.allclose(hess, np.swapaxes(hess, -1, -2))


@mark.slow
def test_error_rate(gaussian_target: GaussianTarget, rng: np.random.Generator):
    x = ou_marginal_gaussian(gaussian_target, 1.0).sample(20, rng)
    exact, _, _ = gaussian_marginal_derivatives(gaussian_target, 1.0, x)
    sizes = [1_000, 10_000, 100_000]

    rms = []
    for n in sizes:
        sq = []
        for _ in range(5):
            score, _ = mc_marginal_derivatives(gaussian_target.sample(n, rng), 1.0, x)
            sq.append(np.sum((score - exact) ** 2, axis=-1))
        rms.append(math.sqrt(np.mean(sq)))

    # L2 error of the self-normalized estimate decays like n^{-1/2}
    slope = np.polyfit(np.log(sizes), np.log(rms), 1)[0]
    assert -0.7 < slope < -0.3


def test_single_particle(rng: np.random.Generator):
    theta0 = np.array([[0.3, -1.2]])
    x = rng.standard_normal((5, 2))
    t = 0.5

    score, hess = mc_marginal_derivatives(theta0, t, x)

    # p_t is the Gaussian kernel around e^{-t/2}θ₀
    v = -np.expm1(-t)
    assert np.allclose(score, -(x - np.exp(-t / 2) * theta0) / v, atol=1e-12)
    assert np.allclose(hess, np.broadcast_to(-np.eye(2) / v, (5, 2, 2)))


def test_time_floor(gaussian_target: GaussianTarget, rng: np.random.Generator):
    particles = gaussian_target.sample(1000, rng)
    x = gaussian_target.sample(3, rng)

    at_zero = mc_marginal_derivatives(particles, 0.0, x)[0]
    at_floor = mc_marginal_derivatives(particles, T_MIN, x)[0]

    assert np.array_equal(at_zero, at_floor)


def test_low_ess(stationary_target: GaussianTarget, rng: np.random.Generator):
    particles = stationary_target.sample(1000, rng)
    x = np.array([[0.5, 0.5]])

    # kernel width √T_MIN leaves about one particle in range
    with raises(EffectiveSampleSizeError):
        mc_marginal_derivatives(particles, T_MIN, x)

    oracle = MonteCarloOracle(particles, McOracleConfig(n_particles=1000))
    out = oracle.evaluate(T_MIN, x)

    assert out.n_flagged == 1
    assert np.all(np.isfinite(out.score))


def test_config():
    with raises(pydantic.ValidationError):
        McOracleConfig(n_particles=10)


def test_from_target(gaussian_target: GaussianTarget, seed: SeedSpec):
    cfg = McOracleConfig(n_particles=500, seed=seed)

    a = MonteCarloOracle.from_target(gaussian_target, cfg)
    b = MonteCarloOracle.from_target(gaussian_target, cfg)

    assert a.particles.shape == (500, 2)
    assert np.array_equal(a.particles, b.particles)
    assert a.has_hessian and a.has_m_term


def test_from_logistic_target(logistic_target: LogisticPosterior, seed: SeedSpec):
    cfg = McOracleConfig(n_particles=200, seed=seed)
    mala = MalaConfig(burn_in=100, n_chains=4)

    oracle = MonteCarloOracle.from_target(logistic_target, cfg, mala)

    assert oracle.particles.shape == (200, 2)
    assert np.all(np.isfinite(oracle.particles))


def test_resample_each_call(gaussian_target: GaussianTarget, seed: SeedSpec):
    cfg = McOracleConfig(n_particles=500, seed=seed, resample_each_call=True)
    oracle = MonteCarloOracle.from_target(gaussian_target, cfg)
    x = np.zeros((2, 2))

    a = oracle.score(1.0, x, key=(0, 1))
    b = oracle.score(1.0, x, key=(0, 1))
    c = oracle.score(1.0, x, key=(0, 2))

    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
