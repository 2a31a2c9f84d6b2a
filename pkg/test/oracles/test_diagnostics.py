import math

import numpy as np
from pytest import raises

from diffusion_bench import *


def test_stationary(stationary_target: GaussianTarget, rng: np.random.Generator):
    oracle = GaussianOracle(stationary_target)
    samples = stationary_target.sample(50_000, rng)

    # score is -x, so the norm is √E‖X‖² = √d
    norm = score_norm_diagnostic(oracle, 1.0, samples)
    assert math.isclose(norm, math.sqrt(2.0), rel_tol=0.02)


def test_lipschitz_bound(gaussian_oracle: GaussianOracle, rng: np.random.Generator):
    t = 0.5
    marginal = ou_marginal_gaussian(gaussian_oracle.target, t)
    samples = marginal.sample(20_000, rng)

    _, L0 = gaussian_oracle.target.regularity()
    bound = math.sqrt(2 * lipschitz_L(t, L0))

    assert score_norm_diagnostic(gaussian_oracle, t, samples) <= 1.05 * bound


def test_empty(gaussian_oracle: GaussianOracle):
    with raises(ValueError):
        score_norm_diagnostic(gaussian_oracle, 1.0, np.empty((0, 2)))
