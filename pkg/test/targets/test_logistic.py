import math
from pathlib import Path

import numpy as np
from pytest import mark, raises

from diffusion_bench import *

STEP = 1e-6


def test_generate_dataset(dataset: Dataset, seed: SeedSpec):
    assert dataset.n_data == 100
    assert dataset.d == 2
    assert set(np.unique(dataset.y)) <= {-1.0, 1.0}

    # features have variance sigma2 = 100
    assert 50.0 < float(np.var(dataset.x)) < 150.0

    again = generate_dataset(100, 2, 100.0, None, seed)
    assert np.array_equal(again.x, dataset.x)
    assert np.array_equal(again.y, dataset.y)


def test_labels_follow_planted_parameter(seed: SeedSpec):
    dataset = generate_dataset(2000, 2, 100.0, [1.0, 0.0], seed)

    # with |x₁| large the label is almost surely sign(x₁)
    confident = np.abs(dataset.x[:, 0]) > 10.0
    agreement = np.mean(np.sign(dataset.x[confident, 0]) == dataset.y[confident])
    assert agreement > 0.99


def test_score_matches_finite_differences(
    logistic_target: LogisticPosterior, rng: np.random.Generator
):
    theta = 0.3 * rng.standard_normal((4, 2))
    logp, grad, hess = logistic_target.derivatives(theta)

    for j in range(2):
        e = np.zeros(2)
        e[j] = STEP

        logp_plus = logistic_target.log_density(theta + e)
        logp_minus = logistic_target.log_density(theta - e)
        assert np.allclose(
            grad[:, j], (logp_plus - logp_minus) / (2 * STEP), rtol=1e-5, atol=1e-5
        )

        grad_plus = logistic_target.score(theta + e)
        grad_minus = logistic_target.score(theta - e)
        assert np.allclose(
            hess[:, :, j], (grad_plus - grad_minus) / (2 * STEP), atol=1e-4
        )


@mark.lam(50.0)
def test_hessian_bounds(logistic_target: LogisticPosterior, rng: np.random.Generator):
    theta = rng.standard_normal((10, 2))
    _, _, hess = logistic_target.derivatives(theta)
    m0, L0 = logistic_target.regularity()

    eigvals = np.linalg.eigvalsh(-hess)
    assert np.all(eigvals >= m0 - 1e-10)
    assert np.all(eigvals <= L0 + 1e-10)


def test_regularity(logistic_target: LogisticPosterior):
    x = logistic_target.dataset.x
    m0, L0 = logistic_target.regularity()

    assert m0 == 10.0
    assert math.isclose(L0, 10.0 + np.linalg.eigvalsh(x.T @ x)[-1] / 100)


def test_hessian_lipschitz(logistic_target: LogisticPosterior):
    norms = np.linalg.norm(logistic_target.dataset.x, axis=-1)
    expected = np.mean(norms**3) / (6.0 * math.sqrt(3.0))

    assert math.isclose(logistic_target.hessian_lipschitz(), expected)


def test_initial_point_is_mode(logistic_target: LogisticPosterior):
    mode = logistic_target.initial_point()
    assert np.linalg.norm(logistic_target.score(mode[None])) < 1e-4


def test_dataset_csv(dataset: Dataset, tmp_path: Path):
    path = tmp_path / "dataset.csv"
    dataset.to_csv(path)

    lines = path.read_text().splitlines()
    assert lines[0] == "y,x_1,x_2"
    assert len(lines) == 101

    loaded = Dataset.from_csv(path)
    assert np.array_equal(loaded.x, dataset.x)
    assert np.array_equal(loaded.y, dataset.y)


def test_invalid_dataset():
    with raises(AssertionError):
        Dataset([[1.0, 2.0]], [0.0])

    with raises(AssertionError):
        LogisticPosterior(Dataset([[1.0, 2.0]], [1.0]), 0.0)


def test_derivatives_at_origin(logistic_target: LogisticPosterior):
    x, y = logistic_target.dataset.x, logistic_target.dataset.y
    f, grad, hess = logistic_derivatives(logistic_target, np.zeros(2))

    # all margins vanish: σ(0) = ½
    assert math.isclose(f[0], math.log(2.0))
    assert np.allclose(grad[0], (y @ x) / (2 * len(y)))
    assert np.allclose(hess[0], -10.0 * np.eye(2) - x.T @ x / (4 * len(y)))


def test_far_margins_are_finite(logistic_target: LogisticPosterior):
    f, grad, hess = logistic_derivatives(logistic_target, [[1e4, -1e4]])

    assert np.all(np.isfinite(f))
    assert np.all(np.isfinite(grad))
    assert np.all(np.isfinite(hess))
    assert logistic_regularity(logistic_target) == logistic_target.regularity()
