import logging
from pathlib import Path

import numpy as np
from pytest import Config, FixtureRequest, fixture

from diffusion_bench import *

logging.basicConfig(level=logging.INFO)

MARKERS = [
    "slow",
    "seed",
    "gaussian",
    "lam",
]


def pytest_configure(config: Config) -> None:
    for marker in MARKERS:
        config.addinivalue_line("markers", marker)


@fixture(autouse=True)
def newline(request):
    """
    Print a newline and underline test name.
    """
    print("\n" + "-" * len(request.node.nodeid))


@fixture
def seed(request: FixtureRequest) -> SeedSpec:
    """
    Seed of the test, settable by `@mark.seed(master_seed)`.
    """
    marker = request.node.get_closest_marker("seed")
    master_seed = marker.args[0] if marker is not None else 0
    return SeedSpec(master_seed=master_seed)


@fixture
def rng(seed: SeedSpec) -> np.random.Generator:
    return make_generator(seed)


@fixture
def gaussian_target(request: FixtureRequest) -> GaussianTarget:
    """
    Gaussian target, settable by `@mark.gaussian(mu, Sigma)`. Defaults to a
    correlated, non-stationary target in 2 dimensions.
    """
    marker = request.node.get_closest_marker("gaussian")
    if marker is not None:
        return GaussianTarget(*marker.args)

    return GaussianTarget([1.0, -0.5], [[2.0, 0.3], [0.3, 0.4]])


@fixture
def stationary_target() -> GaussianTarget:
    """
    Stationary law `N(0, I)` of the forward process.
    """
    return GaussianTarget(np.zeros(2), np.eye(2))


@fixture
def gaussian_oracle(gaussian_target: GaussianTarget) -> GaussianOracle:
    return GaussianOracle(gaussian_target)


@fixture
def zero_oracle() -> ScoreFunctionOracle:
    """
    Score-only oracle returning 0, leaving only the linear drift.
    """

    def zero_score(t, x):
        return np.zeros_like(x)

    return ScoreFunctionOracle(zero_score, 2)


@fixture
def dataset(seed: SeedSpec) -> Dataset:
    return generate_dataset(100, 2, 100.0, None, seed)


@fixture
def logistic_target(request: FixtureRequest, dataset: Dataset) -> LogisticPosterior:
    """
    Logistic posterior with `λ` settable by `@mark.lam(value)`, default 10.
    """
    marker = request.node.get_closest_marker("lam")
    lam = marker.args[0] if marker is not None else 10.0
    return LogisticPosterior(dataset, lam)


@fixture
def out_dir(tmp_path: Path) -> Path:
    return tmp_path / "results"
