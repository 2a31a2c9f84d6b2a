"""
Posterior of penalized logistic regression,
`p₀(θ) ∝ exp(-f(θ))` with
`f(θ) = (λ/2)‖θ‖² + (1/n) Σᵢ log(1 + exp(-yᵢxᵢᵀθ))`.
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import minimize
from scipy.special import expit

from ..core.rng import SeedSpec, make_generator
from .target import BaseTarget

__all__ = [
    "Dataset",
    "LogisticPosterior",
    "generate_dataset",
    "logistic_derivatives",
    "logistic_regularity",
    "logistic_hessian_lipschitz",
    "default_theta_star",
]


class Dataset:
    """
    Binary classification data: features `x` of shape `(n_data, d)` and
    labels `y ∈ {-1, +1}` of shape `(n_data,)`.
    """

    x: NDArray
    y: NDArray

    def __init__(self, x: ArrayLike, y: ArrayLike):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        y = np.asarray(y, dtype=float).reshape(-1)

        assert x.shape[0] == y.shape[0], "Feature/label count mismatch"
        assert x.shape[0] >= 1, "Dataset is empty"
        assert np.all(np.isfinite(x)), "Features must be finite"
        assert np.all(np.isin(y, (-1.0, 1.0))), "Labels must be -1 or +1"

        self.x = x
        self.y = y

    def __repr__(self):
        return f"Dataset(n_data={self.n_data}, d={self.d})"

    @property
    def n_data(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def to_csv(self, path: Path):
        """
        Write with columns `y, x_1, ..., x_d`.
        """
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["y"] + [f"x_{j + 1}" for j in range(self.d)])
            for yi, xi in zip(self.y, self.x):
                writer.writerow([int(yi)] + [repr(float(v)) for v in xi])

    @classmethod
    def from_csv(cls, path: Path) -> Dataset:
        with Path(path).open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            assert header[0] == "y", f"Unexpected header: {header}"
            rows = [[float(v) for v in row] for row in reader]

        data = np.array(rows)
        return cls(data[:, 1:], data[:, 0])


class LogisticPosterior(BaseTarget):
    """
    Posterior of penalized logistic regression on a {obj}`Dataset`.
    """

    dataset: Dataset
    lam: float
    """
    Tuning parameter `λ > 0` of the ridge penalty.
    """

    _mode: NDArray | None = None

    def __init__(self, dataset: Dataset, lam: float):
        assert lam > 0, f"lambda must be positive, got {lam}"

        self.dataset = dataset
        self.lam = float(lam)
        self.dim = dataset.d

    def __repr__(self):
        return f"LogisticPosterior(lambda={self.lam}, {self.dataset})"

    def derivatives(self, theta: NDArray) -> tuple[NDArray, NDArray, NDArray]:
        f, grad, hess = logistic_derivatives(self, theta)
        return -f, grad, hess

    def log_density_and_score(self, theta: NDArray) -> tuple[NDArray, NDArray]:
        f, grad = _potential_and_score(self, np.atleast_2d(theta))
        return -f, grad

    def regularity(self) -> tuple[float, float]:
        return logistic_regularity(self)

    def hessian_lipschitz(self) -> float:
        return logistic_hessian_lipschitz(self)

    def initial_point(self) -> NDArray:
        """
        Return the posterior mode, computed once by BFGS on the potential.
        """
        if self._mode is None:
            result = minimize(
                lambda th: float(_potential_and_score(self, th[None])[0][0]),
                np.zeros(self.dim),
                jac=lambda th: -_potential_and_score(self, th[None])[1][0],
                method="BFGS",
            )
            logging.debug(
                f"Posterior mode for lambda={self.lam}: {result.x} ({result.message})"
            )
            self._mode = result.x

        return self._mode.copy()


def _softplus_neg(u: NDArray) -> NDArray:
    """
    Overflow-safe `log(1 + exp(-u))`.
    """
    return np.log1p(np.exp(-np.abs(u))) + np.maximum(-u, 0.0)


def _potential_and_score(
    target: LogisticPosterior, theta: NDArray
) -> tuple[NDArray, NDArray]:
    x, y = target.dataset.x, target.dataset.y
    n = target.dataset.n_data

    # margins yᵢxᵢᵀθ: (batch, n_data)
    u = (theta @ x.T) * y

    f = 0.5 * target.lam * np.sum(theta**2, axis=-1)
    f += np.mean(_softplus_neg(u), axis=-1)

    # ∇f = λθ - (1/n) Σ yᵢxᵢσ(-uᵢ)
    s = expit(-u)
    grad_f = target.lam * theta - (s * y) @ x / n

    return f, -grad_f


def logistic_derivatives(
    target: LogisticPosterior, theta: ArrayLike
) -> tuple[NDArray, NDArray, NDArray]:
    """
    Evaluate the potential `f`, the score `∇log p₀ = -∇f` and the Hessian
    `∇²log p₀ = -λI - (1/n) Σᵢ σ(-uᵢ)(1-σ(-uᵢ)) xᵢxᵢᵀ` with `uᵢ = yᵢxᵢᵀθ`.

    :param target: Posterior to evaluate
    :param theta: Batch of points `(n, d)`
    :returns: `(f (n,), grad_logp0 (n, d), hess_logp0 (n, d, d))`
    """
    theta = np.atleast_2d(np.asarray(theta, dtype=float))
    x, y = target.dataset.x, target.dataset.y
    n = target.dataset.n_data
    d = target.dim

    f, grad = _potential_and_score(target, theta)

    s = expit(-(theta @ x.T) * y)
    curvature = s * (1.0 - s)

    hess = -target.lam * np.eye(d) - np.einsum(
        "bi,ij,ik->bjk", curvature, x, x
    ) / n

    return f, grad, 0.5 * (hess + np.swapaxes(hess, -1, -2))


def logistic_regularity(target: LogisticPosterior) -> tuple[float, float]:
    """
    Return `(m0, L0) = (λ, λ + λ_max(Σᵢ xᵢxᵢᵀ)/n)`.
    """
    x = target.dataset.x
    gram = x.T @ x
    lam_max = float(np.linalg.eigvalsh(gram)[-1])

    return target.lam, target.lam + lam_max / target.dataset.n_data


def logistic_hessian_lipschitz(target: LogisticPosterior) -> float:
    """
    Return `L_F = (1/n) Σᵢ ‖xᵢ‖³ / (6√3)`, using `|σ''| ≤ 1/(6√3)`.
    """
    norms = np.linalg.norm(target.dataset.x, axis=-1)
    return float(np.mean(norms**3) / (6.0 * np.sqrt(3.0)))


def default_theta_star(d: int) -> NDArray:
    """
    Planted parameter used to draw labels: all-ones normalized to unit norm.
    """
    return np.ones(d) / np.sqrt(d)


def generate_dataset(
    n_data: int,
    d: int,
    sigma2: float,
    theta_star: ArrayLike | None,
    seed: SeedSpec,
) -> Dataset:
    """
    Draw features `x_{i,j} ~ N(0, sigma2)` i.i.d. and labels
    `yᵢ = +1` with probability `σ(xᵢᵀθ*)`, else `-1`.

    :param n_data: Number of observations
    :param d: Feature dimension
    :param sigma2: Feature variance
    :param theta_star: Planted parameter, or `None` for {obj}`default_theta_star`
    :param seed: Stream to draw from
    """
    assert n_data >= 1, "Need at least one observation"
    assert sigma2 > 0, "Feature variance must be positive"

    theta_star = (
        default_theta_star(d)
        if theta_star is None
        else np.asarray(theta_star, dtype=float)
    )
    assert theta_star.shape == (d,), f"theta_star must have shape ({d},)"

    rng = make_generator(seed)

    # features first, then one uniform per label
    x = rng.normal(0.0, np.sqrt(sigma2), size=(n_data, d))
    u = rng.random(n_data)

    y = np.where(u < expit(x @ theta_star), 1.0, -1.0)

    return Dataset(x, y)
