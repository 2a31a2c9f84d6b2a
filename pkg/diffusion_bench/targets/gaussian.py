from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.numerics import check_symmetric, symmetrize
from .target import BaseTarget

__all__ = [
    "GaussianTarget",
]


class GaussianTarget(BaseTarget):
    """
    Gaussian distribution `N(mu, Sigma)`, used as an analytic target.

    The eigendecomposition of `Sigma` is computed once; every quantity
    derived from it (including the forward-process marginals) is evaluated
    in that eigenbasis.
    """

    mu: NDArray
    Sigma: NDArray

    _eigvals: NDArray
    _eigvecs: NDArray

    def __init__(self, mu: ArrayLike, Sigma: ArrayLike):
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        Sigma = np.atleast_2d(np.asarray(Sigma, dtype=float))

        assert Sigma.shape == (mu.size, mu.size), f"Shape mismatch: {Sigma.shape}"
        check_symmetric(Sigma)

        self.mu = mu
        self.Sigma = symmetrize(Sigma)
        self.dim = mu.size

        self._eigvals, self._eigvecs = np.linalg.eigh(self.Sigma)
        assert np.all(self._eigvals > 0), "Sigma must be positive definite"

    def __repr__(self):
        return f"GaussianTarget(mu={self.mu}, Sigma={self.Sigma.tolist()})"

    @classmethod
    def isotropic(cls, mu: ArrayLike, variance: float) -> GaussianTarget:
        """
        Create `N(mu, variance·I)`.
        """
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        return cls(mu, variance * np.eye(mu.size))

    @property
    def eigvals(self) -> NDArray:
        return self._eigvals

    @property
    def eigvecs(self) -> NDArray:
        return self._eigvecs

    @property
    def precision(self) -> NDArray:
        return symmetrize((self._eigvecs / self._eigvals) @ self._eigvecs.T)

    def derivatives(self, theta: NDArray) -> tuple[NDArray, NDArray, NDArray]:
        theta = np.atleast_2d(theta)
        P = self.precision

        diff = theta - self.mu
        grad = -diff @ P
        logp = 0.5 * np.sum(diff * grad, axis=-1)
        hess = np.broadcast_to(-P, (theta.shape[0], self.dim, self.dim)).copy()

        return logp, grad, hess

    def regularity(self) -> tuple[float, float]:
        return 1.0 / float(self._eigvals.max()), 1.0 / float(self._eigvals.min())

    def hessian_lipschitz(self) -> float:
        return 0.0

    def initial_point(self) -> NDArray:
        return self.mu.copy()

    def sample(self, n: int, rng: np.random.Generator) -> NDArray:
        """
        Draw `n` exact samples.
        """
        z = rng.standard_normal((n, self.dim))
        return self.mu + (z * np.sqrt(self._eigvals)) @ self._eigvecs.T

    def second_moment_norm(self, samples: NDArray | None = None) -> float:
        return float(np.sqrt(self.mu @ self.mu + np.trace(self.Sigma)))
