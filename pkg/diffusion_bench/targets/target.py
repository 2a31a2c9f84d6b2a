from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "BaseTarget",
]


class BaseTarget(ABC):
    """
    Data distribution `p₀` known through its unnormalized log-density and
    derivatives. Inputs are batches `theta` of shape `(n, d)`.
    """

    dim: int
    """
    Dimension `d` of the state space.
    """

    @abstractmethod
    def derivatives(self, theta: NDArray) -> tuple[NDArray, NDArray, NDArray]:
        """
        Evaluate the unnormalized log-density, its gradient (the score of
        `p₀`) and its Hessian.

        :param theta: Batch of points `(n, d)`
        :returns: `(logp (n,), grad (n, d), hess (n, d, d))`
        """
        ...

    @abstractmethod
    def regularity(self) -> tuple[float, float]:
        """
        Return `(m0, L0)`: the strong log-concavity constant of `p₀` and the
        Lipschitz constant of its score.
        """
        ...

    @abstractmethod
    def initial_point(self) -> NDArray:
        """
        Return a point of high density to start reference chains from.
        """
        ...

    def hessian_lipschitz(self) -> float:
        """
        Return a Lipschitz constant `L_F` of `θ ↦ ∇²log p₀(θ)` in Frobenius
        norm.
        """
        raise NotImplementedError(f"{type(self).__name__} has no known L_F")

    def log_density(self, theta: NDArray) -> NDArray:
        return self.derivatives(theta)[0]

    def score(self, theta: NDArray) -> NDArray:
        return self.derivatives(theta)[1]

    def log_density_and_score(self, theta: NDArray) -> tuple[NDArray, NDArray]:
        """
        Evaluate log-density and score together. Subclasses override this
        when the Hessian is expensive.
        """
        logp, grad, _ = self.derivatives(theta)
        return logp, grad

    def second_moment_norm(self, samples: NDArray | None = None) -> float:
        """
        Return `‖X₀‖_{L2} = √E‖X₀‖²` under `p₀`, estimated from `samples` when
        not known in closed form.
        """
        assert samples is not None, f"{type(self).__name__} requires samples"
        return float(np.sqrt(np.mean(np.sum(samples**2, axis=-1))))
