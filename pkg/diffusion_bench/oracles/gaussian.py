"""
Closed-form marginals of a Gaussian target under the forward OU process
`dX = -½X dt + dW`.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..targets.gaussian import GaussianTarget
from .oracle import OracleKey, OracleOutput, ScoreOracle

__all__ = [
    "ou_marginal_gaussian",
    "gaussian_marginal_derivatives",
    "GaussianOracle",
]


def ou_marginal_gaussian(target: GaussianTarget, t: float) -> GaussianTarget:
    """
    Return the law of `X_t` when `X₀ ~ target`:
    `N(e^{-t/2}μ, e^{-t}Σ + (1-e^{-t})I)`.

    :param target: Law of `X₀`
    :param t: Forward time, `t ≥ 0`
    """
    assert t >= 0, f"Forward time must be non-negative, got {t}"

    decay = np.exp(-t)
    eigvals = decay * target.eigvals - np.expm1(-t)
    Q = target.eigvecs

    return GaussianTarget(
        np.exp(-0.5 * t) * target.mu,
        (Q * eigvals) @ Q.T,
    )


def gaussian_marginal_derivatives(
    target: GaussianTarget, t: ArrayLike, x: NDArray
) -> tuple[NDArray, NDArray, NDArray]:
    """
    Evaluate the score of the marginal `p_t`, its Hessian and its
    derivative in forward time `t`.

    With `μ_t = e^{-t/2}μ` and `Σ_t = e^{-t}Σ + (1-e^{-t})I`:

    - `score = -Σ_t⁻¹(x - μ_t)`
    - `hessian = -Σ_t⁻¹`
    - `dt_score = Σ_t⁻¹Σ_t'Σ_t⁻¹(x - μ_t) - ½Σ_t⁻¹μ_t` with `Σ_t' = e^{-t}(I - Σ)`

    Everything is computed in the eigenbasis of `Σ`, which all `Σ_t` share.

    :param target: Law of `X₀`
    :param t: Forward time: scalar, or one per row of `x`
    :param x: Query points `(n, d)`
    :returns: `(score (n, d), hessian (n, d, d), dt_score (n, d))`
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    n = x.shape[0]

    t = np.broadcast_to(np.asarray(t, dtype=float), (n,))
    assert np.all(t >= 0), "Forward time must be non-negative"

    Q = target.eigvecs
    lam = target.eigvals

    decay = np.exp(-t)[:, None]

    # eigenvalues of Σ_t and Σ_t' per row: (n, d)
    var_t = decay * lam - np.expm1(-t)[:, None]
    dvar_t = decay * (1.0 - lam)

    mu_t = np.exp(-0.5 * t)[:, None] * target.mu

    # coordinates in the eigenbasis
    r = (x - mu_t) @ Q
    m = mu_t @ Q

    score = -(r / var_t) @ Q.T
    dt_score = (r * dvar_t / var_t**2 - 0.5 * m / var_t) @ Q.T

    hessian = -np.einsum("ij,nj,kj->nik", Q, 1.0 / var_t, Q)
    hessian = 0.5 * (hessian + np.swapaxes(hessian, -1, -2))

    return score, hessian, dt_score


class GaussianOracle(ScoreOracle):
    """
    Exact oracle for a {obj}`GaussianTarget`.
    """

    target: GaussianTarget

    has_hessian = True
    has_m_term = True

    def __init__(self, target: GaussianTarget):
        self.target = target
        self.dim = target.dim

    def __repr__(self):
        return f"GaussianOracle({self.target})"

    def evaluate(
        self,
        t: ArrayLike,
        x: NDArray,
        hessian: bool = False,
        key: OracleKey = (),
    ) -> OracleOutput:
        score, hess, _ = gaussian_marginal_derivatives(self.target, t, x)
        return OracleOutput(score=score, hessian=hess if hessian else None)
