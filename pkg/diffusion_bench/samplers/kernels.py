"""
Step kernels of the backward SDE `dY = (½Y + ∇log p_{T-s}(Y))ds + dB`.

Each kernel advances a batch of states `theta` of shape `(n, d)` from step
`n` to `n+1` of a {obj}`TimeGrid`, querying the oracle at forward time
`T - nh` (and `T - (n+U)h` for midpoint schemes). Kernels are pure given
the state, step index and position of `rng`; all randomness of a step is
drawn from `rng` in a fixed order.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.grid import TimeGrid
from ..core.numerics import phi_functions, sample_gaussian_with_cov, sym_matrix_function
from ..core.rng import RandomSource
from ..oracles.oracle import OracleKey, ScoreOracle
from .types import SchemeKind

__all__ = [
    "U_MIN",
    "init_from_hat_pT",
    "step_em",
    "step_ei",
    "step_rem",
    "step_rei",
    "step_so",
    "rei_rho",
    "em_mean",
    "ei_mean",
    "so_mean_and_cov",
    "STEP_KERNELS",
]

U_MIN = 1e-8
"""
Lower clamp of the midpoint fraction of the exponential-integrator
midpoint scheme, where its noise coupling is 0/0.
"""


def init_from_hat_pT(
    T: float, d: int, rng: RandomSource, n: int = 1
) -> NDArray:
    """
    Draw initial states from `p̂_T = N(0, (1-e^{-T})I)`.

    :param T: Horizon, `T > 0`
    :param d: Dimension
    :param rng: Generator to draw from
    :param n: Number of states
    :returns: Array of shape `(n, d)`
    """
    assert T > 0, f"Horizon must be positive, got {T}"
    return math.sqrt(-math.expm1(-T)) * rng.standard_normal((n, d))


def em_mean(
    theta: NDArray, n: int, grid: TimeGrid, oracle: ScoreOracle, key: OracleKey = ()
) -> NDArray:
    """
    Deterministic part `(1+h/2)ϑ + h·s(T-nh, ϑ)` of {obj}`step_em`.
    """
    h = grid.h
    s = oracle.score(grid.forward_time(n), theta, key=(*key, 0))
    return (1.0 + 0.5 * h) * theta + h * s


def ei_mean(
    theta: NDArray, n: int, grid: TimeGrid, oracle: ScoreOracle, key: OracleKey = ()
) -> NDArray:
    """
    Deterministic part `e^{h/2}ϑ + 2(e^{h/2}-1)·s(T-nh, ϑ)` of {obj}`step_ei`.
    """
    h = grid.h
    s = oracle.score(grid.forward_time(n), theta, key=(*key, 0))
    return math.exp(0.5 * h) * theta + 2.0 * math.expm1(0.5 * h) * s


def step_em(
    theta: NDArray,
    n: int,
    grid: TimeGrid,
    oracle: ScoreOracle,
    rng: RandomSource,
    key: OracleKey = (),
) -> NDArray:
    """
    Euler-Maruyama step `ϑ' = (1+h/2)ϑ + h·s(T-nh, ϑ) + √h ξ`.
    """
    mean = em_mean(theta, n, grid, oracle, key)
    return mean + math.sqrt(grid.h) * rng.standard_normal(theta.shape)


def step_ei(
    theta: NDArray,
    n: int,
    grid: TimeGrid,
    oracle: ScoreOracle,
    rng: RandomSource,
    key: OracleKey = (),
) -> NDArray:
    """
    Exponential-integrator step
    `ϑ' = e^{h/2}ϑ + 2(e^{h/2}-1)·s(T-nh, ϑ) + √(e^h-1) ξ`, exact for the
    linear part of the drift with the score frozen over the step.
    """
    mean = ei_mean(theta, n, grid, oracle, key)
    return mean + math.sqrt(math.expm1(grid.h)) * rng.standard_normal(theta.shape)


def _draw_midpoints(
    n_rows: int, rng: RandomSource, u: ArrayLike | None
) -> NDArray:
    # U is drawn even when forced, so forcing doesn't shift the Gaussians
    drawn = rng.random(n_rows)
    return drawn if u is None else np.broadcast_to(np.asarray(u, float), (n_rows,))


def step_rem(
    theta: NDArray,
    n: int,
    grid: TimeGrid,
    oracle: ScoreOracle,
    rng: RandomSource,
    key: OracleKey = (),
    u: ArrayLike | None = None,
) -> NDArray:
    """
    Randomized-midpoint Euler step. With `γ(t, x) = ½x + s(t, x)` and
    `U ~ Unif[0, 1]`:

    - `ϑ_U = ϑ + hU·γ(T-nh, ϑ) + √(hU) ξ'`
    - `ϑ' = ϑ + h·γ(T-(n+U)h, ϑ_U) + √h ξ` with `ξ = √U ξ' + √(1-U) ξ''`

    Draw order: `U`, `ξ'`, `ξ''`.

    :param u: Midpoint fractions to use instead of the drawn ones
    """
    h = grid.h
    n_rows = theta.shape[0]

    U = _draw_midpoints(n_rows, rng, u)
    xi1 = rng.standard_normal(theta.shape)
    xi2 = rng.standard_normal(theta.shape)

    Uc = U[:, None]

    s0 = oracle.score(grid.forward_time(n), theta, key=(*key, 0))
    mid = theta + h * Uc * (0.5 * theta + s0) + np.sqrt(h * Uc) * xi1

    s_mid = oracle.score(grid.forward_time(n, U), mid, key=(*key, 1))
    xi = np.sqrt(Uc) * xi1 + np.sqrt(1.0 - Uc) * xi2

    return theta + h * (0.5 * mid + s_mid) + math.sqrt(h) * xi


def rei_rho(h: ArrayLike, U: ArrayLike) -> tuple[NDArray, NDArray]:
    """
    Correlation `ρ` between the midpoint noise and the full-step noise of
    {obj}`step_rei`, and its complement `√(1-ρ²)`:

    - `ρ = e^{h(1-U)/2}·√((e^{hU}-1)/(e^h-1))`
    - `√(1-ρ²) = √((e^{h(1-U)}-1)/(e^h-1))`

    `U` is clamped to `[U_MIN, 1]`.
    """
    U = np.clip(np.asarray(U, dtype=float), U_MIN, 1.0)
    h = np.asarray(h, dtype=float)
    denom = np.expm1(h)

    rho = np.exp(0.5 * h * (1.0 - U)) * np.sqrt(np.expm1(h * U) / denom)
    comp = np.sqrt(np.expm1(h * (1.0 - U)) / denom)

    return rho, comp


def step_rei(
    theta: NDArray,
    n: int,
    grid: TimeGrid,
    oracle: ScoreOracle,
    rng: RandomSource,
    key: OracleKey = (),
    u: ArrayLike | None = None,
) -> NDArray:
    """
    Randomized-midpoint exponential-integrator step:

    - `ϑ_U = e^{hU/2}ϑ + 2(e^{hU/2}-1)·s(T-nh, ϑ) + √(e^{hU}-1) ξ'`
    - `ϑ' = e^{h/2}ϑ + h·e^{(1-U)h/2}·s(T-(n+U)h, ϑ_U) + √(e^h-1) ξ`

    with `ξ = ρξ' + √(1-ρ²)ξ''` from {obj}`rei_rho`. Draw order: `U`, `ξ'`,
    `ξ''`.

    :param u: Midpoint fractions to use instead of the drawn ones
    """
    h = grid.h
    n_rows = theta.shape[0]

    U = np.clip(_draw_midpoints(n_rows, rng, u), U_MIN, 1.0)
    xi1 = rng.standard_normal(theta.shape)
    xi2 = rng.standard_normal(theta.shape)

    Uc = U[:, None]

    s0 = oracle.score(grid.forward_time(n), theta, key=(*key, 0))
    mid = (
        np.exp(0.5 * h * Uc) * theta
        + 2.0 * np.expm1(0.5 * h * Uc) * s0
        + np.sqrt(np.expm1(h * Uc)) * xi1
    )

    s_mid = oracle.score(grid.forward_time(n, U), mid, key=(*key, 1))

    rho, comp = rei_rho(h, U)
    xi = rho[:, None] * xi1 + comp[:, None] * xi2

    return (
        math.exp(0.5 * h) * theta
        + h * np.exp(0.5 * h * (1.0 - Uc)) * s_mid
        + math.sqrt(math.expm1(h)) * xi
    )


def so_mean_and_cov(
    theta: NDArray, n: int, grid: TimeGrid, oracle: ScoreOracle, key: OracleKey = ()
) -> tuple[NDArray, NDArray]:
    """
    Mean and noise covariance of {obj}`step_so`:

    - `mean = ϑ + h·φ₁(Lh)(½ϑ + s) + h²·φ₂(Lh)·M`
    - `cov = ∫₀ʰ e^{2Lr} dr`, eigenwise `(e^{2λh}-1)/(2λ) = h·φ₁(2λh)`

    :returns: `(mean (n, d), cov (n, d, d))`
    """
    h = grid.h
    terms = oracle.second_order(grid.forward_time(n), theta, key=(*key, 0))

    phi1 = sym_matrix_function(terms.L, lambda lam: phi_functions(lam * h)[0])
    phi2 = sym_matrix_function(terms.L, lambda lam: phi_functions(lam * h)[1])
    cov = sym_matrix_function(
        terms.L, lambda lam: h * phi_functions(2.0 * lam * h)[0]
    )

    drift = 0.5 * theta + terms.score
    mean = (
        theta
        + h * np.einsum("nij,nj->ni", phi1, drift)
        + h**2 * np.einsum("nij,nj->ni", phi2, terms.M)
    )

    return mean, cov


def step_so(
    theta: NDArray,
    n: int,
    grid: TimeGrid,
    oracle: ScoreOracle,
    rng: RandomSource,
    key: OracleKey = (),
) -> NDArray:
    """
    Second-order step: the backward SDE with its drift linearized around
    `(T-nh, ϑ)` as `γ ≈ γ(ϑ) + L(y-ϑ) + M(s-nh)`, then integrated exactly.
    Needs an oracle providing `L = ½I + ∇²log p` and the temporal
    correction `M`.
    """
    mean, cov = so_mean_and_cov(theta, n, grid, oracle, key)
    return mean + sample_gaussian_with_cov(cov, rng)


STEP_KERNELS = {
    SchemeKind.EM: step_em,
    SchemeKind.EI: step_ei,
    SchemeKind.REM: step_rem,
    SchemeKind.REI: step_rei,
    SchemeKind.SO: step_so,
}
"""
Step kernel of each scheme.
"""
