"""
Wasserstein-2 distances between empirical samples and between Gaussian
laws.
"""

from __future__ import annotations

import numpy as np
import ot
from numpy.typing import ArrayLike, NDArray

from ..core.numerics import sym_matrix_function, symmetrize
from ..core.rng import SeedSpec, make_generator
from ..samplers.types import GaussianLaw

__all__ = [
    "w2_1d",
    "w2_gaussian",
    "sliced_w2",
    "random_directions",
]


def w2_1d(a: ArrayLike, b: ArrayLike) -> float:
    """
    Exact `W2` between the uniform empirical measures on `a` and `b`, which
    may have different sizes.

    :param a: Samples `(n,)`
    :param b: Samples `(m,)`
    """
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)

    if a.size == 0 or b.size == 0:
        raise ValueError("W2 between empirical measures needs non-empty samples")

    # monotone coupling; squared Euclidean ground cost gives W2²
    cost = ot.emd2_1d(a, b, metric="sqeuclidean")
    return float(np.sqrt(max(float(cost), 0.0)))


def _psd_sqrt(A: NDArray) -> NDArray:
    return sym_matrix_function(A, lambda lam: np.sqrt(np.clip(lam, 0.0, None)))


def w2_gaussian(a: GaussianLaw, b: GaussianLaw) -> float:
    """
    Closed-form `W2` between Gaussian laws:
    `√(‖μa-μb‖² + tr(Σa + Σb - 2(Σb^½ Σa Σb^½)^½))`.
    """
    assert a.dim == b.dim, f"Dimension mismatch: {a.dim} vs {b.dim}"

    root_b = _psd_sqrt(b.cov)
    cross = _psd_sqrt(symmetrize(root_b @ a.cov @ root_b))

    mean_term = float(np.sum((a.mean - b.mean) ** 2))
    cov_term = float(np.trace(a.cov + b.cov - 2.0 * cross))

    return float(np.sqrt(max(mean_term + cov_term, 0.0)))


def random_directions(n_proj: int, d: int, seed: SeedSpec) -> NDArray:
    """
    Draw `n_proj` directions uniformly on the unit sphere of `R^d`.
    """
    z = make_generator(seed).standard_normal((n_proj, d))
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def sliced_w2(
    a: ArrayLike,
    b: ArrayLike,
    n_proj: int,
    seed: SeedSpec,
    directions: ArrayLike | None = None,
) -> float:
    """
    Sliced `W2`: root mean square over random unit directions `u` of
    {obj}`w2_1d` between the projections `a·u` and `b·u`.

    :param a: Samples `(n, d)`
    :param b: Samples `(m, d)`
    :param n_proj: Number of directions, at least 1
    :param seed: Stream the directions are drawn from
    :param directions: Directions `(n_proj, d)` to use instead of random ones
    """
    assert n_proj >= 1, f"Need at least one projection, got {n_proj}"

    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    assert a.shape[1] == b.shape[1], "Dimension mismatch"

    if directions is None:
        directions = random_directions(n_proj, a.shape[1], seed)
    else:
        directions = np.atleast_2d(np.asarray(directions, dtype=float))
        assert directions.shape == (n_proj, a.shape[1])

    sq = [w2_1d(a @ u, b @ u) ** 2 for u in directions]
    return float(np.sqrt(np.mean(sq)))
