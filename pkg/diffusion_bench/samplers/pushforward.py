from __future__ import annotations

import math

import numpy as np
from numpy.typing import NDArray

from ..core.grid import TimeGrid
from ..core.numerics import symmetrize
from ..oracles.gaussian import GaussianOracle
from ..targets.gaussian import GaussianTarget
from .kernels import ei_mean, em_mean, so_mean_and_cov
from .types import GaussianLaw, SchemeKind

__all__ = [
    "gaussian_pushforward_exact",
]


def gaussian_pushforward_exact(
    scheme: SchemeKind, target: GaussianTarget, grid: TimeGrid
) -> GaussianLaw:
    """
    Return the exact law of `ϑ_N` for a Gaussian target driven by its exact
    oracle.

    Every score the chain evaluates is then affine in the state, so each
    step of EM, EI and SO is an affine map plus independent Gaussian noise
    and the law stays Gaussian. The affine map of each step is read off by
    evaluating the step mean at `0` and the unit vectors.

    :param scheme: One of {obj}`SchemeKind.EM`, {obj}`SchemeKind.EI`, {obj}`SchemeKind.SO`
    :param target: Gaussian target
    :param grid: Time grid
    :raises ValueError: For randomized-midpoint schemes, whose output law is a mixture
    """
    if scheme.is_randomized:
        raise ValueError(
            f"{scheme.name} has no Gaussian pushforward: its output law is a mixture"
        )

    oracle = GaussianOracle(target)
    d = target.dim
    h = grid.h

    mean = np.zeros(d)
    cov = -math.expm1(-grid.T) * np.eye(d)

    points = np.vstack([np.zeros(d), np.eye(d)])

    for n in range(grid.N):
        noise: NDArray
        if scheme is SchemeKind.EM:
            images = em_mean(points, n, grid, oracle)
            noise = h * np.eye(d)
        elif scheme is SchemeKind.EI:
            images = ei_mean(points, n, grid, oracle)
            noise = math.expm1(h) * np.eye(d)
        else:
            images, covs = so_mean_and_cov(points, n, grid, oracle)
            noise = covs[0]

        b = images[0]
        A = (images[1:] - b).T

        mean = A @ mean + b
        cov = symmetrize(A @ cov @ A.T + noise)

    return GaussianLaw(mean, cov)
