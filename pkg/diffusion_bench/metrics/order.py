from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike
from scipy.stats import linregress

__all__ = [
    "fit_order",
]


def fit_order(
    h_list: ArrayLike,
    err_list: ArrayLike,
    floor: float = 0.0,
    noise: float = 0.0,
) -> tuple[float, float, float]:
    """
    Fit `err - floor ≈ C·h^p` by least squares in log-log coordinates.
    Points with `err ≤ 2·floor` are dominated by the floor and left out.

    Errors measured between samples carry a sampling part which adds in
    quadrature; with `noise` set, each error is first replaced by
    `√(err² - noise²)`, or 0 if below the noise.

    :param h_list: Step sizes
    :param err_list: Errors at those step sizes
    :param floor: Error level not due to discretization, e.g. the initialization term
    :param noise: Expected error of an exact sampler under the same measurement
    :returns: `(slope, intercept, r2)` where `slope` is the empirical order `p`
    :raises ValueError: If fewer than 3 points remain
    """
    h = np.asarray(h_list, dtype=float)
    err = np.asarray(err_list, dtype=float)
    assert h.shape == err.shape, "h_list and err_list differ in length"
    assert floor >= 0, f"Floor must be non-negative, got {floor}"
    assert noise >= 0, f"Noise must be non-negative, got {noise}"

    if noise > 0:
        err = np.sqrt(np.clip(err**2 - noise**2, 0.0, None))

    keep = np.isfinite(err) & (err > 2.0 * floor) & (h > 0)
    if np.count_nonzero(keep) < 3:
        raise ValueError(
            f"Need at least 3 points above twice the floor {floor:.3e}, "
            f"got {np.count_nonzero(keep)}"
        )

    fit = linregress(np.log(h[keep]), np.log(err[keep] - floor))
    return float(fit.slope), float(fit.intercept), float(fit.rvalue**2)
