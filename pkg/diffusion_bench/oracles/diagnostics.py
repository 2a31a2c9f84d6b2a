from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .oracle import ScoreOracle

__all__ = [
    "score_norm_diagnostic",
]


def score_norm_diagnostic(oracle: ScoreOracle, t: float, samples: NDArray) -> float:
    """
    Return the empirical `L2` norm `√mean‖∇log p_t(X_t)‖²` of the score over
    draws of `X_t`. For a marginal whose score is `L(t)`-Lipschitz this is
    at most `√(d·L(t))`.

    :param oracle: Oracle of the marginals
    :param t: Forward time
    :param samples: Draws from `p_t`, shape `(k, d)` with `k ≥ 1`
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("Score norm diagnostic needs at least one sample")

    score = oracle.score(t, np.atleast_2d(samples))
    return float(np.sqrt(np.mean(np.sum(score**2, axis=-1))))
