"""
Monte-Carlo oracle for general targets.

Writing `X_t = aX₀ + √v Z` with `a = e^{-t/2}` and `v = 1-e^{-t}`, the
score of `p_t` is a posterior expectation over `X₀` given `X_t = x`. It is
estimated by self-normalized importance weights over a fixed set of
reference particles `θ⁽ʲ⁾ ~ p₀`:

- `w_j ∝ exp(-‖x - aθ⁽ʲ⁾‖²/(2v))`
- `score = -(x - a·m_w)/v` where `m_w = Σ w_j θ⁽ʲ⁾`
- `hessian = a²Cov_w(θ)/v² - I/v`
"""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import logsumexp

from ..core.exceptions import EffectiveSampleSizeError
from ..core.numerics import symmetrize
from ..core.rng import SeedSpec, make_generator
from ..targets.gaussian import GaussianTarget
from ..targets.mala import MalaConfig, mala_reference_sampler
from ..targets.target import BaseTarget
from .oracle import OracleKey, OracleOutput, ScoreOracle

__all__ = [
    "T_MIN",
    "McOracleConfig",
    "mc_marginal_derivatives",
    "MonteCarloOracle",
]

T_MIN = 1e-3
"""
Floor on the forward time of queries; keeps the kernel variance `1-e^{-t}`
away from 0.
"""

ESS_MIN = 10.0
"""
Effective sample size below which an estimate is flagged.
"""

CHUNK_ELEMENTS = 2_000_000
"""
Upper bound on the size of the `(queries, particles)` weight matrix held in
memory at once.
"""


class McOracleConfig(BaseModel):
    """
    Settings of {obj}`MonteCarloOracle`.
    """

    model_config = ConfigDict(frozen=True)

    n_particles: int = Field(default=10_000, ge=100)
    """
    Number of reference particles.
    """

    seed: SeedSpec = SeedSpec()
    """
    Stream the particles (and any per-call resampling) are drawn from.
    """

    resample_each_call: bool = False
    """
    If set, each call bootstraps a fresh particle set from the pool, keyed by
    the call key. By default the same particles are used for every call so
    that schemes compared on one oracle share common random numbers.
    """


def _estimate(
    particles: NDArray, t: NDArray, x: NDArray, hessian: bool
) -> tuple[NDArray, NDArray | None, NDArray]:
    n, d = x.shape
    n_particles = particles.shape[0]

    a = np.exp(-0.5 * t)
    v = -np.expm1(-t)

    score = np.empty_like(x)
    hess = np.empty((n, d, d)) if hessian else None
    ess = np.empty(n)

    sq_norms = np.sum(particles**2, axis=-1)
    outer = np.einsum("pi,pj->pij", particles, particles) if hessian else None

    chunk = max(1, CHUNK_ELEMENTS // n_particles)
    for start in range(0, n, chunk):
        rows = slice(start, start + chunk)
        a_c, v_c = a[rows, None], v[rows, None]

        # -‖x - aθ‖²/(2v) up to a per-row constant
        log_w = (a_c * (x[rows] @ particles.T) - 0.5 * a_c**2 * sq_norms) / v_c
        log_w -= logsumexp(log_w, axis=-1, keepdims=True)
        w = np.exp(log_w)

        ess[rows] = 1.0 / np.sum(w**2, axis=-1)

        mean = w @ particles
        score[rows] = -(x[rows] - a_c * mean) / v_c

        if hessian:
            second = np.einsum("np,pij->nij", w, outer)
            cov = second - np.einsum("ni,nj->nij", mean, mean)
            hess[rows] = (a_c**2 / v_c**2)[:, :, None] * cov - np.eye(d) / v_c[
                :, :, None
            ]

    if hess is not None:
        hess = symmetrize(hess)

    return score, hess, ess


def _ess_threshold(n_particles: int) -> float:
    return min(ESS_MIN, float(n_particles))


def _prepare(t: ArrayLike, x: NDArray) -> tuple[NDArray, NDArray]:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    t = np.broadcast_to(np.asarray(t, dtype=float), x.shape[:1])
    return np.maximum(t, T_MIN), x


def mc_marginal_derivatives(
    particles: ArrayLike, t: ArrayLike, x: NDArray
) -> tuple[NDArray, NDArray]:
    """
    Estimate the score and Hessian of `p_t` from reference particles.

    Forward times below {obj}`T_MIN` are raised to it.

    :param particles: Draws from `p₀`, shape `(n_particles, d)`
    :param t: Forward time: scalar, or one per row of `x`
    :param x: Query points `(n, d)`
    :returns: `(score (n, d), hessian (n, d, d))`
    :raises EffectiveSampleSizeError: If the weights at any query point have an effective sample size below 10 (or below the number of particles, if fewer)
    """
    particles = np.atleast_2d(np.asarray(particles, dtype=float))
    t, x = _prepare(t, x)

    score, hess, ess = _estimate(particles, t, x, hessian=True)

    threshold = _ess_threshold(particles.shape[0])
    low = ess < threshold
    if np.any(low):
        raise EffectiveSampleSizeError(
            float(ess.min()), threshold, int(np.count_nonzero(low))
        )

    return score, hess


class MonteCarloOracle(ScoreOracle):
    """
    Score oracle backed by {obj}`mc_marginal_derivatives`. Instead of
    raising, query points with a degenerate effective sample size are
    flagged in {obj}`OracleOutput.flagged` for the caller to aggregate.
    """

    particles: NDArray
    cfg: McOracleConfig

    has_hessian = True
    has_m_term = True

    def __init__(self, particles: ArrayLike, cfg: McOracleConfig):
        particles = np.atleast_2d(np.asarray(particles, dtype=float))
        assert (
            particles.shape[0] >= cfg.n_particles
        ), f"Need {cfg.n_particles} particles, got {particles.shape[0]}"
        assert np.all(np.isfinite(particles)), "Particles must be finite"

        self.particles = particles[: cfg.n_particles]
        self.cfg = cfg
        self.dim = particles.shape[1]

    def __repr__(self):
        return f"MonteCarloOracle(n_particles={self.cfg.n_particles}, d={self.dim})"

    @classmethod
    def from_target(
        cls,
        target: BaseTarget,
        cfg: McOracleConfig,
        mala: MalaConfig | None = None,
    ) -> MonteCarloOracle:
        """
        Draw reference particles from `target` and build an oracle on them.
        Gaussian targets are sampled exactly, others by MALA.

        :param target: Law `p₀`
        :param cfg: Oracle settings; `cfg.seed` keys the particle draw
        :param mala: Settings of the MALA sampler, `n_samples` is overridden
        """
        if isinstance(target, GaussianTarget):
            particles = target.sample(cfg.n_particles, make_generator(cfg.seed))
        else:
            mala = (mala or MalaConfig()).model_copy(
                update={"n_samples": cfg.n_particles}
            )
            particles = mala_reference_sampler(target, mala, cfg.seed)

        logging.debug(f"Drew {cfg.n_particles} reference particles for {target}")
        return cls(particles, cfg)

    def evaluate(
        self,
        t: ArrayLike,
        x: NDArray,
        hessian: bool = False,
        key: OracleKey = (),
    ) -> OracleOutput:
        t, x = _prepare(t, x)

        particles = self.particles
        if self.cfg.resample_each_call:
            # sub-stream 1; the particle draw itself uses the bare stream
            rng = make_generator(self.cfg.seed, 1, *key)
            idx = rng.integers(0, particles.shape[0], particles.shape[0])
            particles = particles[idx]

        score, hess, ess = _estimate(particles, t, x, hessian)
        flagged = ess < _ess_threshold(particles.shape[0])

        return OracleOutput(score=score, hessian=hess, flagged=flagged)
