"""
Metropolis-adjusted Langevin sampler producing reference draws from `p₀`.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from ..core.exceptions import NonFiniteError
from ..core.rng import SeedSpec, make_generator
from .target import BaseTarget

__all__ = [
    "MalaConfig",
    "mala_reference_sampler",
]

TARGET_ACCEPTANCE = 0.574
ACCEPTANCE_RANGE = (0.3, 0.8)
ADAPT_WINDOW = 25


class MalaConfig(BaseModel):
    """
    Settings of {obj}`mala_reference_sampler`.
    """

    model_config = ConfigDict(frozen=True)

    step: float = Field(default=0.01, gt=0)
    """
    Initial step size; adapted during burn-in toward the optimal acceptance
    rate, then frozen.
    """

    burn_in: int = Field(default=1000, ge=0)
    thinning: int = Field(default=5, ge=1)
    n_samples: int = Field(default=10_000, ge=1)

    n_chains: int = Field(default=1, ge=1)
    """
    Number of chains advanced together; samples are interleaved across
    chains.
    """


def mala_reference_sampler(
    target: BaseTarget, cfg: MalaConfig, seed: SeedSpec
) -> NDArray:
    """
    Run Metropolis-adjusted Langevin chains from the target's
    {obj}`BaseTarget.initial_point` and return exactly `cfg.n_samples`
    post-burn-in, thinned states.

    :param target: Distribution to sample
    :param cfg: Sampler settings
    :param seed: Stream to draw from
    :returns: Samples of shape `(n_samples, d)`
    """
    rng = make_generator(seed)

    n_chains = cfg.n_chains
    per_chain = math.ceil(cfg.n_samples / n_chains)

    x = np.tile(target.initial_point(), (n_chains, 1))
    logp, grad = _evaluate(target, x)

    log_step = math.log(cfg.step)
    accepted_window = 0
    accepted_total = 0
    kept: list[NDArray] = []

    n_iter = cfg.burn_in + per_chain * cfg.thinning
    for it in range(n_iter):
        step = math.exp(log_step)

        # Langevin proposal y = x + ε∇log p(x) + √(2ε) z
        z = rng.standard_normal(x.shape)
        y = x + step * grad + math.sqrt(2.0 * step) * z
        logp_y, grad_y = _evaluate(target, y)

        log_q_forward = -np.sum((y - x - step * grad) ** 2, axis=-1) / (4 * step)
        log_q_backward = -np.sum((x - y - step * grad_y) ** 2, axis=-1) / (
            4 * step
        )
        log_alpha = logp_y - logp + log_q_backward - log_q_forward

        accept = np.log(rng.random(n_chains)) < log_alpha

        x = np.where(accept[:, None], y, x)
        logp = np.where(accept, logp_y, logp)
        grad = np.where(accept[:, None], grad_y, grad)

        if it < cfg.burn_in:
            accepted_window += int(accept.sum())

            # Robbins-Monro adaptation of the log step on window averages
            if (it + 1) % ADAPT_WINDOW == 0:
                rate = accepted_window / (ADAPT_WINDOW * n_chains)
                log_step += (rate - TARGET_ACCEPTANCE) / math.sqrt(
                    (it + 1) / ADAPT_WINDOW
                )
                accepted_window = 0
        else:
            accepted_total += int(accept.sum())
            if (it - cfg.burn_in + 1) % cfg.thinning == 0:
                kept.append(x.copy())

    rate = accepted_total / max(1, (n_iter - cfg.burn_in) * n_chains)
    msg = f"MALA on {target}: step={math.exp(log_step):.3e}, acceptance={rate:.3f}"

    if ACCEPTANCE_RANGE[0] < rate < ACCEPTANCE_RANGE[1]:
        logging.info(msg)
    else:
        logging.warning(f"{msg} outside {ACCEPTANCE_RANGE}")

    # (per_chain, n_chains, d) -> interleave chains
    samples = np.stack(kept).reshape(-1, target.dim)
    return samples[: cfg.n_samples]


def _evaluate(target: BaseTarget, x: NDArray) -> tuple[NDArray, NDArray]:
    logp, grad = target.log_density_and_score(x)

    if not (np.all(np.isfinite(logp)) and np.all(np.isfinite(grad))):
        raise NonFiniteError(f"Non-finite log-density encountered for {target}")

    return logp, grad
