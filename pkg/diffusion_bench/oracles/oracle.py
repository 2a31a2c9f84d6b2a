"""
Interface of score oracles: evaluators of `∇log p_t` (and optionally its
Hessian and the second-order drift terms) for the forward OU marginals.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.exceptions import CapabilityError

__all__ = [
    "OracleOutput",
    "SecondOrderTerms",
    "ScoreOracle",
    "ScoreFunctionOracle",
    "linearization_terms",
    "linearize",
]

OracleKey = tuple[int, ...]
"""
Call key identifying an evaluation, e.g. `(block, step, substep)`.
Oracles with internal randomness derive their draws from it.
"""


@dataclass(frozen=True)
class OracleOutput:
    """
    Result of one batched oracle evaluation.
    """

    score: NDArray
    """Score `(n, d)`"""

    hessian: NDArray | None = None
    """Hessian `(n, d, d)`, if requested"""

    flagged: NDArray | None = None
    """Boolean mask `(n,)` of rows where the estimate is unreliable"""

    @property
    def n_flagged(self) -> int:
        return 0 if self.flagged is None else int(np.count_nonzero(self.flagged))


@dataclass(frozen=True)
class SecondOrderTerms:
    """
    Inputs of the second-order step: score `s`, linearization matrix
    `L = ½I + ∇²log p` and temporal correction `M`.
    """

    score: NDArray
    L: NDArray
    M: NDArray
    flagged: NDArray | None = None


class ScoreOracle(ABC):
    """
    Evaluates the score of the forward marginal `p_t` at forward time `t`.

    Times may be a scalar or an array of shape `(n,)` giving one time per
    query point.
    """

    dim: int

    has_hessian: bool = False
    """Whether the Hessian of `log p_t` is available"""

    has_m_term: bool = False
    """Whether the temporal correction term `M` is available"""

    @abstractmethod
    def evaluate(
        self,
        t: ArrayLike,
        x: NDArray,
        hessian: bool = False,
        key: OracleKey = (),
    ) -> OracleOutput:
        """
        Evaluate the score, and the Hessian if requested.

        :param t: Forward time(s)
        :param x: Query points `(n, d)`
        :param hessian: Whether to also compute the Hessian
        :param key: Call key for oracles with internal randomness
        """
        ...

    def score(self, t: ArrayLike, x: NDArray, key: OracleKey = ()) -> NDArray:
        return self.evaluate(t, x, key=key).score

    def second_order(
        self, t: ArrayLike, x: NDArray, key: OracleKey = ()
    ) -> SecondOrderTerms:
        """
        Evaluate the terms of the second-order step at `(t, x)`.
        """
        if not (self.has_hessian and self.has_m_term):
            raise CapabilityError(self, "Hessian and M-term")

        x = np.atleast_2d(x)
        out = self.evaluate(t, x, hessian=True, key=key)
        L, M = linearize(out.score, out.hessian, x)

        return SecondOrderTerms(out.score, L, M, out.flagged)


def linearize(
    score: NDArray, hessian: NDArray, x: NDArray
) -> tuple[NDArray, NDArray]:
    """
    Form `L = ½I + H` and `M = -½s - ½Hx - Hs` from score `s` and Hessian
    `H` of `log p_t` at `x`.

    `M` is `½Σⱼ∂²ⱼ∇log p_t - ∂_t∇log p_t`. Differentiating the Fokker-Planck
    equation of the forward OU process gives
    `∂_t∇log p_t = ½s + ½Hx + Hs + ½Σⱼ∂²ⱼ∇log p_t`, so the third-derivative
    terms cancel.
    """
    d = score.shape[-1]

    L = 0.5 * np.eye(d) + hessian
    Hx = np.einsum("...ij,...j->...i", hessian, x)
    Hs = np.einsum("...ij,...j->...i", hessian, score)
    M = -0.5 * score - 0.5 * Hx - Hs

    return L, M


def linearization_terms(
    oracle: ScoreOracle, t: ArrayLike, x: NDArray, key: OracleKey = ()
) -> tuple[NDArray, NDArray]:
    """
    Return `(L, M)` of the second-order scheme at `(t, x)`.

    :param oracle: Oracle with Hessian capability
    :param t: Forward time(s)
    :param x: Query points `(n, d)`
    """
    terms = oracle.second_order(t, x, key=key)
    return terms.L, terms.M


class ScoreFunctionOracle(ScoreOracle):
    """
    Wraps a score function `score(t, x)`, e.g. a learned model. Provides
    the score only, so it can drive the first-order schemes but not the
    second-order one.
    """

    _func: Callable[[NDArray, NDArray], NDArray]

    def __init__(self, func: Callable[[NDArray, NDArray], NDArray], dim: int):
        self._func = func
        self.dim = dim

    def __repr__(self):
        return f"ScoreFunctionOracle({getattr(self._func, '__name__', self._func)})"

    def evaluate(
        self,
        t: ArrayLike,
        x: NDArray,
        hessian: bool = False,
        key: OracleKey = (),
    ) -> OracleOutput:
        if hessian:
            raise CapabilityError(self, "Hessian")

        x = np.atleast_2d(x)
        t = np.broadcast_to(np.asarray(t, dtype=float), x.shape[:1])

        return OracleOutput(score=np.asarray(self._func(t, x), dtype=float))
