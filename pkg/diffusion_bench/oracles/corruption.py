"""
Oracle wrapper modeling score-estimation error: every returned score, `L`
and `M` is off from the clean value by a perturbation of prescribed norm.

By default the perturbation is a fixed direction for the whole run, so the
error acts as a systematic bias of the score model. With
`resample_each_call` a fresh direction is drawn per row and call instead.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field

from ..core.exceptions import CapabilityError
from ..core.rng import SeedSpec, make_generator
from .oracle import OracleKey, OracleOutput, ScoreOracle, SecondOrderTerms

__all__ = [
    "CorruptionSpec",
    "CorruptedOracle",
    "corrupt_oracle",
]


class CorruptionSpec(BaseModel):
    """
    Norms of the perturbations added to each evaluation.
    """

    model_config = ConfigDict(frozen=True)

    eps_sc: float = Field(default=0.0, ge=0)
    """Euclidean norm of the score perturbation"""

    eps_L: float = Field(default=0.0, ge=0)
    """Frobenius norm of the (symmetric) perturbation of `L`"""

    eps_M: float = Field(default=0.0, ge=0)
    """Euclidean norm of the perturbation of `M`"""

    resample_each_call: bool = False
    """
    Draw new directions for every row of every call, keyed on the call key.
    Such noise largely averages out over a step, so the final error grows
    only quadratically in the norms.
    """

    @property
    def is_clean(self) -> bool:
        return self.eps_sc == 0 and self.eps_L == 0 and self.eps_M == 0


class CorruptedOracle(ScoreOracle):
    """
    Wraps another oracle and perturbs its outputs.

    Fixed directions are drawn once from `seed` at construction. Per-call
    directions are taken from the sub-stream of `seed` named by the call
    key, so equal keys reproduce equal perturbations; concurrent callers
    must pass distinct keys.

    Draw order: score direction, then `L` direction, then `M` direction.
    The `L` perturbation is applied to the Hessian when evaluated through
    {obj}`CorruptedOracle.evaluate`, since `L - H` is constant.
    """

    inner: ScoreOracle
    spec: CorruptionSpec
    seed: SeedSpec

    _fixed: tuple[NDArray, NDArray, NDArray] | None

    def __init__(self, inner: ScoreOracle, spec: CorruptionSpec, seed: SeedSpec):
        self.inner = inner
        self.spec = spec
        self.seed = seed
        self.dim = inner.dim
        self.has_hessian = inner.has_hessian
        self.has_m_term = inner.has_m_term

        self._fixed = None
        if not spec.resample_each_call:
            self._fixed = _draw_directions(1, inner.dim, make_generator(seed))

    def __repr__(self):
        return f"CorruptedOracle({self.inner}, {self.spec})"

    def directions(
        self, n: int, key: OracleKey = ()
    ) -> tuple[NDArray, NDArray, NDArray]:
        """
        Unit directions of the score, `L` and `M` perturbations for a call
        on `n` rows, with shapes `(n, d)`, `(n, d, d)` and `(n, d)`.
        """
        d = self.dim
        if self._fixed is None:
            return _draw_directions(n, d, make_generator(self.seed, *key))

        u_sc, dL, u_M = self._fixed
        return (
            np.broadcast_to(u_sc, (n, d)),
            np.broadcast_to(dL, (n, d, d)),
            np.broadcast_to(u_M, (n, d)),
        )

    def evaluate(
        self,
        t: ArrayLike,
        x: NDArray,
        hessian: bool = False,
        key: OracleKey = (),
    ) -> OracleOutput:
        out = self.inner.evaluate(t, x, hessian=hessian, key=key)
        if self.spec.is_clean:
            return out

        u_sc, dL, _ = self.directions(out.score.shape[0], key)
        score = out.score + self.spec.eps_sc * u_sc

        hess = out.hessian
        if hess is not None and self.spec.eps_L > 0:
            hess = hess + self.spec.eps_L * dL

        return OracleOutput(score=score, hessian=hess, flagged=out.flagged)

    def second_order(
        self, t: ArrayLike, x: NDArray, key: OracleKey = ()
    ) -> SecondOrderTerms:
        if not (self.has_hessian and self.has_m_term):
            raise CapabilityError(self, "Hessian and M-term")

        # M is perturbed on its own, not through the perturbed Hessian
        terms = self.inner.second_order(t, x, key=key)
        if self.spec.is_clean:
            return terms

        u_sc, dL, u_M = self.directions(terms.score.shape[0], key)
        score = terms.score + self.spec.eps_sc * u_sc
        L = terms.L + self.spec.eps_L * dL
        M = terms.M + self.spec.eps_M * u_M

        return SecondOrderTerms(score, L, M, terms.flagged)


def corrupt_oracle(
    oracle: ScoreOracle, spec: CorruptionSpec, seed: SeedSpec
) -> CorruptedOracle:
    """
    Wrap `oracle` so that each evaluation is perturbed by exactly the norms
    in `spec`. A zero spec returns the inner outputs unchanged.

    :param oracle: Clean oracle
    :param spec: Perturbation norms and whether directions are redrawn per call
    :param seed: Stream the perturbation directions are drawn from
    """
    return CorruptedOracle(oracle, spec, seed)


def _draw_directions(
    n: int, d: int, rng: np.random.Generator
) -> tuple[NDArray, NDArray, NDArray]:
    # all three are drawn even when a norm is zero, keeping later draws fixed
    u_sc = _unit_vectors(n, d, rng)
    dL = _symmetric_directions(n, d, rng)
    u_M = _unit_vectors(n, d, rng)
    return u_sc, dL, u_M


def _unit_vectors(n: int, d: int, rng: np.random.Generator) -> NDArray:
    z = rng.standard_normal((n, d))
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def _symmetric_directions(n: int, d: int, rng: np.random.Generator) -> NDArray:
    """
    Uniformly random symmetric matrices of unit Frobenius norm.
    """
    G = rng.standard_normal((n, d, d))
    S = 0.5 * (G + np.swapaxes(G, -1, -2))
    return S / np.linalg.norm(S, axis=(-2, -1), keepdims=True)
