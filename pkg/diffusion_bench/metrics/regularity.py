"""
Regularity of the forward marginals `p_t` implied by strong log-concavity
and smoothness of `p₀`.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..targets.target import BaseTarget

__all__ = [
    "lipschitz_L",
    "convexity_m",
    "RegularityConstants",
]


def lipschitz_L(t: float, L0: float) -> float:
    """
    Lipschitz constant of `∇log p_t`: `L(t) = min{(1-e^{-t})⁻¹, e^t·L₀}`.
    Always at most `L₀ + 1`; `L(0) = L₀`.

    :param t: Forward time, `t ≥ 0`
    :param L0: Lipschitz constant of `∇log p₀`, positive
    """
    assert t >= 0, f"Forward time must be non-negative, got {t}"
    assert L0 > 0, f"L0 must be positive, got {L0}"

    if t == 0:
        return L0

    return min(-1.0 / math.expm1(-t), math.exp(t) * L0)


def convexity_m(t: float, m0: float) -> float:
    """
    Strong log-concavity constant of `p_t`:
    `m(t) = 1/(e^{-t}/m₀ + 1 - e^{-t})`. Always at least `min(1, m₀)`.

    :param t: Forward time, `t ≥ 0`
    :param m0: Strong log-concavity constant of `p₀`, positive
    """
    assert t >= 0, f"Forward time must be non-negative, got {t}"
    assert m0 > 0, f"m0 must be positive, got {m0}"

    return 1.0 / (math.exp(-t) / m0 - math.expm1(-t))


class RegularityConstants(BaseModel):
    """
    Constants of the assumptions on `p₀` entering the convergence bounds.
    """

    model_config = ConfigDict(frozen=True)

    m0: float = Field(gt=0)
    """Strong log-concavity of `p₀`"""

    L0: float = Field(gt=0)
    """Lipschitz constant of `∇log p₀`"""

    M1: float = Field(default=0.0, ge=0)
    """
    Time-Lipschitz constant of the score. Only enters at higher order; no
    constructive formula is known, so it is user-supplied.
    """

    M2: float = Field(default=0.0, ge=0)
    """Time-Lipschitz constant of the Hessian, user-supplied like `M1`"""

    L_F: float = Field(default=0.0, ge=0)
    """Lipschitz constant of the Hessian in Frobenius norm"""

    @model_validator(mode="after")
    def _check_order(self) -> RegularityConstants:
        if self.L0 < self.m0:
            raise ValueError(f"L0={self.L0} must be at least m0={self.m0}")
        return self

    @property
    def m_min(self) -> float:
        return min(1.0, self.m0)

    @property
    def L_max(self) -> float:
        return 1.0 + self.L0

    @classmethod
    def from_target(cls, target: BaseTarget, **kwargs) -> RegularityConstants:
        """
        Read `m0`, `L0` and `L_F` off a target; `kwargs` supply `M1`, `M2`.
        """
        m0, L0 = target.regularity()
        return cls(m0=m0, L0=L0, L_F=target.hessian_lipschitz(), **kwargs)

    def L_curve(self, t: NDArray) -> NDArray:
        """
        Vectorized {obj}`lipschitz_L` over forward times `t > 0`.
        """
        t = np.asarray(t, dtype=float)
        return np.minimum(-1.0 / np.expm1(-t), np.exp(t) * self.L0)
