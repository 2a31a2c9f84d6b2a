"""
Leading-order terms of the `W2` convergence bounds of each scheme.

Every bound has the shape
`e^{-m_min T}‖X₀‖ + 𝒞₁·(discretization rate) + 𝒞₂·(score error)` with
constants omitted, so the reported terms are order-level guides rather
than certified upper bounds.
"""

from __future__ import annotations

import logging
import math

from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import brentq

from ..core.exceptions import BoundError
from ..samplers.types import SchemeKind
from .regularity import RegularityConstants

__all__ = [
    "BoundReport",
    "theorem_bound",
    "scheme_constants",
    "DEFAULT_EPS_TARGET",
]

DEFAULT_EPS_TARGET = 0.1
"""
Accuracy for which {obj}`BoundReport.N_for_eps` is computed by default.
"""


class BoundReport(BaseModel):
    """
    Terms of the convergence bound of one scheme at one `(d, h, T)`.
    """

    model_config = ConfigDict(frozen=True)

    scheme: SchemeKind
    d: int = Field(ge=1)
    h: float = Field(gt=0)
    T: float = Field(gt=0)

    C1: float = Field(ge=0)
    C2: float = Field(ge=0)

    init_term: float = Field(ge=0)
    """`e^{-m_min T}‖X₀‖_{L2}`"""

    disc_term: float = Field(ge=0)
    score_term: float = Field(ge=0)

    eps_target: float = Field(default=DEFAULT_EPS_TARGET, gt=0)

    N_for_eps: int | None = None
    """
    Number of steps after which the bound drops to `eps_target`, or `None`
    if the score error alone prevents it.
    """

    @property
    def total(self) -> float:
        return self.init_term + self.disc_term + self.score_term


def scheme_constants(
    scheme: SchemeKind, rc: RegularityConstants, d: int, h: float
) -> tuple[float, float]:
    """
    Return `(𝒞₁, 𝒞₂)` of a scheme.

    :raises BoundError: If `m_min ≤ ½`, where the bounds are vacuous
    """
    gap = rc.m_min - 0.5
    if gap <= 0:
        raise BoundError(
            f"Bounds need m_min > 1/2, got m_min={rc.m_min}: the contraction "
            f"rate m_min - 1/2 of the backward process is not positive"
        )

    L_max = rc.L_max

    match scheme:
        case SchemeKind.EM:
            return (L_max + 0.5) / gap, 1.0 / gap
        case SchemeKind.EI:
            return L_max / gap, 1.0 / gap
        case SchemeKind.REM:
            C1 = (math.sqrt(d / 3.0) * L_max + 0.5 / math.sqrt(3.0)) / gap
            return C1, 3.0 / gap
        case SchemeKind.REI:
            return L_max / (math.sqrt(3.0) * gap), 3.0 / gap
        case SchemeKind.SO:
            growth = math.exp((L_max - 0.5) * h)
            C1 = growth * (math.sqrt(d) * L_max**1.5 + 1.5 * d * rc.L_F) / gap
            return C1, growth / gap


def _disc_term(scheme: SchemeKind, C1: float, d: int, h: float) -> float:
    match scheme:
        case SchemeKind.SO:
            return C1 * h
        case SchemeKind.REM:
            # C1 already carries the dimension
            return C1 * math.sqrt(h)
        case _:
            return C1 * math.sqrt(d * h)


def _score_error(
    scheme: SchemeKind, h: float, eps_sc: float, eps_L: float, eps_M: float
) -> float:
    if scheme is SchemeKind.SO:
        return eps_sc + (2.0 / 3.0) * math.sqrt(h) * eps_L + 0.5 * h * eps_M
    return eps_sc


def _steps_for_eps(
    scheme: SchemeKind,
    rc: RegularityConstants,
    d: int,
    eps: float,
    eps_sc: float,
    eps_L: float,
    eps_M: float,
    X0_norm: float,
) -> int | None:
    """
    Invert the bound: pick `T` so the initialization term is `ε/3` and the
    largest `h` keeping discretization plus score terms within `2ε/3`.
    """
    budget = 2.0 * eps / 3.0

    def excess(h: float) -> float:
        C1, C2 = scheme_constants(scheme, rc, d, h)
        return (
            _disc_term(scheme, C1, d, h)
            + C2 * _score_error(scheme, h, eps_sc, eps_L, eps_M)
            - budget
        )

    if excess(1e-300) >= 0:
        logging.warning(
            f"{scheme.name}: score error alone exceeds the accuracy budget "
            f"for eps={eps}; no step count attains it"
        )
        return None

    h_hi = 1.0
    while excess(h_hi) < 0 and h_hi < 1e6:
        h_hi *= 2.0

    h_eps = h_hi if excess(h_hi) < 0 else brentq(excess, 1e-300, h_hi)

    T_eps = max(math.log(3.0 * X0_norm / eps) / rc.m_min, h_eps)
    return max(1, math.ceil(T_eps / h_eps))


def theorem_bound(
    scheme: SchemeKind,
    rc: RegularityConstants,
    d: int,
    h: float,
    T: float,
    eps_sc: float = 0.0,
    eps_L: float = 0.0,
    eps_M: float = 0.0,
    X0_norm: float = 1.0,
    eps_target: float = DEFAULT_EPS_TARGET,
) -> BoundReport:
    """
    Evaluate the bound terms of `scheme`:

    - `init_term = e^{-m_min T}·X0_norm`
    - `disc_term = 𝒞₁√(dh)` for EM, EI and REI; `𝒞₁(d)√h` for REM;
      `𝒞₁(d)h` for SO
    - `score_term = 𝒞₂·ε_sc` for the first-order schemes and
      `𝒞₂·(ε_sc + ⅔√h·ε_L + ½h·ε_M)` for SO

    :param scheme: Scheme to evaluate
    :param rc: Regularity constants of `p₀`
    :param d: Dimension
    :param h: Step size
    :param T: Horizon
    :param eps_sc: `L2` error of the score
    :param eps_L: `L2` error of `L` (SO only)
    :param eps_M: `L2` error of `M` (SO only)
    :param X0_norm: `‖X₀‖_{L2}` under `p₀`
    :param eps_target: Accuracy for {obj}`BoundReport.N_for_eps`
    :raises BoundError: If `m_min ≤ ½`
    """
    assert d >= 1 and h > 0 and T > 0
    assert min(eps_sc, eps_L, eps_M, X0_norm) >= 0

    C1, C2 = scheme_constants(scheme, rc, d, h)

    if scheme is SchemeKind.SO and rc.M2 == 0:
        logging.warning("M2 not supplied: higher-order terms of SO bound omitted")
    elif scheme is not SchemeKind.SO and rc.M1 == 0:
        logging.warning(
            f"M1 not supplied: higher-order terms of {scheme.name} bound omitted"
        )

    return BoundReport(
        scheme=scheme,
        d=d,
        h=h,
        T=T,
        C1=C1,
        C2=C2,
        init_term=math.exp(-rc.m_min * T) * X0_norm,
        disc_term=_disc_term(scheme, C1, d, h),
        score_term=C2 * _score_error(scheme, h, eps_sc, eps_L, eps_M),
        eps_target=eps_target,
        N_for_eps=_steps_for_eps(
            scheme, rc, d, eps_target, eps_sc, eps_L, eps_M, X0_norm
        ),
    )
