from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, auto

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.grid import TimeGrid
from ..core.numerics import check_symmetric, symmetrize
from ..core.rng import SeedSpec

__all__ = [
    "SchemeKind",
    "ChainResult",
    "GaussianLaw",
]


class SchemeKind(Enum):
    """
    Discretization scheme of the backward SDE.
    """

    EM = auto()
    """Euler-Maruyama"""

    EI = auto()
    """Exponential integrator"""

    REM = auto()
    """Randomized-midpoint Euler"""

    REI = auto()
    """Randomized-midpoint exponential integrator"""

    SO = auto()
    """Second-order local linearization"""

    @classmethod
    def parse(cls, name: str) -> SchemeKind:
        """
        Look up a scheme by case-insensitive name.
        """
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(
                f"Unknown scheme {name!r}, expected one of {[s.name for s in cls]}"
            ) from None

    @property
    def calls_per_step(self) -> int:
        """
        Oracle evaluations per trajectory and step.
        """
        return 2 if self in (SchemeKind.REM, SchemeKind.REI) else 1

    @property
    def is_randomized(self) -> bool:
        return self in (SchemeKind.REM, SchemeKind.REI)


@dataclass(frozen=True)
class ChainResult:
    """
    Output of {obj}`run_batch`: the final states `ϑ_N` of all trajectories,
    ordered by trajectory index.
    """

    finals: NDArray
    scheme: SchemeKind
    grid: TimeGrid
    seed: SeedSpec
    wall_ms: float
    oracle_calls: int

    n_flagged: int = 0
    """
    Oracle evaluations flagged as unreliable along the way (e.g. Monte-Carlo
    weights with a low effective sample size).
    """

    warnings: list[str] = field(default_factory=list)

    @property
    def n_traj(self) -> int:
        return self.finals.shape[0]


class GaussianLaw:
    """
    Gaussian law `N(mean, cov)` of a chain state.
    """

    mean: NDArray
    cov: NDArray

    def __init__(self, mean: ArrayLike, cov: ArrayLike):
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        cov = np.atleast_2d(np.asarray(cov, dtype=float))

        assert cov.shape == (mean.size, mean.size), f"Shape mismatch: {cov.shape}"
        check_symmetric(cov)

        self.mean = mean
        self.cov = symmetrize(cov)

    def __repr__(self):
        return f"GaussianLaw(mean={self.mean}, cov={self.cov.tolist()})"

    @property
    def dim(self) -> int:
        return self.mean.size
