from __future__ import annotations

import logging
import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .exceptions import TimeGridError

__all__ = [
    "TimeGrid",
    "build_time_grid",
]


class TimeGrid(BaseModel):
    """
    Clock shared by every scheme: horizon `T` split into `N` steps of size
    `h`. Use {obj}`build_time_grid` to construct one from a horizon and step
    size.

    A grid with `N = 0` is allowed and means "initialize only": the chain
    is drawn from the initialization law at horizon `T` and not stepped.
    """

    model_config = ConfigDict(frozen=True)

    T: float = Field(gt=0)
    """Horizon"""

    h: float = Field(gt=0)
    """Step size"""

    N: int = Field(ge=0)
    """Number of steps"""

    @model_validator(mode="after")
    def _check_consistent(self) -> TimeGrid:
        if self.N > 0 and abs(self.T - self.N * self.h) > 1e-12 * self.T:
            raise ValueError(
                f"Inconsistent grid: T={self.T} but N*h={self.N * self.h}"
            )
        return self

    def forward_time(self, n: int, u=0.0):
        """
        Forward-process time `T - (n+u)h` at which the backward chain queries
        the score during step `n`. `u` may be an array of per-trajectory
        midpoint fractions.
        """
        return self.T - (n + u) * self.h


def build_time_grid(T: float, h: float) -> TimeGrid:
    """
    Build a grid with `T = N*h`. If `T` is not a multiple of `h`, `N` is the
    floor of `T/h` and the horizon is shortened to `N*h`.

    :param T: Requested horizon
    :param h: Step size
    """
    if not (T > 0 and h > 0):
        raise TimeGridError(f"Need T > 0 and h > 0, got T={T}, h={h}")
    if h > T:
        raise TimeGridError(f"Step size h={h} exceeds horizon T={T}")

    if abs(T - round(T / h) * h) <= 1e-9 * T:
        N = math.floor(T / h + 0.5)

        # absorb rounding noise into h so that T stays as requested
        if abs(T - N * h) > 1e-12 * T:
            h = T / N

        return TimeGrid(T=T, h=h, N=N)

    N = math.floor(T / h)
    T_adjusted = N * h
    logging.warning(
        f"T={T} is not a multiple of h={h}: using N={N}, T={T_adjusted}"
    )
    return TimeGrid(T=T_adjusted, h=h, N=N)
