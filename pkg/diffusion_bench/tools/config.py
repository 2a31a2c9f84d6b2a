"""
Experiment configuration: TOML file plus command-line overrides, validated
into an {obj}`ExperimentConfig`.
"""

from __future__ import annotations

import tomllib
from pathlib import Path
from typing import Any, Literal

import pydantic
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    field_serializer,
    field_validator,
    model_validator,
)

from ..core.exceptions import ConfigError
from ..core.rng import U64_MAX
from ..oracles.corruption import CorruptionSpec
from ..samplers.types import SchemeKind
from ..targets.mala import MalaConfig

__all__ = [
    "ExperimentKind",
    "ExperimentConfig",
    "parse_config",
]

ExperimentKind = Literal["figure1", "order_study", "score_sweep", "self_test"]


class ExperimentConfig(BaseModel):
    """
    Settings of one experiment run. Defaults reproduce the logistic
    regression study at desk scale.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    experiment: ExperimentKind = "figure1"

    lambda_list: list[float] = Field(default=[10.0, 50.0, 100.0], min_length=1)
    """Ridge parameters of the logistic posteriors"""

    d: int = Field(default=2, ge=1)
    n_data: int = Field(default=100, ge=1)

    sigma2: float = Field(default=100.0, gt=0)
    """Variance of the synthetic features"""

    theta_star: list[float] | None = None
    """Planted parameter of the labels; all-ones over `√d` if unset"""

    T: float = Field(default=10.0, gt=0)

    h_list: list[float] = Field(
        default=[0.4, 0.2, 0.1, 0.05, 0.025], min_length=1
    )
    """Step sizes, strictly decreasing"""

    schemes: list[SchemeKind] = Field(
        default=list(SchemeKind), min_length=1
    )

    n_traj: int = Field(default=2000, ge=1)
    """Trajectories per cell of the logistic study and score sweep"""

    n_traj_order: int = Field(default=100_000, ge=1)
    """Trajectories per cell of the order study (randomized schemes only)"""

    n_reference: int = Field(default=10_000, ge=1)
    """Ground-truth MALA samples per posterior"""

    mc_particles: int = Field(default=10_000, ge=100)
    """Particles of the Monte-Carlo score oracle"""

    n_proj: int = Field(default=50, ge=1)
    """Directions of the sliced `W2`"""

    mala: MalaConfig = MalaConfig(n_chains=20)
    """Reference sampler settings; `n_samples` is set per use"""

    corruption: CorruptionSpec = CorruptionSpec()

    order_mean: float = 2.0
    """Order-study target `N(order_mean·1, order_variance·I)`"""

    order_variance: float = Field(default=0.25, gt=0)

    sweep_eps: list[float] = Field(default=[0.0, 0.05, 0.1, 0.2], min_length=2)
    """Score-error levels of the score sweep"""

    sweep_h: float = Field(default=0.05, gt=0)

    sweep_mean: float = 2.0
    """Score-sweep target `N(sweep_mean·1, sweep_variance·I)`"""

    sweep_variance: float = Field(default=1.0, gt=0)

    n_noise_draws: int = Field(default=4, ge=0)
    """
    Exact samples used to estimate the sampling noise of `w2_dim1` in the
    order study, removed before fitting the orders of randomized schemes
    """

    master_seed: int = Field(default=0, ge=0, le=U64_MAX)

    out_dir: Path = Path("results")

    record_timing: bool = False
    """
    Whether to write wall-clock times into `results.csv`. Runs with the
    same settings write identical bytes only while this is unset.
    """

    @field_validator("schemes", mode="before")
    @classmethod
    def _parse_schemes(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = value.split(",")
        if isinstance(value, (list, tuple)):
            return [
                SchemeKind.parse(v) if isinstance(v, str) else v for v in value
            ]
        return value

    @field_validator("h_list")
    @classmethod
    def _check_h_list(cls, value: list[float]) -> list[float]:
        if any(h <= 0 for h in value):
            raise ValueError("step sizes must be positive")
        if any(a <= b for a, b in zip(value, value[1:])):
            raise ValueError("step sizes must be strictly decreasing")
        return value

    @field_validator("lambda_list")
    @classmethod
    def _check_lambdas(cls, value: list[float]) -> list[float]:
        if any(lam <= 0 for lam in value):
            raise ValueError("ridge parameters must be positive")
        return value

    @field_validator("sweep_eps")
    @classmethod
    def _check_sweep(cls, value: list[float]) -> list[float]:
        if any(eps < 0 for eps in value):
            raise ValueError("score errors must be non-negative")
        return value

    @model_validator(mode="after")
    def _check_horizon(self) -> ExperimentConfig:
        if self.T <= max(self.h_list):
            raise ValueError(
                f"T={self.T} must exceed the largest step size {max(self.h_list)}"
            )
        if self.theta_star is not None and len(self.theta_star) != self.d:
            raise ValueError(f"theta_star must have {self.d} entries")
        return self

    @field_serializer("schemes")
    def _dump_schemes(self, value: list[SchemeKind]) -> list[str]:
        return [s.name for s in value]


def parse_config(
    file: Path | None = None, overrides: dict[str, Any] | None = None
) -> ExperimentConfig:
    """
    Read a TOML config file (keys are {obj}`ExperimentConfig` fields) and
    apply overrides on top. Overrides set to `None` are ignored.

    :param file: Config file, or `None` for defaults
    :param overrides: Field values taking precedence over the file
    :raises ConfigError: With one message per invalid or unknown field
    """
    data: dict[str, Any] = {}

    if file is not None:
        try:
            with Path(file).open("rb") as fh:
                data = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as e:
            raise ConfigError([f"{file}: {e}"]) from e

    data.update({k: v for k, v in (overrides or {}).items() if v is not None})

    try:
        return ExperimentConfig.model_validate(data)
    except pydantic.ValidationError as e:
        errors = [
            f"{'.'.join(str(loc) for loc in err['loc']) or '<config>'}: {err['msg']}"
            for err in e.errors()
        ]
        raise ConfigError(errors) from e
