from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, ClassVar

from pydantic import BaseModel, ConfigDict, Field

from ..metrics.bounds import BoundReport
from ..targets.logistic import Dataset

__all__ = [
    "ResultRow",
    "SlopeRow",
    "SweepFit",
    "BoundRow",
    "ExperimentResult",
    "read_rows",
    "read_results",
]


class _CsvRow(BaseModel):
    """
    Flat record written as one CSV line. Floats are written with `repr` so
    that reading the file back reproduces them exactly; `None` is written
    as an empty field.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    COLUMNS: ClassVar[list[str]]

    def to_csv_dict(self, columns: list[str] | None = None) -> dict[str, str]:
        data = self.model_dump(by_alias=True)
        return {col: _format(data[col]) for col in columns or self.COLUMNS}

    @classmethod
    def from_csv_dict(cls, record: dict[str, str]) -> _CsvRow:
        return cls.model_validate(
            {k: (None if v == "" else v) for k, v in record.items()}
        )


def _format(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ResultRow(_CsvRow):
    """
    Outcome of one cell (scheme, λ or target, h) of an experiment. Cells
    which failed carry `error` and no distances.

    The score error and failure message are not part of `results.csv`;
    {obj}`emit_outputs` writes them to a sidecar read back by
    {obj}`read_results`.
    """

    COLUMNS: ClassVar[list[str]] = [
        "experiment",
        "scheme",
        "lambda",
        "h",
        "N",
        "n_traj",
        "seed",
        "w2_dim1",
        "w2_sliced",
        "w2_gauss",
        "wall_ms",
        "oracle_calls",
    ]

    DETAIL_COLUMNS: ClassVar[list[str]] = [
        "experiment",
        "scheme",
        "lambda",
        "h",
        "eps_sc",
        "error",
    ]
    """
    Columns of the `cells.csv` sidecar, line for line with `results.csv`
    """

    experiment: str
    scheme: str
    lam: float | None = Field(default=None, alias="lambda")
    h: float = Field(gt=0)
    N: int = Field(ge=0)
    n_traj: int = Field(ge=0)
    seed: int = Field(ge=0)

    w2_dim1: float | None = Field(default=None, ge=0)
    """`W2` between first coordinates of the chain output and reference"""

    w2_sliced: float | None = Field(default=None, ge=0)

    w2_gauss: float | None = Field(default=None, ge=0)
    """
    `W2` between Gaussian laws: exact for propagated laws, moment-matched
    for sampled ones.
    """

    wall_ms: float = Field(default=0.0, ge=0)
    oracle_calls: int = Field(default=0, ge=0)
    eps_sc: float = Field(default=0.0, ge=0)
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


class SlopeRow(_CsvRow):
    """
    Empirical convergence order of one scheme.
    """

    COLUMNS: ClassVar[list[str]] = [
        "experiment",
        "scheme",
        "metric",
        "slope",
        "intercept",
        "r2",
        "floor",
        "noise",
        "n_points",
    ]

    experiment: str
    scheme: str
    metric: str
    slope: float | None = None
    intercept: float | None = None
    r2: float | None = None
    floor: float = 0.0

    noise: float = 0.0
    """Sampling noise removed from the errors before fitting"""

    n_points: int = 0


class SweepFit(_CsvRow):
    """
    Affine fit of the final error against the score error of one scheme.
    """

    COLUMNS: ClassVar[list[str]] = [
        "scheme",
        "h",
        "metric",
        "slope",
        "intercept",
        "r2",
        "n_points",
    ]

    scheme: str
    h: float
    metric: str
    slope: float
    intercept: float
    r2: float
    n_points: int


class BoundRow(_CsvRow):
    """
    {obj}`BoundReport` labeled with the experiment cell it belongs to.
    """

    COLUMNS: ClassVar[list[str]] = [
        "experiment",
        "scheme",
        "lambda",
        "d",
        "h",
        "T",
        "C1",
        "C2",
        "init_term",
        "disc_term",
        "score_term",
        "total",
        "eps_target",
        "N_for_eps",
    ]

    experiment: str
    scheme: str
    lam: float | None = Field(default=None, alias="lambda")
    d: int
    h: float
    T: float
    C1: float
    C2: float
    init_term: float
    disc_term: float
    score_term: float
    total: float
    eps_target: float
    N_for_eps: int | None = None

    @classmethod
    def from_report(
        cls, experiment: str, report: BoundReport, lam: float | None = None
    ) -> BoundRow:
        data = report.model_dump(exclude={"scheme"})
        return cls(
            experiment=experiment,
            scheme=report.scheme.name,
            lam=lam,
            total=report.total,
            **data,
        )


@dataclass
class ExperimentResult:
    """
    Everything an experiment produces, ready for {obj}`emit_outputs`.
    """

    experiment: str
    rows: list[ResultRow] = field(default_factory=list)
    slopes: list[SlopeRow] = field(default_factory=list)
    bounds: list[BoundRow] = field(default_factory=list)
    sweep: list[SweepFit] = field(default_factory=list)
    datasets: dict[float, Dataset] = field(default_factory=dict)

    @property
    def n_failed(self) -> int:
        return sum(1 for row in self.rows if row.failed)


def read_rows(path: Path, row_cls: type[_CsvRow] = ResultRow) -> list[Any]:
    """
    Parse a CSV file written by {obj}`emit_outputs` back into rows.
    """
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return [row_cls.from_csv_dict(rec) for rec in csv.DictReader(fh)]


def read_results(out_dir: Path) -> list[ResultRow]:
    """
    Read `results.csv` of an output directory back into rows, completed by
    the `cells.csv` sidecar when present.
    """
    out_dir = Path(out_dir)
    rows = _read_records(out_dir / "results.csv")

    details = out_dir / "cells.csv"
    if details.exists():
        extra = _read_records(details)
        assert len(extra) == len(rows), f"{details} does not match results.csv"
        rows = [row | more for row, more in zip(rows, extra)]

    return [ResultRow.from_csv_dict(rec) for rec in rows]


def _read_records(path: Path) -> list[dict[str, str]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))
