"""
Writing experiment results: CSV tables, the convergence figure and run
metadata.
"""

from __future__ import annotations

import csv
import json
import logging
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from ..core.exceptions import OutputError
from .config import ExperimentConfig
from .results import ExperimentResult, ResultRow, _CsvRow

__all__ = [
    "emit_outputs",
    "plot_convergence",
    "OPEN_CHOICES",
]

OPEN_CHOICES = {
    "h_list": "0.4, 0.2, 0.1, 0.05, 0.025 unless overridden",
    "sample_counts": "n_traj chains per cell against n_reference MALA draws",
    "error_axis": "w2_dim1 is the empirical W2 of the first coordinate",
    "labels": "y = +1 with probability sigmoid(x . theta_star)",
    "reference_sampler": "MALA with step adapted during burn-in",
    "rem_noise": "sqrt(h U) midpoint and sqrt(h) full-step noise scales",
    "rng_streams": "one stream per trajectory, independent of block size",
    "score_corruption": "fixed direction per oracle, shared by all sweep levels",
    "order_noise": "REM/REI fits remove the w2_dim1 of exact samples in quadrature",
}
"""
Choices made where the experiment description leaves freedom, recorded in
`metadata.json`.
"""


def _package_version() -> str:
    try:
        return version("diffusion-bench")
    except PackageNotFoundError:
        return "unknown"


def _write_csv(path: Path, rows: list[_CsvRow], columns: list[str] | None = None):
    columns = columns or type(rows[0]).COLUMNS

    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow(row.to_csv_dict(columns))
    except OSError as e:
        raise OutputError(path, e) from e

    logging.info(f"Wrote {len(rows)} row(s) to {path}")


def plot_convergence(rows: list[ResultRow], path: Path):
    """
    Plot `w2_dim1` against `h` on log-log axes, one panel per λ (or a
    single panel for experiments without λ) and one line per scheme.
    """
    rows = [r for r in rows if not r.failed and r.w2_dim1]
    panels = sorted({r.lam for r in rows}, key=lambda lam: (lam is None, lam))
    schemes = list(dict.fromkeys(r.scheme for r in rows))

    plt.rcParams["svg.hashsalt"] = "diffusion-bench"

    fig, axes = plt.subplots(
        1, max(1, len(panels)), figsize=(4.5 * max(1, len(panels)), 4), squeeze=False
    )

    for ax, lam in zip(axes[0], panels):
        for scheme in schemes:
            cell = sorted(
                (r for r in rows if r.lam == lam and r.scheme == scheme),
                key=lambda r: r.h,
            )
            if len(cell):
                ax.plot(
                    [r.h for r in cell],
                    [r.w2_dim1 for r in cell],
                    marker="o",
                    label=scheme,
                )

        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("h")
        ax.set_ylabel("W2 (first coordinate)")
        ax.set_title(f"lambda = {lam:g}" if lam is not None else "")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()

    fig.tight_layout()

    try:
        fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as e:
        raise OutputError(path, e) from e
    finally:
        plt.close(fig)

    logging.info(f"Wrote {path}")


def emit_outputs(result: ExperimentResult, cfg: ExperimentConfig) -> list[Path]:
    """
    Write the results of an experiment into `cfg.out_dir`:

    - `results.csv`: one line per cell
    - `cells.csv`: score error and failure message of each cell, in the
      order of `results.csv`
    - `slopes.csv`: fitted orders, if any
    - `score_sweep.csv`: affine fits of the score sweep, if any
    - `bounds.csv`: bound reports, if any
    - `figure1.svg`: convergence curves
    - `dataset_lambda{λ}.csv`: generated datasets
    - `metadata.json`: resolved configuration and recorded choices

    :returns: Paths written
    :raises OutputError: If there are no rows, or on I/O failure; nothing is written for empty results
    """
    out_dir = Path(cfg.out_dir)

    if not len(result.rows):
        raise OutputError(out_dir, ValueError("no result rows to write"))

    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(out_dir, e) from e

    written: list[Path] = []

    def emit(name: str, rows: list, columns: list[str] | None = None):
        if len(rows):
            path = out_dir / name
            _write_csv(path, rows, columns)
            written.append(path)

    emit("results.csv", result.rows)
    emit("cells.csv", result.rows, ResultRow.DETAIL_COLUMNS)
    emit("slopes.csv", result.slopes)
    emit("score_sweep.csv", result.sweep)
    emit("bounds.csv", result.bounds)

    figure = out_dir / "figure1.svg"
    plot_convergence(result.rows, figure)
    written.append(figure)

    for lam, dataset in result.datasets.items():
        path = out_dir / f"dataset_lambda{lam:g}.csv"
        try:
            dataset.to_csv(path)
        except OSError as e:
            raise OutputError(path, e) from e
        written.append(path)

    metadata = {
        "package": "diffusion-bench",
        "version": _package_version(),
        "experiment": result.experiment,
        "config": cfg.model_dump(mode="json"),
        "choices": OPEN_CHOICES,
        "n_rows": len(result.rows),
        "n_failed": result.n_failed,
    }

    path = out_dir / "metadata.json"
    try:
        path.write_text(json.dumps(metadata, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(path, e) from e
    written.append(path)

    return written
