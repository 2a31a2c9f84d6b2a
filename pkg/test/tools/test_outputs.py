import json
from pathlib import Path

from pytest import raises

from diffusion_bench import *


def make_result() -> ExperimentResult:
    rows = [
        ResultRow(
            experiment="figure1",
            scheme=scheme,
            lam=lam,
            h=h,
            N=round(10 / h),
            n_traj=100,
            seed=0,
            w2_dim1=h * (2.0 if scheme == "EM" else 1.0) / lam,
            w2_sliced=h,
        )
        for lam in (10.0, 50.0)
        for scheme in ("EM", "SO")
        for h in (0.4, 0.2, 0.1)
    ]
    return ExperimentResult("figure1", rows=rows)


def test_emit(out_dir: Path):
    result = make_result()
    written = emit_outputs(result, ExperimentConfig(out_dir=out_dir))

    names = {path.name for path in written}
    assert names == {"results.csv", "cells.csv", "figure1.svg", "metadata.json"}

    lines = (out_dir / "results.csv").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 13
    assert lines[0] == ",".join(ResultRow.COLUMNS)

    assert read_rows(out_dir / "results.csv") == result.rows
    assert read_results(out_dir) == result.rows

    svg = (out_dir / "figure1.svg").read_text(encoding="utf-8")
    assert "<svg" in svg

    metadata = json.loads((out_dir / "metadata.json").read_text(encoding="utf-8"))
    assert metadata["experiment"] == "figure1"
    assert metadata["n_rows"] == 12
    assert metadata["config"]["out_dir"] == str(out_dir)
    assert set(metadata["choices"]) == set(OPEN_CHOICES)


def test_optional_tables(out_dir: Path, dataset: Dataset):
    result = make_result()
    result.slopes.append(
        SlopeRow(
            experiment="figure1",
            scheme="EM",
            metric="w2_dim1",
            slope=1.0,
            intercept=0.0,
            r2=1.0,
            n_points=3,
        )
    )
    result.datasets[10.0] = dataset

    emit_outputs(result, ExperimentConfig(out_dir=out_dir))

    slopes = read_rows(out_dir / "slopes.csv", SlopeRow)
    assert slopes == result.slopes
    assert Dataset.from_csv(out_dir / "dataset_lambda10.csv").n_data == 100
    assert not (out_dir / "bounds.csv").exists()


def test_details_sidecar(out_dir: Path):
    result = make_result()
    result.rows[0] = result.rows[0].model_copy(
        update={"w2_dim1": None, "w2_sliced": None, "error": "diverged"}
    )
    result.rows[1] = result.rows[1].model_copy(update={"eps_sc": 0.1})

    emit_outputs(result, ExperimentConfig(out_dir=out_dir))

    header = (out_dir / "results.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header.split(",") == ResultRow.COLUMNS
    assert "error" not in header

    assert read_results(out_dir) == result.rows
    assert read_results(out_dir)[0].failed


def test_rerun_identical(tmp_path: Path):
    # default settings, including whether timings are recorded
    cfg = ExperimentConfig(
        experiment="order_study",
        schemes=["EM", "REM"],
        h_list=[0.5, 0.25],
        T=2.0,
        n_traj_order=500,
        n_noise_draws=1,
    )

    for name in ("a", "b"):
        run = cfg.model_copy(update={"out_dir": tmp_path / name})
        emit_outputs(run_experiment(run), run)

    for file in ("results.csv", "cells.csv", "slopes.csv", "figure1.svg"):
        first = (tmp_path / "a" / file).read_bytes()
        assert first == (tmp_path / "b" / file).read_bytes(), file


def test_empty(out_dir: Path):
    with raises(OutputError):
        emit_outputs(ExperimentResult("figure1"), ExperimentConfig(out_dir=out_dir))

    assert not out_dir.exists()
