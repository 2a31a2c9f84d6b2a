import importlib
from pathlib import Path

from pytest import raises

from diffusion_bench import *

cli = importlib.import_module("diffusion_bench.tools.cli.__main__")


def test_order(out_dir: Path, capsys):
    code = cli.main(
        [
            "order",
            "--schemes",
            "EM,EI",
            "--h-list",
            "0.4,0.2,0.1",
            "--out",
            str(out_dir),
            "-q",
        ]
    )

    assert code == 0
    assert len(read_rows(out_dir / "results.csv")) == 6
    assert (out_dir / "slopes.csv").exists()
    assert str(out_dir / "metadata.json") in capsys.readouterr().out


def test_config_error(out_dir: Path, capsys):
    code = cli.main(["order", "--h-list", "0.1,0.2", "--out", str(out_dir)])

    assert code == 2
    assert "h_list" in capsys.readouterr().err
    assert not out_dir.exists()


def test_bad_number():
    with raises(SystemExit) as e:
        cli.main(["order", "--h-list", "0.1,abc"])

    assert e.value.code == 2


def test_config_file(tmp_path: Path, out_dir: Path):
    path = tmp_path / "order.toml"
    path.write_text(
        "\n".join(
            [
                'schemes = ["SO"]',
                "h_list = [0.5, 0.25]",
                "T = 4.0",
                f'out_dir = "{out_dir.as_posix()}"',
            ]
        )
    )

    assert cli.main(["order", "--config", str(path)]) == 0

    rows = read_rows(out_dir / "results.csv")
    assert [(r.scheme, r.h) for r in rows] == [("SO", 0.25), ("SO", 0.5)]


def test_failed_cells(monkeypatch, out_dir: Path):
    def run(cfg: ExperimentConfig) -> ExperimentResult:
        row = ResultRow(
            experiment=cfg.experiment,
            scheme="EM",
            h=0.1,
            N=100,
            n_traj=0,
            seed=0,
            error="diverged",
        )
        return ExperimentResult(cfg.experiment, rows=[row])

    monkeypatch.setattr(cli, "run_experiment", run)

    assert cli.main(["figure1", "--out", str(out_dir)]) == 1
    assert (out_dir / "results.csv").exists()


def test_selftest_status(monkeypatch, capsys):
    def run(passed: bool):
        return lambda cfg: [CheckResult("stub", passed, "", 0.0)]

    monkeypatch.setattr(cli, "self_test", run(False))
    assert cli.main(["selftest"]) == 1
    assert "0/1 checks passed" in capsys.readouterr().out

    monkeypatch.setattr(cli, "self_test", run(True))
    assert cli.main(["selftest"]) == 0


def test_rerun_identical(tmp_path: Path):
    path = tmp_path / "scores.toml"
    path.write_text(
        "\n".join(
            [
                'schemes = ["EM", "REI"]',
                "sweep_eps = [0.0, 0.1]",
                "sweep_h = 0.25",
                "h_list = [0.5, 0.25]",
                "T = 2.0",
                "n_traj = 300",
            ]
        )
    )

    for name in ("a", "b"):
        out = tmp_path / name
        assert cli.main(["scores", "--config", str(path), "--out", str(out), "-q"]) == 0

    for file in ("results.csv", "cells.csv", "score_sweep.csv", "bounds.csv"):
        first = (tmp_path / "a" / file).read_bytes()
        assert first == (tmp_path / "b" / file).read_bytes(), file
